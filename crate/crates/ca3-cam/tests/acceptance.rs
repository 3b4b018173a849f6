//! The acceptance gate: one test per shipping criterion, each printing a
//! single `[PASS]`/`[FAIL]` verdict line. Run with
//! `cargo test -p ca3-cam --test acceptance -- --nocapture` to see the
//! verdicts of passing criteria too.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ca3_cam::gridmap::{reference_scenario, run_scenario, GridConfig};
use ca3_cam::testbench::{demo_requests, run_memtest, run_operation_demo, run_random_stress};
use ca3_cam::{
    compile, CamConfig, CamNetwork, CamParams, CamSession, Outcome, TimingContract,
    CONTENT_TO_CUE, CUE_TO_CONTENT,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snn_core::{
    reference, ConnectivityPattern, Network, NeuronParams, PlasticProjection, PopulationSpec,
    StaticProjection, StdpRule, StimulusSchedule,
};

fn pass(criterion: usize, detail: String) {
    println!("[PASS] criterion {criterion}: {detail}");
}

fn gate(criterion: usize, ok: bool, detail: &str) {
    if !ok {
        println!("[FAIL] criterion {criterion}: {detail}");
        panic!("criterion {criterion}: {detail}");
    }
}

fn bits(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

#[test]
fn criterion_1_demo_replays_the_frozen_trace() {
    let t0 = Instant::now();
    let report = run_operation_demo(CamParams::default()).unwrap();
    let elapsed = t0.elapsed();
    gate(
        1,
        report.passed(),
        &format!(
            "demo deviated from the frozen trace:\n{}",
            report.mismatches.join("\n")
        ),
    );
    gate(
        1,
        elapsed < Duration::from_secs(1),
        &format!("demo took {elapsed:?}, budget is 1s"),
    );
    let recall_of_0 = &report.results[3].outcome;
    gate(
        1,
        *recall_of_0
            == Outcome::RecalledByCue {
                cue: 0,
                content: bits(&[0, 1, 8, 9]),
            },
        &format!("recall of cue 0 came back as {recall_of_0:?}"),
    );
    pass(
        1,
        format!(
            "9-operation demo matches all {} frozen spikes, ran in {elapsed:?}",
            report.raster.len()
        ),
    );
}

#[test]
fn criterion_2_sweep_test_covers_every_line() {
    let report = run_memtest(&CamConfig::new(5, 10)).unwrap();
    gate(
        2,
        report.passed(),
        &format!("sweep mismatches:\n{}", report.mismatches.join("\n")),
    );
    let counts = (
        report.learns,
        report.forgetting_learns,
        report.recalls_by_cue,
        report.recalls_by_content,
    );
    gate(
        2,
        counts == (15, 10, 15, 30),
        &format!("operation counts (learn, forgetting, by cue, by content) were {counts:?}"),
    );
    gate(
        2,
        report.sweeps[0].by_cue[2] == bits(&[0, 1]),
        &format!("first sweep recall of cue 2 was {:?}", report.sweeps[0].by_cue[2]),
    );
    gate(
        2,
        report.sweeps[0].by_content[0] == bits(&[0, 2, 4]),
        &format!(
            "first sweep recall of bit 0 was {:?}",
            report.sweeps[0].by_content[0]
        ),
    );
    gate(
        2,
        report.sweeps[2].by_cue == report.sweeps[0].by_cue
            && report.sweeps[2].by_content == report.sweeps[0].by_content,
        "third sweep readouts differ from the first sweep's",
    );
    gate(
        2,
        report.total_steps <= 851,
        &format!("sweep test needed {} steps, budget is 851", report.total_steps),
    );
    pass(
        2,
        format!(
            "3 sweeps over 5 cues, 60 operations in {} steps (budget 851), third sweep restores the first",
            report.total_steps
        ),
    );
}

#[test]
fn criterion_3_mapping_scenario_answers_on_schedule() {
    let outcome = run_scenario(GridConfig::default(), &reference_scenario()).unwrap();
    gate(
        3,
        outcome.observation_end == 112,
        &format!("observations settled at step {}", outcome.observation_end),
    );
    let expected: [BTreeSet<usize>; 4] = [
        bits(&[2, 6, 10, 12, 13, 14]),
        bits(&[3, 5, 11, 15]),
        bits(&[1, 7, 9]),
        bits(&[0, 4, 8]),
    ];
    for (i, (got, want)) in outcome.answers.iter().zip(&expected).enumerate() {
        gate(
            3,
            got == want,
            &format!("query {i} answered {got:?}, expected {want:?}"),
        );
    }
    gate(
        3,
        outcome.final_step == 136,
        &format!("final answer landed at step {}", outcome.final_step),
    );
    pass(
        3,
        "16 observations settle by step 112, all four queries answered exactly, last answer at step 136".to_string(),
    );
}

#[test]
fn criterion_4_randomized_runs_match_the_table_oracle() {
    let geometries = [(5, 10), (8, 8), (16, 6), (12, 24), (32, 32)];
    let t0 = Instant::now();
    let mut total_ops = 0;
    let mut seeds = 0;
    for (g, &(cues, nbits)) in geometries.iter().enumerate() {
        for run in 0..4u64 {
            let seed = 7919 * (g as u64 + 1) + run;
            let report = run_random_stress(seed, 1000, &CamConfig::new(cues, nbits)).unwrap();
            gate(
                4,
                report.passed(),
                &format!(
                    "seed {seed} on {cues}x{nbits} diverged: {}",
                    report.divergences.first().map(String::as_str).unwrap_or("")
                ),
            );
            total_ops += report.ops_run;
            seeds += 1;
        }
    }
    let elapsed = t0.elapsed();
    gate(
        4,
        elapsed < Duration::from_secs(60),
        &format!("stress runs took {elapsed:?}, budget is 60s"),
    );
    pass(
        4,
        format!(
            "{total_ops} operations over {seeds} seeds and {} geometries up to 32x32, zero divergences, {elapsed:?}",
            geometries.len()
        ),
    );
}

/// A small random network on exact-arithmetic parameter lattices, plus the
/// facts the invariant checks need about it.
struct RandomNet {
    pops: Vec<PopulationSpec>,
    statics: Vec<StaticProjection>,
    plastics: Vec<PlasticProjection>,
    schedule: StimulusSchedule,
    until: usize,
    lifs: Vec<(String, usize, usize)>,
}

fn random_pattern(rng: &mut ChaCha8Rng, pre_size: usize, post_size: usize) -> ConnectivityPattern {
    loop {
        match rng.gen_range(0..5) {
            0 => return ConnectivityPattern::AllToAll { include_self: rng.gen_bool(0.5) },
            1 => {
                let cap = (pre_size * post_size).min(10);
                let want = rng.gen_range(1..=cap);
                let mut set = BTreeSet::new();
                while set.len() < want {
                    set.insert((rng.gen_range(0..pre_size), rng.gen_range(0..post_size)));
                }
                return ConnectivityPattern::ExplicitPairs(set.into_iter().collect());
            }
            2 if pre_size == post_size => return ConnectivityPattern::OneToOne,
            3 if post_size == 1 => return ConnectivityPattern::AllToOne,
            4 if pre_size == 1 => return ConnectivityPattern::OneToAll,
            _ => continue,
        }
    }
}

fn random_net(rng: &mut ChaCha8Rng) -> RandomNet {
    let pick = |rng: &mut ChaCha8Rng, xs: &[f64]| xs[rng.gen_range(0..xs.len())];
    let src_size = rng.gen_range(1..=4);
    let mut pops = vec![PopulationSpec::source("P0", src_size)];
    let mut sizes = vec![src_size];
    let mut lifs = Vec::new();
    for i in 0..rng.gen_range(1..=3) {
        let name = format!("P{}", i + 1);
        let size = rng.gen_range(1..=5);
        let params = NeuronParams {
            threshold: pick(rng, &[0.5, 1.0, 2.0]),
            decay: pick(rng, &[0.0, 0.25, 0.5, 1.0]),
            refractory_steps: rng.gen_range(0..=2),
            reset_potential: 0.0,
            floor_potential: pick(rng, &[0.0, -1.0]),
        };
        lifs.push((name.clone(), size, params.refractory_steps));
        sizes.push(size);
        pops.push(PopulationSpec::lif(name, size, params));
    }
    let n = sizes.len();
    let statics = (0..rng.gen_range(0..=6))
        .map(|_| {
            let pre = rng.gen_range(0..n);
            let post = rng.gen_range(1..n);
            StaticProjection::new(
                format!("P{pre}"),
                format!("P{post}"),
                random_pattern(rng, sizes[pre], sizes[post]),
                f64::from(rng.gen_range(-8i32..=8)) * 0.25,
                rng.gen_range(1..=3),
            )
        })
        .collect();
    let plastics = (0..rng.gen_range(0..=2))
        .map(|k| {
            let rule = StdpRule {
                a_plus: pick(rng, &[0.25, 0.5]),
                a_minus: pick(rng, &[0.25, 0.5, 1.0]),
                w_init: pick(rng, &[0.0, 0.25, 0.5]),
                w_min: 0.0,
                w_max: pick(rng, &[1.0, 1.25]),
                depression_window: rng.gen_range(1..=4),
            };
            PlasticProjection::new(
                format!("W{k}"),
                format!("P{}", rng.gen_range(0..n)),
                format!("P{}", rng.gen_range(1..n)),
                rng.gen_range(1..=3),
                rule,
            )
        })
        .collect();
    let until = rng.gen_range(10..=50);
    let mut schedule = StimulusSchedule::new();
    for _ in 0..rng.gen_range(1..=40) {
        schedule.fire(rng.gen_range(0..=until), "P0", [rng.gen_range(0..src_size)]);
    }
    RandomNet {
        pops,
        statics,
        plastics,
        schedule,
        until,
        lifs,
    }
}

impl RandomNet {
    fn build(&self) -> Network {
        Network::build(
            self.pops.clone(),
            self.statics.clone(),
            self.plastics.clone(),
        )
        .expect("generated networks are valid by construction")
    }
}

#[test]
fn criterion_5_kernel_invariants_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let mut total_events = 0usize;
    for case in 0..200 {
        let net = random_net(&mut rng);
        let ctx = format!("random network {case}");

        // Step the kernel by hand so weights can be watched on every step.
        let mut kernel = net.build();
        kernel.schedule(&net.schedule).unwrap();
        while kernel.now() <= net.until {
            kernel.step();
            for plastic in &net.plastics {
                let w = kernel.weights(&plastic.id).unwrap();
                let in_bounds = w
                    .iter()
                    .flatten()
                    .all(|&x| (plastic.rule.w_min..=plastic.rule.w_max).contains(&x));
                gate(
                    5,
                    in_bounds,
                    &format!("{ctx}: weights of {} left their bounds", plastic.id),
                );
            }
        }
        let raster = kernel.raster();
        total_events += raster.len();

        let expected = reference::simulate(
            &net.pops,
            &net.statics,
            &net.plastics,
            &net.schedule,
            net.until,
        );
        let actual: Vec<(usize, String, usize)> = raster
            .iter_named()
            .map(|(step, pop, neuron)| (step, pop.to_string(), neuron))
            .collect();
        gate(
            5,
            actual == expected,
            &format!(
                "{ctx}: kernel and brute-force reference disagree ({} vs {} events)",
                actual.len(),
                expected.len()
            ),
        );

        for (name, size, refractory) in &net.lifs {
            let pid = raster.population(name).unwrap();
            for neuron in 0..*size {
                let fires = raster.steps_of(pid, neuron);
                let honored = fires.windows(2).all(|w| w[1] - w[0] > *refractory);
                gate(
                    5,
                    honored,
                    &format!("{ctx}: {name}[{neuron}] fired inside its refractory window"),
                );
            }
        }

        let rerun = {
            let mut k = net.build();
            k.schedule(&net.schedule).unwrap();
            k.run_to(net.until);
            k.raster()
        };
        gate(5, rerun == raster, &format!("{ctx}: rerun differed"));
    }

    // The associative memory is watched the same way across its demo run.
    let config = CamConfig::new(5, 10);
    let plan = compile(&config, 0, &demo_requests(), &TimingContract::default()).unwrap();
    let mut cam = CamNetwork::new(config).unwrap();
    cam.schedule(&plan.schedule).unwrap();
    while cam.now() <= plan.until {
        cam.step();
        for id in [CUE_TO_CONTENT, CONTENT_TO_CUE] {
            let in_bounds = cam
                .weights(id)
                .unwrap()
                .iter()
                .flatten()
                .all(|&x| (0.0..=1.2).contains(&x));
            gate(5, in_bounds, &format!("memory weights of {id} left [0, 1.2]"));
        }
    }

    let mut session = CamSession::new(CamConfig::new(5, 10)).unwrap();
    session.learn(0, bits(&[0, 1, 8, 9])).unwrap();
    session.learn(3, bits(&[4, 5, 6])).unwrap();
    let before = (
        session.cam().weights(CUE_TO_CONTENT).unwrap(),
        session.cam().weights(CONTENT_TO_CUE).unwrap(),
    );
    session.recall_by_cue(0).unwrap();
    session.recall_by_content(bits(&[5])).unwrap();
    session.recall_by_cue(3).unwrap();
    let after = (
        session.cam().weights(CUE_TO_CONTENT).unwrap(),
        session.cam().weights(CONTENT_TO_CUE).unwrap(),
    );
    gate(5, before == after, "recalls moved the association weights");

    pass(
        5,
        format!(
            "200 random networks match the brute-force reference bit for bit ({total_events} spikes); \
             refractory spacing, weight bounds, rerun determinism and non-destructive recall all hold"
        ),
    );
}

#[test]
fn criterion_6_weights_land_on_exact_values() {
    let config = CamConfig::new(5, 10);
    let plan = compile(&config, 0, &demo_requests(), &TimingContract::default()).unwrap();
    let mut cam = CamNetwork::new(config.clone()).unwrap();
    cam.schedule(&plan.schedule).unwrap();
    cam.run_to(plan.until);

    // Final stored table after the demo script, cue 3 rewritten once.
    let table: [(usize, &[usize]); 3] = [(0, &[0, 1, 8, 9]), (3, &[1, 3, 4, 8]), (4, &[1, 5, 6])];
    let stored = |cue: usize, bit: usize| {
        table
            .iter()
            .any(|&(c, bs)| c == cue && bs.contains(&bit))
    };

    let w_cue = cam.weights(CUE_TO_CONTENT).unwrap();
    let w_cont = cam.weights(CONTENT_TO_CUE).unwrap();
    for cue in 0..config.cue_count {
        for bit in 0..config.cont_size {
            let want = if stored(cue, bit) { 1.2 } else { 0.0 };
            gate(
                6,
                w_cue[cue][bit] == want,
                &format!(
                    "cue->content weight [{cue}][{bit}] is {:e}, expected exactly {want}",
                    w_cue[cue][bit]
                ),
            );
            gate(
                6,
                w_cont[bit][cue] == want,
                &format!(
                    "content->cue weight [{bit}][{cue}] is {:e}, expected exactly {want}",
                    w_cont[bit][cue]
                ),
            );
        }
    }
    gate(
        6,
        w_cue[3][5] == 0.0 && w_cue[3][6] == 0.0 && w_cont[5][3] == 0.0 && w_cont[6][3] == 0.0,
        "superseded associations of cue 3 did not return to zero",
    );
    pass(
        6,
        "all stored associations sit at exactly 1.2 and everything else at exactly 0.0, in both plastic matrices".to_string(),
    );
}
