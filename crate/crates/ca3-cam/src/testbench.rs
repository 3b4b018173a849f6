//! Built-in exercises for the spiking memory: a fixed demonstration script
//! checked spike for spike against a frozen trace, a pattern-sweep soak
//! test in the spirit of a RAM tester, and a randomized differential run
//! against [`OracleCam`].

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snn_core::{BuildError, Raster};
use thiserror::Error;

use crate::config::{CamConfig, CamParams};
use crate::ops::{
    compile, decode, ContentSet, CueSet, MemoryPattern, OpRequest, Operation, OperationResult,
    Outcome, TimingContract,
};
use crate::oracle::OracleCam;
use crate::CamNetwork;

/// Expected spike trace of [`demo_requests`] on a 5-cue, 10-bit memory
/// with default parameters, one `step,population,neuron` row per fire.
const DEMO_TRACE: &str = include_str!("golden_timeline.csv");

fn bits(xs: &[usize]) -> ContentSet {
    xs.iter().copied().collect()
}

/// The demonstration script: three stores, reads back one of them by cue
/// and two content fragments, then overwrites one pattern and shows that
/// recall follows the replacement, not the original.
pub fn demo_requests() -> Vec<OpRequest> {
    let learn = |cue, content: &[usize], start| {
        OpRequest::at(
            Operation::Learn(MemoryPattern {
                cue,
                content: bits(content),
            }),
            start,
        )
    };
    vec![
        learn(0, &[0, 1, 8, 9], 0),
        learn(4, &[1, 5, 6], 10),
        learn(3, &[4, 5, 6], 20),
        OpRequest::at(Operation::RecallByCue(0), 30),
        OpRequest::at(Operation::RecallByContent(bits(&[6])), 40),
        OpRequest::at(Operation::RecallByContent(bits(&[4, 5])), 50),
        learn(3, &[1, 3, 4, 8], 60),
        OpRequest::at(Operation::RecallByCue(3), 70),
        OpRequest::at(Operation::RecallByContent(bits(&[6])), 80),
    ]
}

#[derive(Debug, Clone)]
pub struct DemoReport {
    pub raster: Raster,
    pub results: Vec<OperationResult>,
    /// Human-readable deviations from the frozen trace and from the
    /// key-value contract; empty on a healthy run.
    pub mismatches: Vec<String>,
}

impl DemoReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn parse_trace(text: &str) -> BTreeSet<(usize, String, usize)> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut parts = line.split(',');
            let step = parts.next().unwrap().parse().unwrap();
            let pop = parts.next().unwrap().to_string();
            let neuron = parts.next().unwrap().parse().unwrap();
            (step, pop, neuron)
        })
        .collect()
}

fn trace_mismatches(raster: &Raster, expected: &BTreeSet<(usize, String, usize)>) -> Vec<String> {
    let actual: BTreeSet<(usize, String, usize)> = raster
        .iter_named()
        .map(|(step, pop, neuron)| (step, pop.to_string(), neuron))
        .collect();
    let mut lines = Vec::new();
    for (step, pop, neuron) in expected.difference(&actual) {
        lines.push(format!("missing fire: step {step} {pop} {neuron}"));
    }
    for (step, pop, neuron) in actual.difference(expected) {
        lines.push(format!("unexpected fire: step {step} {pop} {neuron}"));
    }
    if lines.len() > 20 {
        let extra = lines.len() - 20;
        lines.truncate(20);
        lines.push(format!("... and {extra} more trace deviations"));
    }
    lines
}

fn oracle_mismatches(ops: &[Operation], results: &[OperationResult]) -> Vec<String> {
    let mut oracle = OracleCam::new();
    let mut lines = Vec::new();
    for (i, (op, res)) in ops.iter().zip(results).enumerate() {
        let expected = oracle.apply(op);
        if res.outcome != expected {
            let mut line = format!("operation {i} (start {}): expected ", res.start);
            let _ = write!(line, "{expected:?}, got {:?}", res.outcome);
            lines.push(line);
        }
        if !res.valid {
            lines.push(format!(
                "operation {i} (start {}): response failed integrity checks",
                res.start
            ));
        }
    }
    lines
}

/// Runs the demonstration script on a 5-cue, 10-bit memory and diffs the
/// full spike raster against the frozen trace. Any parameter override that
/// changes behaviour shows up as trace deviations in the report.
pub fn run_operation_demo(params: CamParams) -> Result<DemoReport, BuildError> {
    let mut config = CamConfig::new(5, 10);
    config.params = params;
    let mut cam = CamNetwork::new(config)?;
    let requests = demo_requests();
    let plan = compile(cam.config(), 0, &requests, &TimingContract::default())
        .expect("the demo script is well formed");
    cam.schedule(&plan.schedule)
        .expect("compiled plans schedule cleanly");
    cam.run_to(plan.until);
    let raster = cam.raster();
    let results = decode(&raster, cam.config(), &plan.planned);
    let ops: Vec<Operation> = requests.into_iter().map(|r| r.op).collect();
    let mut mismatches = trace_mismatches(&raster, &parse_trace(DEMO_TRACE));
    mismatches.extend(oracle_mismatches(&ops, &results));
    Ok(DemoReport {
        raster,
        results,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MemtestError {
    #[error("sweep patterns for {cue_count} cues need more than {cont_size} content bits")]
    EncodingDoesNotFit { cue_count: usize, cont_size: usize },
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Readouts gathered during one sweep of [`run_memtest`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutcome {
    /// Bits each learn displaced, indexed by cue.
    pub forgotten: Vec<ContentSet>,
    /// Content recalled for each cue.
    pub by_cue: Vec<ContentSet>,
    /// Cues recalled for each single-bit fragment, indexed by bit.
    pub by_content: Vec<CueSet>,
}

#[derive(Debug, Clone)]
pub struct MemtestReport {
    pub raster: Raster,
    pub learns: usize,
    /// Learns that displaced at least one previously stored bit.
    pub forgetting_learns: usize,
    pub recalls_by_cue: usize,
    pub recalls_by_content: usize,
    /// Last simulation step the test needed.
    pub total_steps: usize,
    pub sweeps: Vec<SweepOutcome>,
    pub mismatches: Vec<String>,
}

impl MemtestReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn binary_pattern(value: usize) -> ContentSet {
    (0..usize::BITS as usize)
        .filter(|b| value >> b & 1 == 1)
        .collect()
}

fn complement(pattern: &ContentSet, cont_size: usize) -> ContentSet {
    (0..cont_size).filter(|b| !pattern.contains(b)).collect()
}

/// Exercises every cue of one memory through three full sweeps: store a
/// distinct binary pattern per cue and read everything back, overwrite
/// each with its complement, then overwrite again with the complement of
/// what is stored, which must restore the first sweep's readouts exactly.
/// All operations run on a single network at minimum spacing and every
/// response is checked against [`OracleCam`].
pub fn run_memtest(config: &CamConfig) -> Result<MemtestReport, MemtestError> {
    let cues = config.cue_count;
    let nbits = config.cont_size;
    let mut sweep_patterns: Vec<Vec<ContentSet>> = Vec::with_capacity(3);
    let first: Vec<ContentSet> = (0..cues).map(|i| binary_pattern(i + 1)).collect();
    let second: Vec<ContentSet> = first.iter().map(|p| complement(p, nbits)).collect();
    for pattern in first.iter().chain(&second) {
        let fits = pattern.iter().all(|&b| b < nbits);
        if pattern.is_empty() || !fits {
            return Err(MemtestError::EncodingDoesNotFit {
                cue_count: cues,
                cont_size: nbits,
            });
        }
    }
    sweep_patterns.push(first.clone());
    sweep_patterns.push(second);
    sweep_patterns.push(first);

    let mut requests = Vec::new();
    for patterns in &sweep_patterns {
        for (cue, content) in patterns.iter().enumerate() {
            requests.push(OpRequest::auto(Operation::Learn(MemoryPattern {
                cue,
                content: content.clone(),
            })));
        }
        for cue in 0..cues {
            requests.push(OpRequest::auto(Operation::RecallByCue(cue)));
        }
        for bit in 0..nbits {
            requests.push(OpRequest::auto(Operation::RecallByContent(bits(&[bit]))));
        }
    }

    let mut cam = CamNetwork::new(config.clone())?;
    let plan = compile(config, 0, &requests, &TimingContract::default())
        .expect("sweep scripts are well formed");
    cam.schedule(&plan.schedule)
        .expect("compiled plans schedule cleanly");
    cam.run_to(plan.until);
    let raster = cam.raster();
    let results = decode(&raster, config, &plan.planned);
    let ops: Vec<Operation> = requests.into_iter().map(|r| r.op).collect();
    let mut mismatches = oracle_mismatches(&ops, &results);

    let per_sweep = 2 * cues + nbits;
    let sweeps: Vec<SweepOutcome> = (0..3)
        .map(|s| {
            let chunk = &results[s * per_sweep..(s + 1) * per_sweep];
            SweepOutcome {
                forgotten: chunk[..cues]
                    .iter()
                    .map(|r| match &r.outcome {
                        Outcome::Learned { forgotten, .. } => forgotten.clone(),
                        _ => unreachable!("learns decode to Learned"),
                    })
                    .collect(),
                by_cue: chunk[cues..2 * cues]
                    .iter()
                    .map(|r| match &r.outcome {
                        Outcome::RecalledByCue { content, .. } => content.clone(),
                        _ => unreachable!("cue recalls decode to RecalledByCue"),
                    })
                    .collect(),
                by_content: chunk[2 * cues..]
                    .iter()
                    .map(|r| match &r.outcome {
                        Outcome::RecalledByContent { cues, .. } => cues.clone(),
                        _ => unreachable!("content recalls decode to RecalledByContent"),
                    })
                    .collect(),
            }
        })
        .collect();
    if sweeps[2].by_cue != sweeps[0].by_cue || sweeps[2].by_content != sweeps[0].by_content {
        mismatches.push("third sweep readouts differ from the first sweep's".to_string());
    }

    let forgetting_learns = results
        .iter()
        .filter(|r| matches!(&r.outcome, Outcome::Learned { forgotten, .. } if !forgotten.is_empty()))
        .count();
    Ok(MemtestReport {
        raster,
        learns: 3 * cues,
        forgetting_learns,
        recalls_by_cue: 3 * cues,
        recalls_by_content: 3 * nbits,
        total_steps: plan.until,
        sweeps,
        mismatches,
    })
}

#[derive(Debug, Clone)]
pub struct StressReport {
    pub seed: u64,
    pub ops_run: usize,
    /// Operations whose network response differed from the key-value
    /// model, with both sides spelled out.
    pub divergences: Vec<String>,
}

impl StressReport {
    pub fn passed(&self) -> bool {
        self.divergences.is_empty()
    }
}

fn random_bits(rng: &mut ChaCha8Rng, cont_size: usize) -> ContentSet {
    let mut set: ContentSet = (0..cont_size).filter(|_| rng.gen_bool(0.5)).collect();
    if set.is_empty() {
        set.insert(rng.gen_range(0..cont_size));
    }
    set
}

/// Runs `n_ops` randomly generated operations (half learns, the rest split
/// between the two recall flavours) on one network at minimum spacing and
/// compares every response against [`OracleCam`].
pub fn run_random_stress(
    seed: u64,
    n_ops: usize,
    config: &CamConfig,
) -> Result<StressReport, BuildError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let requests: Vec<OpRequest> = (0..n_ops)
        .map(|_| {
            let op = match rng.gen_range(0..4) {
                0 | 1 => Operation::Learn(MemoryPattern {
                    cue: rng.gen_range(0..config.cue_count),
                    content: random_bits(&mut rng, config.cont_size),
                }),
                2 => Operation::RecallByCue(rng.gen_range(0..config.cue_count)),
                _ => Operation::RecallByContent(random_bits(&mut rng, config.cont_size)),
            };
            OpRequest::auto(op)
        })
        .collect();
    let mut cam = CamNetwork::new(config.clone())?;
    let plan = compile(config, 0, &requests, &TimingContract::default())
        .expect("generated operations are well formed");
    cam.schedule(&plan.schedule)
        .expect("compiled plans schedule cleanly");
    cam.run_to(plan.until);
    let results = decode(&cam.raster(), config, &plan.planned);
    let ops: Vec<Operation> = requests.into_iter().map(|r| r.op).collect();
    Ok(StressReport {
        seed,
        ops_run: n_ops,
        divergences: oracle_mismatches(&ops, &results),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_patterns_enumerate_set_bits() {
        assert_eq!(binary_pattern(1), bits(&[0]));
        assert_eq!(binary_pattern(5), bits(&[0, 2]));
        assert_eq!(binary_pattern(12), bits(&[2, 3]));
    }

    #[test]
    fn the_demo_script_is_fixed() {
        let reqs = demo_requests();
        assert_eq!(reqs.len(), 9);
        assert_eq!(reqs[0].start, Some(0));
        assert_eq!(reqs[8].start, Some(80));
        assert!(matches!(&reqs[6].op, Operation::Learn(p) if p.cue == 3));
    }

    #[test]
    fn the_frozen_trace_parses_and_is_dense() {
        let trace = parse_trace(DEMO_TRACE);
        assert_eq!(trace.len(), 322);
        assert!(trace.contains(&(0, "Input".to_string(), 0)));
        assert!(trace.contains(&(86, "Output".to_string(), 4)));
    }

    #[test]
    fn tight_encodings_are_rejected_up_front() {
        assert!(matches!(
            run_memtest(&CamConfig::new(16, 3)),
            Err(MemtestError::EncodingDoesNotFit { .. })
        ));
        // A single cue with a single bit leaves no room for the complement
        // sweep.
        assert!(matches!(
            run_memtest(&CamConfig::new(1, 1)),
            Err(MemtestError::EncodingDoesNotFit { .. })
        ));
    }

    #[test]
    fn stress_runs_are_reproducible() {
        let config = CamConfig::new(4, 6);
        let a = run_random_stress(11, 40, &config).unwrap();
        let b = run_random_stress(11, 40, &config).unwrap();
        assert!(a.passed(), "divergences: {:?}", a.divergences);
        assert_eq!(a.divergences, b.divergences);
        assert_eq!(a.ops_run, 40);
    }
}
