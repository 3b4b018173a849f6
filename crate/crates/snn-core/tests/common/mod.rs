//! Random network scenarios for property tests.
//!
//! Weights, decays and plasticity constants are drawn from quarter-integer
//! lattices so that every sum the simulation performs is exact in f64; the
//! kernel and the brute-force reference may then be compared bit for bit
//! even though they accumulate inputs in different orders.

use proptest::prelude::*;
use proptest::strategy::Union;
use snn_core::{
    ConnectivityPattern, Network, NeuronParams, PlasticProjection, PopulationSpec,
    StaticProjection, StdpRule, StimulusSchedule,
};

#[derive(Debug, Clone)]
pub struct Scenario {
    pub pops: Vec<PopulationSpec>,
    pub statics: Vec<StaticProjection>,
    pub plastics: Vec<PlasticProjection>,
    pub schedule: StimulusSchedule,
    pub until: usize,
}

impl Scenario {
    pub fn build(&self) -> Network {
        Network::build(self.pops.clone(), self.statics.clone(), self.plastics.clone())
            .expect("generated scenarios are valid by construction")
    }
}

fn dyadic_weight() -> impl Strategy<Value = f64> {
    (-8i32..=8).prop_map(|k| f64::from(k) * 0.25)
}

fn lif_params() -> impl Strategy<Value = NeuronParams> {
    (
        prop_oneof![Just(0.5), Just(1.0), Just(2.0)],
        prop_oneof![Just(0.0), Just(0.25), Just(0.5), Just(1.0)],
        0usize..=2,
        prop_oneof![Just(0.0), Just(-1.0)],
    )
        .prop_map(|(threshold, decay, refractory_steps, floor_potential)| NeuronParams {
            threshold,
            decay,
            refractory_steps,
            reset_potential: 0.0,
            floor_potential,
        })
}

fn stdp_rule() -> impl Strategy<Value = StdpRule> {
    (
        prop_oneof![Just(0.25), Just(0.5)],
        prop_oneof![Just(0.25), Just(0.5), Just(1.0)],
        prop_oneof![Just(0.0), Just(0.25), Just(0.5)],
        prop_oneof![Just(1.0), Just(1.25)],
        1usize..=4,
    )
        .prop_map(|(a_plus, a_minus, w_init, w_max, depression_window)| StdpRule {
            a_plus,
            a_minus,
            w_init,
            w_min: 0.0,
            w_max,
            depression_window,
        })
}

fn pattern(pre_size: usize, post_size: usize) -> BoxedStrategy<ConnectivityPattern> {
    let cap = (pre_size * post_size).min(10);
    let mut choices = vec![
        any::<bool>()
            .prop_map(|include_self| ConnectivityPattern::AllToAll { include_self })
            .boxed(),
        proptest::collection::btree_set((0..pre_size, 0..post_size), 1..=cap)
            .prop_map(|set| ConnectivityPattern::ExplicitPairs(set.into_iter().collect()))
            .boxed(),
    ];
    if pre_size == post_size {
        choices.push(Just(ConnectivityPattern::OneToOne).boxed());
    }
    if post_size == 1 {
        choices.push(Just(ConnectivityPattern::AllToOne).boxed());
    }
    if pre_size == 1 {
        choices.push(Just(ConnectivityPattern::OneToAll).boxed());
    }
    Union::new(choices).boxed()
}

fn static_proj(sizes: Vec<usize>) -> impl Strategy<Value = StaticProjection> {
    let n = sizes.len();
    (0..n, 1..n, 1usize..=3, dyadic_weight()).prop_flat_map(move |(pre, post, delay, weight)| {
        pattern(sizes[pre], sizes[post]).prop_map(move |pattern| {
            StaticProjection::new(
                format!("P{pre}"),
                format!("P{post}"),
                pattern,
                weight,
                delay,
            )
        })
    })
}

fn plastic_projs(sizes: Vec<usize>) -> impl Strategy<Value = Vec<PlasticProjection>> {
    let n = sizes.len();
    proptest::collection::vec((0..n, 1..n, 1usize..=3, stdp_rule()), 0..=2).prop_map(|raw| {
        raw.into_iter()
            .enumerate()
            .map(|(k, (pre, post, delay, rule))| {
                PlasticProjection::new(
                    format!("W{k}"),
                    format!("P{pre}"),
                    format!("P{post}"),
                    delay,
                    rule,
                )
            })
            .collect()
    })
}

fn stimuli(src_size: usize, until: usize) -> impl Strategy<Value = StimulusSchedule> {
    proptest::collection::vec((0..=until, 0..src_size), 1..=40).prop_map(|fires| {
        let mut s = StimulusSchedule::new();
        for (step, neuron) in fires {
            s.fire(step, "P0", [neuron]);
        }
        s
    })
}

/// Up to 19 neurons: population `P0` is a spike source, the rest are
/// leaky integrators wired by a handful of static and plastic projections.
pub fn scenario() -> impl Strategy<Value = Scenario> {
    (
        1usize..=4,
        proptest::collection::vec((1usize..=5, lif_params()), 1..=3),
        10usize..=50,
    )
        .prop_flat_map(|(src_size, lifs, until)| {
            let mut sizes = vec![src_size];
            let mut pops = vec![PopulationSpec::source("P0", src_size)];
            for (i, (size, params)) in lifs.iter().enumerate() {
                sizes.push(*size);
                pops.push(PopulationSpec::lif(format!("P{}", i + 1), *size, *params));
            }
            (
                Just(pops),
                proptest::collection::vec(static_proj(sizes.clone()), 0..=6),
                plastic_projs(sizes),
                stimuli(src_size, until),
                Just(until),
            )
                .prop_map(|(pops, statics, plastics, schedule, until)| Scenario {
                    pops,
                    statics,
                    plastics,
                    schedule,
                    until,
                })
        })
}
