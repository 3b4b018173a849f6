//! Brute-force re-simulation for differential testing.
//!
//! [`simulate`] recomputes a run from the same declarative description the
//! kernel builds from, but shares none of its machinery: connectivity is
//! re-expanded inline, there is no delivery queue (every step scans the full
//! synapse list against the fire history), refractoriness is recomputed from
//! that history, and the plasticity arithmetic is spelled out locally. Slow
//! on purpose; use it to cross-check the kernel on small networks.

use std::collections::BTreeMap;

use crate::params::NeuronParams;
use crate::schedule::StimulusSchedule;
use crate::topology::{
    ConnectivityPattern, PlasticProjection, PopulationKind, PopulationSpec, StaticProjection,
};

enum SynapseKind {
    Fixed(f64),
    Plastic(usize),
}

struct Synapse {
    pre: (usize, usize),
    post: (usize, usize),
    delay: usize,
    kind: SynapseKind,
}

fn expand(pattern: &ConnectivityPattern, pre_size: usize, post_size: usize, recurrent: bool) -> Vec<(usize, usize)> {
    match pattern {
        ConnectivityPattern::OneToOne => {
            assert_eq!(pre_size, post_size);
            (0..pre_size).map(|i| (i, i)).collect()
        }
        ConnectivityPattern::AllToAll { include_self } => {
            let mut out = Vec::new();
            for i in 0..pre_size {
                for j in 0..post_size {
                    if !(recurrent && !include_self && i == j) {
                        out.push((i, j));
                    }
                }
            }
            out
        }
        ConnectivityPattern::AllToOne => {
            assert_eq!(post_size, 1);
            (0..pre_size).map(|i| (i, 0)).collect()
        }
        ConnectivityPattern::OneToAll => {
            assert_eq!(pre_size, 1);
            (0..post_size).map(|j| (0, j)).collect()
        }
        ConnectivityPattern::ExplicitPairs(pairs) => pairs.clone(),
    }
}

/// Runs the network description through `until` inclusive and returns every
/// fire of every population (recorded or not) as (step, population name,
/// neuron), ordered by step, then population declaration order, then neuron.
///
/// Inputs are assumed valid; feed them to the kernel builder first if in
/// doubt. Summation order differs from the kernel's, so exact agreement
/// should only be expected where addition is exact (for instance weights
/// that are small multiples of a power of two).
pub fn simulate(
    populations: &[PopulationSpec],
    statics: &[StaticProjection],
    plastics: &[PlasticProjection],
    schedule: &StimulusSchedule,
    until: usize,
) -> Vec<(usize, String, usize)> {
    let index: BTreeMap<&str, usize> = populations
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let params: Vec<Option<NeuronParams>> = populations
        .iter()
        .map(|p| match &p.kind {
            PopulationKind::SpikeSource => None,
            PopulationKind::Lif(prm) => Some(*prm),
        })
        .collect();

    let mut synapses = Vec::new();
    for s in statics {
        let pre = index[s.pre.as_str()];
        let post = index[s.post.as_str()];
        for (i, j) in expand(&s.pattern, populations[pre].size, populations[post].size, pre == post)
        {
            synapses.push(Synapse {
                pre: (pre, i),
                post: (post, j),
                delay: s.delay,
                kind: SynapseKind::Fixed(s.weight),
            });
        }
    }
    let mut weights: Vec<Vec<Vec<f64>>> = Vec::new();
    for (k, p) in plastics.iter().enumerate() {
        let pre = index[p.pre.as_str()];
        let post = index[p.post.as_str()];
        for i in 0..populations[pre].size {
            for j in 0..populations[post].size {
                synapses.push(Synapse {
                    pre: (pre, i),
                    post: (post, j),
                    delay: p.delay,
                    kind: SynapseKind::Plastic(k),
                });
            }
        }
        weights.push(vec![
            vec![p.rule.w_init; populations[post].size];
            populations[pre].size
        ]);
    }

    let mut stimuli: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for e in schedule.entries() {
        stimuli
            .entry((e.step, index[e.population.as_str()]))
            .or_default()
            .extend(e.neurons.iter().copied());
    }

    // Full fire history per neuron, ascending.
    let mut history: Vec<Vec<Vec<usize>>> = populations
        .iter()
        .map(|p| vec![Vec::new(); p.size])
        .collect();
    let mut potentials: Vec<Vec<f64>> = populations
        .iter()
        .enumerate()
        .map(|(pi, p)| vec![params[pi].map_or(0.0, |prm| prm.reset_potential); p.size])
        .collect();
    let mut log = Vec::new();

    for t in 0..=until {
        let mut input: Vec<Vec<f64>> = populations.iter().map(|p| vec![0.0; p.size]).collect();
        for syn in &synapses {
            if t < syn.delay {
                continue;
            }
            if history[syn.pre.0][syn.pre.1].binary_search(&(t - syn.delay)).is_ok() {
                input[syn.post.0][syn.post.1] += match syn.kind {
                    SynapseKind::Fixed(w) => w,
                    SynapseKind::Plastic(k) => weights[k][syn.pre.1][syn.post.1],
                };
            }
        }

        let mut fired_now: Vec<(usize, usize)> = Vec::new();
        for (pi, pop) in populations.iter().enumerate() {
            match params[pi] {
                None => {
                    if let Some(neurons) = stimuli.get(&(t, pi)) {
                        let mut sorted = neurons.clone();
                        sorted.sort_unstable();
                        sorted.dedup();
                        fired_now.extend(sorted.into_iter().map(|n| (pi, n)));
                    }
                }
                Some(p) => {
                    for n in 0..pop.size {
                        let refractory = history[pi][n]
                            .last()
                            .is_some_and(|&s| s < t && t - s <= p.refractory_steps);
                        let v = p.decay * potentials[pi][n] + input[pi][n];
                        if refractory {
                            potentials[pi][n] = v.max(p.floor_potential);
                        } else if v >= p.threshold {
                            potentials[pi][n] = p.reset_potential;
                            fired_now.push((pi, n));
                        } else {
                            potentials[pi][n] = v.max(p.floor_potential);
                        }
                    }
                }
            }
        }
        for &(pi, n) in &fired_now {
            history[pi][n].push(t);
            log.push((t, populations[pi].id.clone(), n));
        }

        for (k, p) in plastics.iter().enumerate() {
            let pre = index[p.pre.as_str()];
            let post = index[p.post.as_str()];
            for i in 0..populations[pre].size {
                if history[pre][i].last() != Some(&t) {
                    continue;
                }
                for j in 0..populations[post].size {
                    // Fires of step t are already in the history, so the
                    // nearest postsynaptic fire may be this very step.
                    let Some(&last_post) = history[post][j].last() else {
                        continue;
                    };
                    let dt = t - last_post;
                    let w = weights[k][i][j];
                    weights[k][i][j] = if dt == 0 {
                        (w + p.rule.a_plus).min(p.rule.w_max)
                    } else if dt <= p.rule.depression_window {
                        (w - p.rule.a_minus).max(p.rule.w_min)
                    } else {
                        w
                    };
                }
            }
        }
    }

    log
}
