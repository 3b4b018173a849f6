use std::collections::BTreeMap;

use crate::error::{BuildError, ScheduleError, UnknownProjection};
use crate::params::NeuronParams;
use crate::raster::{PopId, Raster, SpikeEvent};
use crate::schedule::StimulusSchedule;
use crate::topology::{PlasticProjection, PopulationKind, PopulationSpec, StaticProjection};

#[derive(Debug, Clone)]
struct Population {
    name: String,
    size: usize,
    offset: usize,
    params: Option<NeuronParams>, // None for spike sources
    record: bool,
}

/// Runtime state of one plastic projection: a dense pre-major weight matrix.
#[derive(Debug, Clone)]
struct PlasticState {
    spec: PlasticProjection,
    pre_pop: usize,
    post_pop: usize,
    weights: Vec<f64>,
}

impl PlasticState {
    fn weight(&self, pre: usize, post: usize, post_size: usize) -> f64 {
        self.weights[pre * post_size + post]
    }
}

/// One outgoing synapse bundle of a neuron.
#[derive(Debug, Clone)]
enum OutEdge {
    Fixed {
        post: usize, // global index
        weight: f64,
        delay: usize,
    },
    /// Fan-out over every postsynaptic neuron of a plastic projection; the
    /// weights are resolved when the deliveries arrive.
    PlasticFan { proj: usize, pre: usize, delay: usize },
}

#[derive(Debug, Clone, Copy)]
enum Delivery {
    Fixed { post: usize, weight: f64 },
    Plastic { proj: usize, pre: usize, post: usize },
}

/// Counters for the delivery machinery, exposed for conservation checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelStats {
    pub fires: u64,
    pub deliveries_enqueued: u64,
    pub deliveries_applied: u64,
}

/// A built network ready to advance step by step.
///
/// The network is deterministic: there is no randomness, and all iteration
/// happens in declaration order, so identical inputs give bit-identical
/// rasters and weight trajectories.
#[derive(Debug, Clone)]
pub struct Network {
    pops: Vec<Population>,
    statics: Vec<StaticProjection>,
    plastics: Vec<PlasticState>,
    outgoing: Vec<Vec<OutEdge>>,
    /// Ring buffer of pending deliveries, indexed by step modulo its length.
    queue: Vec<Vec<Delivery>>,
    input: Vec<f64>,
    potentials: Vec<f64>,
    /// First step at which the neuron may fire again.
    fireable_from: Vec<usize>,
    last_fire: Vec<Option<usize>>,
    /// Validated stimuli not yet consumed: step -> population -> neurons.
    pending: BTreeMap<usize, BTreeMap<usize, Vec<usize>>>,
    now: usize,
    events: Vec<SpikeEvent>,
    stats: KernelStats,
}

impl Network {
    pub fn build(
        populations: Vec<PopulationSpec>,
        statics: Vec<StaticProjection>,
        plastics: Vec<PlasticProjection>,
    ) -> Result<Self, BuildError> {
        let mut pops = Vec::with_capacity(populations.len());
        let mut offset = 0;
        for spec in &populations {
            if pops.iter().any(|p: &Population| p.name == spec.id) {
                return Err(BuildError::DuplicatePopulation(spec.id.clone()));
            }
            if spec.size == 0 {
                return Err(BuildError::EmptyPopulation(spec.id.clone()));
            }
            let params = match &spec.kind {
                PopulationKind::SpikeSource => None,
                PopulationKind::Lif(p) => {
                    p.validate()
                        .map_err(|e| BuildError::InvalidNeuronParams(spec.id.clone(), e))?;
                    Some(*p)
                }
            };
            pops.push(Population {
                name: spec.id.clone(),
                size: spec.size,
                offset,
                params,
                record: spec.record,
            });
            offset += spec.size;
        }
        let total = offset;
        let find = |name: &str, ctx: &str| -> Result<usize, BuildError> {
            pops.iter()
                .position(|p| p.name == name)
                .ok_or_else(|| BuildError::UnknownPopulation(ctx.to_string(), name.to_string()))
        };

        let mut outgoing: Vec<Vec<OutEdge>> = vec![Vec::new(); total];
        let mut max_delay = 1;

        for proj in &statics {
            let ctx = format!("`{}`->`{}`", proj.pre, proj.post);
            let pre = find(&proj.pre, &ctx)?;
            let post = find(&proj.post, &ctx)?;
            if proj.delay == 0 {
                return Err(BuildError::ZeroDelay(ctx));
            }
            if pops[post].params.is_none() {
                return Err(BuildError::TargetIsSource(ctx));
            }
            let pairs = proj
                .pattern
                .expand(pops[pre].size, pops[post].size, pre == post)
                .map_err(|e| BuildError::PatternMismatch(ctx.clone(), e))?;
            max_delay = max_delay.max(proj.delay);
            for (i, j) in pairs {
                outgoing[pops[pre].offset + i].push(OutEdge::Fixed {
                    post: pops[post].offset + j,
                    weight: proj.weight,
                    delay: proj.delay,
                });
            }
        }

        let mut plastic_states = Vec::with_capacity(plastics.len());
        for (k, proj) in plastics.iter().enumerate() {
            if plastics[..k].iter().any(|p| p.id == proj.id) {
                return Err(BuildError::DuplicatePlasticId(proj.id.clone()));
            }
            let ctx = format!("`{}` (`{}`->`{}`)", proj.id, proj.pre, proj.post);
            let pre = find(&proj.pre, &ctx)?;
            let post = find(&proj.post, &ctx)?;
            if proj.delay == 0 {
                return Err(BuildError::ZeroDelay(ctx));
            }
            if pops[post].params.is_none() {
                return Err(BuildError::TargetIsSource(ctx));
            }
            proj.rule
                .validate()
                .map_err(|e| BuildError::InvalidStdpRule(proj.id.clone(), e))?;
            max_delay = max_delay.max(proj.delay);
            for i in 0..pops[pre].size {
                outgoing[pops[pre].offset + i].push(OutEdge::PlasticFan {
                    proj: k,
                    pre: i,
                    delay: proj.delay,
                });
            }
            plastic_states.push(PlasticState {
                spec: proj.clone(),
                pre_pop: pre,
                post_pop: post,
                weights: vec![proj.rule.w_init; pops[pre].size * pops[post].size],
            });
        }

        let potentials = pops
            .iter()
            .flat_map(|p| {
                let v = p.params.map_or(0.0, |prm| prm.reset_potential);
                std::iter::repeat_n(v, p.size)
            })
            .collect();

        Ok(Network {
            pops,
            statics,
            plastics: plastic_states,
            outgoing,
            queue: vec![Vec::new(); max_delay + 1],
            input: vec![0.0; total],
            potentials,
            fireable_from: vec![0; total],
            last_fire: vec![None; total],
            pending: BTreeMap::new(),
            now: 0,
            events: Vec::new(),
            stats: KernelStats::default(),
        })
    }

    pub fn population(&self, name: &str) -> Option<PopId> {
        self.pops.iter().position(|p| p.name == name).map(PopId)
    }

    pub fn population_size(&self, id: PopId) -> usize {
        self.pops[id.0].size
    }

    pub fn population_names(&self) -> impl Iterator<Item = &str> {
        self.pops.iter().map(|p| p.name.as_str())
    }

    /// The next step that `step` will execute.
    pub fn now(&self) -> usize {
        self.now
    }

    pub fn static_projections(&self) -> &[StaticProjection] {
        &self.statics
    }

    pub fn plastic_ids(&self) -> impl Iterator<Item = &str> {
        self.plastics.iter().map(|p| p.spec.id.as_str())
    }

    pub fn kernel_stats(&self) -> KernelStats {
        self.stats
    }

    /// Membrane potential after the most recent executed step. `None` for
    /// spike sources, which carry no state.
    pub fn potential(&self, id: PopId, neuron: usize) -> Option<f64> {
        let pop = &self.pops[id.0];
        assert!(neuron < pop.size, "neuron index out of range");
        pop.params.map(|_| self.potentials[pop.offset + neuron])
    }

    /// Snapshot of a plastic weight matrix, pre-major.
    pub fn weights(&self, id: &str) -> Result<Vec<Vec<f64>>, UnknownProjection> {
        let st = self
            .plastics
            .iter()
            .find(|p| p.spec.id == id)
            .ok_or_else(|| UnknownProjection(id.to_string()))?;
        let post_size = self.pops[st.post_pop].size;
        Ok(st
            .weights
            .chunks(post_size)
            .map(|row| row.to_vec())
            .collect())
    }

    /// Validates and queues stimuli for steps that have not yet executed.
    pub fn schedule(&mut self, schedule: &StimulusSchedule) -> Result<(), ScheduleError> {
        // Validate everything before mutating.
        for e in schedule.entries() {
            let pop = self
                .pops
                .iter()
                .position(|p| p.name == e.population)
                .ok_or_else(|| ScheduleError::UnknownPopulation(e.population.clone()))?;
            if self.pops[pop].params.is_some() {
                return Err(ScheduleError::NotASpikeSource(e.population.clone()));
            }
            if e.step < self.now {
                return Err(ScheduleError::StepInPast {
                    step: e.step,
                    now: self.now,
                });
            }
            if let Some(&neuron) = e.neurons.iter().find(|&&n| n >= self.pops[pop].size) {
                return Err(ScheduleError::NeuronOutOfRange {
                    pop: e.population.clone(),
                    neuron,
                    size: self.pops[pop].size,
                });
            }
        }
        for e in schedule.entries() {
            let pop = self.pops.iter().position(|p| p.name == e.population).unwrap();
            let slot = self.pending.entry(e.step).or_default().entry(pop).or_default();
            slot.extend(e.neurons.iter().copied());
            slot.sort_unstable();
            slot.dedup();
        }
        Ok(())
    }

    /// Executes one step and returns every fire it produced, recorded or not.
    pub fn step(&mut self) -> Vec<SpikeEvent> {
        let t = self.now;
        let slots = self.queue.len();

        self.input.fill(0.0);
        let deliveries = std::mem::take(&mut self.queue[t % slots]);
        for d in deliveries {
            self.stats.deliveries_applied += 1;
            match d {
                Delivery::Fixed { post, weight } => self.input[post] += weight,
                Delivery::Plastic { proj, pre, post } => {
                    let st = &self.plastics[proj];
                    let post_size = self.pops[st.post_pop].size;
                    self.input[self.pops[st.post_pop].offset + post] +=
                        st.weight(pre, post, post_size);
                }
            }
        }

        let stimuli = self.pending.remove(&t).unwrap_or_default();
        let mut fired: Vec<SpikeEvent> = Vec::new();

        for (pi, pop) in self.pops.iter().enumerate() {
            match pop.params {
                None => {
                    if let Some(neurons) = stimuli.get(&pi) {
                        for &n in neurons {
                            let g = pop.offset + n;
                            self.last_fire[g] = Some(t);
                            fired.push(SpikeEvent {
                                step: t,
                                population: PopId(pi),
                                neuron: n,
                            });
                        }
                    }
                }
                Some(p) => {
                    for n in 0..pop.size {
                        let g = pop.offset + n;
                        let integrated = p.decay * self.potentials[g] + self.input[g];
                        if t < self.fireable_from[g] {
                            // Refractory: integrate, clamp, never fire.
                            self.potentials[g] = integrated.max(p.floor_potential);
                        } else if integrated >= p.threshold {
                            self.potentials[g] = p.reset_potential;
                            self.fireable_from[g] = t + p.refractory_steps + 1;
                            self.last_fire[g] = Some(t);
                            fired.push(SpikeEvent {
                                step: t,
                                population: PopId(pi),
                                neuron: n,
                            });
                        } else {
                            self.potentials[g] = integrated.max(p.floor_potential);
                        }
                    }
                }
            }
        }

        // Fan out deliveries; delays are >= 1 so nothing lands back in step t.
        for ev in &fired {
            self.stats.fires += 1;
            let g = self.pops[ev.population.0].offset + ev.neuron;
            for edge in &self.outgoing[g] {
                match *edge {
                    OutEdge::Fixed { post, weight, delay } => {
                        self.stats.deliveries_enqueued += 1;
                        self.queue[(t + delay) % slots].push(Delivery::Fixed { post, weight });
                    }
                    OutEdge::PlasticFan { proj, pre, delay } => {
                        let post_size = self.pops[self.plastics[proj].post_pop].size;
                        for post in 0..post_size {
                            self.stats.deliveries_enqueued += 1;
                            self.queue[(t + delay) % slots]
                                .push(Delivery::Plastic { proj, pre, post });
                        }
                    }
                }
            }
        }

        // Plasticity, after all fires of the step are known: each plastic
        // synapse whose presynaptic neuron fired at t compares against the
        // most recent postsynaptic fire, same-step fires included.
        for st in &mut self.plastics {
            let pre_off = self.pops[st.pre_pop].offset;
            let post_off = self.pops[st.post_pop].offset;
            let post_size = self.pops[st.post_pop].size;
            for pre in 0..self.pops[st.pre_pop].size {
                if self.last_fire[pre_off + pre] != Some(t) {
                    continue;
                }
                for post in 0..post_size {
                    let w = st.weights[pre * post_size + post];
                    let updated = st.spec.rule.on_pre_spike(t, self.last_fire[post_off + post], w);
                    st.weights[pre * post_size + post] = updated;
                }
            }
        }

        self.events
            .extend(fired.iter().filter(|e| self.pops[e.population.0].record));
        self.now = t + 1;
        fired
    }

    /// Executes steps up to and including `last_step`. Does nothing if the
    /// network has already advanced past it.
    pub fn run_to(&mut self, last_step: usize) {
        while self.now <= last_step {
            self.step();
        }
    }

    /// Applies `schedule` and executes every step through `until` inclusive.
    pub fn run(
        &mut self,
        schedule: &StimulusSchedule,
        until: usize,
    ) -> Result<Raster, ScheduleError> {
        if let Some(last) = schedule.last_step() {
            if until < last {
                return Err(ScheduleError::HorizonBeforeSchedule { until, last });
            }
        }
        self.schedule(schedule)?;
        self.run_to(until);
        Ok(self.raster())
    }

    /// Snapshot of everything recorded so far.
    pub fn raster(&self) -> Raster {
        Raster::new(
            self.pops.iter().map(|p| p.name.clone()).collect(),
            self.events.clone(),
        )
    }
}
