use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use snn_core::{
    BuildError, ConnectivityPattern, Network, PlasticProjection, PopulationSpec, Raster,
    ScheduleError, SpikeEvent, StaticProjection, StimulusSchedule, UnknownProjection,
};
use thiserror::Error;

use crate::config::CamConfig;

/// Spike source carrying cue lines first, then content bits.
pub const INPUT: &str = "Input";
/// First-stage cue relay; presynaptic side of the cue-to-content store.
pub const S1_CUE: &str = "S1Cue";
/// First-stage content relay.
pub const S1_CONT: &str = "S1Cont";
/// Single interneuron; opens the second-stage gate whenever any content is
/// present on stage one.
pub const S2_INT: &str = "S2Int";
/// Second-stage coincidence layer feeding the content-to-cue store.
pub const S2_COND: &str = "S2Cond";
/// Second-stage cue layer; postsynaptic side of the content-to-cue store.
pub const S2_CUE: &str = "S2Cue";
/// Second-stage content relay.
pub const S2_CONT: &str = "S2Cont";
/// Converges direct and associative cue activity.
pub const MERGE_CUE: &str = "MergeCue";
/// Converges direct and associative content activity.
pub const MERGE_CONT: &str = "MergeCont";
/// Readout layer mirroring the input layout.
pub const OUTPUT: &str = "Output";

/// Plastic store mapping each cue line to its content bits.
pub const CUE_TO_CONTENT: &str = "S1Cue->S1Cont";
/// Plastic store mapping content bits back to their cue lines.
pub const CONTENT_TO_CUE: &str = "S2Cont->S2Cue";

/// The complete network description for one memory instance.
///
/// All weights derive from the configured constants: relays carry exactly
/// one threshold, the cue-presence gate subtracts half a threshold and the
/// content-presence interneuron adds it back, and the recurrent blanket over
/// the second-stage cue layer is strong enough (`cont_size * w_max`) to
/// cancel the largest possible associative drive.
pub fn build_description(
    config: &CamConfig,
) -> (
    Vec<PopulationSpec>,
    Vec<StaticProjection>,
    Vec<PlasticProjection>,
) {
    let c = config.cue_count;
    let n = config.cont_size;
    let p = config.params.neuron;
    let rule = config.params.stdp;
    let relay = p.threshold;
    let gate = -p.threshold / 2.0;
    let boost = p.threshold / 2.0;
    let blanket = -(n as f64) * rule.w_max;

    let pops = vec![
        PopulationSpec::source(INPUT, c + n),
        PopulationSpec::lif(S1_CUE, c, p),
        PopulationSpec::lif(S1_CONT, n, p),
        PopulationSpec::lif(S2_INT, 1, p),
        PopulationSpec::lif(S2_COND, n, p),
        PopulationSpec::lif(S2_CUE, c, p),
        PopulationSpec::lif(S2_CONT, n, p),
        PopulationSpec::lif(MERGE_CUE, c, p),
        PopulationSpec::lif(MERGE_CONT, n, p),
        PopulationSpec::lif(OUTPUT, c + n, p),
    ];

    let all = ConnectivityPattern::AllToAll { include_self: true };
    let cue_pairs: Vec<(usize, usize)> = (0..c).map(|i| (i, i)).collect();
    let cont_pairs: Vec<(usize, usize)> = (0..n).map(|j| (c + j, j)).collect();
    let out_cue_pairs: Vec<(usize, usize)> = (0..c).map(|i| (i, i)).collect();
    let out_cont_pairs: Vec<(usize, usize)> = (0..n).map(|j| (j, c + j)).collect();

    let statics = vec![
        StaticProjection::new(
            INPUT,
            S1_CUE,
            ConnectivityPattern::ExplicitPairs(cue_pairs),
            relay,
            1,
        ),
        StaticProjection::new(
            INPUT,
            S1_CONT,
            ConnectivityPattern::ExplicitPairs(cont_pairs),
            relay,
            1,
        ),
        // The slow cue path: two steps to the second stage, so associatively
        // recalled content (which takes a step through the store) lines up
        // with it there.
        StaticProjection::new(S1_CUE, S2_CUE, ConnectivityPattern::OneToOne, relay, 2),
        // Any active cue closes the second-stage content gate...
        StaticProjection::new(S1_CUE, S2_COND, all.clone(), gate, 2),
        StaticProjection::new(S1_CONT, S2_COND, ConnectivityPattern::OneToOne, relay, 1),
        // ...and any directly presented content reopens it one step later,
        // which is exactly when content resurrected from the store arrives.
        // Net effect: during a learn, stored-but-no-longer-presented bits
        // pass; during a recall by cue, nothing passes.
        StaticProjection::new(S1_CONT, S2_INT, ConnectivityPattern::AllToOne, relay, 1),
        StaticProjection::new(S2_INT, S2_COND, ConnectivityPattern::OneToAll, boost, 1),
        StaticProjection::new(S2_COND, S2_CONT, ConnectivityPattern::OneToOne, relay, 1),
        // Blanket inhibition over the second-stage cue layer. The delay-1
        // copy includes the self-synapse: it can only ever land while the
        // neuron is refractory from the fire that sent it, where it wipes
        // associative residue before the next integration window. The
        // delay-2 copy must exclude it, because it lands exactly when the
        // direct relay delivers the neuron's own second fire during a learn.
        StaticProjection::new(S2_CUE, S2_CUE, all.clone(), blanket, 1),
        StaticProjection::new(
            S2_CUE,
            S2_CUE,
            ConnectivityPattern::AllToAll { include_self: false },
            blanket,
            2,
        ),
        StaticProjection::new(S2_CUE, MERGE_CUE, ConnectivityPattern::OneToOne, relay, 1),
        StaticProjection::new(S1_CUE, MERGE_CUE, ConnectivityPattern::OneToOne, relay, 3),
        StaticProjection::new(S2_CONT, MERGE_CONT, ConnectivityPattern::OneToOne, relay, 1),
        StaticProjection::new(S1_CONT, MERGE_CONT, ConnectivityPattern::OneToOne, relay, 3),
        StaticProjection::new(
            MERGE_CUE,
            OUTPUT,
            ConnectivityPattern::ExplicitPairs(out_cue_pairs),
            relay,
            1,
        ),
        StaticProjection::new(
            MERGE_CONT,
            OUTPUT,
            ConnectivityPattern::ExplicitPairs(out_cont_pairs),
            relay,
            1,
        ),
    ];

    let plastics = vec![
        PlasticProjection::new(CUE_TO_CONTENT, S1_CUE, S1_CONT, 1, rule),
        PlasticProjection::new(CONTENT_TO_CUE, S2_CONT, S2_CUE, 1, rule),
    ];

    (pops, statics, plastics)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InjectError {
    #[error("input neuron {neuron} out of range ({size} inputs)")]
    OutOfRange { neuron: usize, size: usize },
}

/// A built memory network. Thin wrapper over the kernel [`Network`] that
/// knows the input/output layout.
#[derive(Debug, Clone)]
pub struct CamNetwork {
    net: Network,
    config: CamConfig,
}

impl CamNetwork {
    pub fn new(config: CamConfig) -> Result<Self, BuildError> {
        let (pops, statics, plastics) = build_description(&config);
        let net = Network::build(pops, statics, plastics)?;
        Ok(CamNetwork { net, config })
    }

    pub fn config(&self) -> &CamConfig {
        &self.config
    }

    /// Read access to the underlying kernel network, for inspection.
    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn now(&self) -> usize {
        self.net.now()
    }

    pub fn schedule(&mut self, schedule: &StimulusSchedule) -> Result<(), ScheduleError> {
        self.net.schedule(schedule)
    }

    pub fn step(&mut self) -> Vec<SpikeEvent> {
        self.net.step()
    }

    pub fn run_to(&mut self, last_step: usize) {
        self.net.run_to(last_step)
    }

    pub fn raster(&self) -> Raster {
        self.net.raster()
    }

    pub fn weights(&self, id: &str) -> Result<Vec<Vec<f64>>, UnknownProjection> {
        self.net.weights(id)
    }

    /// Builds a schedule fragment firing `neurons` (input-layer indices) for
    /// `repeat` consecutive steps starting at `start`.
    pub fn inject(
        &self,
        start: usize,
        neurons: &BTreeSet<usize>,
        repeat: usize,
    ) -> Result<StimulusSchedule, InjectError> {
        let size = self.config.input_size();
        if let Some(&neuron) = neurons.iter().find(|&&n| n >= size) {
            return Err(InjectError::OutOfRange { neuron, size });
        }
        let mut schedule = StimulusSchedule::new();
        for r in 0..repeat {
            schedule.fire(start + r, INPUT, neurons.iter().copied());
        }
        Ok(schedule)
    }

    /// Output-layer fires at each step of `steps`, inclusive.
    pub fn read_output(
        &self,
        raster: &Raster,
        steps: RangeInclusive<usize>,
    ) -> Vec<(usize, BTreeSet<usize>)> {
        let out = raster
            .population(OUTPUT)
            .expect("raster from a memory network");
        steps.map(|t| (t, raster.neurons_at(t, out))).collect()
    }
}
