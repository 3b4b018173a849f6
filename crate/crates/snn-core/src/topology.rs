use crate::params::NeuronParams;
use crate::stdp::StdpRule;

/// What the neurons of a population are.
#[derive(Debug, Clone, PartialEq)]
pub enum PopulationKind {
    /// Fires exactly the scheduled stimuli; carries no membrane state.
    SpikeSource,
    Lif(NeuronParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    pub id: String,
    pub size: usize,
    pub kind: PopulationKind,
    /// Recorded populations contribute their fires to the raster.
    pub record: bool,
}

impl PopulationSpec {
    pub fn source(id: impl Into<String>, size: usize) -> Self {
        PopulationSpec {
            id: id.into(),
            size,
            kind: PopulationKind::SpikeSource,
            record: true,
        }
    }

    pub fn lif(id: impl Into<String>, size: usize, params: NeuronParams) -> Self {
        PopulationSpec {
            id: id.into(),
            size,
            kind: PopulationKind::Lif(params),
            record: true,
        }
    }

    pub fn unrecorded(mut self) -> Self {
        self.record = false;
        self
    }
}

/// How presynaptic neurons are paired with postsynaptic ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnectivityPattern {
    /// Index-aligned pairing; requires equally sized populations.
    OneToOne,
    /// Every pair. `include_self` only matters for recurrent projections,
    /// where it controls whether a neuron synapses onto itself.
    AllToAll { include_self: bool },
    /// Every presynaptic neuron onto the single postsynaptic neuron.
    AllToOne,
    /// The single presynaptic neuron onto every postsynaptic neuron.
    OneToAll,
    /// Explicit (pre, post) index pairs.
    ExplicitPairs(Vec<(usize, usize)>),
}

impl ConnectivityPattern {
    /// Expands to concrete (pre, post) pairs, checking size compatibility.
    pub(crate) fn expand(
        &self,
        pre_size: usize,
        post_size: usize,
        recurrent: bool,
    ) -> Result<Vec<(usize, usize)>, String> {
        match self {
            ConnectivityPattern::OneToOne => {
                if pre_size != post_size {
                    return Err(format!(
                        "one-to-one pattern between populations of size {pre_size} and {post_size}"
                    ));
                }
                Ok((0..pre_size).map(|i| (i, i)).collect())
            }
            ConnectivityPattern::AllToAll { include_self } => {
                let mut pairs = Vec::with_capacity(pre_size * post_size);
                for i in 0..pre_size {
                    for j in 0..post_size {
                        if recurrent && !include_self && i == j {
                            continue;
                        }
                        pairs.push((i, j));
                    }
                }
                Ok(pairs)
            }
            ConnectivityPattern::AllToOne => {
                if post_size != 1 {
                    return Err(format!(
                        "all-to-one pattern onto a population of size {post_size}"
                    ));
                }
                Ok((0..pre_size).map(|i| (i, 0)).collect())
            }
            ConnectivityPattern::OneToAll => {
                if pre_size != 1 {
                    return Err(format!(
                        "one-to-all pattern from a population of size {pre_size}"
                    ));
                }
                Ok((0..post_size).map(|j| (0, j)).collect())
            }
            ConnectivityPattern::ExplicitPairs(pairs) => {
                let mut seen = std::collections::BTreeSet::new();
                for &(i, j) in pairs {
                    if i >= pre_size || j >= post_size {
                        return Err(format!(
                            "pair ({i}, {j}) out of range for sizes {pre_size}x{post_size}"
                        ));
                    }
                    if !seen.insert((i, j)) {
                        return Err(format!("duplicate pair ({i}, {j})"));
                    }
                }
                Ok(pairs.clone())
            }
        }
    }
}

/// A fixed-weight projection. Weight may be negative (inhibitory).
#[derive(Debug, Clone, PartialEq)]
pub struct StaticProjection {
    pub pre: String,
    pub post: String,
    pub pattern: ConnectivityPattern,
    pub weight: f64,
    pub delay: usize,
}

impl StaticProjection {
    pub fn new(
        pre: impl Into<String>,
        post: impl Into<String>,
        pattern: ConnectivityPattern,
        weight: f64,
        delay: usize,
    ) -> Self {
        StaticProjection {
            pre: pre.into(),
            post: post.into(),
            pattern,
            weight,
            delay,
        }
    }
}

/// A dense all-to-all projection whose weights evolve under an [`StdpRule`].
/// Deliveries read the weight current at arrival time, not at fire time.
#[derive(Debug, Clone, PartialEq)]
pub struct PlasticProjection {
    pub id: String,
    pub pre: String,
    pub post: String,
    pub delay: usize,
    pub rule: StdpRule,
}

impl PlasticProjection {
    pub fn new(
        id: impl Into<String>,
        pre: impl Into<String>,
        post: impl Into<String>,
        delay: usize,
        rule: StdpRule,
    ) -> Self {
        PlasticProjection {
            id: id.into(),
            pre: pre.into(),
            post: post.into(),
            delay,
            rule,
        }
    }
}
