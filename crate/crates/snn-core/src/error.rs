use thiserror::Error;

/// Rejections raised while assembling a network from its specification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate population id `{0}`")]
    DuplicatePopulation(String),
    #[error("population `{0}` must contain at least one neuron")]
    EmptyPopulation(String),
    #[error("population `{0}`: {1}")]
    InvalidNeuronParams(String, String),
    #[error("projection {0}: unknown population `{1}`")]
    UnknownPopulation(String, String),
    #[error("projection {0}: {1}")]
    PatternMismatch(String, String),
    #[error("projection {0}: delay must be at least one step")]
    ZeroDelay(String),
    #[error("projection {0}: postsynaptic population is a spike source")]
    TargetIsSource(String),
    #[error("plastic projection `{0}`: {1}")]
    InvalidStdpRule(String, String),
    #[error("duplicate plastic projection id `{0}`")]
    DuplicatePlasticId(String),
}

/// Rejections raised when stimuli cannot be applied to a network.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("stimulus references unknown population `{0}`")]
    UnknownPopulation(String),
    #[error("stimulus for `{pop}` neuron {neuron} is out of range (population size {size})")]
    NeuronOutOfRange {
        pop: String,
        neuron: usize,
        size: usize,
    },
    #[error("stimulus targets `{0}`, which is not a spike source")]
    NotASpikeSource(String),
    #[error("stimulus at step {step} lies in the past (next unexecuted step is {now})")]
    StepInPast { step: usize, now: usize },
    #[error("run horizon {until} is earlier than the last scheduled stimulus at step {last}")]
    HorizonBeforeSchedule { until: usize, last: usize },
}

/// Lookup failure for a plastic projection id.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown plastic projection `{0}`")]
pub struct UnknownProjection(pub String);
