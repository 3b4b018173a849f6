//! Deterministic discrete-time spiking network kernel.
//!
//! The kernel advances a fixed-topology network in synchronous steps. Each
//! step, for every leaky integrate-and-fire neuron:
//!
//! * the membrane potential decays multiplicatively, then integrates the
//!   summed weight of all spike deliveries arriving this step;
//! * a neuron at or above threshold fires, resets, and becomes refractory;
//!   refractory neurons keep integrating but cannot fire;
//! * potentials never drop below the configured floor.
//!
//! Spike-source populations fire exactly the stimuli scheduled for them.
//! Every fire enqueues one delivery per outgoing synapse, arriving after the
//! synapse delay (always at least one step, so evaluation order within a step
//! cannot matter). Plastic synapses resolve their weight when the delivery is
//! consumed, not when it is enqueued.
//!
//! Plasticity is pair-based and pre-centric: at the end of a step, every
//! plastic synapse whose presynaptic neuron fired compares that fire against
//! the most recent postsynaptic fire (same-step fires count) and potentiates
//! on exact coincidence or depresses on a recent-post mismatch, saturating at
//! the rule bounds. There is no randomness anywhere in the kernel; identical
//! networks fed identical schedules produce identical rasters.

mod error;
mod network;
mod params;
mod raster;
mod schedule;
mod stdp;
mod topology;

pub mod reference;

pub use error::{BuildError, ScheduleError, UnknownProjection};
pub use network::{KernelStats, Network};
pub use params::NeuronParams;
pub use raster::{PopId, Raster, SpikeEvent};
pub use schedule::{StimulusEntry, StimulusSchedule};
pub use stdp::StdpRule;
pub use topology::{
    ConnectivityPattern, PlasticProjection, PopulationKind, PopulationSpec, StaticProjection,
};
