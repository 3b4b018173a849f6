use std::collections::BTreeSet;

use snn_core::{NeuronParams, StdpRule};
use thiserror::Error;

/// Membrane and plasticity constants shared by every population in the
/// memory. The wiring weights are derived from these, so changing them
/// rescales the whole network consistently.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CamParams {
    pub neuron: NeuronParams,
    pub stdp: StdpRule,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("unknown parameter `{0}`")]
    UnknownKey(String),
    #[error("parameter `{key}` must be a non-negative integer, got {value}")]
    NotAStepCount { key: &'static str, value: f64 },
}

impl CamParams {
    /// Applies one named override. Step counts (`refractory`,
    /// `depression_window`) must be non-negative integers; everything else
    /// is validated when the network is built.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ParamError> {
        match key {
            "threshold" => self.neuron.threshold = value,
            "decay" => self.neuron.decay = value,
            "reset" => self.neuron.reset_potential = value,
            "floor" => self.neuron.floor_potential = value,
            "refractory" => self.neuron.refractory_steps = step_count("refractory", value)?,
            "a_plus" => self.stdp.a_plus = value,
            "a_minus" => self.stdp.a_minus = value,
            "w_init" => self.stdp.w_init = value,
            "w_min" => self.stdp.w_min = value,
            "w_max" => self.stdp.w_max = value,
            "depression_window" => {
                self.stdp.depression_window = step_count("depression_window", value)?
            }
            _ => return Err(ParamError::UnknownKey(key.to_string())),
        }
        Ok(())
    }
}

fn step_count(key: &'static str, value: f64) -> Result<usize, ParamError> {
    if !value.is_finite() || value < 0.0 || value.fract() != 0.0 {
        return Err(ParamError::NotAStepCount { key, value });
    }
    Ok(value as usize)
}

/// Geometry and constants of one memory instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CamConfig {
    /// Number of cue lines.
    pub cue_count: usize,
    /// Number of content bits per pattern.
    pub cont_size: usize,
    pub params: CamParams,
}

impl CamConfig {
    pub fn new(cue_count: usize, cont_size: usize) -> Self {
        CamConfig {
            cue_count,
            cont_size,
            params: CamParams::default(),
        }
    }

    /// The input and output layers hold cues first, then content bits.
    pub fn input_size(&self) -> usize {
        self.cue_count + self.cont_size
    }

    pub fn cue_input(&self, cue: usize) -> usize {
        cue
    }

    pub fn content_input(&self, bit: usize) -> usize {
        self.cue_count + bit
    }

    /// Splits fired output indices into (cues, content bits).
    pub fn split_output(&self, fired: &BTreeSet<usize>) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let cues = fired.iter().copied().filter(|&i| i < self.cue_count).collect();
        let bits = fired
            .iter()
            .filter(|&&i| i >= self.cue_count)
            .map(|&i| i - self.cue_count)
            .collect();
        (cues, bits)
    }
}
