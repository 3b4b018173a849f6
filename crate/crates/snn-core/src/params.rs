/// Membrane constants for a leaky integrate-and-fire neuron.
///
/// Each step the potential is first scaled by `decay`, then the arriving
/// input is added. A non-refractory neuron whose updated potential reaches
/// `threshold` (comparison is `>=`) fires and is reset to `reset_potential`;
/// it then cannot fire again for `refractory_steps` steps, although it keeps
/// integrating input during that window. The potential is clamped from below
/// at `floor_potential` whenever the neuron does not fire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronParams {
    pub threshold: f64,
    pub decay: f64,
    pub refractory_steps: usize,
    pub reset_potential: f64,
    pub floor_potential: f64,
}

impl Default for NeuronParams {
    fn default() -> Self {
        NeuronParams {
            threshold: 1.0,
            decay: 0.5,
            refractory_steps: 1,
            reset_potential: 0.0,
            floor_potential: 0.0,
        }
    }
}

impl NeuronParams {
    pub(crate) fn validate(&self) -> Result<(), String> {
        if !self.threshold.is_finite()
            || !self.decay.is_finite()
            || !self.reset_potential.is_finite()
            || !self.floor_potential.is_finite()
        {
            return Err("neuron parameters must be finite".into());
        }
        if !(0.0..=1.0).contains(&self.decay) {
            return Err(format!("decay {} outside [0, 1]", self.decay));
        }
        if self.floor_potential > self.reset_potential {
            return Err(format!(
                "floor potential {} above reset potential {}",
                self.floor_potential, self.reset_potential
            ));
        }
        if self.reset_potential >= self.threshold {
            return Err(format!(
                "reset potential {} not below threshold {}",
                self.reset_potential, self.threshold
            ));
        }
        Ok(())
    }
}
