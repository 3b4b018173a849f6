/// Stimuli for one population at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StimulusEntry {
    pub step: usize,
    pub population: String,
    /// Sorted, deduplicated neuron indices.
    pub neurons: Vec<usize>,
}

/// When spike-source neurons fire. Order of insertion is irrelevant; the
/// schedule is a plain value and can be merged from fragments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StimulusSchedule {
    entries: Vec<StimulusEntry>,
}

impl StimulusSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds fires for `population` at `step`. Repeated calls accumulate.
    pub fn fire<I>(&mut self, step: usize, population: &str, neurons: I)
    where
        I: IntoIterator<Item = usize>,
    {
        let mut neurons: Vec<usize> = neurons.into_iter().collect();
        if neurons.is_empty() {
            return;
        }
        neurons.sort_unstable();
        neurons.dedup();
        if let Some(entry) = self
            .entries
            .iter_mut()
            .find(|e| e.step == step && e.population == population)
        {
            entry.neurons.extend(neurons);
            entry.neurons.sort_unstable();
            entry.neurons.dedup();
        } else {
            self.entries.push(StimulusEntry {
                step,
                population: population.to_string(),
                neurons,
            });
        }
    }

    pub fn merge(&mut self, other: &StimulusSchedule) {
        for e in &other.entries {
            self.fire(e.step, &e.population, e.neurons.iter().copied());
        }
    }

    pub fn entries(&self) -> &[StimulusEntry] {
        &self.entries
    }

    pub fn last_step(&self) -> Option<usize> {
        self.entries.iter().map(|e| e.step).max()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
