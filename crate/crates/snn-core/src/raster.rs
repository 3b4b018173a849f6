use std::collections::BTreeSet;

/// Index of a population within its network, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PopId(pub(crate) usize);

impl PopId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// One recorded fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpikeEvent {
    pub step: usize,
    pub population: PopId,
    pub neuron: usize,
}

/// An immutable record of fires, ordered by (step, population, neuron) with
/// no duplicates. Carries the population names so it can be interpreted on
/// its own, away from the network that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    names: Vec<String>,
    events: Vec<SpikeEvent>,
}

impl Raster {
    pub(crate) fn new(names: Vec<String>, events: Vec<SpikeEvent>) -> Self {
        debug_assert!(events.windows(2).all(|w| w[0] < w[1]), "raster out of order");
        Raster { names, events }
    }

    pub fn events(&self) -> &[SpikeEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn population_name(&self, id: PopId) -> &str {
        &self.names[id.0]
    }

    pub fn population(&self, name: &str) -> Option<PopId> {
        self.names.iter().position(|n| n == name).map(PopId)
    }

    pub fn population_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    /// Neurons of `population` firing at `step`.
    pub fn neurons_at(&self, step: usize, population: PopId) -> BTreeSet<usize> {
        self.events
            .iter()
            .filter(|e| e.step == step && e.population == population)
            .map(|e| e.neuron)
            .collect()
    }

    /// Steps at which one specific neuron fired.
    pub fn steps_of(&self, population: PopId, neuron: usize) -> Vec<usize> {
        self.events
            .iter()
            .filter(|e| e.population == population && e.neuron == neuron)
            .map(|e| e.step)
            .collect()
    }

    pub fn last_step(&self) -> Option<usize> {
        self.events.last().map(|e| e.step)
    }

    /// Events as (step, population name, neuron) tuples.
    pub fn iter_named(&self) -> impl Iterator<Item = (usize, &str, usize)> {
        self.events
            .iter()
            .map(move |e| (e.step, self.names[e.population.0].as_str(), e.neuron))
    }
}
