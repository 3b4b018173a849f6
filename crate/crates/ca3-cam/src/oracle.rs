use std::collections::BTreeMap;

use crate::ops::{ContentSet, CueSet, MemoryPattern, Operation, Outcome};

/// A plain key-value table with the same observable contract as the spiking
/// memory: learns supersede, recall by cue returns the stored content,
/// recall by content returns every cue whose content intersects the
/// fragment. Used to check network runs operation by operation.
#[derive(Debug, Clone, Default)]
pub struct OracleCam {
    table: BTreeMap<usize, ContentSet>,
}

impl OracleCam {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `content` under `cue`, returning the bits that were held
    /// before and are not part of the new pattern.
    pub fn learn(&mut self, cue: usize, content: &ContentSet) -> ContentSet {
        let old = self.table.insert(cue, content.clone()).unwrap_or_default();
        old.difference(content).copied().collect()
    }

    pub fn recall_by_cue(&self, cue: usize) -> ContentSet {
        self.table.get(&cue).cloned().unwrap_or_default()
    }

    pub fn recall_by_content(&self, fragment: &ContentSet) -> CueSet {
        self.table
            .iter()
            .filter(|(_, content)| !content.is_disjoint(fragment))
            .map(|(&cue, _)| cue)
            .collect()
    }

    /// Applies one operation and returns the outcome the network is
    /// expected to report for it.
    pub fn apply(&mut self, op: &Operation) -> Outcome {
        match op {
            Operation::Learn(p) => Outcome::Learned {
                forgotten: self.learn(p.cue, &p.content),
                pattern: MemoryPattern {
                    cue: p.cue,
                    content: p.content.clone(),
                },
            },
            Operation::RecallByCue(cue) => Outcome::RecalledByCue {
                cue: *cue,
                content: self.recall_by_cue(*cue),
            },
            Operation::RecallByContent(frag) => Outcome::RecalledByContent {
                fragment: frag.clone(),
                cues: self.recall_by_content(frag),
            },
        }
    }
}
