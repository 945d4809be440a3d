use std::collections::HashMap;

use crate::cuts::Cut;

/// Cuts found so far, with how often each one pruned a branch.
#[derive(Debug, Clone, Default)]
pub struct CutPool {
    cuts: Vec<Cut>,
    activity: Vec<u64>,
    index: HashMap<Cut, usize>,
}

impl CutPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `cut` unless an identical one is stored; returns whether it was new.
    pub fn insert(&mut self, mut cut: Cut) -> bool {
        cut.lifted.sort_unstable();
        if self.index.contains_key(&cut) {
            return false;
        }
        self.index.insert(cut.clone(), self.cuts.len());
        self.cuts.push(cut);
        self.activity.push(0);
        true
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn activity(&self, k: usize) -> u64 {
        self.activity[k]
    }

    pub(crate) fn bump(&mut self, k: usize) {
        self.activity[k] += 1;
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }
}
