use std::time::Instant;

use super::context::{BinContext, CapacityFilter};
use super::pool::CutPool;

/// One decision problem: can the items be assigned to `contexts.len()` bins?
pub struct AssignmentModel<'a> {
    pub dims: &'a [(u32, u32)],
    pub contexts: &'a [BinContext],
    /// Branching order; starts with the `clique_len` items fixed to bins `0..clique_len`.
    pub order: &'a [usize],
    pub clique_len: usize,
    /// Adjacency of items that can never share a bin.
    pub conflicts: &'a [Vec<bool>],
    pub filters: &'a [CapacityFilter],
    pub deadline: Option<Instant>,
}

/// Answer of the separation callback for a complete assignment.
#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    Accept,
    /// Cuts violated by the assignment (may be empty when all were already known).
    Reject(Vec<crate::cuts::Cut>),
    Abort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Items per bin.
    Found(Vec<Vec<usize>>),
    Exhausted,
    TimedOut,
}

/// Engine that enumerates assignments satisfying the model and the cut pool, asking
/// `separate` about each complete one. Another engine (say, a MILP solver with a lazy
/// constraint callback) can stand in for the built-in search.
pub trait LazyCutBackend {
    fn search(
        &mut self,
        model: &AssignmentModel<'_>,
        pool: &mut CutPool,
        separate: &mut dyn FnMut(&[Vec<usize>]) -> Separation,
    ) -> SearchOutcome;

    fn nodes(&self) -> u64;
}

/// Depth-first branch and bound over item-to-bin assignments.
#[derive(Debug, Default)]
pub struct CombinatorialSearch {
    nodes: u64,
    /// Filters used in the residual-capacity bound.
    pub bound_filters: usize,
}

impl CombinatorialSearch {
    pub fn new() -> Self {
        CombinatorialSearch { nodes: 0, bound_filters: 4 }
    }
}

enum Step {
    Found,
    Fail,
    Timeout,
}

struct Waste {
    filter: usize,
    /// Smallest value an item can take in any bin it may enter, by item.
    minval: Vec<f64>,
    /// Suffix minimum of `minval` over branching positions.
    sufmin: Vec<f64>,
    remaining: f64,
}

struct State<'m, 'p> {
    m: &'m AssignmentModel<'m>,
    pool: &'p mut CutPool,
    nbins: usize,
    n: usize,
    bins: Vec<Vec<usize>>,
    bin_of: Vec<usize>,
    opened: usize,
    load: Vec<f64>,
    waste: Vec<Waste>,
    by_item: Vec<Vec<(usize, u32)>>,
    lhs: Vec<Vec<u32>>,
    known_cuts: usize,
    violated: usize,
    nodes: u64,
    expired: bool,
    found: Option<Vec<Vec<usize>>>,
}

const UNASSIGNED: usize = usize::MAX;

impl State<'_, '_> {
    fn sync_cuts(&mut self) {
        while self.known_cuts < self.pool.len() {
            let c = self.known_cuts;
            let cut = &self.pool.cuts()[c];
            let mut row = vec![0u32; self.nbins];
            for (j, coef) in cut.support() {
                if j >= self.n {
                    continue;
                }
                self.by_item[j].push((c, coef));
                let b = self.bin_of[j];
                if b != UNASSIGNED && cut.applies_to(b) {
                    row[b] += coef;
                }
            }
            let rhs = cut.rhs();
            self.violated += row.iter().filter(|&&v| v > rhs).count();
            self.lhs.push(row);
            self.known_cuts += 1;
        }
    }

    fn fits(&mut self, j: usize, i: usize) -> bool {
        let ctx = &self.m.contexts[i];
        if !ctx.allowed[j] {
            return false;
        }
        if self.bins[i].iter().any(|&k| self.m.conflicts[j][k]) {
            return false;
        }
        for (f, flt) in self.m.filters.iter().enumerate() {
            if self.load[f * self.nbins + i] + flt.value(i, j) > flt.cap(i) + flt.tolerance(i) {
                return false;
            }
        }
        for &(c, coef) in &self.by_item[j] {
            let cut = &self.pool.cuts()[c];
            if cut.applies_to(i) && self.lhs[c][i] + coef > cut.rhs() {
                self.pool.bump(c);
                return false;
            }
        }
        true
    }

    fn assign(&mut self, j: usize, i: usize) {
        self.bins[i].push(j);
        self.bin_of[j] = i;
        for (f, flt) in self.m.filters.iter().enumerate() {
            self.load[f * self.nbins + i] += flt.value(i, j);
        }
        for w in &mut self.waste {
            w.remaining -= w.minval[j];
        }
        for &(c, coef) in &self.by_item[j] {
            if self.pool.cuts()[c].applies_to(i) {
                let rhs = self.pool.cuts()[c].rhs();
                let before = self.lhs[c][i];
                self.lhs[c][i] += coef;
                if before <= rhs && before + coef > rhs {
                    self.violated += 1;
                }
            }
        }
    }

    fn unassign(&mut self, j: usize, i: usize) {
        self.bins[i].pop();
        self.bin_of[j] = UNASSIGNED;
        for (f, flt) in self.m.filters.iter().enumerate() {
            self.load[f * self.nbins + i] -= flt.value(i, j);
        }
        for w in &mut self.waste {
            w.remaining += w.minval[j];
        }
        for &(c, coef) in &self.by_item[j] {
            if self.pool.cuts()[c].applies_to(i) {
                let rhs = self.pool.cuts()[c].rhs();
                let before = self.lhs[c][i];
                self.lhs[c][i] -= coef;
                if before > rhs && before - coef <= rhs {
                    self.violated -= 1;
                }
            }
        }
    }

    /// Residual capacity that items from position `pos` on can still use covers what they need.
    fn bound_ok(&self, pos: usize) -> bool {
        for w in &self.waste {
            let flt = &self.m.filters[w.filter];
            let threshold = w.sufmin[pos];
            let mut usable = 0.0;
            for i in 0..self.nbins {
                let r = flt.cap(i) - self.load[w.filter * self.nbins + i];
                if r + flt.tolerance(i) >= threshold {
                    usable += r;
                }
            }
            if usable + 1e-7 * usable.abs().max(1.0) < w.remaining {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, pos: usize, separate: &mut dyn FnMut(&[Vec<usize>]) -> Separation) -> Step {
        if self.violated > 0 {
            return Step::Fail;
        }
        if pos == self.n {
            return match separate(&self.bins) {
                Separation::Accept => {
                    self.found = Some(self.bins.clone());
                    Step::Found
                }
                Separation::Abort => Step::Timeout,
                Separation::Reject(cuts) => {
                    for c in cuts {
                        self.pool.insert(c);
                    }
                    self.sync_cuts();
                    Step::Fail
                }
            };
        }
        let j = self.m.order[pos];
        let (lo, hi) = if pos < self.m.clique_len {
            (pos, pos + 1)
        } else {
            let mut lo = 0;
            if pos > self.m.clique_len {
                let prev = self.m.order[pos - 1];
                if self.m.dims[prev] == self.m.dims[j] {
                    lo = self.bin_of[prev];
                }
            }
            (lo, (self.opened + 1).min(self.nbins))
        };
        for i in lo..hi {
            if self.violated > 0 {
                return Step::Fail;
            }
            self.nodes += 1;
            if self.nodes % 1024 == 0 {
                if let Some(d) = self.m.deadline {
                    if Instant::now() >= d {
                        self.expired = true;
                    }
                }
            }
            if self.expired {
                return Step::Timeout;
            }
            if !self.fits(j, i) {
                continue;
            }
            let opened_before = self.opened;
            self.opened = self.opened.max(i + 1);
            self.assign(j, i);
            let step = if self.bound_ok(pos + 1) { self.dfs(pos + 1, separate) } else { Step::Fail };
            self.unassign(j, i);
            self.opened = opened_before;
            match step {
                Step::Fail => {}
                other => return other,
            }
        }
        Step::Fail
    }
}

impl LazyCutBackend for CombinatorialSearch {
    fn search(
        &mut self,
        model: &AssignmentModel<'_>,
        pool: &mut CutPool,
        separate: &mut dyn FnMut(&[Vec<usize>]) -> Separation,
    ) -> SearchOutcome {
        let n = model.dims.len();
        let nbins = model.contexts.len();
        if model.clique_len > nbins {
            return SearchOutcome::Exhausted;
        }
        let mut pos = vec![0; n];
        for (p, &j) in model.order.iter().enumerate() {
            pos[j] = p;
        }
        let waste = model
            .filters
            .iter()
            .enumerate()
            .take(self.bound_filters)
            .map(|(f, flt)| {
                let minval: Vec<f64> = (0..n)
                    .map(|j| {
                        let bins = if pos[j] < model.clique_len { pos[j]..pos[j] + 1 } else { 0..nbins.min(pos[j] + 1) };
                        bins.filter(|&i| model.contexts[i].allowed[j]).map(|i| flt.value(i, j)).fold(f64::INFINITY, f64::min)
                    })
                    .collect();
                let mut sufmin = vec![f64::INFINITY; n + 1];
                for p in (0..n).rev() {
                    sufmin[p] = sufmin[p + 1].min(minval[model.order[p]]);
                }
                let remaining = minval.iter().sum();
                Waste { filter: f, minval, sufmin, remaining }
            })
            .collect::<Vec<_>>();
        if waste.iter().any(|w| !w.remaining.is_finite()) {
            // Some item fits no bin.
            return SearchOutcome::Exhausted;
        }
        let mut st = State {
            m: model,
            pool,
            nbins,
            n,
            bins: vec![Vec::new(); nbins],
            bin_of: vec![UNASSIGNED; n],
            opened: model.clique_len,
            load: vec![0.0; model.filters.len() * nbins],
            waste,
            by_item: vec![Vec::new(); n],
            lhs: Vec::new(),
            known_cuts: 0,
            violated: 0,
            nodes: 0,
            expired: false,
            found: None,
        };
        st.sync_cuts();
        let step = if st.bound_ok(0) { st.dfs(0, separate) } else { Step::Fail };
        self.nodes += st.nodes;
        match step {
            Step::Found => SearchOutcome::Found(st.found.take().expect("accepted leaf recorded")),
            Step::Fail => SearchOutcome::Exhausted,
            Step::Timeout => SearchOutcome::TimedOut,
        }
    }

    fn nodes(&self) -> u64 {
        self.nodes
    }
}
