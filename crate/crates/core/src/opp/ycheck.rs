//! Vertical feasibility for items whose x-intervals are fixed.
//!
//! Items are placed bottom-up in canonical order (nondecreasing y, then index), each resting
//! on the current profile. Every feasible assignment has such a bottom-justified ordering.

use std::collections::HashSet;

use super::Budget;

pub(crate) enum YOutcome {
    /// y per requested item, in the order given.
    Feasible(Vec<u32>),
    /// A subset (of the requested items) that has no valid y-assignment.
    Infeasible(Vec<usize>),
    Timeout,
}

struct Component<'a> {
    dims: &'a [(u32, u32)],
    xs: &'a [u32],
    height: u32,
}

impl Component<'_> {
    /// Groups `subset` into classes of transitively x-overlapping items.
    fn split(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = subset.to_vec();
        order.sort_by_key(|&j| (self.xs[j], j));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut reach = 0u32;
        for j in order {
            let (x, w) = (self.xs[j], self.dims[j].0);
            match groups.last_mut() {
                Some(g) if x < reach => g.push(j),
                _ => groups.push(vec![j]),
            }
            reach = reach.max(x + w);
        }
        for g in &mut groups {
            g.sort_unstable();
        }
        groups
    }
}

struct Search<'a> {
    heights: Vec<u32>,
    /// Segment range `[lo, hi)` per local item.
    span: Vec<(usize, usize)>,
    height: u32,
    profile: Vec<u32>,
    remaining_cover: Vec<u64>,
    placed: Vec<bool>,
    ys: Vec<u32>,
    failed: HashSet<(Vec<bool>, Vec<u32>, u32, usize)>,
    budget: &'a mut Budget,
}

const MEMO_CAP: usize = 500_000;

impl Search<'_> {
    /// `Some(true)` feasible, `Some(false)` exhausted, `None` out of time.
    fn run(&mut self, count: usize, last_y: u32, last_idx: usize) -> Option<bool> {
        let n = self.heights.len();
        if count == n {
            return Some(true);
        }
        if !self.budget.tick() {
            return None;
        }
        for (s, &cover) in self.remaining_cover.iter().enumerate() {
            if self.profile[s].max(last_y) as u64 + cover > self.height as u64 {
                return Some(false);
            }
        }
        let key = (self.placed.clone(), self.profile.clone(), last_y, last_idx);
        if self.failed.contains(&key) {
            return Some(false);
        }
        for j in 0..n {
            if self.placed[j] {
                continue;
            }
            let (lo, hi) = self.span[j];
            let y = self.profile[lo..hi].iter().copied().max().unwrap_or(0);
            if y < last_y || (y == last_y && last_idx != usize::MAX && j < last_idx) {
                continue;
            }
            if y as u64 + self.heights[j] as u64 > self.height as u64 {
                continue;
            }
            let saved: Vec<u32> = self.profile[lo..hi].to_vec();
            for s in lo..hi {
                self.profile[s] = y + self.heights[j];
                self.remaining_cover[s] -= self.heights[j] as u64;
            }
            self.placed[j] = true;
            self.ys[j] = y;
            let r = self.run(count + 1, y, j);
            self.placed[j] = false;
            for (k, s) in (lo..hi).enumerate() {
                self.profile[s] = saved[k];
                self.remaining_cover[s] += self.heights[j] as u64;
            }
            match r {
                Some(false) => {}
                other => return other,
            }
        }
        if self.failed.len() >= MEMO_CAP {
            self.failed.clear();
        }
        self.failed.insert(key);
        Some(false)
    }
}

/// Solves one x-overlap class. `Some(Some(ys))` feasible, `Some(None)` infeasible.
fn solve_group(c: &Component<'_>, group: &[usize], budget: &mut Budget) -> Option<Option<Vec<u32>>> {
    let mut cuts: Vec<u32> = group.iter().flat_map(|&j| [c.xs[j], c.xs[j] + c.dims[j].0]).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let segs = cuts.len().saturating_sub(1);
    let span: Vec<(usize, usize)> = group
        .iter()
        .map(|&j| {
            let lo = cuts.binary_search(&c.xs[j]).unwrap();
            let hi = cuts.binary_search(&(c.xs[j] + c.dims[j].0)).unwrap();
            (lo, hi)
        })
        .collect();
    let heights: Vec<u32> = group.iter().map(|&j| c.dims[j].1).collect();
    let mut cover = vec![0u64; segs];
    for (k, &(lo, hi)) in span.iter().enumerate() {
        for v in &mut cover[lo..hi] {
            *v += heights[k] as u64;
        }
    }
    if cover.iter().any(|&v| v > c.height as u64) {
        return Some(None);
    }
    let mut s = Search {
        heights,
        span,
        height: c.height,
        profile: vec![0; segs],
        remaining_cover: cover,
        placed: vec![false; group.len()],
        ys: vec![0; group.len()],
        failed: HashSet::new(),
        budget,
    };
    match s.run(0, 0, usize::MAX)? {
        true => Some(Some(s.ys)),
        false => Some(None),
    }
}

/// First infeasible class of `subset`, or the y-values of all of it.
fn check_subset(c: &Component<'_>, subset: &[usize], budget: &mut Budget) -> Option<Result<Vec<(usize, u32)>, Vec<usize>>> {
    let mut ys = Vec::with_capacity(subset.len());
    for g in c.split(subset) {
        match solve_group(c, &g, budget)? {
            Some(v) => ys.extend(g.iter().copied().zip(v)),
            None => return Some(Err(g)),
        }
    }
    Some(Ok(ys))
}

/// Decides whether the items in `subset` (indices into `dims`, x-coordinates `xs`) admit
/// y-coordinates within `height`. On failure the returned set is shrunk greedily, dropping
/// small items first while it stays infeasible.
pub(crate) fn y_check(dims: &[(u32, u32)], xs: &[u32], subset: &[usize], height: u32, budget: &mut Budget) -> YOutcome {
    let c = Component { dims, xs, height };
    let mut conflict = match check_subset(&c, subset, budget) {
        None => return YOutcome::Timeout,
        Some(Ok(pairs)) => {
            let mut ys = vec![0u32; subset.len()];
            for (j, y) in pairs {
                let k = subset.iter().position(|&s| s == j).unwrap();
                ys[k] = y;
            }
            return YOutcome::Feasible(ys);
        }
        Some(Err(g)) => g,
    };
    let mut order = conflict.clone();
    order.sort_by_key(|&j| (dims[j].0 as u64 * dims[j].1 as u64, j));
    for j in order {
        if !conflict.contains(&j) || conflict.len() <= 2 {
            continue;
        }
        let trial: Vec<usize> = conflict.iter().copied().filter(|&k| k != j).collect();
        match check_subset(&c, &trial, budget) {
            None => break,
            Some(Err(g)) => conflict = g,
            Some(Ok(_)) => {}
        }
    }
    YOutcome::Infeasible(conflict)
}
