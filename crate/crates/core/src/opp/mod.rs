//! Single-bin feasibility: can a set of rectangles be packed into one `W x H` bin?
//!
//! The search fixes x-coordinates first (from meet-in-the-middle position sets, keeping the
//! total height over every unit column within `H`), then asks [`ycheck`] for matching
//! y-coordinates. A y-failure becomes a no-good over the x-assignment of the conflicting items.

mod brute;
mod positions;
mod ycheck;

use std::time::{Duration, Instant};

pub use brute::opp_brute_force;
pub use positions::{best_mim_positions, mim_positions, normal_patterns};

use crate::heuristic::pack_all;
use crate::instance::{PlacedItem, Placement};
use ycheck::{y_check, YOutcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Feasible(Placement),
    Infeasible,
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OppResult {
    pub verdict: Verdict,
    pub nodes: u64,
    pub seconds: f64,
}

impl OppResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, Verdict::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        self.verdict == Verdict::Infeasible
    }
}

/// Node counter with a wall-clock deadline, polled every 256 ticks.
pub(crate) struct Budget {
    nodes: u64,
    deadline: Option<Instant>,
    expired: bool,
}

impl Budget {
    fn new(deadline: Option<Instant>) -> Self {
        Budget { nodes: 0, deadline, expired: false }
    }

    pub(crate) fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes % 256 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.expired = true;
                }
            }
        }
        !self.expired
    }
}

/// Checks without a time limit.
pub fn opp_check_unlimited(dims: &[(u32, u32)], width: u32, height: u32) -> OppResult {
    opp_check_until(dims, width, height, None)
}

pub fn opp_check(dims: &[(u32, u32)], width: u32, height: u32, time_limit: Option<Duration>) -> OppResult {
    opp_check_until(dims, width, height, time_limit.map(|t| Instant::now() + t))
}

fn finish(start: Instant, verdict: Verdict, nodes: u64) -> OppResult {
    OppResult { verdict, nodes, seconds: start.elapsed().as_secs_f64() }
}

fn to_placement(coords: &[(u32, u32)]) -> Placement {
    Placement::new(coords.iter().enumerate().map(|(id, &(x, y))| PlacedItem { id, x, y }).collect())
}

/// Cheap necessary conditions; `true` means the set certainly does not fit.
pub fn quick_reject(dims: &[(u32, u32)], width: u32, height: u32) -> bool {
    let (bw, bh) = (width as u64, height as u64);
    if dims.iter().any(|&(w, h)| w > width || h > height) {
        return true;
    }
    if dims.iter().map(|&(w, h)| w as u64 * h as u64).sum::<u64>() > bw * bh {
        return true;
    }
    for (a, &(wa, ha)) in dims.iter().enumerate() {
        for &(wb, hb) in &dims[a + 1..] {
            if (wa + wb) as u64 > bw && (ha + hb) as u64 > bh {
                return true;
            }
        }
    }
    let stacked: u64 = dims.iter().filter(|d| 2 * d.0 as u64 > bw).map(|d| d.1 as u64).sum();
    let side: u64 = dims.iter().filter(|d| 2 * d.1 as u64 > bh).map(|d| d.0 as u64).sum();
    stacked > bh || side > bw
}

/// Decides feasibility before `deadline`. Placement ids are indices into `dims`.
pub fn opp_check_until(dims: &[(u32, u32)], width: u32, height: u32, deadline: Option<Instant>) -> OppResult {
    let start = Instant::now();
    if dims.is_empty() {
        return finish(start, Verdict::Feasible(Placement::default()), 0);
    }
    if quick_reject(dims, width, height) {
        return finish(start, Verdict::Infeasible, 0);
    }
    if let Some(coords) = pack_all(dims, width, height) {
        return finish(start, Verdict::Feasible(to_placement(&coords)), 0);
    }

    // Search order: area descending, then width descending.
    let mut order: Vec<usize> = (0..dims.len()).collect();
    order.sort_by(|&a, &b| {
        let ka = (dims[a].0 as u64 * dims[a].1 as u64, dims[a].0, dims[a].1);
        let kb = (dims[b].0 as u64 * dims[b].1 as u64, dims[b].0, dims[b].1);
        kb.cmp(&ka).then(a.cmp(&b))
    });
    let sorted: Vec<(u32, u32)> = order.iter().map(|&j| dims[j]).collect();
    let widths: Vec<u32> = sorted.iter().map(|d| d.0).collect();
    let (_, pos) = best_mim_positions(&widths, width);

    let mut budget = Budget::new(deadline);
    let n = sorted.len();
    let mut suffix_area = vec![0u64; n + 1];
    for k in (0..n).rev() {
        suffix_area[k] = suffix_area[k + 1] + sorted[k].0 as u64 * sorted[k].1 as u64;
    }
    let mut search = XSearch {
        same_prev: (0..n).map(|k| k > 0 && sorted[k] == sorted[k - 1]).collect(),
        dims: sorted,
        pos,
        width,
        height,
        load: vec![0; width as usize],
        xs: vec![0; n],
        nogoods: vec![Vec::new(); n],
        suffix_area,
        ys: Vec::new(),
        budget: &mut budget,
    };
    let outcome = search.dfs(0);
    let (xs, ys) = (search.xs.clone(), std::mem::take(&mut search.ys));
    let nodes = budget.nodes;
    match outcome {
        Step::Found => {
            let mut coords = vec![(0, 0); n];
            for k in 0..n {
                coords[order[k]] = (xs[k], ys[k]);
            }
            finish(start, Verdict::Feasible(to_placement(&coords)), nodes)
        }
        Step::Timeout => finish(start, Verdict::Timeout, nodes),
        Step::Fail | Step::Jump(_) => finish(start, Verdict::Infeasible, nodes),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Found,
    Fail,
    /// Every extension fails until the item at this level changes position.
    Jump(usize),
    Timeout,
}

struct XSearch<'a> {
    dims: Vec<(u32, u32)>,
    pos: Vec<Vec<u32>>,
    width: u32,
    height: u32,
    load: Vec<u32>,
    xs: Vec<u32>,
    same_prev: Vec<bool>,
    /// Learned x-assignments, stored under their highest level.
    nogoods: Vec<Vec<Vec<(usize, u32)>>>,
    suffix_area: Vec<u64>,
    ys: Vec<u32>,
    budget: &'a mut Budget,
}

impl XSearch<'_> {
    fn dfs(&mut self, k: usize) -> Step {
        let n = self.dims.len();
        if k == n {
            return self.leaf();
        }
        if !self.budget.tick() {
            return Step::Timeout;
        }
        let (w, h) = self.dims[k];
        let min_x = if self.same_prev[k] { self.xs[k - 1] } else { 0 };
        let room = self.height - h;
        for pi in 0..self.pos[k].len() {
            let x = self.pos[k][pi];
            if x < min_x {
                continue;
            }
            let cols = x as usize..(x + w) as usize;
            if self.load[cols.clone()].iter().any(|&l| l > room) {
                continue;
            }
            self.xs[k] = x;
            if self.nogoods[k].iter().any(|ng| ng.iter().all(|&(i, xi)| self.xs[i] == xi)) {
                continue;
            }
            for c in cols.clone() {
                self.load[c] += h;
            }
            let r = if self.forward_ok(k + 1) { self.dfs(k + 1) } else { Step::Fail };
            for c in cols {
                self.load[c] -= h;
            }
            match r {
                Step::Fail => {}
                Step::Jump(m) if m == k => {}
                other => return other,
            }
        }
        Step::Fail
    }

    fn leaf(&mut self) -> Step {
        let all: Vec<usize> = (0..self.dims.len()).collect();
        match y_check(&self.dims, &self.xs, &all, self.height, self.budget) {
            YOutcome::Feasible(ys) => {
                self.ys = ys;
                Step::Found
            }
            YOutcome::Timeout => Step::Timeout,
            YOutcome::Infeasible(conflict) => {
                let last = *conflict.iter().max().unwrap();
                let ng: Vec<(usize, u32)> = conflict.iter().map(|&i| (i, self.xs[i])).collect();
                self.nogoods[last].push(ng);
                Step::Jump(last)
            }
        }
    }

    /// Every unplaced item still has a position, and the columns they can reach hold
    /// their total area.
    fn forward_ok(&self, from: usize) -> bool {
        let n = self.dims.len();
        if from == n {
            return true;
        }
        let wlen = self.width as usize;
        let mut reach = vec![0u64; wlen];
        let mut window_max: Vec<u32> = Vec::new();
        let mut last_w = 0u32;
        for m in from..n {
            let (w, h) = self.dims[m];
            if w != last_w {
                window_max = sliding_max(&self.load, w as usize);
                last_w = w;
            }
            let min_x = if m == from && self.same_prev[m] { self.xs[m - 1] } else { 0 };
            let room = self.height - h;
            let mut diff = vec![0i32; wlen + 1];
            let mut any = false;
            for &x in &self.pos[m] {
                if x >= min_x && window_max[x as usize] <= room {
                    diff[x as usize] += 1;
                    diff[(x + w) as usize] -= 1;
                    any = true;
                }
            }
            if !any {
                return false;
            }
            let mut run = 0i32;
            for c in 0..wlen {
                run += diff[c];
                if run > 0 {
                    reach[c] += h as u64;
                }
            }
        }
        let usable: u64 = (0..wlen).map(|c| reach[c].min((self.height - self.load[c]) as u64)).sum();
        usable >= self.suffix_area[from]
    }
}

/// `out[x] = max(v[x..x + w])` for every window start.
fn sliding_max(v: &[u32], w: usize) -> Vec<u32> {
    let mut out = vec![0u32; v.len() + 1 - w.min(v.len())];
    let mut dq: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for i in 0..v.len() {
        while dq.back().is_some_and(|&b| v[b] <= v[i]) {
            dq.pop_back();
        }
        dq.push_back(i);
        if dq[0] + w <= i {
            dq.pop_front();
        }
        if i + 1 >= w {
            out[i + 1 - w] = v[dq[0]];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{check_bin, Instance};

    fn feasible(dims: &[(u32, u32)], w: u32, h: u32) -> bool {
        let r = opp_check_unlimited(dims, w, h);
        if let Verdict::Feasible(p) = &r.verdict {
            let inst = Instance::new(w, h, dims).unwrap();
            check_bin(&inst, p).unwrap();
            assert_eq!(p.coords.len(), dims.len());
        }
        assert_ne!(r.verdict, Verdict::Timeout);
        r.is_feasible()
    }

    #[test]
    fn examples() {
        assert!(feasible(&[(5, 10), (5, 10)], 10, 10));
        assert!(!feasible(&[(6, 6); 3], 10, 10));
        assert!(feasible(&[(10, 10)], 10, 10));
        assert!(!opp_brute_force(&[(6, 6); 3], 10, 10).is_feasible());
        assert!(opp_brute_force(&[(6, 6), (4, 4), (4, 4)], 10, 10).is_feasible());
        assert!(opp_brute_force(&[], 10, 10).is_feasible());
    }

    #[test]
    fn pinwheel_needs_search() {
        // Five pieces tiling a 5x5 square around a unit hole; skyline cannot find it.
        let dims = [(3, 2), (2, 3), (3, 2), (2, 3), (1, 1)];
        assert!(feasible(&dims, 5, 5));
        assert!(opp_brute_force(&dims, 5, 5).is_feasible());
    }

    #[test]
    fn sliding_max_windows() {
        assert_eq!(sliding_max(&[1, 3, 2, 0, 5], 2), vec![3, 3, 2, 5]);
        assert_eq!(sliding_max(&[4, 1], 2), vec![4]);
        assert_eq!(sliding_max(&[4, 1, 7], 1), vec![4, 1, 7]);
    }
}
