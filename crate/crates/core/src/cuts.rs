//! Infeasible-subset reduction and cut lifting.

use std::collections::HashMap;
use std::sync::RwLock;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::lp::{knapsack_01, solve_lp, LinearProgram, LpStatus, Relation, Sense};
use crate::opp::{opp_check, Verdict};

/// Bins a cut applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CutScope {
    AllBins,
    Bin(usize),
}

/// `sum_{j in C} x_j + sum_{j not in C} alpha_j x_j <= |C| - 1` over the items of one bin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Cut {
    /// Sorted item indices of `C`.
    pub base: Vec<usize>,
    /// `(item, alpha)` with `alpha > 0`, for items outside `C`.
    pub lifted: Vec<(usize, u32)>,
    pub scope: CutScope,
}

impl Cut {
    pub fn unlifted(mut base: Vec<usize>, scope: CutScope) -> Self {
        base.sort_unstable();
        Cut { base, lifted: Vec::new(), scope }
    }

    pub fn rhs(&self) -> u32 {
        self.base.len() as u32 - 1
    }

    pub fn coefficient(&self, j: usize) -> u32 {
        if self.base.binary_search(&j).is_ok() {
            return 1;
        }
        self.lifted.iter().find(|l| l.0 == j).map_or(0, |l| l.1)
    }

    /// Left-hand side for a bin holding `items`.
    pub fn lhs(&self, items: &[usize]) -> u32 {
        items.iter().map(|&j| self.coefficient(j)).sum()
    }

    pub fn is_violated_by(&self, items: &[usize]) -> bool {
        self.lhs(items) > self.rhs()
    }

    pub fn applies_to(&self, bin: usize) -> bool {
        match self.scope {
            CutScope::AllBins => true,
            CutScope::Bin(b) => b == bin,
        }
    }

    /// Every item with a positive coefficient.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.base.iter().map(|&j| (j, 1)).chain(self.lifted.iter().copied())
    }
}

/// Cached single-bin verdict for a multiset of item sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MemoVerdict {
    /// Coordinates aligned with the canonical (sorted) size list.
    Feasible(Vec<(u32, u32)>),
    Infeasible,
}

/// Memo of single-bin checks keyed by the sorted list of item sizes.
#[derive(Debug, Default)]
pub struct CheckMemo {
    map: RwLock<HashMap<Vec<(u32, u32)>, MemoVerdict>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Checked {
    Feasible,
    Infeasible,
    Timeout,
}

/// Outcome of a memoized check with its coordinates, indexed like the query.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub status: Checked,
    pub coords: Option<Vec<(u32, u32)>>,
    pub from_memo: bool,
    pub seconds: f64,
}

impl CheckMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn canonical(dims: &[(u32, u32)]) -> (Vec<usize>, Vec<(u32, u32)>) {
        let mut order: Vec<usize> = (0..dims.len()).collect();
        order.sort_by_key(|&k| (dims[k], k));
        let key = order.iter().map(|&k| dims[k]).collect();
        (order, key)
    }

    pub fn get(&self, dims: &[(u32, u32)]) -> Option<MemoVerdict> {
        let (_, key) = Self::canonical(dims);
        self.map.read().unwrap().get(&key).cloned()
    }

    /// Checks `dims` in a `width x height` bin, consulting and filling the memo.
    pub fn check(&self, dims: &[(u32, u32)], width: u32, height: u32, limit: Option<Duration>) -> CheckOutcome {
        let (order, key) = Self::canonical(dims);
        let cached = self.map.read().unwrap().get(&key).cloned();
        let unsort = |canon: &[(u32, u32)]| {
            let mut out = vec![(0, 0); dims.len()];
            for (c, &k) in order.iter().enumerate() {
                out[k] = canon[c];
            }
            out
        };
        match cached {
            Some(MemoVerdict::Infeasible) => {
                return CheckOutcome { status: Checked::Infeasible, coords: None, from_memo: true, seconds: 0.0 }
            }
            Some(MemoVerdict::Feasible(c)) => {
                return CheckOutcome { status: Checked::Feasible, coords: Some(unsort(&c)), from_memo: true, seconds: 0.0 }
            }
            None => {}
        }
        let r = opp_check(&key, width, height, limit);
        let (status, verdict) = match r.verdict {
            Verdict::Feasible(p) => {
                let canon: Vec<(u32, u32)> = (0..key.len()).map(|k| p.get(k).expect("placement covers every item")).collect();
                (Checked::Feasible, Some(MemoVerdict::Feasible(canon)))
            }
            Verdict::Infeasible => (Checked::Infeasible, Some(MemoVerdict::Infeasible)),
            Verdict::Timeout => (Checked::Timeout, None),
        };
        let coords = match &verdict {
            Some(MemoVerdict::Feasible(c)) => Some(unsort(c)),
            _ => None,
        };
        if let Some(v) = verdict {
            self.map.write().unwrap().insert(key, v);
        }
        CheckOutcome { status, coords, from_memo: false, seconds: r.seconds }
    }
}

/// How an infeasible set is shrunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisMode {
    /// Remove items in order; stop at the first removal that is not proven infeasible.
    StopAtFirst,
    /// Try every item once, keeping each removal that stays infeasible.
    DeletionFilter,
}

#[derive(Debug, Clone)]
pub struct MisOptions {
    pub per_check_limit: Option<Duration>,
    /// Extra passes in random removal orders.
    pub gamma: usize,
    pub seed: u64,
    pub mode: MisMode,
}

impl Default for MisOptions {
    fn default() -> Self {
        MisOptions { per_check_limit: Some(Duration::from_secs(2)), gamma: 0, seed: 0, mode: MisMode::StopAtFirst }
    }
}

/// Result of [`find_mis`] with the work it took.
#[derive(Debug, Clone, PartialEq)]
pub struct MisResult {
    pub sets: Vec<Vec<usize>>,
    pub checks: u64,
    pub memo_hits: u64,
    pub seconds: f64,
    /// True when no check timed out, so `DeletionFilter` output is minimal.
    pub complete: bool,
}

/// Shrinks the infeasible set `set` (indices into `dims`). Items in `keep` are never removed.
pub fn find_mis(
    dims: &[(u32, u32)],
    set: &[usize],
    keep: &[usize],
    width: u32,
    height: u32,
    memo: &CheckMemo,
    opts: &MisOptions,
) -> MisResult {
    let mut res = MisResult { sets: Vec::new(), checks: 0, memo_hits: 0, seconds: 0.0, complete: true };
    let mut first: Vec<usize> = set.to_vec();
    first.sort_by_key(|&j| (dims[j].0 as u64 * dims[j].1 as u64, j));
    let mut orders = vec![first];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.gamma {
        let mut o = set.to_vec();
        o.shuffle(&mut rng);
        orders.push(o);
    }
    for order in orders {
        let mut cur: Vec<usize> = set.to_vec();
        for j in order {
            if keep.contains(&j) {
                continue;
            }
            let trial: Vec<usize> = cur.iter().copied().filter(|&k| k != j).collect();
            if trial.is_empty() {
                break;
            }
            let sub: Vec<(u32, u32)> = trial.iter().map(|&k| dims[k]).collect();
            let out = memo.check(&sub, width, height, opts.per_check_limit);
            res.checks += u64::from(!out.from_memo);
            res.memo_hits += u64::from(out.from_memo);
            res.seconds += out.seconds;
            match out.status {
                Checked::Infeasible => cur = trial,
                Checked::Timeout => {
                    res.complete = false;
                    if opts.mode == MisMode::StopAtFirst {
                        break;
                    }
                }
                Checked::Feasible => {
                    if opts.mode == MisMode::StopAtFirst {
                        break;
                    }
                }
            }
        }
        cur.sort_unstable();
        if !res.sets.contains(&cur) {
            res.sets.push(cur);
        }
    }
    res
}

const BIG_M: f64 = 1e6;
const RC_TOL: f64 = 1e-7;
const MAX_CG_ROUNDS: usize = 500;

/// Continuous bar-relaxation value of packing profit items together with `forced` items.
///
/// `items` are `(index, profit)` pairs; every index in `forced` has its selection fixed to
/// one. Returns `None` when the forced items cannot be covered even fractionally.
pub fn ukp_value(dims: &[(u32, u32)], items: &[(usize, f64)], forced: &[usize], width: u32, height: u32) -> Option<f64> {
    // Local item list: profit items first, then forced ones not already listed.
    let mut local: Vec<(usize, f64, bool)> = items.iter().map(|&(j, p)| (j, p, forced.contains(&j))).collect();
    for &f in forced {
        if !local.iter().any(|l| l.0 == f) {
            local.push((f, 0.0, true));
        }
    }
    let m = local.len();
    if m == 0 {
        return Some(0.0);
    }
    let ws: Vec<u32> = local.iter().map(|l| dims[l.0].0).collect();
    let hs: Vec<u32> = local.iter().map(|l| dims[l.0].1).collect();

    // Patterns: (members, is_row). A row pattern fits the width and covers item heights.
    let mut patterns: Vec<(Vec<usize>, bool)> = Vec::new();
    for k in 0..m {
        patterns.push((vec![k], true));
        patterns.push((vec![k], false));
    }
    for _ in 0..MAX_CG_ROUNDS {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let z: Vec<usize> = local
            .iter()
            .map(|&(_, p, f)| if f { lp.add_variable(p, 1.0, 1.0) } else { lp.add_variable(p, 0.0, 1.0) })
            .collect();
        let cols: Vec<usize> = patterns.iter().map(|_| lp.add_variable(0.0, 0.0, f64::INFINITY)).collect();
        let slack_row: Vec<usize> = (0..m).map(|_| lp.add_variable(-BIG_M, 0.0, f64::INFINITY)).collect();
        let slack_col: Vec<usize> = (0..m).map(|_| lp.add_variable(-BIG_M, 0.0, f64::INFINITY)).collect();
        // Height coverage by row patterns, then width coverage by column patterns.
        for k in 0..m {
            let mut coeffs: Vec<(usize, f64)> = vec![(z[k], -(hs[k] as f64)), (slack_row[k], 1.0)];
            coeffs.extend(patterns.iter().zip(&cols).filter(|(p, _)| p.1 && p.0.contains(&k)).map(|(_, &c)| (c, 1.0)));
            lp.add_constraint(coeffs, Relation::Ge, 0.0);
        }
        for k in 0..m {
            let mut coeffs: Vec<(usize, f64)> = vec![(z[k], -(ws[k] as f64)), (slack_col[k], 1.0)];
            coeffs.extend(patterns.iter().zip(&cols).filter(|(p, _)| !p.1 && p.0.contains(&k)).map(|(_, &c)| (c, 1.0)));
            lp.add_constraint(coeffs, Relation::Ge, 0.0);
        }
        let rows: Vec<(usize, f64)> = patterns.iter().zip(&cols).filter(|(p, _)| p.1).map(|(_, &c)| (c, 1.0)).collect();
        lp.add_constraint(rows, Relation::Le, height as f64);
        let colsum: Vec<(usize, f64)> = patterns.iter().zip(&cols).filter(|(p, _)| !p.1).map(|(_, &c)| (c, 1.0)).collect();
        lp.add_constraint(colsum, Relation::Le, width as f64);

        let sol = solve_lp(&lp);
        if sol.status != LpStatus::Optimal {
            return None;
        }
        let pi_row: Vec<f64> = (0..m).map(|k| -sol.duals[k]).collect();
        let pi_col: Vec<f64> = (0..m).map(|k| -sol.duals[m + k]).collect();
        let (cap_rows, cap_cols) = (sol.duals[2 * m], sol.duals[2 * m + 1]);
        let mut added = false;
        let (v, set) = knapsack_01(&ws, width, &pi_row);
        if v - cap_rows > RC_TOL && !set.is_empty() && !patterns.contains(&(set.clone(), true)) {
            patterns.push((set, true));
            added = true;
        }
        let (v, set) = knapsack_01(&hs, height, &pi_col);
        if v - cap_cols > RC_TOL && !set.is_empty() && !patterns.contains(&(set.clone(), false)) {
            patterns.push((set, false));
            added = true;
        }
        if !added {
            let artificial: f64 = slack_row.iter().chain(&slack_col).map(|&s| sol.primal[s]).sum();
            if artificial > 1e-6 {
                return None;
            }
            let value: f64 = local.iter().zip(&z).map(|(l, &v)| l.1 * sol.primal[v]).sum();
            return Some(value);
        }
    }
    None
}

/// Sequentially lifts the cover `base` (an infeasible set) over `candidates`, in the order
/// given. `forced` items are fixed inside the bin while computing coefficients.
pub fn lift_cut(
    dims: &[(u32, u32)],
    base: &[usize],
    candidates: &[usize],
    forced: &[usize],
    width: u32,
    height: u32,
    scope: CutScope,
) -> Cut {
    let mut cut = Cut::unlifted(base.to_vec(), scope);
    let rhs = cut.rhs() as i64;
    if rhs == 0 {
        // A single item that does not fit: nothing can be lifted usefully.
        return cut;
    }
    let mut profit: Vec<(usize, f64)> = cut.base.iter().map(|&j| (j, 1.0)).collect();
    for &j in candidates {
        if cut.base.contains(&j) || forced.contains(&j) {
            continue;
        }
        let mut fix: Vec<usize> = forced.to_vec();
        fix.push(j);
        let alpha = match ukp_value(dims, &profit, &fix, width, height) {
            Some(c) => (rhs - (c + 1e-6).floor() as i64).max(0),
            None => rhs,
        };
        if alpha > 0 {
            cut.lifted.push((j, alpha as u32));
            profit.push((j, alpha as f64));
        }
    }
    cut
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ukp_examples() {
        let dims = [(6, 6); 4];
        let c = ukp_value(&dims, &[(0, 1.0), (1, 1.0), (2, 1.0)], &[3], 10, 10).unwrap();
        assert!((c - 2.0 / 3.0).abs() < 1e-6, "{c}");
        assert_eq!((c + 1e-6).floor(), 0.0);
        assert_eq!(ukp_value(&dims, &[], &[], 10, 10), Some(0.0));
        let small = [(2, 2), (2, 2)];
        let c = ukp_value(&small, &[(0, 1.0)], &[1], 10, 10).unwrap();
        assert!((c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lifting_examples() {
        let dims = [(6, 6); 3];
        let cut = lift_cut(&dims, &[0, 1], &[2], &[], 10, 10, CutScope::AllBins);
        assert_eq!(cut.lifted, vec![(2, 1)]);
        assert!(cut.is_violated_by(&[0, 2]));

        let with_small = [(6, 6), (6, 6), (1, 1)];
        let cut = lift_cut(&with_small, &[0, 1], &[2], &[], 10, 10, CutScope::AllBins);
        assert!(cut.lifted.is_empty());

        let cut = lift_cut(&dims, &[0, 1], &[], &[], 10, 10, CutScope::AllBins);
        assert_eq!(cut, Cut::unlifted(vec![0, 1], CutScope::AllBins));
    }

    #[test]
    fn mis_of_three_squares_is_a_pair() {
        let dims = [(6, 6); 3];
        let memo = CheckMemo::new();
        let r = find_mis(&dims, &[0, 1, 2], &[], 10, 10, &memo, &MisOptions::default());
        assert_eq!(r.sets.len(), 1);
        assert_eq!(r.sets[0].len(), 2);
    }

    #[test]
    fn random_orders_are_deduplicated() {
        let dims = [(6, 6); 3];
        let memo = CheckMemo::new();
        let opts = MisOptions { gamma: 2, seed: 5, ..MisOptions::default() };
        let r = find_mis(&dims, &[0, 1, 2], &[], 10, 10, &memo, &opts);
        assert!(!r.sets.is_empty() && r.sets.len() <= 3);
        let mut uniq = r.sets.clone();
        uniq.dedup();
        assert_eq!(uniq.len(), r.sets.len());
    }

    #[test]
    fn memo_returns_coordinates_in_query_order() {
        let memo = CheckMemo::new();
        let a = memo.check(&[(4, 4), (6, 6)], 10, 10, None);
        let b = memo.check(&[(6, 6), (4, 4)], 10, 10, None);
        assert!(b.from_memo && !a.from_memo);
        let (ca, cb) = (a.coords.unwrap(), b.coords.unwrap());
        assert_eq!(ca[0], cb[1]);
        assert_eq!(ca[1], cb[0]);
    }
}
