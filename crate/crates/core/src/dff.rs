//! Dual feasible functions, conservative scales and the lower bounds built from them.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::instance::Instance;
use crate::lp::{knapsack_01, PackingLp};

/// Guard subtracted before rounding fractional bounds up.
pub const ROUND_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    Width,
    Height,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DffKind {
    Identity,
    F0,
    F1,
    F2,
    /// The `k`-th conservative scale.
    Scale(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DffSpec {
    pub kind: DffKind,
    pub k: u32,
    pub axis: Axis,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DffError {
    #[error("parameter k={k} outside [1, {max}]")]
    ParameterOutOfRange { k: u32, max: u32 },
    #[error("size {x} exceeds capacity {c}")]
    SizeOutOfRange { x: u32, c: u32 },
}

fn check(k: u32, c: u32, x: u32) -> Result<(), DffError> {
    if k == 0 || k > c / 2 {
        return Err(DffError::ParameterOutOfRange { k, max: c / 2 });
    }
    if x > c {
        return Err(DffError::SizeOutOfRange { x, c });
    }
    Ok(())
}

fn f0_raw(k: u32, c: u32, x: u32) -> u64 {
    if x > c - k {
        c as u64
    } else if x >= k {
        x as u64
    } else {
        0
    }
}

fn f2_raw(k: u32, c: u32, x: u32) -> u64 {
    let (c64, x64, k64) = (c as u64, x as u64, k as u64);
    if 2 * x64 > c64 {
        2 * (c64 / k64 - (c64 - x64) / k64)
    } else if 2 * x64 == c64 {
        c64 / k64
    } else {
        2 * (x64 / k64)
    }
}

pub fn f0(k: u32, c: u32, x: u32) -> Result<u64, DffError> {
    check(k, c, x)?;
    Ok(f0_raw(k, c, x))
}

pub fn f2(k: u32, c: u32, x: u32) -> Result<u64, DffError> {
    check(k, c, x)?;
    Ok(f2_raw(k, c, x))
}

/// Cardinality knapsack over the sizes in `[k, C/2]`: how many fit a given capacity.
#[derive(Debug, Clone)]
struct Cardinality {
    prefix: Vec<u64>,
}

impl Cardinality {
    fn new(k: u32, c: u32, sizes: &[u32]) -> Self {
        let mut j: Vec<u64> = sizes.iter().filter(|&&s| s >= k && 2 * s as u64 <= c as u64).map(|&s| s as u64).collect();
        j.sort_unstable();
        let mut prefix = vec![0u64];
        for s in j {
            prefix.push(prefix.last().unwrap() + s);
        }
        Cardinality { prefix }
    }

    /// Smallest-first greedy, which is exact for counting.
    fn max_count(&self, cap: u64) -> u64 {
        (self.prefix.partition_point(|&p| p <= cap) - 1) as u64
    }

    fn eval(&self, k: u32, c: u32, x: u32) -> u64 {
        if 2 * x as u64 > c as u64 {
            self.max_count(c as u64) - self.max_count((c - x) as u64)
        } else if x >= k {
            1
        } else {
            0
        }
    }
}

/// Data-dependent DFF; `sizes` are the instance sizes along the axis.
pub fn f1(k: u32, c: u32, sizes: &[u32], x: u32) -> Result<u64, DffError> {
    check(k, c, x)?;
    Ok(Cardinality::new(k, c, sizes).eval(k, c, x))
}

/// Images of `sizes` and of the capacity under an integer DFF.
pub fn apply(kind: DffKind, k: u32, c: u32, sizes: &[u32]) -> (Vec<u64>, u64) {
    match kind {
        DffKind::Identity => (sizes.iter().map(|&s| s as u64).collect(), c as u64),
        DffKind::F0 => (sizes.iter().map(|&s| f0_raw(k, c, s)).collect(), c as u64),
        DffKind::F2 => (sizes.iter().map(|&s| f2_raw(k, c, s)).collect(), f2_raw(k, c, c)),
        DffKind::F1 => {
            let card = Cardinality::new(k, c, sizes);
            (sizes.iter().map(|&s| card.eval(k, c, s)).collect(), card.max_count(c as u64))
        }
        DffKind::Scale(_) => panic!("scales are not integer DFFs"),
    }
}

/// Every integer DFF with its parameter range for capacity `c`.
pub fn all_specs(c: u32, axis: Axis) -> Vec<DffSpec> {
    let mut out = vec![DffSpec { kind: DffKind::Identity, k: 0, axis }];
    for kind in [DffKind::F0, DffKind::F1, DffKind::F2] {
        for k in 1..=c / 2 {
            out.push(DffSpec { kind, k, axis });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DffPair {
    pub width: DffSpec,
    pub height: DffSpec,
    /// Transformed total area over transformed bin area.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcmBound {
    pub bound: usize,
    /// Distinct pairs, best ratio first.
    pub pairs: Vec<DffPair>,
}

struct Images {
    spec: DffSpec,
    values: Vec<u64>,
    cap: u64,
}

fn distinct_images(c: u32, sizes: &[u32], axis: Axis) -> Vec<Images> {
    let mut seen: HashSet<(Vec<u64>, u64)> = HashSet::new();
    let mut out = Vec::new();
    for spec in all_specs(c, axis) {
        let (values, cap) = apply(spec.kind, spec.k, c, sizes);
        if cap == 0 || values.iter().all(|&v| v == 0) {
            continue;
        }
        if seen.insert((values.clone(), cap)) {
            out.push(Images { spec, values, cap });
        }
    }
    out
}

/// Best bound over all products of a width DFF and a height DFF; keeps the best `keep` pairs.
pub fn l2_ccm(inst: &Instance, keep: usize) -> CcmBound {
    let ws: Vec<u32> = inst.items().iter().map(|it| it.width).collect();
    let hs: Vec<u32> = inst.items().iter().map(|it| it.height).collect();
    let wimg = distinct_images(inst.width(), &ws, Axis::Width);
    let himg = distinct_images(inst.height(), &hs, Axis::Height);
    let mut best = 0usize;
    let mut scored: Vec<(f64, usize, usize)> = Vec::with_capacity(wimg.len() * himg.len());
    for (a, wi) in wimg.iter().enumerate() {
        for (b, hi) in himg.iter().enumerate() {
            let num: u128 = wi.values.iter().zip(&hi.values).map(|(&x, &y)| x as u128 * y as u128).sum();
            let den = wi.cap as u128 * hi.cap as u128;
            best = best.max(num.div_ceil(den) as usize);
            scored.push((num as f64 / den as f64, a, b));
        }
    }
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let pairs = scored
        .into_iter()
        .take(keep)
        .map(|(ratio, a, b)| DffPair { width: wimg[a].spec, height: himg[b].spec, ratio })
        .collect();
    CcmBound { bound: best, pairs }
}

/// Modified sizes valid for one axis: every subset fitting the capacity by original size
/// also fits by modified size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalePair {
    pub index: usize,
    pub widths: Vec<f64>,
    pub heights: Vec<f64>,
}

const LP_PIVOTS: usize = 200_000;
const MAX_ROUNDS: usize = 2_000;

/// Row-generated LP over one axis: `max c . s` with `s(S) <= cap` for every subset `S`
/// whose original sizes fit `cap`.
struct ScaleLp {
    sizes: Vec<u32>,
    cap: u32,
    lp: PackingLp,
}

impl ScaleLp {
    fn new(sizes: Vec<u32>, cap: u32) -> Self {
        let n = sizes.len();
        let mut lp = PackingLp::new(vec![0.0; n]);
        for j in 0..n {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            lp.add_row(&row, cap as f64);
        }
        ScaleLp { sizes, cap, lp }
    }

    /// Most violated subset constraint, if any.
    fn separate(&self, s: &[f64]) -> Option<Vec<usize>> {
        let (value, set) = knapsack_01(&self.sizes, self.cap, s);
        (value > self.cap as f64 + 1e-9).then_some(set)
    }

    fn solve(&mut self, cost: &[f64]) -> Option<Vec<f64>> {
        self.lp.set_objective(cost.to_vec());
        for _ in 0..MAX_ROUNDS {
            if !self.lp.optimize(LP_PIVOTS) {
                return None;
            }
            let s = self.lp.primal();
            match self.separate(&s) {
                None => return Some(s),
                Some(set) => {
                    let mut row = vec![0.0; self.sizes.len()];
                    for j in set {
                        row[j] = 1.0;
                    }
                    self.lp.add_row(&row, self.cap as f64);
                }
            }
        }
        None
    }

    /// Scales `s` down until no fitting subset exceeds the capacity.
    fn make_valid(&self, mut s: Vec<f64>) -> Vec<f64> {
        for v in &mut s {
            *v = v.max(0.0);
        }
        let (value, _) = knapsack_01(&self.sizes, self.cap, &s);
        if value > self.cap as f64 {
            let f = self.cap as f64 / value;
            for v in &mut s {
                *v *= f;
            }
        }
        s
    }

    /// Solves, re-solving with a tilt toward larger sizes when the answer equals `prev`.
    fn next(&mut self, cost: &[f64], prev: &[f64]) -> Option<Vec<f64>> {
        let s = self.solve(cost)?;
        if !same(&s, prev) {
            return Some(self.make_valid(s));
        }
        let base: f64 = s.iter().zip(cost).map(|(a, b)| a * b).sum();
        let min_pos = cost.iter().copied().filter(|&c| c > 0.0).fold(f64::INFINITY, f64::min);
        if !min_pos.is_finite() {
            return Some(self.make_valid(s));
        }
        let tilt = 1e-4 * min_pos / cost.len() as f64;
        let tilted: Vec<f64> = cost.iter().map(|&c| c + tilt).collect();
        let alt = self.solve(&tilted)?;
        let value: f64 = alt.iter().zip(cost).map(|(a, b)| a * b).sum();
        let pick = if value >= base - 1e-7 * base.abs().max(1.0) { alt } else { s };
        Some(self.make_valid(pick))
    }
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

/// Conservative scales for `eta` iterations; index 0 holds the original sizes.
pub fn conservative_scales(inst: &Instance, eta: usize) -> Vec<ScalePair> {
    let ws: Vec<u32> = inst.items().iter().map(|it| it.width).collect();
    let hs: Vec<u32> = inst.items().iter().map(|it| it.height).collect();
    let mut out = vec![ScalePair {
        index: 0,
        widths: ws.iter().map(|&v| v as f64).collect(),
        heights: hs.iter().map(|&v| v as f64).collect(),
    }];
    if inst.is_empty() {
        return out;
    }
    let mut wlp = ScaleLp::new(ws, inst.width());
    let mut hlp = ScaleLp::new(hs, inst.height());
    for k in 1..=eta {
        let prev = out.last().unwrap();
        // A failed solve keeps the previous iterate.
        let w = wlp.next(&prev.heights, &prev.widths).unwrap_or_else(|| prev.widths.clone());
        let h = hlp.next(&prev.widths, &prev.heights).unwrap_or_else(|| prev.heights.clone());
        out.push(ScalePair { index: k, widths: w, heights: h });
    }
    out
}

/// `ceil(q - guard)` for a non-negative quotient.
pub fn guarded_ceil(q: f64) -> usize {
    (q - ROUND_GUARD).ceil().max(0.0) as usize
}

/// Best area bound over every combination of a width scale and a height scale.
pub fn l_bkrs(inst: &Instance, scales: &[ScalePair]) -> usize {
    ranked_scale_pairs(inst, scales).first().map_or(0, |p| guarded_ceil(p.ratio))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleCombo {
    pub width_index: usize,
    pub height_index: usize,
    pub ratio: f64,
}

/// All `(k, l)` scale combinations, best ratio first.
pub fn ranked_scale_pairs(inst: &Instance, scales: &[ScalePair]) -> Vec<ScaleCombo> {
    let area = inst.bin_area() as f64;
    let mut out = Vec::with_capacity(scales.len() * scales.len());
    for a in scales {
        for b in scales {
            let s: f64 = a.widths.iter().zip(&b.heights).map(|(x, y)| x * y).sum();
            out.push(ScaleCombo { width_index: a.index, height_index: b.index, ratio: s / area });
        }
    }
    out.sort_by(|x, y| y.ratio.total_cmp(&x.ratio).then((x.width_index, x.height_index).cmp(&(y.width_index, y.height_index))));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bounds {
    pub continuous: f64,
    pub ccm: usize,
    pub bkrs: usize,
    pub l0: usize,
    pub pairs: Vec<DffPair>,
    pub scales: Vec<ScalePair>,
    pub scale_pairs: Vec<ScaleCombo>,
}

/// Both bounds and the material reused by the search.
pub fn compute_bounds(inst: &Instance, eta: usize, keep_pairs: usize) -> Bounds {
    let ccm = l2_ccm(inst, keep_pairs);
    let scales = conservative_scales(inst, eta);
    let scale_pairs = ranked_scale_pairs(inst, &scales);
    let bkrs = scale_pairs.first().map_or(0, |p| guarded_ceil(p.ratio));
    Bounds {
        continuous: inst.total_area() as f64 / inst.bin_area() as f64,
        ccm: ccm.bound,
        bkrs,
        l0: ccm.bound.max(bkrs),
        pairs: ccm.pairs,
        scales,
        scale_pairs,
    }
}

/// `max(L2_CCM, L_BKRS)` with `eta` scale iterations.
pub fn l0(inst: &Instance, eta: usize) -> usize {
    compute_bounds(inst, eta, 0).l0
}
