use std::collections::HashSet;

use serde::Serialize;

use super::clique::incompatible;
use crate::dff::{apply, Bounds};
use crate::preprocess::per_bin_reduce;

/// What bin `index` may hold, and its reduced dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinContext {
    pub index: usize,
    /// Indexed by item.
    pub allowed: Vec<bool>,
    pub width: u32,
    pub height: u32,
    /// Lifted `(w, h)` per item; only meaningful where `allowed`.
    pub sizes: Vec<(u32, u32)>,
    pub forced: Option<usize>,
}

impl BinContext {
    pub fn allowed_items(&self) -> Vec<usize> {
        (0..self.allowed.len()).filter(|&j| self.allowed[j]).collect()
    }
}

/// Clique members first, then the rest by non-increasing area (ties: larger width, index).
pub fn branching_order(dims: &[(u32, u32)], clique: &[usize]) -> Vec<usize> {
    let mut rest: Vec<usize> = (0..dims.len()).filter(|j| !clique.contains(j)).collect();
    let area = |j: usize| dims[j].0 as u64 * dims[j].1 as u64;
    rest.sort_by_key(|&j| (std::cmp::Reverse(area(j)), std::cmp::Reverse(dims[j].0), j));
    clique.iter().copied().chain(rest).collect()
}

/// Contexts for `bins` bins. `order` starts with the `clique_len` clique members; bin `i`
/// receives only items at position `>= i`, clique bins hold their member and nothing
/// incompatible with it.
pub fn build_contexts(dims: &[(u32, u32)], width: u32, height: u32, order: &[usize], clique_len: usize, bins: usize) -> Vec<BinContext> {
    let n = dims.len();
    let mut pos = vec![0; n];
    for (p, &j) in order.iter().enumerate() {
        pos[j] = p;
    }
    (0..bins)
        .map(|i| {
            let forced = (i < clique_len).then(|| order[i]);
            let allowed: Vec<bool> = (0..n)
                .map(|j| {
                    pos[j] >= i
                        && match forced {
                            Some(f) => j == f || (pos[j] >= clique_len && !incompatible(dims[f], dims[j], width, height)),
                            None => true,
                        }
                })
                .collect();
            let list: Vec<usize> = (0..n).filter(|&j| allowed[j]).collect();
            let mut sizes = dims.to_vec();
            let (mut bw, mut bh) = (width, height);
            if !list.is_empty() {
                let r = per_bin_reduce(dims, &list, width, height);
                bw = r.width;
                bh = r.height;
                for (k, &j) in list.iter().enumerate() {
                    sizes[j] = r.sizes[k];
                }
            }
            BinContext { index: i, allowed, width: bw, height: bh, sizes, forced }
        })
        .collect()
}

/// `sum over items in bin i of value(i, j) <= cap(i)`, one per DFF pair or scale pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityFilter {
    pub label: String,
    /// Per bin: index into `store`.
    which: Vec<usize>,
    caps: Vec<f64>,
    store: Vec<Vec<f64>>,
}

const FILTER_TOL: f64 = 1e-9;

impl CapacityFilter {
    pub fn bins(&self) -> usize {
        self.caps.len()
    }

    pub fn value(&self, bin: usize, item: usize) -> f64 {
        self.store[self.which[bin]][item]
    }

    pub fn cap(&self, bin: usize) -> f64 {
        self.caps[bin]
    }

    pub fn tolerance(&self, bin: usize) -> f64 {
        FILTER_TOL * self.caps[bin].abs().max(1.0)
    }

    /// Whether `items` may share bin `bin` under this filter.
    pub fn admits(&self, bin: usize, items: &[usize]) -> bool {
        let load: f64 = items.iter().map(|&j| self.value(bin, j)).sum();
        load <= self.cap(bin) + self.tolerance(bin)
    }
}

fn integer_images(kind: crate::dff::DffKind, k: u32, c: u32, sizes: &[u32]) -> Option<(Vec<f64>, f64)> {
    use crate::dff::DffKind;
    if kind != DffKind::Identity && (k == 0 || k > c / 2) {
        return None;
    }
    let (v, cap) = apply(kind, k, c, sizes);
    Some((v.into_iter().map(|x| x as f64).collect(), cap as f64))
}

fn product(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

struct Builder {
    filters: Vec<CapacityFilter>,
    seen: HashSet<Vec<u64>>,
}

impl Builder {
    fn push(&mut self, f: CapacityFilter) {
        let mut key: Vec<u64> = f.caps.iter().map(|c| c.to_bits()).collect();
        for (i, &w) in f.which.iter().enumerate() {
            key.push(i as u64);
            key.extend(f.store[w].iter().map(|v| v.to_bits()));
        }
        if self.seen.insert(key) {
            self.filters.push(f);
        }
    }
}

/// Per-bin capacity filters: the plain area, the best `alpha` DFF pairs (on each bin's
/// lifted sizes where the pair applies, else on the global sizes) and the best `beta`
/// scale pairs (global sizes).
pub fn dff_inequalities(
    dims: &[(u32, u32)],
    width: u32,
    height: u32,
    contexts: &[BinContext],
    bounds: &Bounds,
    alpha: usize,
    beta: usize,
) -> Vec<CapacityFilter> {
    use crate::dff::DffKind;
    let n = dims.len();
    let bins = contexts.len();
    let gw: Vec<u32> = dims.iter().map(|d| d.0).collect();
    let gh: Vec<u32> = dims.iter().map(|d| d.1).collect();
    let mut b = Builder { filters: Vec::new(), seen: HashSet::new() };

    let mut pairs = vec![(DffKind::Identity, 0, DffKind::Identity, 0, "area".to_string())];
    for p in bounds.pairs.iter().take(alpha) {
        let label = format!("dff {:?}({}) x {:?}({})", p.width.kind, p.width.k, p.height.kind, p.height.k);
        pairs.push((p.width.kind, p.width.k, p.height.kind, p.height.k, label));
    }
    for (wk, wp, hk, hp, label) in pairs {
        let (Some((xw, cw)), Some((xh, ch))) = (integer_images(wk, wp, width, &gw), integer_images(hk, hp, height, &gh)) else {
            continue;
        };
        let mut store = vec![product(&xw, &xh)];
        let gcap = cw * ch;
        let mut which = Vec::with_capacity(bins);
        let mut caps = Vec::with_capacity(bins);
        for ctx in contexts {
            let list = ctx.allowed_items();
            let lw: Vec<u32> = list.iter().map(|&j| ctx.sizes[j].0).collect();
            let lh: Vec<u32> = list.iter().map(|&j| ctx.sizes[j].1).collect();
            let local = (ctx.width != width || ctx.height != height || list.iter().any(|&j| ctx.sizes[j] != dims[j]))
                .then(|| (integer_images(wk, wp, ctx.width, &lw), integer_images(hk, hp, ctx.height, &lh)));
            match local {
                Some((Some((vw, lcw)), Some((vh, lch)))) => {
                    let mut vals = vec![f64::INFINITY; n];
                    for (k, &j) in list.iter().enumerate() {
                        vals[j] = vw[k] * vh[k];
                    }
                    store.push(vals);
                    which.push(store.len() - 1);
                    caps.push(lcw * lch);
                }
                _ => {
                    which.push(0);
                    caps.push(gcap);
                }
            }
        }
        if gcap > 0.0 {
            b.push(CapacityFilter { label, which, caps, store });
        }
    }

    let area = (width as u64 * height as u64) as f64;
    for combo in bounds.scale_pairs.iter().take(beta) {
        let (Some(sw), Some(sh)) = (
            bounds.scales.iter().find(|s| s.index == combo.width_index),
            bounds.scales.iter().find(|s| s.index == combo.height_index),
        ) else {
            continue;
        };
        if sw.widths.len() != n {
            continue;
        }
        b.push(CapacityFilter {
            label: format!("scale {} x {}", combo.width_index, combo.height_index),
            which: vec![0; bins],
            caps: vec![area; bins],
            store: vec![product(&sw.widths, &sh.heights)],
        });
    }
    b.filters
}
