use std::collections::BTreeSet;
use std::time::Instant;

use super::{OppResult, Verdict};
use crate::instance::{PlacedItem, Placement};

fn others_sums(sizes: &[u32], j: usize, cap: u32) -> Vec<u32> {
    let mut sums: BTreeSet<u32> = BTreeSet::from([0]);
    for (k, &s) in sizes.iter().enumerate() {
        if k == j {
            continue;
        }
        let grown: Vec<u32> = sums.iter().map(|&v| v + s).filter(|&v| v <= cap).collect();
        sums.extend(grown);
    }
    sums.into_iter().collect()
}

struct Brute {
    dims: Vec<(u32, u32)>,
    /// Candidate `(x, y)` per item.
    cands: Vec<Vec<(u32, u32)>>,
    at: Vec<(u32, u32)>,
    nodes: u64,
}

impl Brute {
    fn clashes(&self, k: usize, (x, y): (u32, u32), upto: usize) -> bool {
        let (w, h) = self.dims[k];
        (0..upto).any(|i| {
            let (px, py) = self.at[i];
            let (pw, ph) = self.dims[i];
            x < px + pw && px < x + w && y < py + ph && py < y + h
        })
    }

    fn go(&mut self, k: usize) -> bool {
        let n = self.dims.len();
        if k == n {
            return true;
        }
        for ci in 0..self.cands[k].len() {
            let p = self.cands[k][ci];
            self.nodes += 1;
            // Identical items are taken in increasing (x, y) order.
            if k > 0 && self.dims[k] == self.dims[k - 1] && (p.0, p.1) <= self.at[k - 1] {
                continue;
            }
            if self.clashes(k, p, k) {
                continue;
            }
            self.at[k] = p;
            let open = (k + 1..n).all(|m| self.cands[m].iter().any(|&q| !self.clashes(m, q, k + 1)));
            if open && self.go(k + 1) {
                return true;
            }
        }
        false
    }
}

/// Exhaustive search over normal-pattern coordinates. Exact; meant as a test oracle.
pub fn opp_brute_force(dims: &[(u32, u32)], width: u32, height: u32) -> OppResult {
    let start = Instant::now();
    let n = dims.len();
    let area: u64 = dims.iter().map(|&(w, h)| w as u64 * h as u64).sum();
    if dims.iter().any(|&(w, h)| w > width || h > height) || area > width as u64 * height as u64 {
        return OppResult { verdict: Verdict::Infeasible, nodes: 0, seconds: 0.0 };
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(dims[j].0 as u64 * dims[j].1 as u64), dims[j], j));
    let sorted: Vec<(u32, u32)> = order.iter().map(|&j| dims[j]).collect();
    let ws: Vec<u32> = sorted.iter().map(|d| d.0).collect();
    let hs: Vec<u32> = sorted.iter().map(|d| d.1).collect();
    let unique_first = n < 2 || sorted[0] != sorted[1];
    let cands = (0..n)
        .map(|j| {
            let xs = others_sums(&ws, j, width - ws[j]);
            let ys = others_sums(&hs, j, height - hs[j]);
            let mut c = Vec::with_capacity(xs.len() * ys.len());
            for &x in &xs {
                for &y in &ys {
                    // Mirroring the packing puts the first item in the lower-left quadrant.
                    if j == 0 && unique_first && (2 * x > width - ws[j] || 2 * y > height - hs[j]) {
                        continue;
                    }
                    c.push((x, y));
                }
            }
            c
        })
        .collect();
    let mut b = Brute { dims: sorted, cands, at: vec![(0, 0); n], nodes: 0 };
    let verdict = if b.go(0) {
        let mut coords = vec![PlacedItem { id: 0, x: 0, y: 0 }; n];
        for (k, &j) in order.iter().enumerate() {
            coords[j] = PlacedItem { id: j, x: b.at[k].0, y: b.at[k].1 };
        }
        Verdict::Feasible(Placement::new(coords))
    } else {
        Verdict::Infeasible
    };
    OppResult { verdict, nodes: b.nodes, seconds: start.elapsed().as_secs_f64() }
}
