#![allow(dead_code)]

use bpp2d::instance::Instance;
use bpp2d::opp::opp_brute_force;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Single-bin feasibility of every subset, indexed by bitmask.
pub fn feasible_subsets(dims: &[(u32, u32)], width: u32, height: u32) -> Vec<bool> {
    let n = dims.len();
    (0..1usize << n)
        .map(|mask| {
            let sub: Vec<(u32, u32)> = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| dims[j]).collect();
            sub.is_empty() || opp_brute_force(&sub, width, height).is_feasible()
        })
        .collect()
}

/// Fewest bins by exact set partitioning over feasible subsets.
pub fn brute_optimum(inst: &Instance) -> usize {
    let dims = inst.dims();
    let n = dims.len();
    let ok = feasible_subsets(&dims, inst.width(), inst.height());
    let full = (1usize << n) - 1;
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let part = sub | low;
            if ok[part] && best[mask ^ part] != usize::MAX {
                best[mask] = best[mask].min(best[mask ^ part] + 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best[full]
}

pub fn random_dims(rng: &mut ChaCha8Rng, n: usize, width: u32, height: u32) -> Vec<(u32, u32)> {
    (0..n).map(|_| (rng.gen_range(1..=width), rng.gen_range(1..=height))).collect()
}
