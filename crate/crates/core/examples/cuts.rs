//! Shrink an infeasible bin to a minimal infeasible set and lift the resulting cut.

use bpp2d::cuts::{find_mis, lift_cut, CheckMemo, CutScope, MisMode, MisOptions};

fn main() {
    let dims = [(6, 6), (6, 6), (2, 2), (3, 8), (5, 5), (1, 1)];
    let (w, h) = (10, 10);
    let bin: Vec<usize> = (0..dims.len()).collect();
    let memo = CheckMemo::new();
    let opts = MisOptions { mode: MisMode::DeletionFilter, gamma: 2, ..MisOptions::default() };
    let r = find_mis(&dims, &bin, &[], w, h, &memo, &opts);
    println!("{} checks ({} from memo), minimal sets {:?}", r.checks, r.memo_hits, r.sets);

    let mut seen = Vec::new();
    for mis in &r.sets {
        let mut rest: Vec<usize> = bin.iter().copied().filter(|j| !mis.contains(j)).collect();
        rest.sort_by_key(|&j| std::cmp::Reverse(dims[j].0 * dims[j].1));
        let cut = lift_cut(&dims, mis, &rest, &[], w, h, CutScope::AllBins);
        let support: Vec<(usize, u32)> = (0..dims.len()).map(|j| (j, cut.coefficient(j))).collect();
        if seen.contains(&support) {
            continue;
        }
        seen.push(support);
        let lhs: Vec<String> = (0..dims.len())
            .filter(|&j| cut.coefficient(j) > 0)
            .map(|j| match cut.coefficient(j) {
                1 => format!("x{j}"),
                a => format!("{a} x{j}"),
            })
            .collect();
        println!("cut: {} <= {}", lhs.join(" + "), cut.rhs());
    }
}
