mod common;

use bpp2d::heuristic::heuristic_packing;
use bpp2d::instance::{verify_solution, Instance, Solution, SolveStats, SolveStatus};
use bpp2d::preprocess::{enlarge_items, per_bin_reduce, preprocess, shrink_bin, PreprocessOptions};
use bpp2d::max_reachable;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn subset_sums_brute(values: &[u32], cap: u32) -> u32 {
    (0..1usize << values.len())
        .map(|m| (0..values.len()).filter(|j| m >> j & 1 == 1).map(|j| values[j]).sum::<u32>())
        .filter(|&s| s <= cap)
        .max()
        .unwrap_or(0)
}

fn shrunk_and_enlarged(inst: &Instance) -> Instance {
    let (w, h) = shrink_bin(inst);
    let shrunk = Instance::new(w, h, &inst.dims()).unwrap();
    Instance::new(w, h, &enlarge_items(&shrunk)).unwrap()
}

fn instance_strategy(max_n: usize) -> impl Strategy<Value = Instance> {
    (2u32..25, 2u32..25).prop_flat_map(move |(w, h)| {
        prop::collection::vec((1..=w, 1..=h), 1..=max_n).prop_map(move |dims| Instance::new(w, h, &dims).unwrap())
    })
}

proptest! {
    #[test]
    fn max_reachable_matches_enumeration(values in prop::collection::vec(1u32..30, 0..12), cap in 0u32..80) {
        prop_assert_eq!(max_reachable(&values, cap), subset_sums_brute(&values, cap));
    }

    #[test]
    fn shrink_and_enlarge_only_move_one_way(inst in instance_strategy(12)) {
        let (w, h) = shrink_bin(&inst);
        prop_assert!(w <= inst.width() && h <= inst.height());
        let lifted = shrunk_and_enlarged(&inst);
        for (a, b) in inst.dims().iter().zip(lifted.dims()) {
            prop_assert!(b.0 >= a.0 && b.1 >= a.1);
        }
    }

    #[test]
    fn second_pass_changes_nothing(inst in instance_strategy(12)) {
        let once = shrunk_and_enlarged(&inst);
        prop_assert_eq!(shrunk_and_enlarged(&once), once);
    }

    #[test]
    fn per_bin_reduction_is_valid(inst in instance_strategy(10), mask in any::<u32>()) {
        let dims = inst.dims();
        let allowed: Vec<usize> = (0..dims.len()).filter(|j| mask >> j & 1 == 1).collect();
        prop_assume!(!allowed.is_empty());
        let lifted = shrunk_and_enlarged(&inst);
        let local = per_bin_reduce(&dims, &allowed, inst.width(), inst.height());
        prop_assert!(local.width <= lifted.width() && local.height <= lifted.height());
        for (k, &j) in allowed.iter().enumerate() {
            prop_assert!(local.sizes[k].0 >= dims[j].0 && local.sizes[k].1 >= dims[j].1);
        }
        // Every subset that lines up within the bin still does after lifting.
        for m in 0..1usize << allowed.len() {
            let pick: Vec<usize> = (0..allowed.len()).filter(|k| m >> k & 1 == 1).collect();
            let row: u32 = pick.iter().map(|&k| dims[allowed[k]].0).sum();
            let col: u32 = pick.iter().map(|&k| dims[allowed[k]].1).sum();
            if row <= inst.width() {
                prop_assert!(pick.iter().map(|&k| local.sizes[k].0).sum::<u32>() <= local.width);
            }
            if col <= inst.height() {
                prop_assert!(pick.iter().map(|&k| local.sizes[k].1).sum::<u32>() <= local.height);
            }
        }
    }

    #[test]
    fn per_bin_reduction_over_everything_is_global(inst in instance_strategy(10)) {
        let all: Vec<usize> = (0..inst.len()).collect();
        let local = per_bin_reduce(&inst.dims(), &all, inst.width(), inst.height());
        let lifted = shrunk_and_enlarged(&inst);
        prop_assert_eq!((local.width, local.height, local.sizes), (lifted.width(), lifted.height(), lifted.dims()));
    }
}

#[test]
fn spec_examples() {
    assert_eq!(max_reachable(&[3, 4], 10), 7);
    assert_eq!(max_reachable(&[], 9), 0);
    assert_eq!(max_reachable(&[5, 5], 10), 10);

    let six = Instance::new(10, 10, &[(6, 6); 3]).unwrap();
    assert_eq!(shrink_bin(&six), (6, 6));

    let two = Instance::new(10, 10, &[(6, 1), (3, 1)]).unwrap();
    assert_eq!(enlarge_items(&two)[0].0, 7);
    assert_eq!(enlarge_items(&Instance::new(10, 10, &[(4, 1)]).unwrap())[0].0, 10);
    assert!(enlarge_items(&Instance::new(10, 10, &[(5, 1), (5, 1)]).unwrap()).iter().all(|d| d.0 == 5));

    let r = per_bin_reduce(&[(6, 6), (3, 3)], &[0], 10, 10);
    assert_eq!((r.width, r.height, r.sizes.clone()), (6, 6, vec![(6, 6)]));
    let r = per_bin_reduce(&[(6, 6), (3, 3)], &[0, 1], 10, 10);
    assert_eq!(r.width, 9);
    assert_eq!(r.sizes[0].0, 6);

    let pair = preprocess(&Instance::new(10, 10, &[(7, 10), (3, 10)]).unwrap(), PreprocessOptions::default());
    assert!(pair.items.is_empty());
    assert_eq!(pair.fixed.len(), 1);
    let sixes = preprocess(&Instance::new(10, 10, &[(6, 6), (6, 6)]).unwrap(), PreprocessOptions::default());
    assert!(sixes.items.is_empty());
    assert_eq!(sixes.fixed.len(), 2);
    let small = preprocess(
        &Instance::new(10, 10, &[(2, 2), (3, 3)]).unwrap(),
        PreprocessOptions { shrink_enlarge: false, fix_and_remove: true },
    );
    assert_eq!(small.items.len(), 2);
    assert!(small.record.removed_items.is_empty());
}

#[test]
fn optimum_is_preserved_and_packings_expand() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut removed = 0;
    for case in 0..250 {
        let (w, h) = (rng.gen_range(4..=12), rng.gen_range(4..=12));
        let n = rng.gen_range(1..=8);
        let dims = common::random_dims(&mut rng, n, w, h);
        let inst = Instance::new(w, h, &dims).unwrap();
        let red = preprocess(&inst, PreprocessOptions::default());
        removed += red.record.removed_items.len();
        let residual = red.instance();
        let reduced_opt = if residual.is_empty() { 0 } else { common::brute_optimum(&residual) };
        assert_eq!(reduced_opt + red.fixed.len(), common::brute_optimum(&inst), "case {case}: {dims:?} in {w}x{h}");

        let packing = heuristic_packing(&residual.dims(), residual.width(), residual.height());
        let bins = red.expand(&packing);
        let sol = Solution {
            status: SolveStatus::Feasible,
            lower_bound: 1,
            upper_bound: bins.len(),
            bins,
            stats: SolveStats::default(),
            external_bound: false,
        };
        assert_eq!(verify_solution(&inst, &sol), Ok(()), "case {case}");
    }
    assert!(removed > 0, "the packing rules never fired");
}
