mod common;

use bpp2d::dff::{apply, compute_bounds, conservative_scales, f0, f1, f2, l2_ccm, l_bkrs, DffKind};
use bpp2d::instance::{continuous_bound_ceil, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest number of `sizes` fitting `cap`, by enumeration.
fn ckp_brute(sizes: &[u32], cap: u32) -> u64 {
    (0..1usize << sizes.len())
        .filter(|m| (0..sizes.len()).filter(|j| m >> j & 1 == 1).map(|j| sizes[j]).sum::<u32>() <= cap)
        .map(|m| m.count_ones() as u64)
        .max()
        .unwrap_or(0)
}

/// Textbook forms, written independently of the library.
fn reference(kind: DffKind, k: u32, c: u32, sizes: &[u32], x: u32) -> u64 {
    match kind {
        DffKind::Identity => x as u64,
        DffKind::F0 => {
            if x > c - k {
                c as u64
            } else if x >= k {
                x as u64
            } else {
                0
            }
        }
        DffKind::F1 => {
            let j: Vec<u32> = sizes.iter().copied().filter(|&s| k <= s && 2 * s <= c).collect();
            if 2 * x > c {
                ckp_brute(&j, c) - ckp_brute(&j, c - x)
            } else if x >= k {
                1
            } else {
                0
            }
        }
        DffKind::F2 => {
            if 2 * x > c {
                2 * ((c / k) - (c - x) / k) as u64
            } else if 2 * x == c {
                (c / k) as u64
            } else {
                2 * (x / k) as u64
            }
        }
        DffKind::Scale(_) => unreachable!(),
    }
}

fn knapsack_brute(weights: &[u32], cap: u32, profits: &[f64]) -> f64 {
    (0..1usize << weights.len())
        .filter(|m| (0..weights.len()).filter(|j| m >> j & 1 == 1).map(|j| weights[j]).sum::<u32>() <= cap)
        .map(|m| (0..weights.len()).filter(|j| m >> j & 1 == 1).map(|j| profits[j]).sum::<f64>())
        .fold(0.0, f64::max)
}

#[test]
fn spec_examples() {
    assert_eq!(f0(3, 10, 9), Ok(10));
    assert_eq!(f0(3, 10, 5), Ok(5));
    assert_eq!(f0(3, 10, 2), Ok(0));
    assert_eq!(f1(2, 10, &[3, 3, 4], 7), Ok(2));
    assert_eq!(f1(2, 10, &[3, 3, 4], 4), Ok(1));
    assert_eq!(f1(2, 10, &[3, 3, 4], 1), Ok(0));
    assert_eq!(f2(5, 10, 6), Ok(4));
    assert_eq!(f2(3, 10, 5), Ok(3));
    assert_eq!(f2(3, 10, 2), Ok(0));
    assert!(f0(6, 10, 1).is_err());
    assert!(f2(0, 10, 1).is_err());

    let six = Instance::new(10, 10, &[(6, 6); 3]).unwrap();
    assert_eq!(l2_ccm(&six, 0).bound, 3);
    let scales = conservative_scales(&six, 1);
    assert!(scales[1].widths.iter().chain(&scales[1].heights).all(|&v| (v - 10.0).abs() < 1e-7));
    assert_eq!(l_bkrs(&six, &scales), 3);
    assert_eq!(compute_bounds(&six, 8, 0).l0, 3);

    let halves = Instance::new(10, 10, &[(5, 10), (5, 10)]).unwrap();
    let s = conservative_scales(&halves, 1);
    assert!((s[1].widths.iter().sum::<f64>() - 10.0).abs() < 1e-7);
    assert_eq!(compute_bounds(&halves, 8, 0).l0, 1);
    assert_eq!(compute_bounds(&Instance::new(10, 10, &[(10, 5), (10, 5)]).unwrap(), 8, 0).l0, 1);

    let lone = Instance::new(10, 10, &[(4, 4)]).unwrap();
    assert!((conservative_scales(&lone, 1)[1].widths[0] - 10.0).abs() < 1e-7);
    assert_eq!(compute_bounds(&Instance::new(10, 10, &[(10, 10)]).unwrap(), 8, 0).l0, 1);
    // Identity scales reproduce the continuous bound.
    assert_eq!(l_bkrs(&six, &scales[..1]), continuous_bound_ceil(&six));
}

#[test]
fn library_dffs_match_the_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let c = rng.gen_range(2..=40);
        let sizes: Vec<u32> = (0..rng.gen_range(1..=10)).map(|_| rng.gen_range(1..=c)).collect();
        for kind in [DffKind::F0, DffKind::F1, DffKind::F2] {
            for k in 1..=c / 2 {
                let (vals, cap) = apply(kind, k, c, &sizes);
                assert_eq!(cap, reference(kind, k, c, &sizes, c), "{kind:?} k={k} C={c}");
                for (&x, &v) in sizes.iter().zip(&vals) {
                    assert_eq!(v, reference(kind, k, c, &sizes, x), "{kind:?} k={k} C={c} x={x}");
                }
            }
        }
    }
}

#[test]
fn dff_images_of_fitting_subsets_fit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in [DffKind::F0, DffKind::F1, DffKind::F2] {
        let mut checked = 0;
        while checked < 1000 {
            let c = rng.gen_range(2..=60);
            let k = rng.gen_range(1..=c / 2);
            let sizes: Vec<u32> = (0..rng.gen_range(1..=12)).map(|_| rng.gen_range(1..=c)).collect();
            let (vals, cap) = apply(kind, k, c, &sizes);
            let pick: Vec<usize> = (0..sizes.len()).filter(|_| rng.gen_bool(0.5)).collect();
            if pick.iter().map(|&j| sizes[j]).sum::<u32>() > c {
                continue;
            }
            checked += 1;
            let image: u64 = pick.iter().map(|&j| vals[j]).sum();
            assert!(image <= cap, "{kind:?} k={k} C={c} sizes={sizes:?} pick={pick:?}");
        }
    }
}

#[test]
fn scales_pass_the_knapsack_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..60 {
        let (w, h) = (rng.gen_range(5..=30), rng.gen_range(5..=30));
        let n = rng.gen_range(1..=12);
        let dims = common::random_dims(&mut rng, n, w, h);
        let inst = Instance::new(w, h, &dims).unwrap();
        let ws: Vec<u32> = dims.iter().map(|d| d.0).collect();
        let hs: Vec<u32> = dims.iter().map(|d| d.1).collect();
        for s in conservative_scales(&inst, 4) {
            assert!(s.widths.iter().chain(&s.heights).all(|&v| v >= -1e-9));
            assert!(knapsack_brute(&ws, w, &s.widths) <= w as f64 + 1e-6, "scale {} widths {:?}", s.index, s.widths);
            assert!(knapsack_brute(&hs, h, &s.heights) <= h as f64 + 1e-6, "scale {} heights {:?}", s.index, s.heights);
        }
    }
}

#[test]
fn ccm_matches_enumeration_over_all_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..80 {
        let (w, h) = (rng.gen_range(2..=16), rng.gen_range(2..=16));
        let n = rng.gen_range(1..=8);
        let dims = common::random_dims(&mut rng, n, w, h);
        let inst = Instance::new(w, h, &dims).unwrap();
        let ws: Vec<u32> = dims.iter().map(|d| d.0).collect();
        let hs: Vec<u32> = dims.iter().map(|d| d.1).collect();
        let specs = |c: u32| {
            let mut v = vec![(DffKind::Identity, 0)];
            for kind in [DffKind::F0, DffKind::F1, DffKind::F2] {
                v.extend((1..=c / 2).map(|k| (kind, k)));
            }
            v
        };
        let mut best = 0u64;
        for &(u, k) in &specs(w) {
            for &(v, l) in &specs(h) {
                let den = reference(u, k, w, &ws, w) * reference(v, l, h, &hs, h);
                if den == 0 {
                    continue;
                }
                let num: u64 = dims.iter().map(|&(a, b)| reference(u, k, w, &ws, a) * reference(v, l, h, &hs, b)).sum();
                best = best.max(num.div_ceil(den));
            }
        }
        assert_eq!(l2_ccm(&inst, 0).bound as u64, best, "{dims:?} in {w}x{h}");
    }
}

#[test]
fn bounds_sit_between_area_and_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..200 {
        let (w, h) = (rng.gen_range(4..=12), rng.gen_range(4..=12));
        let n = rng.gen_range(1..=8);
        let dims = common::random_dims(&mut rng, n, w, h);
        let inst = Instance::new(w, h, &dims).unwrap();
        let b = compute_bounds(&inst, 8, 0);
        let opt = common::brute_optimum(&inst);
        assert!(continuous_bound_ceil(&inst) <= b.l0, "case {case}");
        assert!(b.l0 <= opt, "case {case}: l0 {} > opt {opt} for {dims:?} in {w}x{h}", b.l0);
    }
}
