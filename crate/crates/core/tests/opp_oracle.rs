use bpp2d::instance::{check_bin, Instance};
use bpp2d::opp::{opp_brute_force, opp_check_unlimited, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn check_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut feasible = 0;
    for case in 0..2000 {
        let n = rng.gen_range(1..=8);
        let dims: Vec<(u32, u32)> = (0..n).map(|_| (rng.gen_range(1..=6), rng.gen_range(1..=6))).collect();
        let fast = opp_check_unlimited(&dims, 10, 10);
        let slow = opp_brute_force(&dims, 10, 10);
        assert_eq!(fast.is_feasible(), slow.is_feasible(), "case {case}: {dims:?}");
        if let Verdict::Feasible(p) = &fast.verdict {
            feasible += 1;
            check_bin(&Instance::new(10, 10, &dims).unwrap(), p).unwrap();
        }
    }
    assert!(feasible > 100);
}
