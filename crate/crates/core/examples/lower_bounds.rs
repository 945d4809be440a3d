//! Dual feasible functions, conservative scales and the root lower bound.

use bpp2d::dff::{apply, compute_bounds, DffKind};
use bpp2d::instance::{continuous_bound_ceil, Instance};

fn main() {
    // Three items just over half the bin: area says 2 bins, three are needed.
    let inst = Instance::new(10, 10, &[(6, 6); 3]).unwrap();
    let b = compute_bounds(&inst, 8, 10);
    println!("ceil(Lc) = {}, L2_CCM = {}, L_BKRS = {}, L0 = {}", continuous_bound_ceil(&inst), b.ccm, b.bkrs, b.l0);
    if let Some(p) = b.pairs.first() {
        println!("best DFF pair: {:?} k={} x {:?} k={}", p.width.kind, p.width.k, p.height.kind, p.height.k);
    }

    let sizes = [6, 4, 3, 7];
    for kind in [DffKind::F0, DffKind::F1, DffKind::F2] {
        let (vals, cap) = apply(kind, 3, 10, &sizes);
        println!("{kind:?} k=3 on {sizes:?} in 10: {vals:?} / {cap}");
    }

    let mixed = Instance::new(20, 15, &[(11, 4), (11, 4), (11, 4), (9, 12), (6, 8), (6, 8), (3, 14)]).unwrap();
    let b = compute_bounds(&mixed, 4, 10);
    println!("mixed: Lc {:.3}, CCM {}, BKRS {}, {} scale vectors", b.continuous, b.ccm, b.bkrs, b.scales.len());
    for s in b.scales.iter().skip(1).take(2) {
        println!("  scale {}: widths {:?}", s.index, s.widths);
    }
}
