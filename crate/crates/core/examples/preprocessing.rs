//! Bin shrinking, item enlarging and the packing rules that fix or merge items.

use bpp2d::instance::Instance;
use bpp2d::preprocess::{enlarged_continuous_bound, per_bin_reduce, preprocess, shrink_bin, PreprocessOptions};

fn main() {
    let inst = Instance::new(20, 20, &[(20, 20), (14, 9), (6, 9), (7, 7), (7, 7), (3, 3), (13, 11)]).unwrap();
    println!("shrunk bin: {:?}", shrink_bin(&inst));
    println!("continuous bound after enlarging: {:.3}", enlarged_continuous_bound(&inst));

    let red = preprocess(&inst, PreprocessOptions::default());
    println!("reduced bin {}x{}, {:.1}% of items removed", red.width, red.height, red.percent_removed());
    for it in &red.fixed {
        println!("  fixed bin for item {}", it.lead());
    }
    for it in &red.items {
        let ids: Vec<usize> = it.members.iter().map(|m| m.id).collect();
        println!("  reduced item {}x{} holds {:?}", it.width, it.height, ids);
    }
    for (item, host, rule) in &red.record.removed_items {
        println!("  item {item} merged into {host} ({rule:?})");
    }

    // Lifting relative to the items allowed in one bin.
    let dims = inst.dims();
    let one = per_bin_reduce(&dims, &[1, 2, 5], 20, 20);
    println!("bin holding items 1, 2, 5: {}x{}, sizes {:?}", one.width, one.height, one.sizes);
}
