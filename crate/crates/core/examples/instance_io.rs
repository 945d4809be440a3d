//! Parse an instance, pack it by hand, verify the packing and print it as JSON.

use bpp2d::instance::{
    continuous_bound, parse_instance, serialize_instance, verify_solution, DimsOrder, Format, PackedBin, PlacedItem,
    Placement, Solution, SolveStats, SolveStatus,
};

fn main() {
    let text = "4\n10 10\n5 10\n5 10\n6 4\n4 6\n";
    let inst = parse_instance(text, Format::Native, DimsOrder::WidthHeight).expect("valid instance");
    println!("{} items in a {}x{} bin, continuous bound {}", inst.len(), inst.width(), inst.height(), continuous_bound(&inst));

    let bin = |coords: &[(usize, u32, u32)]| {
        PackedBin::from_placement(Placement::new(coords.iter().map(|&(id, x, y)| PlacedItem { id, x, y }).collect()))
    };
    let sol = Solution {
        status: SolveStatus::Feasible,
        lower_bound: 2,
        upper_bound: 2,
        bins: vec![bin(&[(0, 0, 0), (1, 5, 0)]), bin(&[(2, 0, 0), (3, 0, 4)])],
        stats: SolveStats::default(),
        external_bound: false,
    };
    println!("verify: {:?}", verify_solution(&inst, &sol));
    println!("{}", sol.to_json());

    // Overlapping items are rejected.
    let mut bad = sol.clone();
    bad.bins[1] = bin(&[(2, 0, 0), (3, 0, 3)]);
    println!("verify after moving item 3 down: {:?}", verify_solution(&inst, &bad));

    print!("as a .2bp file:\n{}", serialize_instance(&inst, Format::TwoBp, DimsOrder::HeightWidth));
}
