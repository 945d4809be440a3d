//! Skyline placement and the heuristic start solution.

use bpp2d::bench::generate_class;
use bpp2d::dff::l0;
use bpp2d::heuristic::{bin_fill, initial_solution, Skyline, StartMode};

fn main() {
    let mut sky = Skyline::new(10, 10);
    for (w, h) in [(4, 3), (6, 5), (4, 4), (3, 3)] {
        let at = sky.insert(w, h);
        let profile: Vec<(u32, u32)> = sky.segments().iter().map(|s| (s.x, s.height)).collect();
        println!("{w}x{h} at {at:?}, skyline {profile:?}");
    }
    println!("bin_fill: {:?}", bin_fill(&[(6, 6), (6, 6), (4, 4), (4, 4), (4, 10)], 10, 10));

    for class in 1..=10 {
        let inst = generate_class(class, 40, 1);
        let sol = initial_solution(&inst, StartMode::Heuristic);
        println!("class {class:>2}: heuristic {} bins, L0 {}", sol.upper_bound, l0(&inst, 8));
    }
}
