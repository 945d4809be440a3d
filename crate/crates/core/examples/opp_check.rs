//! Decide whether a set of rectangles fits in one bin.

use std::time::Duration;

use bpp2d::opp::{opp_brute_force, opp_check, Verdict};

fn show(name: &str, dims: &[(u32, u32)], w: u32, h: u32) {
    let r = opp_check(dims, w, h, Some(Duration::from_secs(5)));
    match &r.verdict {
        Verdict::Feasible(p) => {
            let at: Vec<String> = p.coords.iter().map(|c| format!("{}@({},{})", c.id, c.x, c.y)).collect();
            println!("{name}: feasible {} [{} nodes]", at.join(" "), r.nodes);
        }
        Verdict::Infeasible => println!("{name}: infeasible [{} nodes]", r.nodes),
        Verdict::Timeout => println!("{name}: timed out"),
    }
    assert_eq!(r.is_feasible(), opp_brute_force(dims, w, h).is_feasible());
}

fn main() {
    show("halves", &[(5, 10), (5, 10)], 10, 10);
    show("three 6x6", &[(6, 6); 3], 10, 10);
    show("pinwheel", &[(6, 4), (4, 6), (6, 4), (4, 6), (2, 2)], 10, 10);
    show("tight", &[(7, 3), (3, 7), (7, 3), (3, 7), (1, 1)], 10, 10);
    show("area 99, no packing", &[(6, 4), (6, 4), (4, 6), (4, 6), (3, 1)], 10, 10);
}
