//! Solve an instance exactly, streaming the solve log. Pass a native instance file to solve it instead.

use std::time::Duration;

use bpp2d::bench::generate_class;
use bpp2d::instance::{parse_instance, verify_solution, DimsOrder, Format};
use bpp2d::master::{solve_with, CutPool, LogEvent, MasterConfig};

fn main() {
    let inst = match std::env::args().nth(1) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).expect("readable file");
            parse_instance(&text, Format::Native, DimsOrder::WidthHeight).expect("valid instance")
        }
        // The heuristic start is one bin off on this one, so the search has work to do.
        None => generate_class(3, 20, 4),
    };
    let cfg = MasterConfig { time_limit: Some(Duration::from_secs(60)), ..MasterConfig::default() };
    let mut pool = CutPool::default();
    let sol = solve_with(&inst, &cfg, &mut pool, &mut |ev| match ev {
        LogEvent::Cut { .. } => {}
        other => println!("{}", serde_json::to_string(other).unwrap()),
    });
    println!("{:?}: {} bins (lower bound {}), {} OPP checks", sol.status, sol.upper_bound, sol.lower_bound, sol.stats.opp_calls);
    verify_solution(&inst, &sol).expect("packing verifies");
    for (b, bin) in sol.bins.iter().enumerate() {
        println!("  bin {b}: {:?}", bin.items);
    }
}
