//! Run a benchmark suite and print the grouped table.
//!
//! With a directory argument the `.2bp` files in it are used; otherwise generated
//! instances of all ten classes. Optional second argument: seconds per instance.

use std::path::Path;
use std::time::Duration;

use bpp2d::bench::{aggregate, generated_suite, load_dir, render_table, run_all};
use bpp2d::instance::DimsOrder;
use bpp2d::master::MasterConfig;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let limit: u64 = args.get(2).map_or(10, |s| s.parse().expect("seconds"));
    let suite = match args.get(1) {
        Some(dir) => {
            let (found, warnings) = load_dir(Path::new(dir), DimsOrder::WidthHeight).expect("readable directory");
            for w in warnings {
                eprintln!("skipped {w}");
            }
            found
        }
        None => generated_suite(&(1..=10).collect::<Vec<_>>(), &[20], 3, 1),
    };
    let cfg = MasterConfig { time_limit: Some(Duration::from_secs(limit)), ..MasterConfig::default() };
    let rows = run_all(&suite, &cfg, 0);
    print!("{}", render_table(&aggregate(&rows)));
}
