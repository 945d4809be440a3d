//! Exact solver for the two-dimensional bin packing problem.

pub mod bench;
pub mod cuts;
pub mod dff;
pub mod heuristic;
pub mod instance;
pub mod lp;
pub mod master;
pub mod opp;
pub mod preprocess;
mod sums;

pub use sums::{max_reachable, SubsetSums};
