//! Linear programming and knapsack utilities used by the bounding and lifting code.

mod knapsack;
mod packing;
mod simplex;

pub use knapsack::knapsack_01;
pub use packing::PackingLp;
pub use simplex::{solve_lp, Constraint, LinearProgram, LpSolution, LpStatus, Relation, Sense};

/// Which bin dimension a pattern respects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternAxis {
    /// Items side by side: total width within the bin width.
    WFeasible,
    /// Items stacked: total height within the bin height.
    HFeasible,
}

/// A one-dimensional pattern: a set of items whose widths (or heights) fit the bin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub items: Vec<usize>,
    pub axis: PatternAxis,
}

impl Pattern {
    pub fn is_valid(&self, widths: &[u32], heights: &[u32], bin_w: u32, bin_h: u32) -> bool {
        let (sizes, cap) = match self.axis {
            PatternAxis::WFeasible => (widths, bin_w),
            PatternAxis::HFeasible => (heights, bin_h),
        };
        self.items.iter().map(|&j| sizes[j] as u64).sum::<u64>() <= cap as u64
    }
}
