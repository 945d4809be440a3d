//! Problem data: items, bins, solutions and their text/JSON forms.

mod io;
mod verify;

pub use io::{
    parse_instance, parse_twobp_collection, serialize_instance, DimsOrder, Format, ParseError,
    TwoBpEntry,
};
pub use verify::{check_bin, verify_solution, Violation};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A rectangular item. Items are never rotated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    pub id: usize,
    pub width: u32,
    pub height: u32,
}

impl Item {
    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("bin dimensions must be positive")]
    EmptyBin,
    #[error("item {0} has a non-positive dimension")]
    NonPositive(usize),
    #[error("item {0} exceeds bin width")]
    TooWide(usize),
    #[error("item {0} exceeds bin height")]
    TooTall(usize),
}

/// A 2D bin packing instance: identical `width` x `height` bins and a list of items.
///
/// `bin_bound` is the number of bins the model may use (the `m` of the assignment
/// model). It starts at `n` and is lowered whenever a better packing is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: Vec<Item>,
    width: u32,
    height: u32,
    bin_bound: usize,
}

impl Instance {
    /// Builds an instance from `(width, height)` pairs; ids follow list order.
    pub fn new(width: u32, height: u32, dims: &[(u32, u32)]) -> Result<Self, InstanceError> {
        if width == 0 || height == 0 {
            return Err(InstanceError::EmptyBin);
        }
        let mut items = Vec::with_capacity(dims.len());
        for (id, &(w, h)) in dims.iter().enumerate() {
            if w == 0 || h == 0 {
                return Err(InstanceError::NonPositive(id));
            }
            if w > width {
                return Err(InstanceError::TooWide(id));
            }
            if h > height {
                return Err(InstanceError::TooTall(id));
            }
            items.push(Item { id, width: w, height: h });
        }
        Ok(Instance { bin_bound: items.len(), items, width, height })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bin_area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn bin_bound(&self) -> usize {
        self.bin_bound
    }

    /// Tightens `m`. Values above the current bound are ignored.
    pub fn tighten_bin_bound(&mut self, m: usize) {
        self.bin_bound = self.bin_bound.min(m);
    }

    pub fn total_area(&self) -> u64 {
        self.items.iter().map(Item::area).sum()
    }

    pub fn dims(&self) -> Vec<(u32, u32)> {
        self.items.iter().map(|it| (it.width, it.height)).collect()
    }
}

/// Total item area over bin area, unrounded.
pub fn continuous_bound(inst: &Instance) -> Ratio<u64> {
    Ratio::new(inst.total_area(), inst.bin_area())
}

/// `ceil` of the continuous bound.
pub fn continuous_bound_ceil(inst: &Instance) -> usize {
    inst.total_area().div_ceil(inst.bin_area()) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlacedItem {
    pub id: usize,
    pub x: u32,
    pub y: u32,
}

/// Lower-left coordinates of the items packed into one bin.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub coords: Vec<PlacedItem>,
}

impl Placement {
    pub fn new(coords: Vec<PlacedItem>) -> Self {
        Placement { coords }
    }

    pub fn get(&self, id: usize) -> Option<(u32, u32)> {
        self.coords.iter().find(|p| p.id == id).map(|p| (p.x, p.y))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedBin {
    pub items: Vec<usize>,
    #[serde(rename = "coords", with = "coords_only")]
    pub placement: Placement,
}

impl PackedBin {
    pub fn from_placement(placement: Placement) -> Self {
        let mut items: Vec<usize> = placement.coords.iter().map(|p| p.id).collect();
        items.sort_unstable();
        PackedBin { items, placement }
    }
}

mod coords_only {
    use super::{PlacedItem, Placement};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &Placement, s: S) -> Result<S::Ok, S::Error> {
        p.coords.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Placement, D::Error> {
        Ok(Placement { coords: Vec::<PlacedItem>::deserialize(d)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimedOut,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub opp_calls: u64,
    pub memo_hits: u64,
    pub cuts_added: u64,
    pub nodes: u64,
    pub incumbent_updates: u64,
    pub seconds: f64,
    pub opp_seconds: f64,
    pub root_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    #[serde(rename = "L")]
    pub lower_bound: usize,
    #[serde(rename = "U")]
    pub upper_bound: usize,
    pub bins: Vec<PackedBin>,
    pub stats: SolveStats,
    /// Set when `upper_bound` came from a caller-supplied value without a packing.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub external_bound: bool,
}

impl Solution {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
