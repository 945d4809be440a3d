use std::fmt;

use super::{Instance, Placement, Solution};

/// First constraint a solution breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoBins,
    UnknownItem(usize),
    Unassigned(usize),
    AssignedTwice(usize),
    MissingCoords { item: usize, bin: usize },
    OutOfBounds(usize),
    Overlap(usize, usize),
    BinCountMismatch { reported: usize, actual: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoBins => write!(f, "solution has no bins"),
            Violation::UnknownItem(i) => write!(f, "unknown item {i}"),
            Violation::Unassigned(i) => write!(f, "item {i} unassigned"),
            Violation::AssignedTwice(i) => write!(f, "item {i} assigned twice"),
            Violation::MissingCoords { item, bin } => write!(f, "item {item} has no coordinates in bin {bin}"),
            Violation::OutOfBounds(i) => write!(f, "item {i} out of bounds"),
            Violation::Overlap(a, b) => write!(f, "overlap({a},{b})"),
            Violation::BinCountMismatch { reported, actual } => {
                write!(f, "upper bound {reported} but {actual} bins")
            }
        }
    }
}

impl std::error::Error for Violation {}

/// Checks that `sol.bins` partitions the items and that every bin is a valid packing.
pub fn verify_solution(inst: &Instance, sol: &Solution) -> Result<(), Violation> {
    if sol.bins.is_empty() {
        return Err(if inst.is_empty() { Violation::NoBins } else { Violation::Unassigned(0) });
    }
    let mut seen = vec![false; inst.len()];
    for (b, bin) in sol.bins.iter().enumerate() {
        for &id in &bin.items {
            let slot = seen.get_mut(id).ok_or(Violation::UnknownItem(id))?;
            if *slot {
                return Err(Violation::AssignedTwice(id));
            }
            *slot = true;
            if bin.placement.get(id).is_none() {
                return Err(Violation::MissingCoords { item: id, bin: b });
            }
        }
        if let Some(extra) = bin.placement.coords.iter().find(|p| !bin.items.contains(&p.id)) {
            return Err(Violation::UnknownItem(extra.id));
        }
        check_bin(inst, &bin.placement)?;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Violation::Unassigned(missing));
    }
    if !sol.external_bound && sol.upper_bound != sol.bins.len() {
        return Err(Violation::BinCountMismatch { reported: sol.upper_bound, actual: sol.bins.len() });
    }
    Ok(())
}

/// In-bounds and pairwise interior-disjointness of one bin's placement.
pub fn check_bin(inst: &Instance, placement: &Placement) -> Result<(), Violation> {
    let items = inst.items();
    let mut rects = Vec::with_capacity(placement.coords.len());
    for p in &placement.coords {
        let it = items.get(p.id).ok_or(Violation::UnknownItem(p.id))?;
        let (x1, y1) = (p.x as u64 + it.width as u64, p.y as u64 + it.height as u64);
        if x1 > inst.width() as u64 || y1 > inst.height() as u64 {
            return Err(Violation::OutOfBounds(p.id));
        }
        rects.push((p.id, p.x as u64, p.y as u64, x1, y1));
    }
    for (k, a) in rects.iter().enumerate() {
        for b in &rects[k + 1..] {
            if a.1 < b.3 && b.1 < a.3 && a.2 < b.4 && b.2 < a.4 {
                return Err(Violation::Overlap(a.0.min(b.0), a.0.max(b.0)));
            }
        }
    }
    Ok(())
}
