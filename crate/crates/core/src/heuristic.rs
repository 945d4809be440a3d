//! Skyline bottom-left packing and the first-fit-decreasing start solution.

use crate::instance::{Instance, PackedBin, PlacedItem, Placement, Solution, SolveStats, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub x: u32,
    pub width: u32,
    pub height: u32,
}

/// Upper contour of the items placed so far, as contiguous segments covering `[0, W)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skyline {
    width: u32,
    height: u32,
    segments: Vec<Segment>,
}

impl Skyline {
    pub fn new(width: u32, height: u32) -> Self {
        Skyline { width, height, segments: vec![Segment { x: 0, width, height: 0 }] }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Lowest, then leftmost, segment-aligned position for a `w` x `h` item.
    pub fn find(&self, w: u32, h: u32) -> Option<(u32, u32)> {
        let mut best: Option<(u32, u32)> = None;
        for (i, seg) in self.segments.iter().enumerate() {
            let x = seg.x;
            if x as u64 + w as u64 > self.width as u64 {
                break;
            }
            let mut y = 0;
            for s in &self.segments[i..] {
                if s.x >= x + w {
                    break;
                }
                y = y.max(s.height);
            }
            if y as u64 + h as u64 > self.height as u64 {
                continue;
            }
            if best.is_none_or(|(by, bx)| (y, x) < (by, bx)) {
                best = Some((y, x));
            }
        }
        best.map(|(y, x)| (x, y))
    }

    /// Raises the contour over `[x, x + w)` to `y + h`.
    pub fn place(&mut self, x: u32, y: u32, w: u32, h: u32) {
        let top = y + h;
        let end = x + w;
        let mut next = Vec::with_capacity(self.segments.len() + 2);
        for s in &self.segments {
            let s_end = s.x + s.width;
            if s_end <= x || s.x >= end {
                next.push(*s);
                continue;
            }
            if s.x < x {
                next.push(Segment { x: s.x, width: x - s.x, height: s.height });
            }
            if s.x <= x {
                next.push(Segment { x, width: w, height: top });
            }
            if s_end > end {
                next.push(Segment { x: end, width: s_end - end, height: s.height });
            }
        }
        let mut merged: Vec<Segment> = Vec::with_capacity(next.len());
        for s in next {
            match merged.last_mut() {
                Some(last) if last.height == s.height => last.width += s.width,
                _ => merged.push(s),
            }
        }
        self.segments = merged;
    }

    /// Places the item if possible and returns its position.
    pub fn insert(&mut self, w: u32, h: u32) -> Option<(u32, u32)> {
        let (x, y) = self.find(w, h)?;
        self.place(x, y, w, h);
        Some((x, y))
    }
}

/// Fills one bin with `items` (in the given order), skipping items that do not fit.
///
/// Returns `(input index, x, y)` for every placed item.
pub fn bin_fill(items: &[(u32, u32)], width: u32, height: u32) -> Vec<(usize, u32, u32)> {
    let mut sky = Skyline::new(width, height);
    let mut placed = Vec::new();
    for (k, &(w, h)) in items.iter().enumerate() {
        if let Some((x, y)) = sky.insert(w, h) {
            placed.push((k, x, y));
        }
    }
    placed
}

fn orderings(items: &[(u32, u32)]) -> Vec<Vec<usize>> {
    type Key = fn(&(u32, u32)) -> (u64, u64);
    let keys: [Key; 4] = [
        |&(w, h)| (w as u64 * h as u64, h as u64),
        |&(w, h)| (h as u64, w as u64),
        |&(w, h)| (w as u64, h as u64),
        |&(w, h)| (w as u64 + h as u64, w.max(h) as u64),
    ];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for key in keys {
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.sort_by(|&a, &b| key(&items[b]).cmp(&key(&items[a])).then(a.cmp(&b)));
        if !out.contains(&order) {
            out.push(order);
        }
    }
    out
}

/// Tries a few item orderings with [`bin_fill`]; returns coordinates for all items if one packs them all.
pub fn pack_all(items: &[(u32, u32)], width: u32, height: u32) -> Option<Vec<(u32, u32)>> {
    if items.iter().map(|&(w, h)| w as u64 * h as u64).sum::<u64>() > width as u64 * height as u64 {
        return None;
    }
    for order in orderings(items) {
        let dims: Vec<(u32, u32)> = order.iter().map(|&k| items[k]).collect();
        let placed = bin_fill(&dims, width, height);
        if placed.len() == items.len() {
            let mut coords = vec![(0, 0); items.len()];
            for (k, x, y) in placed {
                coords[order[k]] = (x, y);
            }
            return Some(coords);
        }
    }
    None
}

/// A heuristic packing of `dims` into bins: per bin, `(item index, x, y)`.
pub type BinPacking = Vec<Vec<(usize, u32, u32)>>;

struct OpenBin {
    sky: Skyline,
    items: Vec<(usize, u32, u32)>,
    area: u64,
}

fn first_fit(dims: &[(u32, u32)], order: &[usize], width: u32, height: u32) -> Vec<OpenBin> {
    let mut bins: Vec<OpenBin> = Vec::new();
    for &j in order {
        let (w, h) = dims[j];
        let slot = bins.iter_mut().find_map(|b| b.sky.find(w, h).map(|p| (b, p)));
        match slot {
            Some((b, (x, y))) => {
                b.sky.place(x, y, w, h);
                b.items.push((j, x, y));
                b.area += w as u64 * h as u64;
            }
            None => {
                let mut sky = Skyline::new(width, height);
                let (x, y) = sky.insert(w, h).expect("item fits an empty bin");
                bins.push(OpenBin { sky, items: vec![(j, x, y)], area: w as u64 * h as u64 });
            }
        }
    }
    bins
}

/// Empties the least-filled bin into the others when every one of its items finds a spot.
fn redistribute(dims: &[(u32, u32)], bins: &mut Vec<OpenBin>) {
    if bins.len() < 2 {
        return;
    }
    let victim = (0..bins.len()).min_by_key(|&b| bins[b].area).unwrap();
    let mut trial: Vec<OpenBin> = Vec::with_capacity(bins.len() - 1);
    for (b, bin) in bins.iter().enumerate() {
        if b != victim {
            trial.push(OpenBin { sky: bin.sky.clone(), items: bin.items.clone(), area: bin.area });
        }
    }
    let mut moving: Vec<usize> = bins[victim].items.iter().map(|&(j, _, _)| j).collect();
    moving.sort_by_key(|&j| std::cmp::Reverse(dims[j].0 as u64 * dims[j].1 as u64));
    for j in moving {
        let (w, h) = dims[j];
        let Some((b, (x, y))) = trial.iter_mut().find_map(|b| b.sky.find(w, h).map(|p| (b, p))) else {
            return;
        };
        b.sky.place(x, y, w, h);
        b.items.push((j, x, y));
        b.area += w as u64 * h as u64;
    }
    *bins = trial;
}

/// First-fit decreasing over several orderings, each followed by one redistribution pass; keeps the best.
pub fn heuristic_packing(dims: &[(u32, u32)], width: u32, height: u32) -> BinPacking {
    let mut best: Option<Vec<OpenBin>> = None;
    for order in orderings(dims) {
        let mut bins = first_fit(dims, &order, width, height);
        redistribute(dims, &mut bins);
        if best.as_ref().is_none_or(|b| bins.len() < b.len()) {
            best = Some(bins);
        }
    }
    best.unwrap_or_default().into_iter().map(|b| b.items).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartMode {
    Heuristic,
    /// A known bound with no packing behind it.
    GivenU0(usize),
}

/// Start solution for `inst`. In `GivenU0` mode no bins are produced and the bound is flagged external.
pub fn initial_solution(inst: &Instance, mode: StartMode) -> Solution {
    let (bins, upper, external) = match mode {
        StartMode::Heuristic => {
            let packing = heuristic_packing(&inst.dims(), inst.width(), inst.height());
            let bins: Vec<PackedBin> = packing
                .into_iter()
                .map(|b| {
                    PackedBin::from_placement(Placement::new(
                        b.into_iter().map(|(id, x, y)| PlacedItem { id, x, y }).collect(),
                    ))
                })
                .collect();
            let u = bins.len();
            (bins, u, false)
        }
        StartMode::GivenU0(v) => (Vec::new(), v, true),
    };
    Solution {
        status: SolveStatus::Feasible,
        lower_bound: 0,
        upper_bound: upper,
        bins,
        stats: SolveStats::default(),
        external_bound: external,
    }
}
