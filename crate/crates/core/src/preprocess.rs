//! Instance reductions: bin shrinking, item enlarging, and packing items beside large ones.
//!
//! Reduced items are rigid aggregates of original items. Each keeps its members and their
//! offsets so a packing of the reduced instance expands back into one of the original.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::heuristic::bin_fill;
use crate::instance::{Instance, PackedBin, PlacedItem, Placement};
pub use crate::sums::max_reachable;
use crate::sums::SubsetSums;

/// An original item inside a reduced item, at offset `(dx, dy)` from its lower-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Member {
    pub id: usize,
    pub dx: u32,
    pub dy: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedItem {
    pub width: u32,
    pub height: u32,
    pub members: Vec<Member>,
}

impl ReducedItem {
    fn single(id: usize, width: u32, height: u32) -> Self {
        ReducedItem { width, height, members: vec![Member { id, dx: 0, dy: 0 }] }
    }

    /// Original id of the first member; names the reduced item in records.
    pub fn lead(&self) -> usize {
        self.members[0].id
    }

    fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    fn transposed(&self) -> Self {
        ReducedItem {
            width: self.height,
            height: self.width,
            members: self.members.iter().map(|m| Member { id: m.id, dx: m.dy, dy: m.dx }).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RemovalRule {
    /// Packed beside a wide host, in the `(W - w, h)` strip.
    Wide,
    /// Packed above a tall host, in the `(w, H - h)` strip.
    Tall,
    /// Packed in the same full bin as a big host.
    Big,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReductionRecord {
    /// `(item, host item, rule)`; ids are original.
    pub removed_items: Vec<(usize, usize, RemovalRule)>,
    /// Final dimensions of every reduced item whose size changed, keyed by its lead id.
    pub enlarged: BTreeMap<usize, (u32, u32)>,
    pub shrunk_bin: (u32, u32),
    pub fixed_full_bins: usize,
}

/// Result of [`preprocess`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub width: u32,
    pub height: u32,
    /// Items still to be packed, in reduced dimensions.
    pub items: Vec<ReducedItem>,
    /// Items that fill a whole bin on their own.
    pub fixed: Vec<ReducedItem>,
    pub record: ReductionRecord,
    original_len: usize,
}

impl Reduction {
    /// The residual instance; may have no items.
    pub fn instance(&self) -> Instance {
        let dims: Vec<(u32, u32)> = self.items.iter().map(|it| (it.width, it.height)).collect();
        Instance::new(self.width, self.height, &dims).expect("reduced items fit the reduced bin")
    }

    /// Percentage of original items removed by the packing rules.
    pub fn percent_removed(&self) -> f64 {
        if self.original_len == 0 {
            return 0.0;
        }
        100.0 * self.record.removed_items.len() as f64 / self.original_len as f64
    }

    /// Expands bins of the residual instance (`(reduced index, x, y)` per item) plus the
    /// fixed bins into bins of original items.
    pub fn expand(&self, bins: &[Vec<(usize, u32, u32)>]) -> Vec<PackedBin> {
        let mut out = Vec::with_capacity(bins.len() + self.fixed.len());
        for f in &self.fixed {
            out.push(Self::expand_bin(std::iter::once((f, 0, 0))));
        }
        for b in bins {
            out.push(Self::expand_bin(b.iter().map(|&(k, x, y)| (&self.items[k], x, y))));
        }
        out
    }

    fn expand_bin<'a>(parts: impl Iterator<Item = (&'a ReducedItem, u32, u32)>) -> PackedBin {
        let mut coords = Vec::new();
        for (it, x, y) in parts {
            for m in &it.members {
                coords.push(PlacedItem { id: m.id, x: x + m.dx, y: y + m.dy });
            }
        }
        coords.sort_by_key(|p| p.id);
        PackedBin::from_placement(Placement::new(coords))
    }
}

/// Largest usable width and height: the maximal subset sums not above `W` and `H`.
pub fn shrink_bin(inst: &Instance) -> (u32, u32) {
    let dims = inst.dims();
    shrink_dims(&dims, inst.width(), inst.height())
}

fn shrink_dims(dims: &[(u32, u32)], width: u32, height: u32) -> (u32, u32) {
    let ws: Vec<u32> = dims.iter().map(|d| d.0).collect();
    let hs: Vec<u32> = dims.iter().map(|d| d.1).collect();
    (max_reachable(&ws, width), max_reachable(&hs, height))
}

/// Enlarged sizes for one axis. Items are updated one at a time, each against the current
/// sizes of the others, until nothing changes.
pub fn enlarge_axis(sizes: &mut [u32], cap: u32) -> bool {
    let mut changed_any = false;
    loop {
        let mut changed = false;
        for j in 0..sizes.len() {
            if sizes[j] >= cap {
                continue;
            }
            let room = cap - sizes[j];
            let others = (0..sizes.len()).filter(|&k| k != j).map(|k| sizes[k]);
            let reach = SubsetSums::from_values(others, room).max_at_most(room);
            let lifted = cap - reach;
            if lifted > sizes[j] {
                sizes[j] = lifted;
                changed = true;
            }
        }
        if !changed {
            return changed_any;
        }
        changed_any = true;
    }
}

/// Enlarged `(w*, h*)` for every item. Expects a bin already shrunk by [`shrink_bin`].
pub fn enlarge_items(inst: &Instance) -> Vec<(u32, u32)> {
    let mut ws: Vec<u32> = inst.items().iter().map(|it| it.width).collect();
    let mut hs: Vec<u32> = inst.items().iter().map(|it| it.height).collect();
    enlarge_axis(&mut ws, inst.width());
    enlarge_axis(&mut hs, inst.height());
    ws.into_iter().zip(hs).collect()
}

/// Shrinking and enlarging restricted to the items allowed in one bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinReduction {
    pub width: u32,
    pub height: u32,
    /// Lifted `(w, h)` per allowed item, in the order of `allowed`.
    pub sizes: Vec<(u32, u32)>,
}

/// Reduction for a bin that may only receive `allowed` (indices into `dims`).
pub fn per_bin_reduce(dims: &[(u32, u32)], allowed: &[usize], width: u32, height: u32) -> BinReduction {
    let sub: Vec<(u32, u32)> = allowed.iter().map(|&j| dims[j]).collect();
    let (bw, bh) = shrink_dims(&sub, width, height);
    let mut ws: Vec<u32> = sub.iter().map(|d| d.0).collect();
    let mut hs: Vec<u32> = sub.iter().map(|d| d.1).collect();
    enlarge_axis(&mut ws, bw);
    enlarge_axis(&mut hs, bh);
    BinReduction { width: bw, height: bh, sizes: ws.into_iter().zip(hs).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessOptions {
    /// Shrink the bin and enlarge the items.
    pub shrink_enlarge: bool,
    /// Run the packing rules that remove items.
    pub fix_and_remove: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions { shrink_enlarge: true, fix_and_remove: true }
    }
}

struct State {
    width: u32,
    height: u32,
    items: Vec<ReducedItem>,
    removed: Vec<(usize, usize, RemovalRule)>,
}

impl State {
    fn dims(&self) -> Vec<(u32, u32)> {
        self.items.iter().map(|it| (it.width, it.height)).collect()
    }

    fn shrink_and_enlarge(&mut self) -> bool {
        let dims = self.dims();
        let (w, h) = shrink_dims(&dims, self.width, self.height);
        let mut ws: Vec<u32> = dims.iter().map(|d| d.0).collect();
        let mut hs: Vec<u32> = dims.iter().map(|d| d.1).collect();
        let changed = (w, h) != (self.width, self.height);
        self.width = w;
        self.height = h;
        let a = enlarge_axis(&mut ws, w);
        let b = enlarge_axis(&mut hs, h);
        for (it, (nw, nh)) in self.items.iter_mut().zip(ws.into_iter().zip(hs)) {
            it.width = nw;
            it.height = nh;
        }
        changed || a || b
    }

    fn transpose(&mut self) {
        std::mem::swap(&mut self.width, &mut self.height);
        for it in &mut self.items {
            *it = it.transposed();
        }
    }

    /// Wide-item rule on the current orientation; `rule` labels the removals.
    fn wide_pass(&mut self, rule: RemovalRule) -> bool {
        let half = self.width as u64;
        let is_wide = |it: &ReducedItem| 2 * it.width as u64 > half;
        let mut improved = false;

        // Singletons.
        for i in sorted_by(&self.items, |it| (it.width as u64, it.height as u64)) {
            if is_wide(&self.items[i]) {
                improved |= self.try_wide(&[i], &[], rule);
            }
        }

        // Growing sets.
        let mut parked: Vec<usize> = Vec::new();
        let list: Vec<usize> = sorted_by(&self.items, |it| (it.width as u64, it.height as u64))
            .into_iter()
            .filter(|&i| is_wide(&self.items[i]))
            .collect();
        let mut pos = 0;
        'outer: while pos + 1 < list.len() {
            let mut set = vec![list[pos], list[pos + 1]];
            let mut next = pos + 2;
            loop {
                if self.try_wide(&set, &parked, rule) {
                    improved = true;
                    parked.extend(&set);
                    pos = next;
                    continue 'outer;
                }
                if next >= list.len() {
                    break 'outer;
                }
                set.push(list[next]);
                next += 1;
            }
        }
        self.compact();
        improved
    }

    fn try_wide(&mut self, set: &[usize], parked: &[usize], rule: RemovalRule) -> bool {
        if set.iter().any(|&i| self.items[i].members.is_empty()) {
            return false;
        }
        let min_w = set.iter().map(|&i| self.items[i].width).min().unwrap();
        let room = self.width - min_w;
        let companions: Vec<usize> = (0..self.items.len())
            .filter(|j| !set.contains(j) && !parked.contains(j))
            .filter(|&j| !self.items[j].members.is_empty() && self.items[j].width <= room)
            .collect();
        if companions.is_empty() && set.iter().all(|&i| self.items[i].width == self.width) {
            return false;
        }
        let mut hosts: Vec<usize> = set.to_vec();
        hosts.sort_by_key(|&i| (self.width - self.items[i].width, i));
        let bins: Vec<(u32, u32)> =
            hosts.iter().map(|&i| (self.width - self.items[i].width, self.items[i].height)).collect();
        let Some(assignment) = fill_bins_in_order(&self.items, &companions, &bins) else {
            return false;
        };
        for (b, placed) in assignment.into_iter().enumerate() {
            let host = hosts[b];
            let host_w = self.items[host].width;
            let host_lead = self.items[host].lead();
            let mut extra = Vec::new();
            for (j, x, y) in placed {
                for m in std::mem::take(&mut self.items[j].members) {
                    self.removed.push((m.id, host_lead, rule));
                    extra.push(Member { id: m.id, dx: host_w + x + m.dx, dy: y + m.dy });
                }
            }
            let it = &mut self.items[host];
            it.members.extend(extra);
            it.width = self.width;
        }
        true
    }

    fn big_pass(&mut self) -> bool {
        let (bw, bh) = (self.width as u64, self.height as u64);
        let is_big = |it: &ReducedItem| 2 * it.width as u64 > bw && 2 * it.height as u64 > bh;
        let order: Vec<usize> = sorted_by(&self.items, |it| (it.area(), it.width as u64))
            .into_iter()
            .filter(|&i| is_big(&self.items[i]))
            .collect();
        let mut improved = false;
        for &i in &order {
            improved |= self.try_big(&[i], &[]);
        }
        let mut parked: Vec<usize> = Vec::new();
        let mut pos = 0;
        'outer: while pos + 1 < order.len() {
            let mut set = vec![order[pos], order[pos + 1]];
            let mut next = pos + 2;
            loop {
                if self.try_big(&set, &parked) {
                    improved = true;
                    parked.extend(&set);
                    pos = next;
                    continue 'outer;
                }
                if next >= order.len() {
                    break 'outer;
                }
                set.push(order[next]);
                next += 1;
            }
        }
        self.compact();
        improved
    }

    fn try_big(&mut self, set: &[usize], parked: &[usize]) -> bool {
        let (bw, bh) = (self.width, self.height);
        let companions: Vec<usize> = (0..self.items.len())
            .filter(|j| !set.contains(j) && !parked.contains(j) && !self.items[*j].members.is_empty())
            .filter(|&j| {
                let it = &self.items[j];
                set.iter().any(|&i| {
                    let c = &self.items[i];
                    it.width + c.width <= bw || it.height + c.height <= bh
                })
            })
            .collect();
        if companions.is_empty() && set.iter().all(|&i| (self.items[i].width, self.items[i].height) == (bw, bh)) {
            return false;
        }
        // One host per bin, placed first at the origin; companions fill around it.
        let mut hosts: Vec<usize> = set.to_vec();
        hosts.sort_by_key(|&i| (std::cmp::Reverse(self.items[i].area()), i));
        let mut left: Vec<usize> = companions;
        let mut result: Vec<Vec<(usize, u32, u32)>> = Vec::new();
        for &h in &hosts {
            let Some((placed, rest)) = fill_with_host(&self.items, h, &left, bw, bh) else {
                return false;
            };
            result.push(placed);
            left = rest;
        }
        if !left.is_empty() {
            return false;
        }
        for (b, placed) in result.into_iter().enumerate() {
            let host = hosts[b];
            let lead = self.items[host].lead();
            let mut extra = Vec::new();
            for (j, x, y) in placed {
                for m in std::mem::take(&mut self.items[j].members) {
                    self.removed.push((m.id, lead, RemovalRule::Big));
                    extra.push(Member { id: m.id, dx: x + m.dx, dy: y + m.dy });
                }
            }
            let it = &mut self.items[host];
            it.members.extend(extra);
            it.width = bw;
            it.height = bh;
        }
        true
    }

    fn compact(&mut self) {
        self.items.retain(|it| !it.members.is_empty());
    }
}

fn sorted_by<K: Ord>(items: &[ReducedItem], key: impl Fn(&ReducedItem) -> K) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| key(&items[b]).cmp(&key(&items[a])).then(a.cmp(&b)));
    order
}

/// Fills `bins` one at a time, in the given order, with `companions`.
/// Returns per bin `(item, x, y)` when every companion is placed.
fn fill_bins_in_order(
    items: &[ReducedItem],
    companions: &[usize],
    bins: &[(u32, u32)],
) -> Option<Vec<Vec<(usize, u32, u32)>>> {
    let total: u64 = companions.iter().map(|&j| items[j].area()).sum();
    let room: u64 = bins.iter().map(|&(w, h)| w as u64 * h as u64).sum();
    if total > room {
        return None;
    }
    type Key = fn(&ReducedItem) -> (u64, u64);
    let keys: [Key; 3] = [
        |it| (it.area(), it.height as u64),
        |it| (it.height as u64, it.width as u64),
        |it| (it.width as u64, it.height as u64),
    ];
    for key in keys {
        let mut left: Vec<usize> = companions.to_vec();
        left.sort_by(|&a, &b| key(&items[b]).cmp(&key(&items[a])).then(a.cmp(&b)));
        let mut out = Vec::with_capacity(bins.len());
        for &(w, h) in bins {
            if w == 0 || h == 0 || left.is_empty() {
                out.push(Vec::new());
                continue;
            }
            let dims: Vec<(u32, u32)> = left.iter().map(|&j| (items[j].width, items[j].height)).collect();
            let placed = bin_fill(&dims, w, h);
            let mut taken = vec![false; left.len()];
            out.push(
                placed
                    .into_iter()
                    .map(|(k, x, y)| {
                        taken[k] = true;
                        (left[k], x, y)
                    })
                    .collect(),
            );
            let mut k = 0;
            left.retain(|_| {
                k += 1;
                !taken[k - 1]
            });
        }
        if left.is_empty() {
            return Some(out);
        }
    }
    None
}

/// Packs host `h` at the origin of a full bin and as many of `pool` as fit around it.
fn fill_with_host(
    items: &[ReducedItem],
    h: usize,
    pool: &[usize],
    bw: u32,
    bh: u32,
) -> Option<(Vec<(usize, u32, u32)>, Vec<usize>)> {
    let mut order: Vec<usize> = pool.to_vec();
    order.sort_by(|&a, &b| items[b].area().cmp(&items[a].area()).then(a.cmp(&b)));
    let mut dims = vec![(items[h].width, items[h].height)];
    dims.extend(order.iter().map(|&j| (items[j].width, items[j].height)));
    let placed = bin_fill(&dims, bw, bh);
    if placed.first().map(|p| p.0) != Some(0) {
        return None;
    }
    let mut taken = vec![false; order.len()];
    let mut out = Vec::new();
    for &(k, x, y) in &placed[1..] {
        taken[k - 1] = true;
        out.push((order[k - 1], x, y));
    }
    let rest = order.iter().zip(&taken).filter(|(_, &t)| !t).map(|(&j, _)| j).collect();
    Some((out, rest))
}

/// Full reduction: shrink, enlarge and (optionally) the three packing rules, repeated until
/// nothing changes; finally every item of bin size is set aside in its own bin.
pub fn preprocess(inst: &Instance, opts: PreprocessOptions) -> Reduction {
    let mut st = State {
        width: inst.width(),
        height: inst.height(),
        items: inst.items().iter().map(|it| ReducedItem::single(it.id, it.width, it.height)).collect(),
        removed: Vec::new(),
    };
    loop {
        let mut changed = opts.shrink_enlarge && st.shrink_and_enlarge();
        if opts.fix_and_remove && !st.items.is_empty() {
            changed |= st.wide_pass(RemovalRule::Wide);
            st.transpose();
            changed |= st.wide_pass(RemovalRule::Tall);
            st.transpose();
            changed |= st.big_pass();
        }
        if !changed {
            break;
        }
    }
    let mut record = ReductionRecord {
        removed_items: st.removed,
        shrunk_bin: (st.width, st.height),
        ..Default::default()
    };
    let originals = inst.items();
    for it in &st.items {
        let o = &originals[it.lead()];
        if (it.width, it.height) != (o.width, o.height) {
            record.enlarged.insert(it.lead(), (it.width, it.height));
        }
    }
    let (fixed, items): (Vec<ReducedItem>, Vec<ReducedItem>) =
        st.items.into_iter().partition(|it| it.width == st.width && it.height == st.height);
    record.fixed_full_bins = fixed.len();
    Reduction { width: st.width, height: st.height, items, fixed, record, original_len: inst.len() }
}

/// The packing rules alone, without shrinking or enlarging.
pub fn fix_and_remove(inst: &Instance) -> Reduction {
    preprocess(inst, PreprocessOptions { shrink_enlarge: false, fix_and_remove: true })
}

/// Bin count and packing of the preprocessing-only bins, when the residual instance is empty.
pub fn fixed_only_packing(red: &Reduction) -> Option<Vec<PackedBin>> {
    red.items.is_empty().then(|| red.expand(&[]))
}

/// Continuous bound after global shrinking and enlarging only.
pub fn enlarged_continuous_bound(inst: &Instance) -> f64 {
    let (w, h) = shrink_bin(inst);
    let shrunk = Instance::new(w, h, &inst.dims()).expect("shrunk bin holds every item");
    let area: u64 = enlarge_items(&shrunk).iter().map(|&(a, b)| a as u64 * b as u64).sum();
    area as f64 / (w as u64 * h as u64) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{verify_solution, Solution, SolveStats, SolveStatus};

    #[test]
    fn shrink_examples() {
        let a = Instance::new(10, 10, &[(3, 1), (4, 1)]).unwrap();
        assert_eq!(shrink_bin(&a).0, 7);
        let b = Instance::new(10, 10, &[(10, 6), (1, 6), (1, 6)]).unwrap();
        assert_eq!(shrink_bin(&b), (10, 6));
    }

    #[test]
    fn enlarge_examples() {
        let mut ws = vec![6, 3];
        enlarge_axis(&mut ws, 10);
        assert_eq!(ws[0], 7);
        let mut one = vec![4];
        enlarge_axis(&mut one, 10);
        assert_eq!(one, vec![10]);
        let mut halves = vec![5, 5];
        enlarge_axis(&mut halves, 10);
        assert_eq!(halves, vec![5, 5]);
    }

    #[test]
    fn per_bin_examples() {
        let dims = [(6, 6), (3, 3)];
        let single = per_bin_reduce(&dims, &[0], 10, 10);
        assert_eq!((single.width, single.height, single.sizes[0]), (6, 6, (6, 6)));
        let both = per_bin_reduce(&dims, &[0, 1], 10, 10);
        assert_eq!(both.width, 9);
        assert_eq!(both.sizes[0].0, 6);
    }

    #[test]
    fn wide_companion_is_removed() {
        let inst = Instance::new(10, 10, &[(7, 10), (3, 10)]).unwrap();
        let red = fix_and_remove(&inst);
        assert!(red.items.is_empty());
        assert_eq!(red.fixed.len(), 1);
        assert_eq!(red.record.removed_items, vec![(1, 0, RemovalRule::Wide)]);
        let bins = fixed_only_packing(&red).unwrap();
        let sol = Solution {
            status: SolveStatus::Optimal,
            lower_bound: 1,
            upper_bound: 1,
            bins,
            stats: SolveStats::default(),
            external_bound: false,
        };
        verify_solution(&inst, &sol).unwrap();
    }

    #[test]
    fn incompatible_squares_each_fill_a_bin() {
        let inst = Instance::new(10, 10, &[(6, 6), (6, 6)]).unwrap();
        let red = fix_and_remove(&inst);
        assert!(red.items.is_empty());
        assert_eq!(red.record.fixed_full_bins, 2);
        assert!(red.record.removed_items.is_empty());
    }

    #[test]
    fn small_items_are_untouched_by_packing_rules() {
        let inst = Instance::new(10, 10, &[(2, 2), (3, 3)]).unwrap();
        let red = fix_and_remove(&inst);
        assert!(red.record.removed_items.is_empty());
        assert_eq!(red.items.len(), 2);
        assert!(red.record.enlarged.is_empty());

        // With shrinking the bin becomes 5x5 and the 3x3 item turns wide.
        let full = preprocess(&inst, PreprocessOptions::default());
        assert_eq!(full.record.shrunk_bin, (5, 5));
        assert_eq!(full.record.removed_items.len(), 1);
    }
}
