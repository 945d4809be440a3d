//! Candidate coordinates along one axis.

use crate::sums::SubsetSums;

/// Per item: subset sums of the other items' sizes that leave room for the item.
pub fn normal_patterns(sizes: &[u32], cap: u32) -> Vec<Vec<u32>> {
    (0..sizes.len())
        .map(|j| {
            let Some(room) = cap.checked_sub(sizes[j]) else {
                return Vec::new();
            };
            let others = (0..sizes.len()).filter(|&k| k != j).map(|k| sizes[k]);
            SubsetSums::from_values(others, room).values()
        })
        .collect()
}

/// Meet-in-the-middle positions for threshold `t`: normal positions below `t`, plus
/// right-aligned mirrors `cap - size - p` that land at or above `t`.
pub fn mim_positions(sizes: &[u32], cap: u32, t: u32) -> Vec<Vec<u32>> {
    mim_from_normal(&normal_patterns(sizes, cap), sizes, cap, t)
}

fn mim_from_normal(normal: &[Vec<u32>], sizes: &[u32], cap: u32, t: u32) -> Vec<Vec<u32>> {
    normal
        .iter()
        .zip(sizes)
        .map(|(ps, &s)| {
            let mut out: Vec<u32> = ps.iter().copied().filter(|&p| p < t).collect();
            out.extend(ps.iter().map(|&p| cap - s - p).filter(|&q| q >= t));
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect()
}

/// Threshold with the fewest positions in total (smallest such `t` on ties) and its sets.
pub fn best_mim_positions(sizes: &[u32], cap: u32) -> (u32, Vec<Vec<u32>>) {
    let normal = normal_patterns(sizes, cap);
    if cap == 0 {
        return (0, normal);
    }
    // Count, for every t, how many left positions are < t and mirrored ones are >= t.
    let len = cap as usize + 2;
    let mut left_at = vec![0i64; len];
    let mut right_at = vec![0i64; len];
    for (ps, &s) in normal.iter().zip(sizes) {
        for &p in ps {
            left_at[p as usize] += 1;
            right_at[(cap - s - p) as usize] += 1;
        }
    }
    // total(t) = #{p < t} + #{q >= t}; the two parts cannot share a value.
    let mut best = (i64::MAX, 1u32);
    let mut below = 0i64;
    let mut at_or_above: i64 = right_at.iter().sum();
    for t in 1..=cap {
        below += left_at[t as usize - 1];
        at_or_above -= right_at[t as usize - 1];
        let total = below + at_or_above;
        if total < best.0 {
            best = (total, t);
        }
    }
    let t = best.1;
    (t, mim_from_normal(&normal, sizes, cap, t))
}
