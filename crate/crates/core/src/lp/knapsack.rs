/// Exact 0-1 knapsack by dynamic programming over capacity.
///
/// Returns the best profit and the chosen indices (ascending). Items with
/// non-positive profit are never chosen.
pub fn knapsack_01(weights: &[u32], capacity: u32, profits: &[f64]) -> (f64, Vec<usize>) {
    assert_eq!(weights.len(), profits.len());
    let cap = capacity as usize;
    let candidates: Vec<usize> = (0..weights.len())
        .filter(|&j| profits[j] > 0.0 && (weights[j] as usize) <= cap)
        .collect();
    if candidates.is_empty() {
        return (0.0, Vec::new());
    }
    let width = cap + 1;
    let mut best = vec![0.0f64; width];
    let mut take = vec![false; candidates.len() * width];
    for (k, &j) in candidates.iter().enumerate() {
        let w = weights[j] as usize;
        let p = profits[j];
        for c in (w..=cap).rev() {
            let with = best[c - w] + p;
            if with > best[c] {
                best[c] = with;
                take[k * width + c] = true;
            }
        }
    }
    let mut chosen = Vec::new();
    let mut c = cap;
    for (k, &j) in candidates.iter().enumerate().rev() {
        if take[k * width + c] {
            chosen.push(j);
            c -= weights[j] as usize;
        }
    }
    chosen.reverse();
    (best[cap], chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_cases() {
        let (v, s) = knapsack_01(&[6, 6, 6], 10, &[10.0, 10.0, 10.0]);
        assert_eq!(v, 10.0);
        assert_eq!(s.len(), 1);

        assert_eq!(knapsack_01(&[1, 2], 0, &[1.0, 1.0]), (0.0, vec![]));

        let (v, s) = knapsack_01(&[3, 4], 7, &[1.0, 1.0]);
        assert_eq!(v, 2.0);
        assert_eq!(s, vec![0, 1]);
    }

    #[test]
    fn chosen_set_matches_value() {
        let w = [5, 4, 6, 3, 7, 2];
        let p = [10.0, 40.0, 30.0, 50.0, 35.0, 1.5];
        let (v, s) = knapsack_01(&w, 10, &p);
        assert_eq!(v, 91.5);
        assert!(s.iter().map(|&j| w[j]).sum::<u32>() <= 10);
        assert_eq!(s.iter().map(|&j| p[j]).sum::<f64>(), v);
    }
}
