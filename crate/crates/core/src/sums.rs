//! Subset-sum reachability over `0..=cap`, stored as a bitset.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSums {
    cap: u32,
    bits: Vec<u64>,
}

impl SubsetSums {
    /// Only the empty sum reachable.
    pub fn new(cap: u32) -> Self {
        let mut bits = vec![0u64; cap as usize / 64 + 1];
        bits[0] = 1;
        SubsetSums { cap, bits }
    }

    pub fn from_values<I: IntoIterator<Item = u32>>(values: I, cap: u32) -> Self {
        let mut s = SubsetSums::new(cap);
        for v in values {
            s.add(v);
        }
        s
    }

    /// Makes every `s + v` reachable for each reachable `s`.
    pub fn add(&mut self, v: u32) {
        if v == 0 || v > self.cap {
            return;
        }
        let words = (v / 64) as usize;
        let shift = v % 64;
        for i in (words..self.bits.len()).rev() {
            let mut moved = self.bits[i - words] << shift;
            if shift > 0 && i > words {
                moved |= self.bits[i - words - 1] >> (64 - shift);
            }
            self.bits[i] |= moved;
        }
        self.trim();
    }

    fn trim(&mut self) {
        let used = self.cap as usize % 64 + 1;
        if used < 64 {
            let last = self.bits.len() - 1;
            self.bits[last] &= (1u64 << used) - 1;
        }
    }

    pub fn contains(&self, s: u32) -> bool {
        s <= self.cap && self.bits[s as usize / 64] >> (s % 64) & 1 == 1
    }

    /// Largest reachable sum not above `limit`.
    pub fn max_at_most(&self, limit: u32) -> u32 {
        let limit = limit.min(self.cap);
        let mut word = limit as usize / 64;
        let mut mask = if limit % 64 == 63 { u64::MAX } else { (1u64 << (limit % 64 + 1)) - 1 };
        loop {
            let w = self.bits[word] & mask;
            if w != 0 {
                return (word * 64 + 63 - w.leading_zeros() as usize) as u32;
            }
            word -= 1;
            mask = u64::MAX;
        }
    }

    /// Reachable sums in increasing order.
    pub fn values(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (i, &w) in self.bits.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros();
                out.push(i as u32 * 64 + b);
                w &= w - 1;
            }
        }
        out
    }
}

/// Largest subset sum of `values` not exceeding `cap`.
pub fn max_reachable(values: &[u32], cap: u32) -> u32 {
    SubsetSums::from_values(values.iter().copied(), cap).max_at_most(cap)
}
