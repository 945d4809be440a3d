//! Incremental simplex for `max c.x, A x <= b, x >= 0` with `b >= 0`.
//!
//! The origin is always feasible, so no phase one is needed. Rows can be added after an
//! optimal solve; the basis is then repaired with dual simplex pivots. The objective can be
//! replaced at any time and re-optimized from the current basis.

const EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct PackingLp {
    n: usize,
    cost: Vec<f64>,
    /// Tableau rows over `n` structural columns followed by one slack per row.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    reduced: Vec<f64>,
    pivots: usize,
}

impl PackingLp {
    pub fn new(cost: Vec<f64>) -> Self {
        let n = cost.len();
        PackingLp { n, reduced: cost.clone(), cost, rows: Vec::new(), rhs: Vec::new(), basis: Vec::new(), pivots: 0 }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn cols(&self) -> usize {
        self.n + self.rows.len()
    }

    /// Adds `coeffs . x <= b` (dense over the structural variables).
    pub fn add_row(&mut self, coeffs: &[f64], b: f64) {
        assert_eq!(coeffs.len(), self.n);
        for row in &mut self.rows {
            row.push(0.0);
        }
        self.reduced.push(0.0);
        let cols = self.cols() + 1;
        let mut row = vec![0.0; cols];
        row[..self.n].copy_from_slice(coeffs);
        row[cols - 1] = 1.0;
        let mut beta = b;
        for (r, &bc) in self.basis.iter().enumerate() {
            let f = row[bc];
            if f != 0.0 {
                for (v, &t) in row.iter_mut().zip(&self.rows[r]) {
                    *v -= f * t;
                }
                row[bc] = 0.0;
                beta -= f * self.rhs[r];
            }
        }
        self.rows.push(row);
        self.rhs.push(beta);
        self.basis.push(cols - 1);
    }

    /// Replaces the objective, keeping the basis.
    pub fn set_objective(&mut self, cost: Vec<f64>) {
        assert_eq!(cost.len(), self.n);
        self.cost = cost;
        self.recompute_reduced();
    }

    fn cost_of(&self, c: usize) -> f64 {
        if c < self.n {
            self.cost[c]
        } else {
            0.0
        }
    }

    fn recompute_reduced(&mut self) {
        let cols = self.cols();
        let mut d: Vec<f64> = (0..cols).map(|c| self.cost_of(c)).collect();
        for (r, &bc) in self.basis.iter().enumerate() {
            let cb = self.cost_of(bc);
            if cb != 0.0 {
                for (v, &t) in d.iter_mut().zip(&self.rows[r]) {
                    *v -= cb * t;
                }
            }
        }
        for &bc in &self.basis {
            d[bc] = 0.0;
        }
        self.reduced = d;
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let p = self.rows[pr][pc];
        for v in &mut self.rows[pr] {
            *v /= p;
        }
        self.rhs[pr] /= p;
        let prow = std::mem::take(&mut self.rows[pr]);
        let pbeta = self.rhs[pr];
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r == pr {
                continue;
            }
            let f = row[pc];
            if f != 0.0 {
                for (v, &t) in row.iter_mut().zip(&prow) {
                    *v -= f * t;
                }
                row[pc] = 0.0;
                self.rhs[r] -= f * pbeta;
            }
        }
        let f = self.reduced[pc];
        if f != 0.0 {
            for (v, &t) in self.reduced.iter_mut().zip(&prow) {
                *v -= f * t;
            }
        }
        self.reduced[pc] = 0.0;
        self.rows[pr] = prow;
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Restores primal feasibility (dual simplex), then optimality (primal simplex).
    /// Returns false if the pivot budget ran out.
    pub fn optimize(&mut self, max_pivots: usize) -> bool {
        let budget = self.pivots + max_pivots;
        loop {
            if self.pivots >= budget {
                return false;
            }
            if let Some(pr) = self.most_infeasible_row() {
                let cols = self.cols();
                let row = &self.rows[pr];
                let mut enter: Option<(usize, f64)> = None;
                for c in 0..cols {
                    let a = row[c];
                    if a < -PIVOT_EPS {
                        let ratio = self.reduced[c].min(0.0) / a;
                        if enter.is_none_or(|(_, best)| ratio < best - EPS) {
                            enter = Some((c, ratio));
                        }
                    }
                }
                match enter {
                    Some((pc, _)) => self.pivot(pr, pc),
                    // Cannot happen for b >= 0; treat the row as satisfied.
                    None => self.rhs[pr] = 0.0,
                }
                continue;
            }
            if !self.primal_step() {
                return true;
            }
        }
    }

    fn most_infeasible_row(&self) -> Option<usize> {
        let mut worst: Option<(usize, f64)> = None;
        for (r, &b) in self.rhs.iter().enumerate() {
            if b < -EPS && worst.is_none_or(|(_, w)| b < w) {
                worst = Some((r, b));
            }
        }
        worst.map(|(r, _)| r)
    }

    /// One primal pivot; false when optimal.
    fn primal_step(&mut self) -> bool {
        let mut enter: Option<usize> = None;
        let mut best = EPS;
        for (c, &d) in self.reduced.iter().enumerate() {
            if d > best {
                best = d;
                enter = Some(c);
            }
        }
        let Some(pc) = enter else {
            return false;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..self.rows.len() {
            let a = self.rows[r][pc];
            if a > PIVOT_EPS {
                let ratio = self.rhs[r].max(0.0) / a;
                if leave.is_none_or(|(lr, best)| ratio < best - EPS || (ratio <= best + EPS && self.basis[r] < self.basis[lr])) {
                    leave = Some((r, ratio));
                }
            }
        }
        match leave {
            Some((pr, _)) => {
                self.pivot(pr, pc);
                true
            }
            // Unbounded direction: only possible without covering rows; stop.
            None => false,
        }
    }

    pub fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (r, &bc) in self.basis.iter().enumerate() {
            if bc < self.n {
                x[bc] = self.rhs[r].max(0.0);
            }
        }
        x
    }

    pub fn objective(&self) -> f64 {
        self.primal().iter().zip(&self.cost).map(|(x, c)| x * c).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_added_after_solve_are_enforced() {
        let mut lp = PackingLp::new(vec![1.0, 1.0]);
        lp.add_row(&[1.0, 0.0], 10.0);
        lp.add_row(&[0.0, 1.0], 10.0);
        assert!(lp.optimize(100));
        assert!((lp.objective() - 20.0).abs() < 1e-9);
        lp.add_row(&[1.0, 1.0], 12.0);
        assert!(lp.optimize(100));
        assert!((lp.objective() - 12.0).abs() < 1e-9);
        lp.set_objective(vec![2.0, 1.0]);
        assert!(lp.optimize(100));
        let x = lp.primal();
        assert!((x[0] - 10.0).abs() < 1e-9 && (x[1] - 2.0).abs() < 1e-9);
    }
}
