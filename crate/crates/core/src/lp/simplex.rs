//! Dense two-phase simplex on a full tableau.
//!
//! Problems solved here have at most a few hundred rows and columns: conservative
//! scale row generation and the bar-relaxation column generation.

const EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-11;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// `(lower, upper)` per variable; lower must be finite, upper may be `f64::INFINITY`.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram { sense, objective: Vec::new(), constraints: Vec::new(), bounds: Vec::new() }
    }

    /// Adds a variable with bounds `[lower, upper]` and returns its index.
    pub fn add_variable(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.bounds.push((lower, upper));
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.objective.len()));
        debug_assert!(rhs.is_finite());
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivot budget exhausted; values are the last basic solution and may not be optimal.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    /// One value per constraint, sign convention of the original sense: for a
    /// maximization `<=` rows have non-negative duals, for a minimization `>=` rows do.
    pub duals: Vec<f64>,
}

impl LpSolution {
    fn failed(status: LpStatus, n: usize, m: usize) -> Self {
        LpSolution { status, objective: f64::NAN, primal: vec![0.0; n], duals: vec![0.0; m] }
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows x (cols + 1)`, last column is the right-hand side.
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.a[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.a[pr * w + pc];
        for v in &mut self.a[pr * w..(pr + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.a.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Maximizes `cost . x` over the current basis. `allowed` masks columns that may enter.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool], pivots: &mut usize) -> LpStatus {
        let w = self.cols + 1;
        let mut in_basis = vec![false; self.cols];
        for &b in &self.basis {
            in_basis[b] = true;
        }
        let mut reduced = cost.to_vec();
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for (d, &v) in reduced.iter_mut().zip(&self.a[r * w..r * w + self.cols]) {
                    *d -= cb * v;
                }
            }
        }
        let mut degenerate = 0usize;
        loop {
            if *pivots >= MAX_PIVOTS {
                return LpStatus::IterationLimit;
            }
            let bland = degenerate >= DEGENERATE_LIMIT;
            let mut enter = None;
            let mut best = EPS;
            for c in 0..self.cols {
                if !allowed[c] || in_basis[c] {
                    continue;
                }
                if reduced[c] > best {
                    enter = Some(c);
                    if bland {
                        break;
                    }
                    best = reduced[c];
                }
            }
            let Some(pc) = enter else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let v = self.at(r, pc);
                if v > PIVOT_EPS {
                    let ratio = self.rhs(r) / v;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - EPS || (ratio <= lratio + EPS && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leave else {
                return LpStatus::Unbounded;
            };
            if ratio.abs() <= EPS {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            in_basis[self.basis[pr]] = false;
            in_basis[pc] = true;
            self.pivot(pr, pc);
            let f = reduced[pc];
            for (d, &v) in reduced.iter_mut().zip(&self.a[pr * w..pr * w + self.cols]) {
                *d -= f * v;
            }
            reduced[pc] = 0.0;
            *pivots += 1;
        }
    }
}

/// Solves `lp` to optimality (or reports infeasible / unbounded).
pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    let n = lp.num_vars();
    let user_rows = lp.constraints.len();

    // Shift lower bounds to zero and turn finite upper bounds into rows.
    let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64)> = Vec::with_capacity(user_rows + n);
    for c in &lp.constraints {
        let shift: f64 = c.coeffs.iter().map(|&(j, a)| a * lp.bounds[j].0).sum();
        rows.push((c.coeffs.clone(), c.relation, c.rhs - shift));
    }
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        assert!(lo.is_finite(), "variable {j} needs a finite lower bound");
        if hi.is_finite() {
            if hi < lo - EPS {
                return LpSolution::failed(LpStatus::Infeasible, n, user_rows);
            }
            rows.push((vec![(j, 1.0)], Relation::Le, hi - lo));
        }
    }
    let m = rows.len();
    let mut negated = vec![false; m];
    for (r, row) in rows.iter_mut().enumerate() {
        if row.2 < 0.0 {
            negated[r] = true;
            row.2 = -row.2;
            for c in &mut row.0 {
                c.1 = -c.1;
            }
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Columns: structurals, one slack/surplus per inequality, one artificial per >=/= row.
    let mut cols = n;
    let mut slack_of = vec![usize::MAX; m];
    for (r, row) in rows.iter().enumerate() {
        if row.1 != Relation::Eq {
            slack_of[r] = cols;
            cols += 1;
        }
    }
    let mut identity_of = vec![usize::MAX; m];
    let mut artificial = vec![false; cols];
    for (r, row) in rows.iter().enumerate() {
        match row.1 {
            Relation::Le => identity_of[r] = slack_of[r],
            Relation::Ge | Relation::Eq => {
                identity_of[r] = cols;
                cols += 1;
                artificial.push(true);
            }
        }
    }

    let w = cols + 1;
    let mut tab = Tableau { rows: m, cols, a: vec![0.0; m * w], basis: vec![0; m] };
    for (r, row) in rows.iter().enumerate() {
        for &(j, a) in &row.0 {
            tab.a[r * w + j] += a;
        }
        match row.1 {
            Relation::Le => tab.a[r * w + slack_of[r]] = 1.0,
            Relation::Ge => tab.a[r * w + slack_of[r]] = -1.0,
            Relation::Eq => {}
        }
        tab.a[r * w + identity_of[r]] = 1.0;
        tab.a[r * w + cols] = row.2;
        tab.basis[r] = identity_of[r];
    }

    let mut pivots = 0usize;
    let mut allowed = vec![true; cols];
    if artificial.iter().any(|&a| a) {
        let phase1: Vec<f64> = artificial.iter().map(|&a| if a { -1.0 } else { 0.0 }).collect();
        let status = tab.optimize(&phase1, &allowed, &mut pivots);
        if status == LpStatus::IterationLimit {
            return LpSolution::failed(status, n, user_rows);
        }
        let infeasibility: f64 = (0..m).filter(|&r| artificial[tab.basis[r]]).map(|r| tab.rhs(r)).sum();
        if infeasibility > 1e-7 {
            return LpSolution::failed(LpStatus::Infeasible, n, user_rows);
        }
        // Drive zero-valued artificials out of the basis where possible.
        for r in 0..m {
            if artificial[tab.basis[r]] {
                if let Some(c) = (0..cols).find(|&c| !artificial[c] && tab.at(r, c).abs() > 1e-7) {
                    tab.pivot(r, c);
                }
            }
        }
        for (c, a) in artificial.iter().enumerate() {
            if *a {
                allowed[c] = false;
            }
        }
    }

    let flip = if lp.sense == Sense::Maximize { 1.0 } else { -1.0 };
    let mut cost = vec![0.0; cols];
    for j in 0..n {
        cost[j] = flip * lp.objective[j];
    }
    let status = tab.optimize(&cost, &allowed, &mut pivots);
    if status == LpStatus::Unbounded {
        return LpSolution::failed(status, n, user_rows);
    }

    let mut primal: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();
    for r in 0..m {
        let c = tab.basis[r];
        if c < n {
            primal[c] += tab.rhs(r);
        }
    }
    let objective: f64 = primal.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
    let duals = (0..user_rows)
        .map(|i| {
            let col = identity_of[i];
            let y: f64 = (0..m).map(|r| cost[tab.basis[r]] * tab.at(r, col)).sum();
            let y = if negated[i] { -y } else { y };
            flip * y
        })
        .collect();
    LpSolution { status, objective, primal, duals }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-7
    }

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable(1.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 10.0);
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(close(sol.objective, 10.0));
        assert!(close(sol.duals[0], 1.0));
    }

    #[test]
    fn shared_row_dual() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable(1.0, 0.0, f64::INFINITY);
        let y = lp.add_variable(1.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 10.0);
        let sol = solve_lp(&lp);
        assert!(close(sol.objective, 10.0));
        assert!(close(sol.duals[0], 1.0));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable(1.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, -1.0);
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable(1.0, 0.0, f64::INFINITY);
        let y = lp.add_variable(0.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn minimization_with_mixed_rows() {
        // min 2x + 3y, x + y >= 4, x - y = 1, x <= 3
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable(2.0, 0.0, 3.0);
        let y = lp.add_variable(3.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Ge, 4.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Eq, 1.0);
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(close(sol.primal[0], 2.5) && close(sol.primal[1], 1.5));
        assert!(close(sol.objective, 9.5));
        // y1 * 4 + y2 * 1 = 9.5 with y1 = 2.5, y2 = -0.5
        assert!(close(sol.duals[0], 2.5), "{:?}", sol.duals);
        assert!(close(sol.duals[1], -0.5), "{:?}", sol.duals);
    }

    #[test]
    fn lower_bounds_are_shifted() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable(-1.0, 1.0, 1.0);
        let y = lp.add_variable(1.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x, 2.0), (y, 1.0)], Relation::Le, 5.0);
        let sol = solve_lp(&lp);
        assert!(close(sol.primal[0], 1.0) && close(sol.primal[1], 3.0));
        assert!(close(sol.objective, 2.0));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) under Dantzig's rule.
        let mut lp = LinearProgram::new(Sense::Maximize);
        let v: Vec<usize> =
            [0.75, -20.0, 0.5, -6.0].iter().map(|&c| lp.add_variable(c, 0.0, f64::INFINITY)).collect();
        lp.add_constraint(vec![(v[0], 0.25), (v[1], -8.0), (v[2], -1.0), (v[3], 9.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(v[0], 0.5), (v[1], -12.0), (v[2], -0.5), (v[3], 3.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(v[2], 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(close(sol.objective, 1.25));
    }
}
