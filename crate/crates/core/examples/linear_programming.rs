//! The simplex, the 0-1 knapsack and a tiny column generation loop built from them.

use bpp2d::lp::{knapsack_01, solve_lp, LinearProgram, PackingLp, Relation, Sense};

fn main() {
    // max 3x + 2y  s.t.  x + y <= 4,  x + 3y <= 6,  x <= 3
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_variable(3.0, 0.0, f64::INFINITY);
    let y = lp.add_variable(2.0, 0.0, f64::INFINITY);
    lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 4.0);
    lp.add_constraint(vec![(x, 1.0), (y, 3.0)], Relation::Le, 6.0);
    lp.add_constraint(vec![(x, 1.0)], Relation::Le, 3.0);
    let sol = solve_lp(&lp);
    println!("{:?}: objective {}, x = {:?}, duals {:?}", sol.status, sol.objective, sol.primal, sol.duals);

    let (best, chosen) = knapsack_01(&[5, 4, 3, 2], 9, &[10.0, 7.0, 5.0, 3.0]);
    println!("knapsack: {best} from {chosen:?}");

    // One-dimensional cutting stock: cover each demand with patterns priced by a knapsack.
    let (sizes, cap) = ([6u32, 4, 3], 10u32);
    let demand = [1.0, 2.0, 2.0];
    let mut patterns: Vec<Vec<f64>> = (0..sizes.len()).map(|i| (0..sizes.len()).map(|j| f64::from(i == j)).collect()).collect();
    loop {
        // Dual of the covering LP: max demand.y  s.t.  pattern.y <= 1.
        let mut dual = PackingLp::new(demand.to_vec());
        for p in &patterns {
            dual.add_row(p, 1.0);
        }
        assert!(dual.optimize(10_000));
        let y = dual.primal();
        let (value, items) = knapsack_01(&sizes, cap, &y);
        println!("{} patterns, LP bound {:.3}, best reduced price {value:.3}", patterns.len(), dual.objective());
        if value <= 1.0 + 1e-9 {
            break;
        }
        patterns.push((0..sizes.len()).map(|j| f64::from(items.contains(&j))).collect());
    }
}
