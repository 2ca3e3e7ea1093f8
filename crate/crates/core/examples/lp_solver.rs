//! The LP solver on its own: a small production-planning problem with its
//! shadow prices.
//!
//! cargo run --example lp_solver

use gridopt::lp::{solve_lp, LpProblem};

fn main() -> gridopt::Result<()> {
    // max 3x + 5y  s.t.  x <= 4,  2y <= 12,  3x + 2y <= 18
    let mut p = LpProblem::new(2).with_cost(vec![-3.0, -5.0]);
    p.add_ub(vec![1.0, 0.0], 4.0);
    p.add_ub(vec![0.0, 2.0], 12.0);
    p.add_ub(vec![3.0, 2.0], 18.0);
    let s = solve_lp(&p)?;
    println!("{:?} after {} pivots", s.status, s.iterations);
    println!("x = {:?}, objective {}", s.x, s.objective);
    println!("shadow prices {:?}", s.duals_ub);
    println!("dual objective {}", s.dual_objective(&p));
    Ok(())
}
