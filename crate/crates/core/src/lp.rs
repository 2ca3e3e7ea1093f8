//! Dense two-phase primal simplex with bounded variables and Bland's rule.
//!
//! Problems have the form
//!
//! ```text
//! min  cᵀx
//! s.t. A_eq·x  = b_eq
//!      A_ub·x <= b_ub
//!      lb <= x <= ub      (either side may be infinite)
//! ```
//!
//! Dual conventions on an optimal solution:
//!
//! * `duals_eq[i] = ∂f*/∂b_eq[i]` (free sign),
//! * `duals_ub[i] = -∂f*/∂b_ub[i] >= 0`, the shadow price of the row,
//! * `duals_lower[j] = ∂f*/∂lb[j]` and `duals_upper[j] = ∂f*/∂ub[j]` for bounds
//!   the solution rests on, zero elsewhere.
//!
//! On a degenerate optimum the solver reports the duals of the vertex basis it
//! ends on and sets [`LpSolution::degenerate`].

use crate::dense::{lu_factor, Matrix};
use crate::error::{Error, Result};

/// Primal feasibility tolerance (scaled by `1 + max|b|` in phase one).
pub const FEAS_TOL: f64 = 1e-8;
/// Reduced-cost optimality tolerance, relative to `max|c|`.
pub const OPT_TOL: f64 = 1e-9;
/// Smallest column entry accepted as a pivot.
pub const PIVOT_TOL: f64 = 1e-9;
/// A basic variable this close to a finite bound marks the vertex degenerate.
pub const DEGEN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub cost: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// `n` variables with zero cost and bounds `[0, +inf)`.
    pub fn new(n: usize) -> Self {
        LpProblem {
            cost: vec![0.0; n],
            a_eq: Vec::new(),
            b_eq: Vec::new(),
            a_ub: Vec::new(),
            b_ub: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn with_cost(mut self, cost: Vec<f64>) -> Self {
        self.cost = cost;
        self
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.a_eq.push(row);
        self.b_eq.push(rhs);
        self
    }

    pub fn add_ub(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.a_ub.push(row);
        self.b_ub.push(rhs);
        self
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        let dim = |what: &str| Err(Error::DimensionMismatch(what.to_string()));
        if self.lower.len() != n || self.upper.len() != n {
            return dim("bounds length differs from cost length");
        }
        if self.a_eq.len() != self.b_eq.len() || self.a_ub.len() != self.b_ub.len() {
            return dim("row count differs from rhs length");
        }
        if self.a_eq.iter().chain(&self.a_ub).any(|r| r.len() != n) {
            return dim("constraint row length differs from variable count");
        }
        let finite = |v: &f64| v.is_finite();
        if !self.cost.iter().all(finite)
            || !self.b_eq.iter().chain(&self.b_ub).all(finite)
            || !self.a_eq.iter().chain(&self.a_ub).flatten().all(finite)
        {
            return Err(Error::InvalidArgument("LP data must be finite".into()));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l > u {
                return Err(Error::InvalidArgument(format!(
                    "variable {j}: invalid bounds [{l}, {u}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals_eq: Vec<f64>,
    pub duals_ub: Vec<f64>,
    pub duals_lower: Vec<f64>,
    pub duals_upper: Vec<f64>,
    /// Some basic variable sits on a bound, so the duals may not be unique.
    pub degenerate: bool,
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, n: usize, iterations: usize) -> Self {
        LpSolution {
            status,
            x: vec![f64::NAN; n],
            objective: match status {
                LpStatus::Unbounded => f64::NEG_INFINITY,
                _ => f64::INFINITY,
            },
            duals_eq: Vec::new(),
            duals_ub: Vec::new(),
            duals_lower: Vec::new(),
            duals_upper: Vec::new(),
            degenerate: false,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Dual objective `b_eqᵀy - b_ubᵀλ + Σ bound duals · bounds`.
    pub fn dual_objective(&self, p: &LpProblem) -> f64 {
        let eq: f64 = self.duals_eq.iter().zip(&p.b_eq).map(|(y, b)| y * b).sum();
        let ub: f64 = self.duals_ub.iter().zip(&p.b_ub).map(|(l, b)| l * b).sum();
        let bounds: f64 = (0..p.n_vars())
            .map(|j| {
                let lo = if self.duals_lower[j] != 0.0 { self.duals_lower[j] * p.lower[j] } else { 0.0 };
                let up = if self.duals_upper[j] != 0.0 { self.duals_upper[j] * p.upper[j] } else { 0.0 };
                lo + up
            })
            .sum();
        eq - ub + bounds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    Free,
}

struct Tableau {
    m: usize,
    ncol: usize,
    /// `B⁻¹·A`, row-major.
    t: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    value: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.ncol + j]
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = cost[bv];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.ncol..(i + 1) * self.ncol];
            for (dj, &a) in d.iter_mut().zip(row) {
                *dj -= cb * a;
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let ncol = self.ncol;
        let p = self.at(r, j);
        for k in 0..ncol {
            self.t[r * ncol + k] /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.at(i, j);
            if f == 0.0 {
                continue;
            }
            for k in 0..ncol {
                let v = self.t[r * ncol + k];
                self.t[i * ncol + k] -= f * v;
            }
        }
        self.basis[r] = j;
        self.state[j] = VarState::Basic;
    }

    /// Runs primal simplex iterations with Bland's rule until optimal or unbounded.
    fn run(&mut self, cost: &[f64]) -> Result<Outcome> {
        let cmax = cost.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let opt_tol = if cmax > 0.0 { OPT_TOL * cmax } else { OPT_TOL };
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::Numerical("simplex iteration limit reached".into()));
            }
            let d = self.reduced_costs(cost);

            // Bland: the lowest-index improving column enters.
            let mut entering = None;
            for j in 0..self.ncol {
                let dir = match self.state[j] {
                    VarState::Basic => continue,
                    _ if self.lower[j] == self.upper[j] => continue,
                    VarState::AtLower if d[j] < -opt_tol => 1.0,
                    VarState::AtUpper if d[j] > opt_tol => -1.0,
                    VarState::Free if d[j].abs() > opt_tol => -d[j].signum(),
                    _ => continue,
                };
                entering = Some((j, dir));
                break;
            }
            let Some((j, dir)) = entering else {
                return Ok(Outcome::Optimal);
            };

            // Ratio test; ties go to the lowest variable index.
            let mut best_t = f64::INFINITY;
            let mut leave: Option<(usize, usize, bool)> = None; // (row, var, hits_upper)
            let mut flip = false;
            if self.lower[j].is_finite() && self.upper[j].is_finite() {
                best_t = self.upper[j] - self.lower[j];
                flip = true;
            }
            for i in 0..self.m {
                let rate = -dir * self.at(i, j);
                let bv = self.basis[i];
                let (limit, hits_upper) = if rate < -PIVOT_TOL && self.lower[bv].is_finite() {
                    (((self.value[bv] - self.lower[bv]) / -rate).max(0.0), false)
                } else if rate > PIVOT_TOL && self.upper[bv].is_finite() {
                    (((self.upper[bv] - self.value[bv]) / rate).max(0.0), true)
                } else {
                    continue;
                };
                let better = match leave {
                    _ if limit < best_t - 1e-12 => true,
                    _ if limit > best_t + 1e-12 => false,
                    // tie with the entering variable's own bound flip
                    None => bv < j,
                    Some((_, cur, _)) => bv < cur,
                };
                if better {
                    best_t = limit;
                    leave = Some((i, bv, hits_upper));
                    flip = false;
                }
            }
            if best_t == f64::INFINITY {
                return Ok(Outcome::Unbounded);
            }

            let t = best_t;
            self.value[j] += dir * t;
            for i in 0..self.m {
                let rate = -dir * self.at(i, j);
                let bv = self.basis[i];
                self.value[bv] += rate * t;
            }
            self.iterations += 1;

            if flip || leave.is_none() {
                self.state[j] = if dir > 0.0 {
                    self.value[j] = self.upper[j];
                    VarState::AtUpper
                } else {
                    self.value[j] = self.lower[j];
                    VarState::AtLower
                };
                continue;
            }
            let (r, bv, hits_upper) = leave.expect("leaving variable");
            if hits_upper {
                self.value[bv] = self.upper[bv];
                self.state[bv] = VarState::AtUpper;
            } else {
                self.value[bv] = self.lower[bv];
                self.state[bv] = VarState::AtLower;
            }
            self.pivot(r, j);
        }
    }
}

fn initial_state(l: f64, u: f64) -> (VarState, f64) {
    if l.is_finite() {
        (VarState::AtLower, l)
    } else if u.is_finite() {
        (VarState::AtUpper, u)
    } else {
        (VarState::Free, 0.0)
    }
}

/// Solves `p`. Errors only on malformed input or numerical breakdown;
/// infeasibility and unboundedness are reported through the status.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    let n = p.n_vars();
    let me = p.a_eq.len();
    let mu = p.a_ub.len();
    let m = me + mu;
    let n_slack = mu;
    let art0 = n + n_slack;
    let ncol = art0 + m;

    let rows: Vec<&Vec<f64>> = p.a_eq.iter().chain(&p.a_ub).collect();
    let rhs: Vec<f64> = p.b_eq.iter().chain(&p.b_ub).copied().collect();

    let mut lower = vec![0.0; ncol];
    let mut upper = vec![f64::INFINITY; ncol];
    lower[..n].copy_from_slice(&p.lower);
    upper[..n].copy_from_slice(&p.upper);
    let mut state = vec![VarState::AtLower; ncol];
    let mut value = vec![0.0; ncol];
    for j in 0..n {
        let (s, v) = initial_state(p.lower[j], p.upper[j]);
        state[j] = s;
        value[j] = v;
    }

    // Full constraint matrix including slack and artificial columns.
    let mut a_full = vec![0.0; m * ncol];
    let mut sigma = vec![1.0; m];
    let mut basis = vec![0; m];
    for i in 0..m {
        a_full[i * ncol..i * ncol + n].copy_from_slice(rows[i]);
        if i >= me {
            a_full[i * ncol + n + (i - me)] = 1.0;
        }
        let resid = rhs[i] - (0..n).map(|j| rows[i][j] * value[j]).sum::<f64>();
        if i >= me && resid >= 0.0 {
            let s = n + (i - me);
            basis[i] = s;
            state[s] = VarState::Basic;
            value[s] = resid;
            // this row's artificial is never needed
            upper[art0 + i] = 0.0;
        } else {
            sigma[i] = if resid < 0.0 { -1.0 } else { 1.0 };
            basis[i] = art0 + i;
            state[art0 + i] = VarState::Basic;
            value[art0 + i] = resid.abs();
        }
        a_full[i * ncol + art0 + i] = sigma[i];
    }

    // Initial basis matrix is diagonal (entries ±1).
    let mut t = a_full.clone();
    for i in 0..m {
        let d = a_full[i * ncol + basis[i]];
        for k in 0..ncol {
            t[i * ncol + k] /= d;
        }
    }

    let mut tab = Tableau {
        m,
        ncol,
        t,
        basis,
        state,
        value,
        lower,
        upper,
        iterations: 0,
        max_iterations: 200 * (m + ncol) + 1000,
    };

    // Phase one: minimise the sum of artificials.
    let mut phase1_cost = vec![0.0; ncol];
    for c in &mut phase1_cost[art0..] {
        *c = 1.0;
    }
    tab.run(&phase1_cost)?;
    let infeas: f64 = (art0..ncol).map(|j| tab.value[j]).sum();
    let bmax = rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if infeas > FEAS_TOL * (1.0 + bmax) {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, n, tab.iterations));
    }

    // Pin artificials at zero and pivot them out where possible.
    for j in art0..ncol {
        tab.upper[j] = 0.0;
        tab.value[j] = 0.0;
        if tab.state[j] != VarState::Basic {
            tab.state[j] = VarState::AtLower;
        }
    }
    for r in 0..m {
        if tab.basis[r] < art0 {
            continue;
        }
        let art = tab.basis[r];
        if let Some(j) = (0..art0).find(|&j| tab.state[j] != VarState::Basic && tab.at(r, j).abs() > PIVOT_TOL) {
            tab.state[art] = VarState::AtLower;
            tab.pivot(r, j);
        }
    }

    // Phase two.
    let mut cost = vec![0.0; ncol];
    cost[..n].copy_from_slice(&p.cost);
    if let Outcome::Unbounded = tab.run(&cost)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, n, tab.iterations));
    }

    // Recompute the vertex and duals from the original data for accuracy.
    let mut bmat = Matrix::zeros(m, m);
    for i in 0..m {
        for (c, &bv) in tab.basis.iter().enumerate() {
            bmat[(i, c)] = a_full[i * ncol + bv];
        }
    }
    let mut value = tab.value.clone();
    if m > 0 {
        let lu = lu_factor(&bmat).map_err(|e| Error::Numerical(format!("final basis: {e}")))?;
        let mut rhs_n = rhs.clone();
        for (i, r) in rhs_n.iter_mut().enumerate() {
            for j in 0..ncol {
                if tab.state[j] != VarState::Basic && value[j] != 0.0 {
                    *r -= a_full[i * ncol + j] * value[j];
                }
            }
        }
        let xb = lu.solve(&rhs_n)?;
        for (i, &bv) in tab.basis.iter().enumerate() {
            value[bv] = xb[i];
        }
        let cb: Vec<f64> = tab.basis.iter().map(|&bv| cost[bv]).collect();
        let y = lu.solve_transposed(&cb)?;
        finish(p, &tab, &a_full, &cost, value, y)
    } else {
        finish(p, &tab, &a_full, &cost, value, Vec::new())
    }
}

fn finish(
    p: &LpProblem,
    tab: &Tableau,
    a_full: &[f64],
    cost: &[f64],
    value: Vec<f64>,
    y: Vec<f64>,
) -> Result<LpSolution> {
    let n = p.n_vars();
    let me = p.a_eq.len();
    let ncol = tab.ncol;
    let reduced: Vec<f64> = (0..ncol)
        .map(|j| cost[j] - (0..tab.m).map(|i| y[i] * a_full[i * ncol + j]).sum::<f64>())
        .collect();

    let mut duals_lower = vec![0.0; n];
    let mut duals_upper = vec![0.0; n];
    for j in 0..n {
        match tab.state[j] {
            VarState::Basic | VarState::Free => {}
            _ if p.lower[j] == p.upper[j] => {
                if reduced[j] >= 0.0 {
                    duals_lower[j] = reduced[j];
                } else {
                    duals_upper[j] = reduced[j];
                }
            }
            VarState::AtLower => duals_lower[j] = reduced[j],
            VarState::AtUpper => duals_upper[j] = reduced[j],
        }
    }

    let degenerate = tab.basis.iter().any(|&bv| {
        let v = value[bv];
        (tab.lower[bv].is_finite() && (v - tab.lower[bv]).abs() <= DEGEN_TOL)
            || (tab.upper[bv].is_finite() && (v - tab.upper[bv]).abs() <= DEGEN_TOL)
    });

    let x = value[..n].to_vec();
    let objective = p.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        duals_eq: y[..me].to_vec(),
        duals_ub: y[me..].iter().map(|v| 0.0 - v).collect(),
        duals_lower,
        duals_upper,
        degenerate,
        iterations: tab.iterations,
    })
}
