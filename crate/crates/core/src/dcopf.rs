//! DC optimal power flow in the angle and PTDF formulations, locational
//! marginal prices, their energy/congestion decomposition, and a
//! finite-difference check of the prices.
//!
//! Everything is solved in per unit with angles in radians. Results are
//! reported in MW, currency/h and currency/MWh.
//!
//! Price convention: `lmp[i] = ∂(optimal cost)/∂(demand at bus i)`, which is
//! non-negative for non-negative generator costs.

use std::f64::consts::FRAC_PI_6;

use serde::{Deserialize, Serialize};

use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpProblem, LpSolution, LpStatus};
use crate::matrices::{build_b_bus, build_b_line, build_ptdf, PtdfMatrix, SlackChoice};
use crate::netmodel::{BusId, Load, Network};

/// Shadow prices at or below this (currency/MWh) do not count as congestion.
pub const BINDING_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Angles as variables, one balance row per bus.
    Angle,
    /// Injections only, a single balance row, PTDF line constraints.
    Ptdf,
    /// No network: economic dispatch.
    Copperplate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl From<LpStatus> for Status {
    fn from(s: LpStatus) -> Self {
        match s {
            LpStatus::Optimal => Status::Optimal,
            LpStatus::Infeasible => Status::Infeasible,
            LpStatus::Unbounded => Status::Unbounded,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Overrides the slack bus marked in the case.
    pub slack: Option<BusId>,
    /// Factor applied to the cost vector inside the solver only.
    pub obj_scale: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            slack: None,
            obj_scale: 1.0,
        }
    }
}

impl SolveOptions {
    fn check(&self) -> Result<()> {
        if !(self.obj_scale.is_finite() && self.obj_scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "objective scale must be positive, got {}",
                self.obj_scale
            )));
        }
        Ok(())
    }

    fn resolve_slack(&self, net: &Network) -> Result<SlackChoice> {
        match self.slack {
            Some(b) => SlackChoice::new(net, b),
            None => SlackChoice::from_case(net),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineFlow {
    pub line: usize,
    pub key: String,
    /// From→to flow, MW.
    pub p_mw: f64,
    pub limit_mw: Option<f64>,
    /// Shadow price of the from→to limit, currency/MWh.
    pub lambda_fwd: f64,
    /// Shadow price of the to→from limit, currency/MWh.
    pub lambda_rev: f64,
}

impl LineFlow {
    pub fn binding(&self) -> bool {
        self.lambda_fwd > BINDING_TOL || self.lambda_rev > BINDING_TOL
    }

    /// `λ⁻ − λ⁺`: the weight of this line's PTDF row in the congestion part of the prices.
    pub fn signed_lambda(&self) -> f64 {
        self.lambda_rev - self.lambda_fwd
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BindingLine {
    pub line: usize,
    pub direction: crate::matrices::Direction,
    pub shadow_price: f64,
}

/// Unified result of economic dispatch and both DC-OPF formulations.
#[derive(Clone, Debug, PartialEq)]
pub struct DispatchResult {
    pub status: Status,
    pub formulation: Formulation,
    pub slack: BusId,
    pub options: SolveOptions,
    pub buses: Vec<BusId>,
    /// Bus of each generator, in network order.
    pub gen_buses: Vec<BusId>,
    /// MW per generator.
    pub p_g: Vec<f64>,
    /// Bus voltage angles, rad. Angle formulation only.
    pub theta: Option<Vec<f64>>,
    pub flows: Vec<LineFlow>,
    /// currency/MWh per bus.
    pub lmp: Vec<f64>,
    /// Generation cost, currency/h.
    pub objective: f64,
    /// Objective as the solver saw it: per unit and scaled.
    pub raw_objective: f64,
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

impl DispatchResult {
    fn failed(status: Status, formulation: Formulation, slack: BusId, options: SolveOptions, net: &Network) -> Self {
        DispatchResult {
            status,
            formulation,
            slack,
            options,
            buses: net.bus_ids(),
            gen_buses: net.generators.iter().map(|g| g.bus).collect(),
            p_g: Vec::new(),
            theta: None,
            flows: Vec::new(),
            lmp: Vec::new(),
            objective: f64::NAN,
            raw_objective: f64::NAN,
            degenerate: false,
            warnings: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn binding_lines(&self) -> Vec<BindingLine> {
        use crate::matrices::Direction;
        let mut out = Vec::new();
        for f in &self.flows {
            if f.lambda_fwd > BINDING_TOL {
                out.push(BindingLine {
                    line: f.line,
                    direction: Direction::Forward,
                    shadow_price: f.lambda_fwd,
                });
            }
            if f.lambda_rev > BINDING_TOL {
                out.push(BindingLine {
                    line: f.line,
                    direction: Direction::Reverse,
                    shadow_price: f.lambda_rev,
                });
            }
        }
        out
    }

    /// `max(lmp) - min(lmp)`.
    pub fn lmp_spread(&self) -> f64 {
        let max = self.lmp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.lmp.iter().copied().fold(f64::INFINITY, f64::min);
        if self.lmp.is_empty() {
            0.0
        } else {
            max - min
        }
    }

    pub fn lmp_at(&self, bus: BusId) -> Result<f64> {
        let k = self.buses.iter().position(|&b| b == bus).ok_or(Error::UnknownBus(bus.0))?;
        self.lmp.get(k).copied().ok_or_else(|| Error::InvalidArgument("result has no prices".into()))
    }

    /// Count of generators strictly between their limits.
    pub fn marginal_count(&self, net: &Network) -> usize {
        let s = net.mw_scale();
        self.p_g
            .iter()
            .zip(&net.generators)
            .filter(|(&p, g)| p > g.p_min * s + 1e-6 && p < g.p_max * s - 1e-6)
            .count()
    }

    /// Generators at min/max/interior and binding lines, for active-set comparisons.
    fn active_set(&self, net: &Network) -> (Vec<i8>, Vec<(usize, i8)>) {
        let s = net.mw_scale();
        let gens = self
            .p_g
            .iter()
            .zip(&net.generators)
            .map(|(&p, g)| {
                if p <= g.p_min * s + 1e-6 {
                    -1
                } else if p >= g.p_max * s - 1e-6 {
                    1
                } else {
                    0
                }
            })
            .collect();
        let lines = self
            .binding_lines()
            .iter()
            .map(|b| (b.line, if b.direction == crate::matrices::Direction::Forward { 1 } else { -1 }))
            .collect();
        (gens, lines)
    }

    pub fn report(&self) -> Report {
        let optimal = self.is_optimal();
        let mut warnings = self.warnings.clone();
        if self.degenerate {
            warnings.push("degenerate: a basic variable sits on a bound, prices may not be unique".into());
        }
        Report {
            version: crate::VERSION.to_string(),
            status: self.status,
            formulation: self.formulation,
            slack: self.slack,
            objective_per_h: optimal.then_some(self.objective),
            dispatch: self
                .p_g
                .iter()
                .zip(&self.gen_buses)
                .enumerate()
                .map(|(k, (&p, &bus))| GenReport {
                    gen: k + 1,
                    bus,
                    p_mw: p,
                })
                .collect(),
            theta_rad: self.theta.clone(),
            flows: self
                .flows
                .iter()
                .map(|f| FlowReport {
                    line: f.key.clone(),
                    p_mw: f.p_mw,
                    limit_mw: f.limit_mw,
                    binding: f.binding(),
                    shadow_price: f.binding().then_some(f.lambda_fwd.max(f.lambda_rev)),
                })
                .collect(),
            lmp: self
                .lmp
                .iter()
                .zip(&self.buses)
                .map(|(&price, &bus)| LmpReport { bus, price })
                .collect(),
            warnings,
            fd_check: None,
        }
    }
}

/// Machine-readable dispatch report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub status: Status,
    pub formulation: Formulation,
    pub slack: BusId,
    pub objective_per_h: Option<f64>,
    pub dispatch: Vec<GenReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta_rad: Option<Vec<f64>>,
    pub flows: Vec<FlowReport>,
    pub lmp: Vec<LmpReport>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fd_check: Option<Vec<FdCheck>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenReport {
    pub gen: usize,
    pub bus: BusId,
    pub p_mw: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub line: String,
    pub p_mw: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limit_mw: Option<f64>,
    pub binding: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shadow_price: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LmpReport {
    pub bus: BusId,
    pub price: f64,
}

fn angle_warnings(net: &Network, theta: &[f64]) -> Vec<String> {
    net.line_endpoints()
        .iter()
        .zip(net.line_keys())
        .filter_map(|(&(i, j), key)| {
            let d = (theta[i] - theta[j]).abs();
            (d > FRAC_PI_6).then(|| {
                format!("approx_warning: line {key} angle difference {d:.4} rad exceeds pi/6")
            })
        })
        .collect()
}

fn gen_costs(net: &Network, scale: f64) -> Vec<f64> {
    net.generators.iter().map(|g| g.cost * scale).collect()
}

fn true_cost(net: &Network, p_pu: &[f64]) -> f64 {
    net.generators
        .iter()
        .zip(p_pu)
        .map(|(g, p)| g.cost * p * net.base_mva)
        .sum()
}

fn line_flows(net: &Network, flows_pu: &[f64], lambdas: &[(f64, f64)]) -> Vec<LineFlow> {
    let base = net.base_mva;
    net.line_keys()
        .into_iter()
        .enumerate()
        .map(|(k, key)| LineFlow {
            line: k,
            key,
            p_mw: flows_pu[k] * base,
            limit_mw: net.lines[k].rating.map(|r| r * base),
            lambda_fwd: lambdas[k].0,
            lambda_rev: lambdas[k].1,
        })
        .collect()
}

/// Per rated line, the `(forward, reverse)` inequality rows it owns.
fn rated_lines(net: &Network) -> Vec<(usize, f64)> {
    net.lines
        .iter()
        .enumerate()
        .filter_map(|(k, l)| l.rating.map(|r| (k, r)))
        .collect()
}

fn line_lambdas(net: &Network, sol: &LpSolution, rated: &[(usize, f64)], scale: f64) -> Vec<(f64, f64)> {
    let mut lambdas = vec![(0.0, 0.0); net.n_lines()];
    for (r, &(k, _)) in rated.iter().enumerate() {
        lambdas[k] = (sol.duals_ub[2 * r] / scale, sol.duals_ub[2 * r + 1] / scale);
    }
    lambdas
}

/// DC-OPF with generator outputs and bus angles as variables.
pub fn solve_dcopf_angle(net: &Network) -> Result<DispatchResult> {
    solve_dcopf_angle_with(net, &SolveOptions::default())
}

pub fn solve_dcopf_angle_with(net: &Network, opts: &SolveOptions) -> Result<DispatchResult> {
    opts.check()?;
    let net = net.per_unit();
    let slack = opts.resolve_slack(&net)?;
    let n = net.n_buses();
    let ng = net.generators.len();
    let b_bus = build_b_bus(&net);
    let gen_bus = net.generator_bus_indices();
    let demand = net.demand_by_bus();

    // Variables: [P_G (ng) | δ (n)]; angles carry zero cost.
    let mut cost = gen_costs(&net, opts.obj_scale);
    cost.resize(ng + n, 0.0);
    let mut lp = LpProblem::new(ng + n).with_cost(cost);
    for (g, gen) in net.generators.iter().enumerate() {
        lp.set_bounds(g, gen.p_min, gen.p_max);
    }
    for i in 0..n {
        lp.set_bounds(ng + i, f64::NEG_INFINITY, f64::INFINITY);
    }
    // Nodal balance B·δ − P_G = −P_D.
    for i in 0..n {
        let mut row = vec![0.0; ng + n];
        for (g, &bi) in gen_bus.iter().enumerate() {
            if bi == i {
                row[g] = -1.0;
            }
        }
        row[ng..].copy_from_slice(b_bus.row(i));
        lp.add_eq(row, -demand[i]);
    }
    let mut pin = vec![0.0; ng + n];
    pin[ng + slack.index] = 1.0;
    lp.add_eq(pin, 0.0);

    let rated = rated_lines(&net);
    let endpoints = net.line_endpoints();
    for &(k, rating) in &rated {
        let (i, j) = endpoints[k];
        let b = net.lines[k].susceptance();
        let mut row = vec![0.0; ng + n];
        row[ng + i] = b;
        row[ng + j] = -b;
        lp.add_ub(row.clone(), rating);
        lp.add_ub(row.iter().map(|v| -v).collect(), rating);
    }

    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Ok(DispatchResult::failed(sol.status.into(), Formulation::Angle, slack.bus, *opts, &net));
    }
    let p_pu = &sol.x[..ng];
    let theta = sol.x[ng..].to_vec();
    let flows_pu = build_b_line(&net).matvec(&theta)?;
    let lmp = sol.duals_eq[..n].iter().map(|y| -y / opts.obj_scale).collect();
    let lambdas = line_lambdas(&net, &sol, &rated, opts.obj_scale);

    Ok(DispatchResult {
        status: Status::Optimal,
        formulation: Formulation::Angle,
        slack: slack.bus,
        options: *opts,
        buses: net.bus_ids(),
        gen_buses: net.generators.iter().map(|g| g.bus).collect(),
        p_g: p_pu.iter().map(|p| p * net.base_mva).collect(),
        warnings: angle_warnings(&net, &theta),
        theta: Some(theta),
        flows: line_flows(&net, &flows_pu, &lambdas),
        lmp,
        objective: true_cost(&net, p_pu),
        raw_objective: sol.objective,
        degenerate: sol.degenerate,
    })
}

/// DC-OPF over generator outputs only, with flows expressed through PTDFs.
pub fn solve_dcopf_ptdf(net: &Network) -> Result<DispatchResult> {
    solve_dcopf_ptdf_with(net, &SolveOptions::default())
}

pub fn solve_dcopf_ptdf_with(net: &Network, opts: &SolveOptions) -> Result<DispatchResult> {
    opts.check()?;
    let net = net.per_unit();
    let slack = opts.resolve_slack(&net)?;
    let ptdf = build_ptdf(&net, slack)?;
    let n = net.n_buses();
    let ng = net.generators.len();
    let gen_bus = net.generator_bus_indices();
    let demand = net.demand_by_bus();

    let mut lp = LpProblem::new(ng).with_cost(gen_costs(&net, opts.obj_scale));
    for (g, gen) in net.generators.iter().enumerate() {
        lp.set_bounds(g, gen.p_min, gen.p_max);
    }
    lp.add_eq(vec![1.0; ng], net.total_demand());

    let rated = rated_lines(&net);
    let pm = &ptdf.matrix;
    for &(k, rating) in &rated {
        let row: Vec<f64> = gen_bus.iter().map(|&bi| pm[(k, bi)]).collect();
        let load_flow: f64 = (0..n).map(|i| pm[(k, i)] * demand[i]).sum();
        lp.add_ub(row.clone(), rating + load_flow);
        lp.add_ub(row.iter().map(|v| -v).collect(), rating - load_flow);
    }

    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Ok(DispatchResult::failed(sol.status.into(), Formulation::Ptdf, slack.bus, *opts, &net));
    }
    let p_pu = &sol.x[..ng];
    let mut injection: Vec<f64> = demand.iter().map(|d| -d).collect();
    for (g, &bi) in gen_bus.iter().enumerate() {
        injection[bi] += p_pu[g];
    }
    let flows_pu = pm.matvec(&injection)?;
    let lambdas = line_lambdas(&net, &sol, &rated, opts.obj_scale);
    let energy = sol.duals_eq[0] / opts.obj_scale;
    let lmp = (0..n)
        .map(|i| {
            energy
                + lambdas
                    .iter()
                    .enumerate()
                    .map(|(k, &(fwd, rev))| (rev - fwd) * pm[(k, i)])
                    .sum::<f64>()
        })
        .collect();

    Ok(DispatchResult {
        status: Status::Optimal,
        formulation: Formulation::Ptdf,
        slack: slack.bus,
        options: *opts,
        buses: net.bus_ids(),
        gen_buses: net.generators.iter().map(|g| g.bus).collect(),
        p_g: p_pu.iter().map(|p| p * net.base_mva).collect(),
        theta: None,
        flows: line_flows(&net, &flows_pu, &lambdas),
        lmp,
        objective: true_cost(&net, p_pu),
        raw_objective: sol.objective,
        degenerate: sol.degenerate,
        warnings: Vec::new(),
    })
}

/// Copperplate economic dispatch through the LP. Used by [`crate::dispatch`].
pub(crate) fn solve_copperplate(net: &Network, opts: &SolveOptions) -> Result<DispatchResult> {
    opts.check()?;
    let net = net.per_unit();
    let slack = match opts.slack.or(net.slack()) {
        Some(b) => b,
        None => net
            .buses
            .first()
            .map(|b| b.id)
            .ok_or_else(|| Error::InvalidCase("network has no buses".into()))?,
    };
    let ng = net.generators.len();
    let mut lp = LpProblem::new(ng).with_cost(gen_costs(&net, opts.obj_scale));
    for (g, gen) in net.generators.iter().enumerate() {
        lp.set_bounds(g, gen.p_min, gen.p_max);
    }
    lp.add_eq(vec![1.0; ng], net.total_demand());
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Ok(DispatchResult::failed(sol.status.into(), Formulation::Copperplate, slack, *opts, &net));
    }
    let smp = sol.duals_eq[0] / opts.obj_scale;
    let p_pu = &sol.x;
    Ok(DispatchResult {
        status: Status::Optimal,
        formulation: Formulation::Copperplate,
        slack,
        options: *opts,
        buses: net.bus_ids(),
        gen_buses: net.generators.iter().map(|g| g.bus).collect(),
        p_g: p_pu.iter().map(|p| p * net.base_mva).collect(),
        theta: None,
        flows: Vec::new(),
        lmp: vec![smp; net.n_buses()],
        objective: true_cost(&net, p_pu),
        raw_objective: sol.objective,
        degenerate: sol.degenerate,
        warnings: Vec::new(),
    })
}

/// Re-runs the formulation that produced `r` on another network.
pub fn resolve(net: &Network, formulation: Formulation, opts: &SolveOptions) -> Result<DispatchResult> {
    match formulation {
        Formulation::Angle => solve_dcopf_angle_with(net, opts),
        Formulation::Ptdf => solve_dcopf_ptdf_with(net, opts),
        Formulation::Copperplate => solve_copperplate(net, opts),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmpComponents {
    /// Identical at every bus: the price at the slack.
    pub energy: f64,
    /// `Σ_l (λ⁻ − λ⁺)·PTDF[l, i]`.
    pub congestion: f64,
}

/// Splits each price into an energy part and a congestion part using the
/// line shadow prices and the PTDF matrix built for the result's slack.
pub fn lmp_decompose(r: &DispatchResult, p: &PtdfMatrix) -> Result<Vec<LmpComponents>> {
    if !r.is_optimal() {
        return Err(Error::InvalidArgument("result is not optimal".into()));
    }
    if r.slack != p.slack.bus {
        return Err(Error::SlackMismatch {
            result: r.slack.0,
            ptdf: p.slack.bus.0,
        });
    }
    if r.buses != p.buses {
        return Err(Error::DimensionMismatch("PTDF built for another network".into()));
    }
    let energy = r.lmp[p.slack.index];
    let weights: Vec<f64> = if r.flows.is_empty() {
        vec![0.0; p.n_lines()]
    } else {
        r.flows.iter().map(LineFlow::signed_lambda).collect()
    };
    if weights.len() != p.n_lines() {
        return Err(Error::DimensionMismatch("line count differs".into()));
    }
    let congestion = p.matrix.transpose().matvec(&weights)?;
    Ok(congestion
        .into_iter()
        .map(|c| LmpComponents { energy, congestion: c })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdCheck {
    pub bus: BusId,
    /// `Δcost / Δdemand`, currency/MWh. `None` when the perturbed problem failed.
    pub fd: Option<f64>,
    pub lmp: f64,
    pub rel_gap: Option<f64>,
    pub active_set_changed: bool,
    pub pass: bool,
}

/// Relative tolerance used by [`verify_lmp_fd`].
pub const FD_REL_TOL: f64 = 1e-3;

/// Re-solves with the demand at each bus raised by `eps` (p.u.) and compares
/// the cost increase per unit with the reported price.
pub fn verify_lmp_fd(net: &Network, r: &DispatchResult, eps: f64) -> Result<Vec<FdCheck>> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    if !r.is_optimal() {
        return Err(Error::InvalidArgument("result is not optimal".into()));
    }
    let base_net = net.per_unit().into_owned();
    let base_cost = r.objective / base_net.base_mva;
    let reference = r.active_set(&base_net);
    let mut out = Vec::with_capacity(base_net.n_buses());
    for (i, bus) in base_net.buses.iter().enumerate() {
        let mut perturbed = base_net.clone();
        perturbed.loads.push(Load {
            bus: bus.id,
            p: eps,
            q: 0.0,
        });
        let lmp = r.lmp[i];
        let res = resolve(&perturbed, r.formulation, &r.options)?;
        if !res.is_optimal() {
            out.push(FdCheck {
                bus: bus.id,
                fd: None,
                lmp,
                rel_gap: None,
                active_set_changed: true,
                pass: false,
            });
            continue;
        }
        let fd = (res.objective / perturbed.base_mva - base_cost) / eps;
        let rel_gap = (fd - lmp).abs() / lmp.abs().max(1.0);
        let changed = res.active_set(&perturbed) != reference;
        out.push(FdCheck {
            bus: bus.id,
            fd: Some(fd),
            lmp,
            rel_gap: Some(rel_gap),
            active_set_changed: changed,
            pass: rel_gap <= FD_REL_TOL || changed,
        });
    }
    Ok(out)
}

/// `B_line·θ` in p.u. for an angle-formulation result.
pub fn angle_flows(net: &Network, r: &DispatchResult) -> Result<Vec<f64>> {
    let theta = r.theta.as_ref().ok_or(Error::MissingAngles)?;
    build_b_line(net).matvec(theta)
}

/// PTDF-based flows in p.u. for any optimal result.
pub fn ptdf_flows_of(net: &Network, r: &DispatchResult, ptdf: &PtdfMatrix) -> Result<Vec<f64>> {
    let pu = net.per_unit();
    let mut inj: Vec<f64> = pu.demand_by_bus().iter().map(|d| -d).collect();
    for (g, &bi) in pu.generator_bus_indices().iter().enumerate() {
        inj[bi] += r.p_g[g] / pu.base_mva;
    }
    let m: &Matrix = &ptdf.matrix;
    m.matvec(&inj)
}
