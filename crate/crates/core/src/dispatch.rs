//! Economic dispatch on a copperplate network: the merit-order construction
//! and the equivalent LP.

use std::fmt::Write as _;

use crate::dcopf::{solve_copperplate, DispatchResult, SolveOptions};
use crate::dense::fmt_sig6;
use crate::error::{Error, Result};
use crate::netmodel::Network;

/// Relative tolerance for deciding that demand sits on a breakpoint.
const BREAKPOINT_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MeritOrderResult {
    /// Generator indices, cheapest first. Equal costs keep list order.
    pub order: Vec<usize>,
    /// Cumulative capacity after each generator in `order`, MW.
    pub breakpoints: Vec<f64>,
    /// MW per generator, in network order.
    pub dispatch: Vec<f64>,
    /// System marginal price, currency/MWh.
    pub smp: f64,
    /// `None` when demand is zero.
    pub marginal_gen: Option<usize>,
    /// currency/h.
    pub total_cost: f64,
    /// `(cum_capacity_mw, price)` vertices of the supply step curve.
    pub curve_points: Vec<(f64, f64)>,
    pub demand_mw: f64,
    /// Set when demand is zero or lands exactly on a breakpoint, where the price is not unique.
    pub breakpoint_degenerate: bool,
}

impl MeritOrderResult {
    /// The supply curve as `cum_capacity_mw,price` CSV.
    pub fn curve_csv(&self) -> String {
        curve_csv(&self.curve_points)
    }
}

pub fn curve_csv(points: &[(f64, f64)]) -> String {
    let mut s = String::from("cum_capacity_mw,price\n");
    for &(q, p) in points {
        let _ = writeln!(s, "{},{}", fmt_sig6(q), fmt_sig6(p));
    }
    s
}

/// Step polyline through the ordered blocks: `(0,c1) (A,c1) (A,c2) (B,c2) …`.
pub fn supply_curve(net: &Network) -> Vec<(f64, f64)> {
    let s = net.mw_scale();
    let order = cost_order(net);
    let mut pts = Vec::with_capacity(2 * order.len());
    let mut cum = 0.0;
    for &g in &order {
        let gen = &net.generators[g];
        pts.push((cum, gen.cost));
        cum += gen.p_max * s;
        pts.push((cum, gen.cost));
    }
    pts
}

fn cost_order(net: &Network) -> Vec<usize> {
    let mut order: Vec<usize> = (0..net.generators.len()).collect();
    // Stable sort keeps ascending generator index among equal costs.
    order.sort_by(|&a, &b| net.generators[a].cost.total_cmp(&net.generators[b].cost));
    order
}

/// Fills demand cheapest-first. Requires every `p_min` to be zero.
///
/// `demand_override` replaces the case's total load (MW).
pub fn merit_order(net: &Network, demand_override: Option<f64>) -> Result<MeritOrderResult> {
    let s = net.mw_scale();
    if let Some(g) = net.generators.iter().position(|g| g.p_min != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "merit order requires p_min = 0 (generator {} has p_min > 0); use the LP method",
            g + 1
        )));
    }
    let demand = demand_override.unwrap_or(net.total_demand() * s);
    if !(demand.is_finite() && demand >= 0.0) {
        return Err(Error::InvalidArgument(format!("demand must be non-negative, got {demand}")));
    }
    let capacity = net.total_capacity() * s;
    let tol = BREAKPOINT_RTOL * capacity.max(1.0);
    if demand > capacity + tol {
        return Err(Error::InsufficientCapacity {
            demand_mw: demand,
            capacity_mw: capacity,
        });
    }
    let order = cost_order(net);
    let mut breakpoints = Vec::with_capacity(order.len());
    let mut dispatch = vec![0.0; net.generators.len()];
    let mut marginal = None;
    let mut on_breakpoint = false;
    let mut cum = 0.0;
    for &g in &order {
        let p_max = net.generators[g].p_max * s;
        let before = cum;
        cum += p_max;
        breakpoints.push(cum);
        if marginal.is_some() || demand <= 0.0 {
            continue;
        }
        if cum >= demand - tol {
            dispatch[g] = (demand - before).clamp(0.0, p_max);
            marginal = Some(g);
            on_breakpoint = (cum - demand).abs() <= tol;
        } else {
            dispatch[g] = p_max;
        }
    }
    let (smp, degenerate) = match marginal {
        Some(g) => (net.generators[g].cost, on_breakpoint),
        None => (order.first().map_or(0.0, |&g| net.generators[g].cost), true),
    };
    let total_cost = dispatch
        .iter()
        .zip(&net.generators)
        .map(|(p, g)| p * g.cost)
        .sum();
    Ok(MeritOrderResult {
        order,
        breakpoints,
        dispatch,
        smp,
        marginal_gen: marginal,
        total_cost,
        curve_points: supply_curve(net),
        demand_mw: demand,
        breakpoint_degenerate: degenerate,
    })
}

/// Copperplate dispatch through the LP; the balance-row dual is the SMP,
/// reported as the price at every bus.
pub fn economic_dispatch_lp(net: &Network) -> Result<DispatchResult> {
    solve_copperplate(net, &SolveOptions::default())
}

pub fn economic_dispatch_lp_with(net: &Network, opts: &SolveOptions) -> Result<DispatchResult> {
    solve_copperplate(net, opts)
}
