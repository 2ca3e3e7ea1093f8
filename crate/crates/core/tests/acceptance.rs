//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
use std::time::{Duration, Instant};

use gridopt::acval::{complex_block, complex_stack, evaluate_ac, linearization_gap, VoltageProfile};
use gridopt::dcopf::{
    lmp_decompose, solve_dcopf_angle, solve_dcopf_angle_with, solve_dcopf_ptdf, solve_dcopf_ptdf_with,
    verify_lmp_fd, DispatchResult, SolveOptions, Status,
};
use gridopt::dense::CMatrix;
use gridopt::dispatch::{economic_dispatch_lp, merit_order};
use gridopt::matrices::{build_ptdf, ptdf_pair, SlackChoice};
use gridopt::netmodel::{to_case_json, Generator, Load};
use gridopt::{parse_case, BusId, Network};
use num_complex::Complex64;
use rand::Rng;
use serde::Deserialize;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const SUITE_SEED: u64 = 20_240_611;
const SUITE_SIZE: usize = 200;

#[derive(Deserialize)]
struct PtdfTable {
    buses: Vec<u32>,
    lines: Vec<(u32, u32)>,
    ptdf: Vec<Vec<f64>>,
}

fn criterion_1() -> Outcome {
    let t: PtdfTable = serde_json::from_str(&common::fixture("ptdf_5bus_table.json")).map_err(|e| e.to_string())?;
    let slack = 0;
    for row in &t.ptdf {
        ensure!(row[slack] == 0.0, "slack column entry {} is not zero", row[slack]);
    }
    let mut worst: f64 = 0.0;
    for (m, &bus_m) in t.buses.iter().enumerate().skip(1) {
        for (i, &bus_i) in t.buses.iter().enumerate() {
            // Net outflow from bus i when 1 p.u. enters at m and leaves at the slack.
            let div: f64 = t
                .lines
                .iter()
                .zip(&t.ptdf)
                .map(|(&(f, to), row)| {
                    if f == bus_i {
                        row[m]
                    } else if to == bus_i {
                        -row[m]
                    } else {
                        0.0
                    }
                })
                .sum();
            let want = if i == m {
                1.0
            } else if i == slack {
                -1.0
            } else {
                0.0
            };
            worst = worst.max((div - want).abs());
            ensure!((div - want).abs() <= 1e-3, "column {bus_m}, bus {bus_i}: divergence {div}, expected {want}");
        }
    }
    // Reactances recovered from the ring's column splits reproduce the table.
    let net = parse_case(&common::fixture("5bus_ring.json")).map_err(|e| e.to_string())?.to_per_unit().map_err(|e| e.to_string())?;
    let p = build_ptdf(&net, SlackChoice::from_case(&net).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut rebuilt: f64 = 0.0;
    for (l, row) in t.ptdf.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            rebuilt = rebuilt.max((p.matrix[(l, m)] - v).abs());
        }
    }
    ensure!(rebuilt <= 1e-3, "rebuilt PTDF differs from the table by {rebuilt}");
    Ok(format!("max divergence error {worst:.1e}, rebuilt-table error {rebuilt:.1e}"))
}

struct SuiteRun {
    net: Network,
    angle: DispatchResult,
    ptdf: DispatchResult,
}

fn run_suite() -> Result<Vec<SuiteRun>, String> {
    common::suite(SUITE_SEED, SUITE_SIZE)
        .into_iter()
        .map(|net| {
            let angle = solve_dcopf_angle(&net).map_err(|e| e.to_string())?;
            let ptdf = solve_dcopf_ptdf(&net).map_err(|e| e.to_string())?;
            Ok(SuiteRun { net, angle, ptdf })
        })
        .collect()
}

fn criterion_2(runs: &[SuiteRun]) -> Outcome {
    let mut optimal = 0;
    let mut congested = 0;
    let (mut obj_gap, mut flow_gap, mut lmp_gap): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (k, r) in runs.iter().enumerate() {
        ensure!(r.angle.status == r.ptdf.status, "case {k}: status {:?} vs {:?}", r.angle.status, r.ptdf.status);
        if !r.angle.is_optimal() {
            continue;
        }
        optimal += 1;
        if !r.angle.binding_lines().is_empty() {
            congested += 1;
        }
        let rel = (r.angle.objective - r.ptdf.objective).abs() / r.angle.objective.abs().max(1.0);
        obj_gap = obj_gap.max(rel);
        ensure!(rel <= 1e-7, "case {k}: objective {} vs {}", r.angle.objective, r.ptdf.objective);
        let base = r.net.base_mva;
        for (a, b) in r.angle.flows.iter().zip(&r.ptdf.flows) {
            let d = (a.p_mw - b.p_mw).abs() / base;
            flow_gap = flow_gap.max(d);
            ensure!(d <= 1e-6, "case {k}: line {} flow {} vs {} MW", a.key, a.p_mw, b.p_mw);
        }
        for (a, b) in r.angle.lmp.iter().zip(&r.ptdf.lmp) {
            lmp_gap = lmp_gap.max((a - b).abs());
            ensure!((a - b).abs() <= 1e-5, "case {k}: LMP {a} vs {b}");
        }
    }
    ensure!(optimal > runs.len() / 2, "only {optimal} optimal cases");
    Ok(format!(
        "{optimal}/{} optimal, {congested} congested; max gaps obj {obj_gap:.1e}, flow {flow_gap:.1e} p.u., lmp {lmp_gap:.1e}",
        runs.len()
    ))
}

fn criterion_3(runs: &[SuiteRun]) -> Outcome {
    let mut checked = 0;
    let mut changed = 0;
    let mut worst: f64 = 0.0;
    for (k, r) in runs.iter().enumerate() {
        for res in [&r.angle, &r.ptdf] {
            if !res.is_optimal() || res.degenerate {
                continue;
            }
            let checks = verify_lmp_fd(&r.net, res, 1e-5).map_err(|e| e.to_string())?;
            for c in &checks {
                checked += 1;
                if c.active_set_changed {
                    changed += 1;
                }
                if let Some(g) = c.rel_gap {
                    if !c.active_set_changed {
                        worst = worst.max(g);
                    }
                }
                ensure!(c.pass, "case {k} ({:?}) bus {}: fd {:?} vs lmp {}", res.formulation, c.bus, c.fd, c.lmp);
            }
        }
    }
    ensure!(checked > 0, "no non-degenerate case to check");
    Ok(format!("{checked} prices checked, {changed} across an active-set change, max rel gap {worst:.1e}"))
}

fn criterion_4(runs: &[SuiteRun]) -> Outcome {
    let mut congested = 0;
    for (k, r) in runs.iter().enumerate() {
        for res in [&r.angle, &r.ptdf] {
            if !res.is_optimal() {
                continue;
            }
            let spread = res.lmp_spread() > 1e-6;
            let binding = !res.binding_lines().is_empty();
            ensure!(spread == binding, "case {k} ({:?}): spread {} but {} binding lines", res.formulation, res.lmp_spread(), res.binding_lines().len());
            congested += usize::from(binding);
        }
    }
    Ok(format!("{congested} congested solves, all with price spread; all others uniform"))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6
}

fn criterion_5() -> Outcome {
    let free = parse_case(&common::fixture("3bus.json")).map_err(|e| e.to_string())?;
    let limited = parse_case(&common::fixture("3bus_congested.json")).map_err(|e| e.to_string())?;
    for r in [solve_dcopf_angle(&free), solve_dcopf_ptdf(&free)] {
        let r = r.map_err(|e| e.to_string())?;
        ensure!(r.lmp.iter().all(|&l| close(l, 10.0)), "uncongested LMPs {:?}", r.lmp);
        ensure!(close(r.objective, 1000.0), "uncongested cost {}", r.objective);
    }
    for r in [solve_dcopf_angle(&limited), solve_dcopf_ptdf(&limited)] {
        let r = r.map_err(|e| e.to_string())?;
        ensure!(close(r.p_g[0], 50.0) && close(r.p_g[1], 50.0), "dispatch {:?}", r.p_g);
        ensure!(close(r.objective, 1500.0), "cost {}", r.objective);
        for (l, want) in r.lmp.iter().zip([10.0, 20.0, 30.0]) {
            ensure!(close(*l, want), "LMPs {:?}", r.lmp);
        }
        let b = r.binding_lines();
        ensure!(b.len() == 1 && b[0].line == 1 && close(b[0].shadow_price, 30.0), "binding {:?}", b);
        let p = build_ptdf(&limited.per_unit(), SlackChoice::from_case(&limited).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let parts = lmp_decompose(&r, &p).map_err(|e| e.to_string())?;
        for (c, want) in parts.iter().zip([0.0, 10.0, 20.0]) {
            ensure!(close(c.energy, 10.0) && close(c.congestion, want), "decomposition {:?}", parts);
        }
    }
    Ok("LMP (10,10,10) at 1000/h; limited: (50,50) MW, 1500/h, LMP (10,20,30), lambda 30 on 1-3".into())
}

fn criterion_6(runs: &[SuiteRun]) -> Outcome {
    let (mut sol_gap, mut pair_gap): (f64, f64) = (0.0, 0.0);
    for (k, r) in runs.iter().enumerate() {
        let pu = r.net.per_unit();
        let ids = pu.bus_ids();
        let reference = &r.ptdf;
        let p0 = build_ptdf(&pu, SlackChoice::from_case(&pu).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for &s in &ids[1..] {
            let opts = SolveOptions {
                slack: Some(s),
                obj_scale: 1.0,
            };
            let other = solve_dcopf_ptdf_with(&r.net, &opts).map_err(|e| e.to_string())?;
            ensure!(other.status == reference.status, "case {k} slack {s}: status changed");
            if reference.is_optimal() {
                let mut gaps = vec![(reference.objective - other.objective).abs() / reference.objective.abs().max(1.0)];
                gaps.extend(reference.p_g.iter().zip(&other.p_g).map(|(a, b)| (a - b).abs() / pu.base_mva));
                gaps.extend(reference.lmp.iter().zip(&other.lmp).map(|(a, b)| (a - b).abs() / a.abs().max(1.0)));
                let g = gaps.into_iter().fold(0.0, f64::max);
                sol_gap = sol_gap.max(g);
                ensure!(g <= 1e-10, "case {k} slack {s}: solution differs by {g:e}");
            }
            let p1 = build_ptdf(&pu, SlackChoice::new(&pu, s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            for l in 0..pu.n_lines() {
                for &m in &ids {
                    for &n in &ids {
                        let a = ptdf_pair(&p0, l, m, n).map_err(|e| e.to_string())?;
                        let b = ptdf_pair(&p1, l, m, n).map_err(|e| e.to_string())?;
                        pair_gap = pair_gap.max((a - b).abs());
                        ensure!((a - b).abs() <= 1e-6, "case {k} slack {s}: pair ({m},{n}) on line {l}: {a} vs {b}");
                    }
                }
            }
        }
    }
    Ok(format!("max solution gap {sol_gap:.1e}, max ptdf_pair gap {pair_gap:.1e}"))
}

fn criterion_7() -> Outcome {
    let mut rng = common::rng(7);
    let (mut cost_gap, mut smp_gap): (f64, f64) = (0.0, 0.0);
    for k in 0..100 {
        let mut net = common::random_network(&mut rng);
        let ng = rng.gen_range(2..=10);
        let costs = common::distinct_costs(&mut rng, ng);
        net.generators = costs
            .into_iter()
            .map(|cost| Generator {
                bus: BusId(1),
                cost,
                p_min: 0.0,
                p_max: rng.gen_range(20.0..200.0),
            })
            .collect();
        let cap: f64 = net.generators.iter().map(|g| g.p_max).sum();
        net.loads = vec![Load {
            bus: BusId(2),
            p: cap * rng.gen_range(0.05..0.95),
            q: 0.0,
        }];
        let m = merit_order(&net, None).map_err(|e| e.to_string())?;
        let lp = economic_dispatch_lp(&net).map_err(|e| e.to_string())?;
        ensure!(lp.status == Status::Optimal, "case {k}: LP {:?}", lp.status);
        cost_gap = cost_gap.max((m.total_cost - lp.objective).abs());
        smp_gap = smp_gap.max((m.smp - lp.lmp[0]).abs());
        ensure!((m.total_cost - lp.objective).abs() <= 1e-9, "case {k}: cost {} vs {}", m.total_cost, lp.objective);
        ensure!((m.smp - lp.lmp[0]).abs() <= 1e-9, "case {k}: smp {} vs {}", m.smp, lp.lmp[0]);
    }
    // Merit order is one sort plus a linear pass; a large fleet stays fast.
    let mut net = common::random_network(&mut rng);
    net.generators = (0..200_000)
        .map(|k| Generator {
            bus: BusId(1),
            cost: ((k * 7919) % 200_000) as f64,
            p_min: 0.0,
            p_max: 1.0,
        })
        .collect();
    net.loads = vec![Load {
        bus: BusId(1),
        p: 123_456.5,
        q: 0.0,
    }];
    let t = Instant::now();
    let m = merit_order(&net, None).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    ensure!(m.smp == 123_456.0, "large fleet smp {}", m.smp);
    ensure!(el < Duration::from_secs(2), "200k generators took {el:?}");
    Ok(format!("100 cases, max cost gap {cost_gap:.1e}, max smp gap {smp_gap:.1e}; 200k generators in {el:.0?}"))
}

fn criterion_8() -> Outcome {
    let g = linearization_gap(&[FRAC_PI_6])[0];
    ensure!(format!("{:.4}", g.sin_delta) == "0.5000", "sin(pi/6) = {}", g.sin_delta);
    ensure!(format!("{:.4}", g.delta) == "0.5236", "pi/6 = {}", g.delta);
    let mut n = 0;
    let mut d = -FRAC_PI_2;
    while d <= FRAC_PI_2 {
        let e = linearization_gap(&[d])[0];
        ensure!(e.abs_err <= d.abs().powi(3) / 6.0 + 1e-15, "bound fails at {d}: {}", e.abs_err);
        n += 1;
        d += 0.01;
    }
    Ok(format!("sin(pi/6) = 0.5000 vs 0.5236 rad; Taylor bound holds at {n} sweep points"))
}

fn random_c(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn criterion_9() -> Outcome {
    let mut rng = common::rng(9);
    let (mut bal, mut loss, mut anti, mut block): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..100 {
        let mut net = common::random_network(&mut rng);
        let lossless = k % 3 == 0;
        let shuntless = k % 3 != 2;
        for l in &mut net.lines {
            l.r = if lossless { 0.0 } else { rng.gen_range(0.0..0.1) };
            l.b_sh = if shuntless { 0.0 } else { rng.gen_range(0.0..0.3) };
        }
        let n = net.n_buses();
        let mag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.9..1.1)).collect();
        let ang: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let ac = evaluate_ac(&net, &VoltageProfile::from_polar(&mag, &ang).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let d = (ac.total_injection() - ac.total_losses()).norm();
        bal = bal.max(d);
        ensure!(d <= 1e-9, "case {k}: injections minus losses {d:e}");
        if lossless {
            for s in &ac.losses {
                loss = loss.max(s.re.abs());
                ensure!(s.re.abs() <= 1e-10, "case {k}: real loss {} on a lossless line", s.re);
            }
        }
        if shuntless {
            for (f, r) in ac.i_fwd.iter().zip(&ac.i_rev) {
                anti = anti.max((f + r).norm());
                ensure!((f + r).norm() <= 1e-12, "case {k}: I_fwd + I_rev = {}", f + r);
            }
        }
        let dim = rng.gen_range(1..=4);
        let mut a = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                a[(i, j)] = random_c(&mut rng);
            }
        }
        let v: Vec<Complex64> = (0..dim).map(|_| random_c(&mut rng)).collect();
        let direct = complex_stack(&a.matvec(&v).map_err(|e| e.to_string())?);
        let via = complex_block(&a).matvec(&complex_stack(&v)).map_err(|e| e.to_string())?;
        for (x, y) in direct.iter().zip(&via) {
            block = block.max((x - y).abs());
            ensure!((x - y).abs() <= 1e-12, "case {k}: block product {y} vs {x}");
        }
    }
    Ok(format!("balance {bal:.1e}, lossless real loss {loss:.1e}, I_fwd+I_rev {anti:.1e}, block {block:.1e}"))
}

fn criterion_10(runs: &[SuiteRun]) -> Outcome {
    let mut rng = common::rng(10);
    for k in 0..200 {
        let mut net = common::random_network(&mut rng);
        for l in &mut net.lines {
            l.rating = Some((rng.gen_range(1.0..500.0_f64) * 100.0).round() / 100.0);
        }
        for g in &mut net.generators {
            g.p_max = (g.p_max * 1000.0).round() / 1000.0;
        }
        for d in &mut net.loads {
            d.p = (d.p * 10.0).round() / 10.0;
            d.q = rng.gen_range(0..50) as f64 * 0.7;
        }
        net.base_mva = [100.0, 10.0, 1000.0, 30.0][k % 4];
        let back = net.clone().to_per_unit().map_err(|e| e.to_string())?.from_per_unit().map_err(|e| e.to_string())?;
        ensure!(back == net, "case {k}: per-unit round trip changed the network");
        let text = to_case_json(&net).map_err(|e| e.to_string())?;
        ensure!(parse_case(&text).map_err(|e| e.to_string())? == net, "case {k}: JSON round trip changed the network");
    }
    let mut worst: f64 = 0.0;
    for (k, r) in runs.iter().enumerate() {
        if !r.angle.is_optimal() {
            continue;
        }
        for scale in [1e-3, 1e3] {
            let opts = SolveOptions { slack: None, obj_scale: scale };
            for (base, scaled) in [
                (&r.angle, solve_dcopf_angle_with(&r.net, &opts).map_err(|e| e.to_string())?),
                (&r.ptdf, solve_dcopf_ptdf_with(&r.net, &opts).map_err(|e| e.to_string())?),
            ] {
                for (a, b) in base.p_g.iter().zip(&scaled.p_g) {
                    let d = (a - b).abs() / r.net.base_mva;
                    worst = worst.max(d);
                    ensure!(d <= 1e-8, "case {k} scale {scale}: dispatch {a} vs {b} MW");
                }
                ensure!(base.objective == scaled.objective, "case {k} scale {scale}: cost {} vs {}", base.objective, scaled.objective);
            }
        }
    }
    Ok(format!("200 exact round trips; obj-scale max dispatch gap {worst:.1e} p.u., reported cost bit-identical"))
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let mut res = f();
        let el = t.elapsed();
        if let (Ok(_), Some(limit)) = (&res, limit) {
            if el > limit {
                res = Err(format!("took {el:.2?}, limit {limit:?}"));
            }
        }
        match res {
            Ok(detail) => println!("PASS criterion {n:>2} ({name}): {detail} [{el:.2?}]"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {n:>2} ({name}): {why} [{el:.2?}]");
            }
        }
    };
    report(1, "5-bus PTDF table", Some(Duration::from_secs(1)), &mut criterion_1);
    let t = Instant::now();
    let runs = run_suite();
    let suite_time = t.elapsed();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => {
            println!("FAIL criterion  2 (cross-formulation): suite failed to solve: {e}");
            std::process::exit(1);
        }
    };
    report(2, "cross-formulation", None, &mut || {
        let res = criterion_2(&runs)?;
        ensure!(suite_time < Duration::from_secs(30), "suite took {suite_time:?}");
        Ok(format!("{res}; solved in {suite_time:.2?}"))
    });
    report(3, "LMP finite difference", None, &mut || criterion_3(&runs));
    report(4, "congestion dichotomy", None, &mut || criterion_4(&runs));
    report(5, "3-bus fixture", None, &mut criterion_5);
    report(6, "slack invariance", None, &mut || criterion_6(&runs));
    report(7, "merit order vs LP", None, &mut criterion_7);
    report(8, "sin vs angle", None, &mut criterion_8);
    report(9, "AC identities", None, &mut criterion_9);
    report(10, "per unit and scaling", None, &mut || criterion_10(&runs));
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
