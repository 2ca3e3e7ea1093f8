//! Evaluates the AC flows at the angles of a DC-OPF solution and measures
//! how far the linear flow model is from the sine it replaces.
//!
//! cargo run --example ac_validation

use std::f64::consts::FRAC_PI_6;

use gridopt::acval::{evaluate_ac, linearization_gap, validate_angles, VoltageProfile};
use gridopt::dcopf::solve_dcopf_angle;
use gridopt::parse_case;

fn main() -> gridopt::Result<()> {
    let mut net = parse_case(include_str!("../fixtures/3bus_congested.json"))?;
    let r = solve_dcopf_angle(&net)?;
    let theta = r.theta.clone().expect("angle formulation");
    println!("angles {theta:?}");

    let rep = validate_angles(&net, &theta)?;
    for l in &rep.lines {
        println!(
            "line {:<6} dc {:.4}  sine {:.4}  |S| {:.4} p.u.{}",
            l.line,
            l.dc_pu,
            l.sine_pu,
            l.apparent_pu,
            if l.hidden_overload { "  hidden overload" } else { "" }
        );
    }
    println!("max gap {:.4} p.u.", rep.max_gap_pu);

    // Add some resistance and line charging and look at losses.
    for l in &mut net.lines {
        l.r = 0.1;
        l.b_sh = 0.05;
    }
    let v = VoltageProfile::from_polar(&[1.0, 0.99, 0.97], &theta)?;
    let ac = evaluate_ac(&net, &v)?;
    for (k, s) in ac.losses.iter().enumerate() {
        println!("line {k}: losses {:.5}{:+.5}j p.u.", s.re, s.im);
    }
    println!("violations: {}", ac.violations.len());

    for g in linearization_gap(&[0.1, FRAC_PI_6, 1.0]) {
        println!("delta {:.4}: sin {:.4}, error {:.2}%", g.delta, g.sin_delta, 100.0 * g.rel_err.unwrap_or(0.0));
    }
    Ok(())
}
