//! DC-OPF on the 3-bus case with and without a limit on line 1-3, in both
//! formulations, with the energy/congestion split of the prices.
//!
//! cargo run --example dcopf_lmp

use gridopt::dcopf::{lmp_decompose, solve_dcopf_angle, solve_dcopf_ptdf, DispatchResult};
use gridopt::matrices::{build_ptdf, SlackChoice};
use gridopt::{parse_case, Network};

fn show(net: &Network, r: &DispatchResult) -> gridopt::Result<()> {
    println!("  {:?}: cost {:.2}/h, dispatch {:?} MW", r.formulation, r.objective, r.p_g);
    for f in &r.flows {
        let limit = f.limit_mw.map_or("-".into(), |l| format!("{l}"));
        println!("    line {:<6} {:>8.3} MW  limit {limit:>4}  shadow {:.3}", f.key, f.p_mw, f.lambda_fwd.max(f.lambda_rev));
    }
    let pu = net.per_unit();
    let parts = lmp_decompose(r, &build_ptdf(&pu, SlackChoice::from_case(&pu)?)?)?;
    for ((bus, lmp), c) in r.buses.iter().zip(&r.lmp).zip(&parts) {
        println!("    bus {bus}: LMP {lmp:>7.3} = energy {:.3} + congestion {:.3}", c.energy, c.congestion);
    }
    Ok(())
}

fn main() -> gridopt::Result<()> {
    for (name, text) in [
        ("uncongested", include_str!("../fixtures/3bus.json")),
        ("line 1-3 limited to 50 MW", include_str!("../fixtures/3bus_congested.json")),
    ] {
        let net = parse_case(text)?;
        println!("{name}");
        show(&net, &solve_dcopf_angle(&net)?)?;
        show(&net, &solve_dcopf_ptdf(&net)?)?;
    }
    Ok(())
}
