//! Copperplate dispatch by merit order and by LP, and the supply curve.
//!
//! cargo run --example economic_dispatch

use gridopt::dispatch::{economic_dispatch_lp, merit_order};
use gridopt::parse_case;

fn main() -> gridopt::Result<()> {
    let net = parse_case(include_str!("../fixtures/5bus_ring.json"))?;

    for demand in [100.0, 350.0, 400.0, 600.0] {
        let m = merit_order(&net, Some(demand))?;
        let marginal = m.marginal_gen.map_or("-".to_string(), |g| format!("G{}", g + 1));
        println!(
            "demand {demand:>5} MW: dispatch {:?} MW, SMP {} ({}), cost {}/h{}",
            m.dispatch,
            m.smp,
            marginal,
            m.total_cost,
            if m.breakpoint_degenerate { " [on a breakpoint]" } else { "" }
        );
    }

    let lp = economic_dispatch_lp(&net)?;
    let m = merit_order(&net, None)?;
    println!("\ncase demand {} MW", m.demand_mw);
    println!("  merit order: cost {:.2}/h, SMP {}", m.total_cost, m.smp);
    println!("  LP:          cost {:.2}/h, SMP {}", lp.objective, lp.lmp[0]);
    println!("\n{}", m.curve_csv());
    Ok(())
}
