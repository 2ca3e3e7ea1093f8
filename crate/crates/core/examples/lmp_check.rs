//! Checks every price of a congested 5-bus dispatch against the cost change
//! of serving a little more demand at that bus.
//!
//! cargo run --example lmp_check

use gridopt::dcopf::{solve_dcopf_angle, verify_lmp_fd};
use gridopt::parse_case;

fn main() -> gridopt::Result<()> {
    let net = parse_case(include_str!("../fixtures/5bus_ring.json"))?;
    let r = solve_dcopf_angle(&net)?;
    println!("cost {:.3}/h, binding lines {:?}", r.objective, r.binding_lines());
    for c in verify_lmp_fd(&net, &r, 1e-5)? {
        println!(
            "bus {}: LMP {:>8.4}  finite difference {:>8.4}  {}",
            c.bus,
            c.lmp,
            c.fd.unwrap_or(f64::NAN),
            if c.pass { "ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}
