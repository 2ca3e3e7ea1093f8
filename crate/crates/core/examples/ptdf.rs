//! PTDF matrix of a 5-bus ring and the sensitivity of each line to a
//! transfer between two buses, which does not depend on the slack.
//!
//! cargo run --example ptdf

use gridopt::matrices::{build_ptdf, ptdf_flows, ptdf_pair, SlackChoice};
use gridopt::{parse_case, BusId};

fn main() -> gridopt::Result<()> {
    let net = parse_case(include_str!("../fixtures/5bus_ring.json"))?.to_per_unit()?;
    let p = build_ptdf(&net, SlackChoice::from_case(&net)?)?;
    println!("PTDF, slack bus {}\n{}", p.slack.bus, p.matrix.to_csv());

    let (m, n) = (BusId(3), BusId(5));
    let other = build_ptdf(&net, SlackChoice::new(&net, BusId(4))?)?;
    println!("transfer {m} -> {n}:");
    for (l, key) in net.line_keys().iter().enumerate() {
        println!(
            "  {key:<6} {:+.4}  (slack 4: {:+.4})",
            ptdf_pair(&p, l, m, n)?,
            ptdf_pair(&other, l, m, n)?
        );
    }

    // 1 p.u. from bus 3 to bus 5.
    let mut inj = vec![0.0; net.n_buses()];
    inj[2] = 1.0;
    inj[4] = -1.0;
    println!("flows: {:?}", ptdf_flows(&p, &inj)?);
    Ok(())
}
