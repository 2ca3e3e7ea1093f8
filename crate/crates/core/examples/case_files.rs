//! Reading, checking and converting case files.
//!
//! cargo run --example case_files

use gridopt::netmodel::{to_case_json, validate_network};
use gridopt::parse_case;

fn main() -> gridopt::Result<()> {
    let net = parse_case(include_str!("../fixtures/5bus_ring.json"))?;
    println!("{} buses, {} lines, slack {:?}", net.n_buses(), net.n_lines(), net.slack());
    println!("demand {} MW, capacity {} MW", net.total_demand(), net.total_capacity());

    let pu = net.clone().to_per_unit()?;
    println!("p_max in p.u.: {:?}", pu.generators.iter().map(|g| g.p_max).collect::<Vec<_>>());
    assert_eq!(pu.from_per_unit()?, net);

    let mut islanded = net.clone();
    islanded.lines.retain(|l| l.to.0 != 4 && l.from.0 != 4);
    for d in validate_network(&islanded) {
        println!("{:?}: {}", d.severity, d.message);
    }

    match parse_case(include_str!("../fixtures/bad.json")) {
        Err(e) => println!("bad.json: {e}"),
        Ok(_) => unreachable!(),
    }
    print!("{}", &to_case_json(&net)?[..120]);
    println!("...");
    Ok(())
}
