//! Builds the DC and AC network matrices of the 3-bus case.
//!
//! cargo run --example system_matrices

use gridopt::matrices::{build_b_bus, build_b_line, build_x_bus, build_y_bus, SlackChoice};
use gridopt::parse_case;

fn main() -> gridopt::Result<()> {
    let net = parse_case(include_str!("../fixtures/3bus.json"))?.to_per_unit()?;
    let slack = SlackChoice::from_case(&net)?;

    let b_bus = build_b_bus(&net);
    println!("B_bus\n{}", b_bus.to_csv());
    println!("B_line\n{}", build_b_line(&net).to_csv());
    println!("X_bus (slack {})\n{}", slack.bus, build_x_bus(&b_bus, slack)?.to_csv());

    let y = build_y_bus(&net);
    println!("Y_bus");
    for i in 0..y.rows() {
        let row: Vec<String> = y.row(i).iter().map(|z| format!("{:+.3}{:+.3}j", z.re, z.im)).collect();
        println!("  {}", row.join("  "));
    }
    Ok(())
}
