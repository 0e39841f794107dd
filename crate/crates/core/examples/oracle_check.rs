//! Run the exact oracle battery on a tiny random graph and print each check.
//!
//! ```text
//! cargo run --example oracle_check -- [seed] [p]
//! ```

use std::error::Error;

use quickim::graph::generate;
use quickim::oracle::run_battery;

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(Ok(5), |s| s.parse())?;
    let p: f64 = args.next().map_or(Ok(0.3), |s| s.parse())?;
    let g = generate::erdos_renyi(6, 9, seed, p);
    let report = run_battery(&g, 3, 3)?;
    println!("n = {}, m = {}, L = {}, p_m = {}", report.n, report.m, report.max_walk_length, report.max_probability);
    for c in &report.checks {
        println!(
            "{:<30} {:<4} cases {:>5}  failures {:>4}  max error {:.2e}",
            c.name,
            if c.passed { "ok" } else { "FAIL" },
            c.cases,
            c.failures,
            c.max_error
        );
    }
    Ok(())
}
