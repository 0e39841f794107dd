//! Time QuickIM across a UN probability grid and report the spread of the
//! timings and the auxiliary memory.
//!
//! ```text
//! cargo run --release --example robustness -- [n] [avg_degree]
//! ```

use std::error::Error;

use quickim::eval::robustness_bench;
use quickim::graph::{generate, ModelKind};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(20_000), |s| s.parse())?;
    let d: f64 = args.next().map_or(Ok(5.0), |s| s.parse())?;
    let g = generate::power_law(n, d, 2.3, 5);
    println!("n = {}, m = {}", g.vertex_count(), g.edge_count());

    let report = robustness_bench(&g, ModelKind::Un, &[0.01, 0.05, 0.1, 0.2], 50, 3, 3)?;
    print!("{}", report.to_csv());
    println!(
        "time ratio {:.2}, memory ratio {:.2}",
        report.ratio.unwrap_or(f64::NAN),
        report.memory_ratio.unwrap_or(f64::NAN)
    );
    Ok(())
}
