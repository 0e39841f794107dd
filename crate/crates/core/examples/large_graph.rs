//! QuickIM on a synthetic power-law graph the size of a large co-authorship
//! network, with peak auxiliary memory against the CSR footprint.
//!
//! ```text
//! cargo run --release --example large_graph -- [n] [avg_degree] [k]
//! ```

use std::error::Error;
use std::time::Instant;

use quickim::graph::{assign_probabilities, generate, ProbabilityModel};
use quickim::select::quickim;

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(654_628), |s| s.parse())?;
    let d: f64 = args.next().map_or(Ok(6.08), |s| s.parse())?;
    let k: usize = args.next().map_or(Ok(50), |s| s.parse())?;

    let start = Instant::now();
    let g = assign_probabilities(&generate::power_law(n, d, 2.3, 17), &ProbabilityModel::wc())?;
    println!(
        "generated n = {}, m = {} in {:.1}s",
        g.vertex_count(),
        g.edge_count(),
        start.elapsed().as_secs_f64()
    );

    let sel = quickim(&g, k, 3)?;
    println!(
        "k = {k}: {:.2}s (scores {:.2}s), peak aux {:.1} MiB, CSR {:.1} MiB",
        sel.wall_seconds,
        sel.init_seconds,
        sel.peak_aux_bytes as f64 / (1 << 20) as f64,
        g.csr_bytes() as f64 / (1 << 20) as f64
    );
    println!("first seeds: {:?}", &sel.seeds[..sel.seeds.len().min(10)]);
    Ok(())
}
