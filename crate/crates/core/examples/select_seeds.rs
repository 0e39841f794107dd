//! Pick seeds with QuickIM and compare against the eager walk-score greedy.
//!
//! ```text
//! cargo run --release --example select_seeds -- [edges.txt] [k] [L]
//! ```

use std::error::Error;

use quickim::graph::{assign_probabilities, generate, read_graph, GraphFormat, ProbabilityModel};
use quickim::select::{basic_greedy, quickim};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let graph = match args.next() {
        Some(path) => read_graph(path.as_ref(), GraphFormat::Auto)?,
        None => generate::power_law(20_000, 8.0, 2.2, 1),
    };
    let k: usize = args.next().map_or(Ok(20), |s| s.parse())?;
    let l: usize = args.next().map_or(Ok(3), |s| s.parse())?;
    let graph = assign_probabilities(&graph, &ProbabilityModel::wc())?;

    let lazy = quickim(&graph, k, l)?;
    println!(
        "quickim: {} seeds in {:.3}s (init {:.3}s), peak aux {} bytes",
        lazy.seeds.len(),
        lazy.wall_seconds,
        lazy.init_seconds,
        lazy.peak_aux_bytes
    );
    for it in lazy.per_iteration.iter().take(10) {
        println!(
            "  #{:<3} label {:<8} score {:>10.4}  touched {:>6}  skipped {:>6}",
            it.iteration, it.label, it.score, it.touched, it.skipped
        );
    }

    let eager = basic_greedy(&graph, k, l)?;
    println!("basic:   {} seeds in {:.3}s", eager.seeds.len(), eager.wall_seconds);
    println!("same seeds: {}", lazy.seeds == eager.seeds);
    Ok(())
}
