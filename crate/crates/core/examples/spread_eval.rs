//! Monte-Carlo spread of QuickIM seeds next to CELF with a Monte-Carlo oracle
//! and a degree heuristic.
//!
//! ```text
//! cargo run --release --example spread_eval
//! ```

use std::error::Error;

use quickim::eval::mc_spread;
use quickim::graph::{assign_probabilities, generate, ProbabilityModel};
use quickim::select::{mc_greedy, quickim};

fn main() -> Result<(), Box<dyn Error>> {
    let g = assign_probabilities(&generate::power_law(2_000, 8.0, 2.5, 11), &ProbabilityModel::trivalency(0.1, 4))?;
    let k = 10;
    let sims = 10_000;

    let fast = quickim(&g, k, 3)?;
    let slow = mc_greedy(&g, k, 100, 9)?;
    let mut by_degree: Vec<u32> = (0..g.vertex_count() as u32).collect();
    by_degree.sort_by_key(|&v| std::cmp::Reverse(g.out_degree(v)));
    by_degree.truncate(k);

    for (name, seeds, secs) in [
        ("quickim", &fast.seed_ids, fast.wall_seconds),
        ("mc-greedy", &slow.seed_ids, slow.wall_seconds),
        ("out-degree", &by_degree, 0.0),
    ] {
        let est = mc_spread(&g, seeds, sims, 1)?;
        println!(
            "{name:<11} spread {:>8.2} ({:.2}%) +/- {:.2}  selected in {secs:.3}s",
            est.mean, est.percent, est.std_error
        );
    }
    Ok(())
}
