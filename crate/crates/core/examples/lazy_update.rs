//! Step the lazy updater by hand and watch timestamps, skips and the
//! auxiliary memory.
//!
//! ```text
//! cargo run --release --example lazy_update
//! ```

use std::error::Error;

use quickim::graph::{assign_probabilities, generate, ProbabilityModel};
use quickim::update::{BasicUpdater, LazyState};

fn main() -> Result<(), Box<dyn Error>> {
    let g = assign_probabilities(&generate::power_law(5_000, 6.0, 2.3, 3), &ProbabilityModel::wc())?;
    let l = 3;
    let mut lazy = LazyState::new(&g, l)?;
    let mut basic = BasicUpdater::new(&g, l)?;

    for _ in 0..10 {
        let (Some(z), Some(b)) = (lazy.apply_lazy_update(&g), basic.step(&g)) else {
            break;
        };
        println!(
            "t = {:<2} seed {:<5} F = {:>8.4}  updated {:>5}  skipped {:>5}  early stops {:>4}  basic agrees: {}",
            z.iteration,
            z.seed,
            z.score,
            z.updated,
            z.skipped,
            z.early_stops,
            z.seed == b.seed
        );
        println!("       c = {:?}", lazy.coeffs_c(z.iteration));
    }

    let d = lazy.diagnostics();
    println!("timestamps: {:?}", d.timestamp_histogram);
    println!("aux bytes {} (peak {}), invariant violations {}", d.aux_bytes, d.peak_aux_bytes, d.violations.total());

    // Bringing every score up to date reproduces the eager updater.
    let mut forced = lazy.clone();
    forced.force_update_all();
    let worst = (0..g.vertex_count() as u32)
        .filter(|&v| !forced.is_seed(v))
        .map(|v| (forced.current_score(v) - basic.scores().total()[v as usize]).abs())
        .fold(0.0, f64::max);
    println!("max |lazy - basic| after forcing: {worst:.2e}");
    Ok(())
}
