//! Initial walk scores and the per-seed walk columns used by the updates.
//!
//! ```text
//! cargo run --example walk_scores
//! ```

use std::error::Error;

use quickim::graph::InfluenceGraph;
use quickim::score::{score_est, walk_pro};

fn main() -> Result<(), Box<dyn Error>> {
    // 0 -> 1 -> 2 -> 3, plus 0 -> 2 and a back edge 3 -> 0.
    let g = InfluenceGraph::from_dense_edges(
        4,
        &[(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5), (0, 2, 0.2), (3, 0, 0.1)],
    )?;
    let l = 3;
    let scores = score_est(&g, l)?;
    for u in 0..g.vertex_count() {
        let hops: Vec<String> = (1..=l).map(|j| format!("{:.4}", scores.hop(j)[u])).collect();
        println!("F({u}) = {:.4}  per hop [{}]", scores.total()[u], hops.join(", "));
    }

    // Walks ending in 2, by length, from every vertex that reaches it.
    let excluded = vec![false; g.vertex_count()];
    let cols = walk_pro(&g, l, 2, &excluded);
    for j in 1..=cols.depth() {
        let level: Vec<String> = cols.level(j).map(|(u, x)| format!("{u}:{x:.4}")).collect();
        println!("A^{j}[., 2] = {{{}}}", level.join(", "));
    }
    Ok(())
}
