//! Load an edge list, attach WC, TR and UN probabilities, and write the
//! results as text and as a binary cache.
//!
//! ```text
//! cargo run --example assign_probabilities -- [edges.txt]
//! ```

use std::error::Error;

use quickim::graph::{
    assign_probabilities, generate, read_binary, read_graph, write_binary, write_edge_list,
    GraphFormat, ProbabilityModel,
};

fn main() -> Result<(), Box<dyn Error>> {
    let graph = match std::env::args().nth(1) {
        Some(path) => read_graph(path.as_ref(), GraphFormat::Auto)?,
        None => generate::power_law(2_000, 6.0, 2.3, 7),
    };
    println!("{:?}", graph.summary());

    let models = [
        ProbabilityModel::wc(),
        ProbabilityModel::trivalency(0.1, 42),
        ProbabilityModel::uniform(0.05),
    ];
    for model in &models {
        let g = assign_probabilities(&graph, model)?;
        let mean = g.edges().map(|(_, _, p)| p).sum::<f64>() / g.edge_count().max(1) as f64;
        println!("{model}: mean p = {mean:.5}, max p = {:.5}", g.max_probability());
    }

    let tr = assign_probabilities(&graph, &models[1])?;
    let mut buf = Vec::new();
    write_edge_list(&tr, &mut buf)?;

    let mut bin = Vec::new();
    write_binary(&tr, &mut bin)?;
    let back = read_binary(&bin)?;
    assert_eq!(back.edge_count(), tr.edge_count());
    println!("text {} bytes, binary {} bytes", buf.len(), bin.len());

    // Same seed, same draw.
    let again = assign_probabilities(&graph, &models[1])?;
    assert!(again.edges().eq(tr.edges()));
    Ok(())
}
