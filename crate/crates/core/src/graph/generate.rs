//! Synthetic graphs for tests, examples and benchmarks.

use std::collections::HashSet;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{InfluenceGraph, ProbabilitySource, VertexId};

fn distinct_pairs<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    let max = n.saturating_mul(n.saturating_sub(1));
    let m = m.min(max);
    if m * 2 > max {
        let all: Vec<(VertexId, VertexId)> = (0..n as VertexId)
            .flat_map(|u| (0..n as VertexId).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        return all.choose_multiple(rng, m).copied().collect();
    }
    let mut seen = HashSet::with_capacity(m);
    let mut pairs = Vec::with_capacity(m);
    while pairs.len() < m {
        let u = rng.gen_range(0..n as VertexId);
        let v = rng.gen_range(0..n as VertexId);
        if u != v && seen.insert((u, v)) {
            pairs.push((u, v));
        }
    }
    pairs
}

/// `n` vertices and `m` distinct directed edges chosen uniformly, every edge
/// with probability `p`. Internal ids equal labels.
pub fn erdos_renyi(n: usize, m: usize, seed: u64, p: f64) -> InfluenceGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = distinct_pairs(n, m, &mut rng)
        .into_iter()
        .map(|(u, v)| (u, v, p))
        .collect();
    InfluenceGraph::from_dense_edges(n, &edges).expect("generated edges are valid")
}

/// Uniform random directed graph whose edge probabilities are drawn by `prob`.
pub fn random_graph<R: Rng>(
    n: usize,
    m: usize,
    rng: &mut R,
    mut prob: impl FnMut(&mut R) -> f64,
) -> InfluenceGraph {
    let pairs = distinct_pairs(n, m, rng);
    let edges: Vec<_> = pairs.into_iter().map(|(u, v)| (u, v, prob(rng))).collect();
    InfluenceGraph::from_dense_edges(n, &edges).expect("generated edges are valid")
}

/// Symmetric heavy-tailed graph in the style of co-authorship networks.
///
/// Endpoints are drawn with Chung-Lu weights `w_i ~ (i + 1)^(-1 / (exponent - 1))`
/// and every undirected pair is stored as two directed edges, so the result
/// has roughly `n * avg_degree` directed edges. Probabilities are left
/// unassigned (1.0).
pub fn power_law(n: usize, avg_degree: f64, exponent: f64, seed: u64) -> InfluenceGraph {
    assert!(exponent > 2.0, "exponent must exceed 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n)
        .map(|i| ((i + 1) as f64).powf(-1.0 / (exponent - 1.0)))
        .collect();
    let pick = WeightedIndex::new(&weights).expect("positive weights");
    let target = (n as f64 * avg_degree / 2.0) as usize;
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::with_capacity(target * 2);
    // Oversample to make up for self-loops and repeated pairs.
    let draws = target + target / 8;
    for _ in 0..draws {
        let a = pick.sample(&mut rng) as VertexId;
        let b = pick.sample(&mut rng) as VertexId;
        if a != b {
            pairs.push((a.min(b), a.max(b)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs.shuffle(&mut rng);
    pairs.truncate(target);
    // Relabel so that vertex ids are not correlated with weight.
    let mut perm: Vec<VertexId> = (0..n as VertexId).collect();
    perm.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(pairs.len() * 2);
    for (a, b) in pairs {
        let (a, b) = (perm[a as usize], perm[b as usize]);
        edges.push((a, b, 1.0));
        edges.push((b, a, 1.0));
    }
    let labels = (0..n as u64).collect();
    InfluenceGraph::from_parts(labels, edges, ProbabilitySource::Unassigned)
        .expect("generated edges are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erdos_renyi_has_requested_size() {
        let g = erdos_renyi(30, 100, 9, 0.5);
        assert_eq!((g.vertex_count(), g.edge_count()), (30, 100));
        // Dense request clips to the complete digraph.
        let g = erdos_renyi(4, 100, 9, 0.5);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn power_law_is_symmetric() {
        let g = power_law(2_000, 6.0, 2.5, 1);
        assert!(g.edge_count() > 10_000);
        for (u, v, _) in g.edges() {
            assert!(g.probability(v, u).is_some());
        }
        let max_deg = (0..2_000).map(|v| g.out_degree(v)).max().unwrap();
        assert!(max_deg > 60, "expected hubs, max degree {max_deg}");
    }
}
