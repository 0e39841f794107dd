//! Greedy seed selection drivers.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::mc_spread;
use crate::graph::{InfluenceGraph, VertexId};
use crate::oracle;
use crate::update::{BasicUpdater, LazyDiagnostics, LazyState};

/// Default maximum walk length.
pub const DEFAULT_WALK_LENGTH: usize = 3;
/// Default number of seeds.
pub const DEFAULT_K: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Walk scores with lazy incremental updates.
    Quickim,
    /// Walk scores with a full update after every selection.
    BasicGreedy,
    /// CELF over Monte-Carlo spread estimates.
    McGreedy,
    /// CELF over exact spreads (tiny graphs only).
    ExactGreedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionConfig {
    pub algorithm: Algorithm,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_walk_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    /// Internal id of the seed.
    pub vertex: VertexId,
    /// External label of the seed.
    pub label: u64,
    /// Score (or marginal gain) at selection.
    pub score: f64,
    /// Vertices whose score was recomputed.
    pub touched: usize,
    /// Vertices skipped by the lazy rule.
    pub skipped: usize,
    pub seconds: f64,
}

/// Seeds in selection order with per-iteration statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSelection {
    /// External labels.
    pub seeds: Vec<u64>,
    /// Internal ids, same order.
    pub seed_ids: Vec<VertexId>,
    pub config: SelectionConfig,
    pub per_iteration: Vec<IterationStats>,
    /// Set when `k` exceeded the vertex count.
    pub truncated: bool,
    /// Time to compute the initial scores.
    pub init_seconds: f64,
    pub wall_seconds: f64,
    /// Peak bytes of auxiliary structures, excluding the graph.
    pub peak_aux_bytes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<LazyDiagnostics>,
}

fn check_args(graph: &InfluenceGraph, k: usize, max_walk_length: Option<usize>) -> Result<usize> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if max_walk_length == Some(0) {
        return Err(Error::invalid("maximum walk length L must be at least 1"));
    }
    if graph.is_empty() {
        return Err(Error::invalid("graph has no vertices"));
    }
    Ok(k.min(graph.vertex_count()))
}

fn stats(
    graph: &InfluenceGraph,
    iteration: usize,
    vertex: VertexId,
    score: f64,
    touched: usize,
    skipped: usize,
    start: Instant,
) -> IterationStats {
    IterationStats {
        iteration,
        vertex,
        label: graph.label(vertex),
        score,
        touched,
        skipped,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// QuickIM: `k` iterations of lazy walk-score greedy selection.
pub fn quickim(graph: &InfluenceGraph, k: usize, max_walk_length: usize) -> Result<SeedSelection> {
    quickim_with_state(graph, k, max_walk_length).map(|(sel, _)| sel)
}

/// [`quickim`] that also returns the final lazy state.
pub fn quickim_with_state(
    graph: &InfluenceGraph,
    k: usize,
    max_walk_length: usize,
) -> Result<(SeedSelection, LazyState)> {
    let target = check_args(graph, k, Some(max_walk_length))?;
    let wall = Instant::now();
    let mut state = LazyState::new(graph, max_walk_length)?;
    let init_seconds = wall.elapsed().as_secs_f64();
    let mut per_iteration = Vec::with_capacity(target);
    for _ in 0..target {
        let start = Instant::now();
        let it = state
            .apply_lazy_update(graph)
            .expect("fewer seeds than vertices");
        per_iteration.push(stats(
            graph,
            it.iteration,
            it.seed,
            it.score,
            it.updated,
            it.skipped,
            start,
        ));
    }
    let seed_ids = state.seeds().to_vec();
    let selection = SeedSelection {
        seeds: seed_ids.iter().map(|&v| graph.label(v)).collect(),
        seed_ids,
        config: SelectionConfig {
            algorithm: Algorithm::Quickim,
            k,
            max_walk_length: Some(max_walk_length),
            simulations: None,
            rng_seed: None,
        },
        per_iteration,
        truncated: k > graph.vertex_count(),
        init_seconds,
        wall_seconds: wall.elapsed().as_secs_f64(),
        peak_aux_bytes: state.peak_aux_bytes(),
        diagnostics: None,
    };
    Ok((selection, state))
}

/// Walk-score greedy with a full update after every selection.
pub fn basic_greedy(graph: &InfluenceGraph, k: usize, max_walk_length: usize) -> Result<SeedSelection> {
    let target = check_args(graph, k, Some(max_walk_length))?;
    let wall = Instant::now();
    let mut up = BasicUpdater::new(graph, max_walk_length)?;
    let init_seconds = wall.elapsed().as_secs_f64();
    let mut per_iteration = Vec::with_capacity(target);
    for t in 1..=target {
        let start = Instant::now();
        let step = up.step(graph).expect("fewer seeds than vertices");
        per_iteration.push(stats(graph, t, step.seed, step.score, step.touched, 0, start));
    }
    let seed_ids = up.seeds().to_vec();
    Ok(SeedSelection {
        seeds: seed_ids.iter().map(|&v| graph.label(v)).collect(),
        seed_ids,
        config: SelectionConfig {
            algorithm: Algorithm::BasicGreedy,
            k,
            max_walk_length: Some(max_walk_length),
            simulations: None,
            rng_seed: None,
        },
        per_iteration,
        truncated: k > graph.vertex_count(),
        init_seconds,
        wall_seconds: wall.elapsed().as_secs_f64(),
        peak_aux_bytes: up.scores().heap_bytes(),
        diagnostics: None,
    })
}

/// Expected spread of a seed set, however obtained.
pub trait SpreadEstimator {
    fn spread(&self, seeds: &[VertexId]) -> Result<f64>;
}

/// Monte-Carlo estimates. Every simulation fixes one coin per edge, so all
/// seed sets are evaluated on the same sampled worlds and the estimate is
/// itself monotone and submodular.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloEstimator<'a> {
    pub graph: &'a InfluenceGraph,
    pub simulations: usize,
    pub rng_seed: u64,
}

impl SpreadEstimator for MonteCarloEstimator<'_> {
    fn spread(&self, seeds: &[VertexId]) -> Result<f64> {
        Ok(mc_spread(self.graph, seeds, self.simulations, self.rng_seed)?.mean)
    }
}

/// Exact spreads by base-world enumeration.
#[derive(Debug, Clone, Copy)]
pub struct ExactEstimator<'a> {
    pub graph: &'a InfluenceGraph,
}

impl SpreadEstimator for ExactEstimator<'_> {
    fn spread(&self, seeds: &[VertexId]) -> Result<f64> {
        oracle::exact_seed_influence(self.graph, seeds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    gain: f64,
    vertex: VertexId,
    round: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One CELF selection: the seed, its marginal gain and the number of spread
/// evaluations it took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CelfStep {
    pub vertex: VertexId,
    pub gain: f64,
    pub evaluations: usize,
    pub seconds: f64,
}

/// Lazy-forward greedy. Ties in gain go to the smallest vertex id.
pub fn celf<E: SpreadEstimator>(graph: &InfluenceGraph, k: usize, estimator: &E) -> Result<Vec<CelfStep>> {
    let target = check_args(graph, k, None)?;
    let mut start = Instant::now();
    let mut heap = BinaryHeap::with_capacity(graph.vertex_count());
    let mut evaluations = 0;
    for v in 0..graph.vertex_count() as VertexId {
        heap.push(Candidate {
            gain: estimator.spread(&[v])?,
            vertex: v,
            round: 0,
        });
        evaluations += 1;
    }
    let mut seeds: Vec<VertexId> = Vec::with_capacity(target);
    let mut steps = Vec::with_capacity(target);
    let mut current = 0.0;
    while seeds.len() < target {
        let top = heap.pop().expect("candidates remain");
        if top.round == seeds.len() {
            seeds.push(top.vertex);
            current += top.gain;
            steps.push(CelfStep {
                vertex: top.vertex,
                gain: top.gain,
                evaluations,
                seconds: start.elapsed().as_secs_f64(),
            });
            evaluations = 0;
            start = Instant::now();
        } else {
            seeds.push(top.vertex);
            let spread = estimator.spread(&seeds)?;
            seeds.pop();
            evaluations += 1;
            heap.push(Candidate {
                gain: spread - current,
                vertex: top.vertex,
                round: seeds.len(),
            });
        }
    }
    Ok(steps)
}

fn celf_selection(
    graph: &InfluenceGraph,
    k: usize,
    steps: Vec<CelfStep>,
    config: SelectionConfig,
    wall: Instant,
) -> SeedSelection {
    let seed_ids: Vec<VertexId> = steps.iter().map(|s| s.vertex).collect();
    SeedSelection {
        seeds: seed_ids.iter().map(|&v| graph.label(v)).collect(),
        seed_ids,
        per_iteration: steps
            .iter()
            .enumerate()
            .map(|(i, s)| IterationStats {
                iteration: i + 1,
                vertex: s.vertex,
                label: graph.label(s.vertex),
                score: s.gain,
                touched: s.evaluations,
                skipped: 0,
                seconds: s.seconds,
            })
            .collect(),
        config,
        truncated: k > graph.vertex_count(),
        init_seconds: 0.0,
        wall_seconds: wall.elapsed().as_secs_f64(),
        peak_aux_bytes: graph.vertex_count() * std::mem::size_of::<Candidate>(),
        diagnostics: None,
    }
}

/// CELF greedy over Monte-Carlo spread estimates.
pub fn mc_greedy(
    graph: &InfluenceGraph,
    k: usize,
    simulations: usize,
    rng_seed: u64,
) -> Result<SeedSelection> {
    if simulations == 0 {
        return Err(Error::invalid("simulations must be at least 1"));
    }
    let wall = Instant::now();
    let est = MonteCarloEstimator {
        graph,
        simulations,
        rng_seed,
    };
    let steps = celf(graph, k, &est)?;
    Ok(celf_selection(
        graph,
        k,
        steps,
        SelectionConfig {
            algorithm: Algorithm::McGreedy,
            k,
            max_walk_length: None,
            simulations: Some(simulations),
            rng_seed: Some(rng_seed),
        },
        wall,
    ))
}

/// CELF greedy over exact spreads.
pub fn exact_greedy(graph: &InfluenceGraph, k: usize) -> Result<SeedSelection> {
    let wall = Instant::now();
    let steps = celf(graph, k, &ExactEstimator { graph })?;
    Ok(celf_selection(
        graph,
        k,
        steps,
        SelectionConfig {
            algorithm: Algorithm::ExactGreedy,
            k,
            max_walk_length: None,
            simulations: None,
            rng_seed: None,
        },
        wall,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;

    #[test]
    fn star_center_wins() {
        let edges: Vec<_> = (1..=5).map(|v| (0, v, 0.5)).collect();
        let g = InfluenceGraph::from_dense_edges(6, &edges).unwrap();
        assert_eq!(quickim(&g, 1, 3).unwrap().seed_ids, vec![0]);
    }

    #[test]
    fn chain_picks_a_then_b() {
        let g = InfluenceGraph::from_dense_edges(3, &[(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let sel = quickim(&g, 2, 2).unwrap();
        assert_eq!(sel.seed_ids, vec![0, 1]);
        assert_eq!(sel.per_iteration[0].score, 0.75);
        assert!(!sel.truncated);
    }

    #[test]
    fn oversized_k_truncates() {
        let g = InfluenceGraph::from_dense_edges(3, &[(0, 1, 0.5)]).unwrap();
        let sel = quickim(&g, 10, 3).unwrap();
        assert!(sel.truncated);
        assert_eq!(sel.seed_ids, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.5)]).unwrap();
        assert!(matches!(quickim(&g, 0, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(quickim(&g, 1, 0), Err(Error::InvalidArgument(_))));
        let empty = InfluenceGraph::from_dense_edges(0, &[]).unwrap();
        assert!(quickim(&empty, 1, 3).is_err());
        assert!(matches!(mc_greedy(&g, 1, 0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn lazy_matches_basic_on_random_graphs() {
        for seed in 0..20 {
            let g = generate::erdos_renyi(40, 160, seed, 0.3);
            let a = quickim(&g, 10, 3).unwrap();
            let b = basic_greedy(&g, 10, 3).unwrap();
            assert_eq!(a.seed_ids, b.seed_ids, "graph seed {seed}");
        }
    }

    #[test]
    fn prefix_consistency() {
        let g = generate::erdos_renyi(60, 300, 4, 0.2);
        let long = quickim(&g, 12, 3).unwrap();
        for k in 1..12 {
            assert_eq!(quickim(&g, k, 3).unwrap().seed_ids[..], long.seed_ids[..k]);
        }
    }

    #[test]
    fn mc_greedy_single_edge() {
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.3)]).unwrap();
        let sel = mc_greedy(&g, 1, 10_000, 5).unwrap();
        assert_eq!(sel.seed_ids, vec![0]);
        let all = mc_greedy(&g, 2, 1_000, 5).unwrap();
        let mut ids = all.seed_ids.clone();
        ids.sort();
        assert_eq!(ids, vec![0, 1]);
    }

    #[test]
    fn exact_greedy_gains_do_not_increase() {
        let g = generate::erdos_renyi(7, 12, 8, 0.4);
        let sel = exact_greedy(&g, 7).unwrap();
        for w in sel.per_iteration.windows(2) {
            assert!(w[1].score <= w[0].score + 1e-12);
        }
    }
}
