//! Monte-Carlo spread estimation and the robustness harness.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{assign_probabilities, InfluenceGraph, ModelKind, ProbabilityModel, VertexId};
use crate::select::quickim;

/// Default simulation count for spread estimates.
pub const DEFAULT_SIMULATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadEstimate {
    /// Mean number of active vertices.
    pub mean: f64,
    /// `mean` as a percentage of `n`.
    pub percent: f64,
    pub simulations: usize,
    /// Sample standard deviation over the square root of `simulations`.
    pub std_error: f64,
    pub rng_seed: u64,
}

/// Coin for edge `e` in one simulation. The generator is positioned by edge
/// index, so an edge's outcome does not depend on the order of attempts.
#[inline]
fn edge_fires(rng: &mut ChaCha8Rng, e: usize, p: f64) -> bool {
    rng.set_word_pos(e as u128 * 2);
    rng.gen::<f64>() < p
}

/// One independent-cascade run; returns the number of active vertices.
fn cascade(
    graph: &InfluenceGraph,
    seeds: &[VertexId],
    rng: &mut ChaCha8Rng,
    active: &mut [bool],
    frontier: &mut Vec<VertexId>,
) -> u64 {
    let out = graph.out_adjacency();
    frontier.clear();
    for &s in seeds {
        if !active[s as usize] {
            active[s as usize] = true;
            frontier.push(s);
        }
    }
    let mut touched = frontier.len();
    let mut head = 0;
    while head < frontier.len() {
        let u = frontier[head];
        head += 1;
        let range = out.range(u);
        for ((e, &v), &p) in range.zip(out.neighbors(u)).zip(out.probs(u)) {
            if !active[v as usize] && edge_fires(rng, e, p) {
                active[v as usize] = true;
                frontier.push(v);
                touched += 1;
            }
        }
    }
    for &v in frontier.iter() {
        active[v as usize] = false;
    }
    touched as u64
}

/// Mean spread of `seeds` over `simulations` cascades.
///
/// Simulation `i` draws from its own stream `(rng_seed, i)`, and the counts
/// are integers, so the result does not depend on the thread count.
pub fn mc_spread(
    graph: &InfluenceGraph,
    seeds: &[VertexId],
    simulations: usize,
    rng_seed: u64,
) -> Result<SpreadEstimate> {
    if seeds.is_empty() {
        return Err(Error::invalid("seed set is empty"));
    }
    if simulations == 0 {
        return Err(Error::invalid("simulations must be at least 1"));
    }
    let n = graph.vertex_count();
    if let Some(&bad) = seeds.iter().find(|&&s| s as usize >= n) {
        return Err(Error::domain(format!("seed {bad} is not a vertex")));
    }
    let (sum, sum_sq) = (0..simulations)
        .into_par_iter()
        .with_min_len(64)
        .map_init(
            || {
                (
                    ChaCha8Rng::seed_from_u64(rng_seed),
                    vec![false; n],
                    Vec::new(),
                )
            },
            |(rng, active, frontier), sim| {
                rng.set_stream(sim as u64);
                let c = cascade(graph, seeds, rng, active, frontier);
                (c, c * c)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let s = simulations as f64;
    let mean = sum as f64 / s;
    let var = if simulations > 1 {
        ((sum_sq as f64 - s * mean * mean) / (s - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SpreadEstimate {
        mean,
        percent: if n == 0 { 0.0 } else { 100.0 * mean / n as f64 },
        simulations,
        std_error: (var / s).sqrt(),
        rng_seed,
    })
}

/// Resolves external labels to internal ids.
pub fn resolve_labels(graph: &InfluenceGraph, labels: &[u64]) -> Result<Vec<VertexId>> {
    labels
        .iter()
        .map(|&l| {
            graph
                .id_of(l)
                .ok_or_else(|| Error::domain(format!("unknown seed label {l}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub p: f64,
    /// Median QuickIM wall time over the repeats.
    pub seconds: f64,
    pub aux_bytes: usize,
    pub repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub model: ModelKind,
    pub k: usize,
    pub max_walk_length: usize,
    pub grid: Vec<BenchRow>,
    /// Max over min of the median times.
    pub ratio: Option<f64>,
    /// Max over min of the auxiliary memory.
    pub memory_ratio: Option<f64>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,seconds,aux_bytes,repeats\n");
        for r in &self.grid {
            let _ = writeln!(s, "{},{},{},{}", r.p, r.seconds, r.aux_bytes, r.repeats);
        }
        s
    }
}

fn spread_ratio(values: impl Iterator<Item = f64> + Clone) -> Option<f64> {
    let max = values.clone().fold(f64::NAN, f64::max);
    let min = values.fold(f64::NAN, f64::min);
    (!max.is_nan()).then(|| max / min)
}

/// Times QuickIM for every probability in the grid under the TR or UN model.
pub fn robustness_bench(
    graph: &InfluenceGraph,
    kind: ModelKind,
    grid: &[f64],
    k: usize,
    max_walk_length: usize,
    repeats: usize,
) -> Result<BenchReport> {
    if kind == ModelKind::Wc {
        return Err(Error::invalid("the robustness grid needs the tr or un model"));
    }
    if repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &p in grid {
        let model = match kind {
            ModelKind::Tr => ProbabilityModel::trivalency(p, 0),
            _ => ProbabilityModel::uniform(p),
        };
        let g = assign_probabilities(graph, &model)?;
        let mut times = Vec::with_capacity(repeats);
        let mut aux = 0;
        for _ in 0..repeats {
            let start = Instant::now();
            let sel = quickim(&g, k, max_walk_length)?;
            times.push(start.elapsed().as_secs_f64());
            aux = aux.max(sel.peak_aux_bytes);
        }
        times.sort_by(f64::total_cmp);
        rows.push(BenchRow {
            p,
            seconds: times[times.len() / 2],
            aux_bytes: aux,
            repeats,
        });
    }
    Ok(BenchReport {
        model: kind,
        k,
        max_walk_length,
        ratio: spread_ratio(rows.iter().map(|r| r.seconds)),
        memory_ratio: spread_ratio(rows.iter().map(|r| r.aux_bytes as f64)),
        grid: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;

    #[test]
    fn all_seeds_spread_is_n() {
        let g = generate::erdos_renyi(20, 60, 1, 0.5);
        let all: Vec<VertexId> = (0..20).collect();
        let est = mc_spread(&g, &all, 100, 3).unwrap();
        assert_eq!(est.mean, 20.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.percent, 100.0);
    }

    #[test]
    fn single_edge_mean() {
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.3)]).unwrap();
        let est = mc_spread(&g, &[0], 10_000, 11).unwrap();
        assert!((1.28..=1.32).contains(&est.mean), "{}", est.mean);
    }

    #[test]
    fn independent_of_thread_count() {
        let g = generate::erdos_renyi(200, 1000, 2, 0.2);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_spread(&g, &[0, 5, 9], 2_000, 7).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn rejects_bad_input() {
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.3)]).unwrap();
        assert!(matches!(mc_spread(&g, &[], 10, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(mc_spread(&g, &[7], 10, 1), Err(Error::Domain(_))));
        assert!(matches!(resolve_labels(&g, &[42]), Err(Error::Domain(_))));
    }

    #[test]
    fn bench_shapes() {
        let g = generate::erdos_renyi(300, 1500, 3, 1.0);
        let r = robustness_bench(&g, ModelKind::Un, &[0.01, 0.05, 0.1, 0.2], 5, 3, 1).unwrap();
        assert_eq!(r.grid.len(), 4);
        assert!(r.ratio.unwrap() >= 1.0);
        assert_eq!(r.to_csv().lines().count(), 5);
        let empty = robustness_bench(&g, ModelKind::Tr, &[], 5, 3, 1).unwrap();
        assert!(empty.grid.is_empty() && empty.ratio.is_none());
    }
}
