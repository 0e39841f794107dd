//! Incremental score maintenance after seed removal.
//!
//! Selecting `w` removes its out-edges from the residual graph. Writing
//! `A^j[u, w]` for the walk columns into `w`, the per-hop change is
//!
//! ```text
//! dF_i[u] = sum_{j=1}^{i-1} c_{i-j-1} A^j[u, w]
//! c_x     = -sum_{v in N_out(w)} P(w, v) (dF_x[v] + F_x[v])
//! ```
//!
//! with `F_0 = 1` and `dF_0 = dF_1 = 0`. Summing over hops gives
//! `F[u] += sum_{j=1}^{L-1} g_{L-j-1} A^j[u, w]` where `g` is the prefix sum
//! of `c`. [`BasicUpdater`] applies this to every affected vertex right away;
//! [`LazyState`] defers it until a vertex could still become the maximum.
//!
//! Seeds keep their in-edges, so walks that end at a seed keep counting; walks
//! through a seed vanish because its out-edges are gone.

mod basic;
mod lazy;

pub use basic::{BasicStep, BasicUpdater};
pub use lazy::{LazyDiagnostics, LazyIteration, LazyState, Violations};

use crate::graph::{InfluenceGraph, VertexId};

/// Roundoff allowance for the sign and monotonicity checks.
pub const INVARIANT_TOLERANCE: f64 = 1e-12;

/// `g_x = c_0 + ... + c_x`.
pub fn prefix_sums(c: &[f64]) -> Vec<f64> {
    c.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Relative gap below which two scores count as tied. Ties go to the
/// smaller id, so rounding differences between the eager and lazy updates
/// cannot reorder the seeds.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Smallest-id vertex with the largest score among the candidates, if any
/// has a positive score; otherwise the smallest-id candidate.
pub(crate) fn argmax_or_first(
    n: usize,
    mut candidate: impl FnMut(VertexId) -> Option<f64>,
) -> Option<(VertexId, f64, bool)> {
    let mut best: Option<(VertexId, f64)> = None;
    let mut first: Option<VertexId> = None;
    for u in 0..n as VertexId {
        if let Some(score) = candidate(u) {
            first.get_or_insert(u);
            let beats = match best {
                None => score > 0.0,
                Some((_, b)) => score > b + TIE_TOLERANCE * b.abs().max(1.0),
            };
            if beats {
                best = Some((u, score));
            }
        }
    }
    match best {
        Some((u, s)) => Some((u, s, false)),
        None => first.map(|u| (u, 0.0, true)),
    }
}

/// `c_x` for one seed given accessors for the current `F_x + dF_x` at
/// non-seed out-neighbors.
///
/// A seed out-neighbor `v` has no out-edges left, so `F_x[v] = 0` for
/// `x >= 1`, but `F_0[v] = 1` still holds and the edge `(w, v)` contributes to
/// `c_0`.
pub(crate) fn coefficient(
    graph: &InfluenceGraph,
    w: VertexId,
    x: usize,
    is_seed: &[bool],
    mut value: impl FnMut(VertexId) -> f64,
) -> f64 {
    let mut c = 0.0;
    for (v, p) in graph.out_edges(w) {
        if x == 0 {
            c -= p;
        } else if !is_seed[v as usize] {
            c -= p * value(v);
        }
    }
    c
}
