//! Exponential-time exact references for tiny graphs.
//!
//! Two probability spaces are modelled. Base possible worlds keep or drop
//! every edge independently and give the true cascade influence. The
//! multi-graph `G^L` gives each edge a multiplicity `alpha` in `0..=L`, and a
//! walk is embedded in a world when every edge it uses is present at least as
//! many times as the walk traverses it; this is where walk probabilities live.
//!
//! Every routine enforces a size guard and fails with [`Error::Capacity`]
//! instead of running for hours.

mod battery;
mod influence;

pub use battery::{run_battery, BatteryReport, CheckResult};
pub use influence::{
    exact_influence_report, exact_pair_influence, exact_pair_influence_via, exact_seed_influence,
    exact_spreads, removal_gap, walk_count_distribution, walk_score, ExactInfluenceReport,
    InfluenceRoute, RemovalGapReport, RemovalGapRow, PairReport, VertexReport, WalkScore,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, VertexId};

/// Largest edge count for base-world enumeration (`2^m` worlds).
pub const MAX_BASE_EDGES: usize = 20;
/// Largest number of multi-worlds enumerated in one call.
pub const MAX_MULTI_WORLDS: u64 = 1 << 24;
/// Largest walk set handled by inclusion-exclusion (`2^h` subsets).
pub const MAX_WALK_SET: usize = 20;
/// Largest number of walks enumerated from one vertex.
pub const MAX_ENUMERATED_WALKS: usize = 1 << 20;
/// Absolute tolerance for oracle comparisons.
pub const TOLERANCE: f64 = 1e-10;

/// A walk `(v_0, ..., v_t)` with `t >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Walk {
    vertices: Vec<VertexId>,
}

impl Walk {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid("a walk needs at least one edge"));
        }
        Ok(Walk { vertices })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Number of edges traversed.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Traversal count `alpha_W(e)` of every edge the walk uses, keyed by edge
    /// index and sorted.
    pub fn multiplicities(&self, graph: &InfluenceGraph) -> Result<Vec<(usize, u32)>> {
        let mut idx = Vec::with_capacity(self.len());
        for pair in self.vertices.windows(2) {
            let e = graph.edge_index(pair[0], pair[1]).ok_or_else(|| {
                Error::domain(format!("walk uses non-edge ({}, {})", pair[0], pair[1]))
            })?;
            idx.push(e);
        }
        idx.sort_unstable();
        let mut out: Vec<(usize, u32)> = Vec::new();
        for e in idx {
            match out.last_mut() {
                Some((last, c)) if *last == e => *c += 1,
                _ => out.push((e, 1)),
            }
        }
        Ok(out)
    }
}

/// A possible world of `G^L`: one multiplicity per base edge, indexed like
/// [`InfluenceGraph::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiWorld {
    multiplicity: Vec<u32>,
}

impl MultiWorld {
    pub fn new(multiplicity: Vec<u32>) -> Self {
        MultiWorld { multiplicity }
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicity
    }

    pub fn multiplicity(&self, e: usize) -> u32 {
        self.multiplicity[e]
    }

    /// True when every edge of the walk profile is present often enough.
    pub fn embeds(&self, profile: &[(usize, u32)]) -> bool {
        profile.iter().all(|&(e, a)| self.multiplicity[e] >= a)
    }
}

fn edge_probs(graph: &InfluenceGraph) -> Vec<f64> {
    graph.out_adjacency().all_probs().to_vec()
}

/// `Pr(W) = prod P(e)^alpha_W(e)`.
pub fn walk_probability(graph: &InfluenceGraph, walk: &Walk) -> Result<f64> {
    let probs = graph.out_adjacency().all_probs();
    Ok(walk
        .multiplicities(graph)?
        .iter()
        .map(|&(e, a)| probs[e].powi(a as i32))
        .product())
}

/// `Pr(g^L) = prod_{alpha > 0} P^alpha * prod_{alpha < L} (1 - P)`.
pub fn exact_world_probability(
    graph: &InfluenceGraph,
    world: &MultiWorld,
    max_walk_length: usize,
) -> Result<f64> {
    if world.multiplicity.len() != graph.edge_count() {
        return Err(Error::invalid(format!(
            "world has {} multiplicities for {} edges",
            world.multiplicity.len(),
            graph.edge_count()
        )));
    }
    let probs = graph.out_adjacency().all_probs();
    let mut pr = 1.0;
    for (&a, &p) in world.multiplicity.iter().zip(probs) {
        if a as usize > max_walk_length {
            return Err(Error::domain(format!(
                "multiplicity {a} outside 0..={max_walk_length}"
            )));
        }
        pr *= multiplicity_probability(p, a, max_walk_length as u32);
    }
    Ok(pr)
}

#[inline]
fn multiplicity_probability(p: f64, a: u32, l: u32) -> f64 {
    let mut x = p.powi(a as i32);
    if a < l {
        x *= 1.0 - p;
    }
    x
}

/// Merges walk profiles, keeping the largest multiplicity per edge.
pub(crate) fn max_profile(profiles: &[&[(usize, u32)]]) -> Vec<(usize, u32)> {
    let mut all: Vec<(usize, u32)> = profiles.iter().flat_map(|p| p.iter().copied()).collect();
    all.sort_unstable();
    let mut out: Vec<(usize, u32)> = Vec::new();
    for (e, a) in all {
        match out.last_mut() {
            Some((last, c)) if *last == e => *c = (*c).max(a),
            _ => out.push((e, a)),
        }
    }
    out
}

/// `Pr(W_1 and ... and W_s) = prod P(e)^{max_i alpha_{W_i}(e)}`.
pub fn multi_walk_probability(graph: &InfluenceGraph, walks: &[Walk]) -> Result<f64> {
    let profiles = walks
        .iter()
        .map(|w| w.multiplicities(graph))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[(usize, u32)]> = profiles.iter().map(Vec::as_slice).collect();
    let probs = graph.out_adjacency().all_probs();
    Ok(max_profile(&refs)
        .iter()
        .map(|&(e, a)| probs[e].powi(a as i32))
        .product())
}

/// Number of `G^L` worlds, `(L + 1)^m`, if it fits the guard.
pub fn multi_world_count(edge_count: usize, max_walk_length: usize) -> Option<u64> {
    let mut total: u64 = 1;
    for _ in 0..edge_count {
        total = total.checked_mul(max_walk_length as u64 + 1)?;
        if total > MAX_MULTI_WORLDS {
            return None;
        }
    }
    Some(total)
}

/// Visits every world of `G^L` with its probability.
pub fn for_each_multi_world(
    graph: &InfluenceGraph,
    max_walk_length: usize,
    mut visit: impl FnMut(&MultiWorld, f64),
) -> Result<()> {
    let m = graph.edge_count();
    if multi_world_count(m, max_walk_length).is_none() {
        return Err(Error::capacity(format!(
            "(L+1)^m = {}^{m} multi-worlds exceeds the limit of {MAX_MULTI_WORLDS}",
            max_walk_length + 1
        )));
    }
    let probs = edge_probs(graph);
    let l = max_walk_length as u32;
    let mut world = MultiWorld::new(vec![0; m]);
    loop {
        let pr: f64 = world
            .multiplicity
            .iter()
            .zip(&probs)
            .map(|(&a, &p)| multiplicity_probability(p, a, l))
            .product();
        visit(&world, pr);
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == m {
                return Ok(());
            }
            if world.multiplicity[i] < l {
                world.multiplicity[i] += 1;
                break;
            }
            world.multiplicity[i] = 0;
            i += 1;
        }
    }
}

/// Enumerates the multiplicities of the edges in `caps` only, collapsing
/// every multiplicity `>= cap` into one outcome. Because world probabilities
/// factor per edge, events that depend only on whether `alpha(e) >= a` for
/// `a <= cap(e)` get exactly the same probability as under full enumeration.
pub(crate) fn for_each_collapsed_world(
    graph: &InfluenceGraph,
    max_walk_length: usize,
    caps: &[(usize, u32)],
    mut visit: impl FnMut(&[(usize, u32)], f64),
) -> Result<()> {
    let mut count: u64 = 1;
    for &(_, c) in caps {
        count = count.saturating_mul(c as u64 + 1);
    }
    if count > MAX_MULTI_WORLDS {
        return Err(Error::capacity(format!(
            "{count} collapsed multi-worlds exceeds the limit of {MAX_MULTI_WORLDS}"
        )));
    }
    let probs = graph.out_adjacency().all_probs();
    let l = max_walk_length as u32;
    // Outcome table per edge: probability that alpha = a (a < cap) or alpha >= cap.
    let tables: Vec<Vec<f64>> = caps
        .iter()
        .map(|&(e, cap)| {
            let p = probs[e];
            (0..=cap)
                .map(|a| {
                    if a == cap {
                        p.powi(a as i32)
                    } else {
                        multiplicity_probability(p, a, l)
                    }
                })
                .collect()
        })
        .collect();
    let mut state: Vec<(usize, u32)> = caps.iter().map(|&(e, _)| (e, 0)).collect();
    loop {
        let pr: f64 = state
            .iter()
            .zip(&tables)
            .map(|(&(_, a), t)| t[a as usize])
            .product();
        visit(&state, pr);
        let mut i = 0;
        loop {
            if i == caps.len() {
                return Ok(());
            }
            if state[i].1 < caps[i].1 {
                state[i].1 += 1;
                break;
            }
            state[i].1 = 0;
            i += 1;
        }
    }
}

/// Checks a walk profile against a collapsed world (both sorted by edge).
pub(crate) fn collapsed_embeds(world: &[(usize, u32)], profile: &[(usize, u32)]) -> bool {
    let mut i = 0;
    for &(e, a) in profile {
        while world[i].0 != e {
            i += 1;
        }
        if world[i].1 < a {
            return false;
        }
    }
    true
}

/// `sum Pr(g^L)` over worlds embedding every walk, by enumeration.
pub fn embedding_probability(
    graph: &InfluenceGraph,
    walks: &[Walk],
    max_walk_length: usize,
) -> Result<f64> {
    let profiles = walks
        .iter()
        .map(|w| w.multiplicities(graph))
        .collect::<Result<Vec<_>>>()?;
    if profiles.iter().flatten().any(|&(_, a)| a as usize > max_walk_length) {
        return Ok(0.0);
    }
    let refs: Vec<&[(usize, u32)]> = profiles.iter().map(Vec::as_slice).collect();
    let caps = max_profile(&refs);
    let mut total = 0.0;
    for_each_collapsed_world(graph, max_walk_length, &caps, |world, pr| {
        if profiles.iter().all(|p| collapsed_embeds(world, p)) {
            total += pr;
        }
    })?;
    Ok(total)
}

/// All walks of length `1..=L` starting at `u`, in depth-first order.
pub fn walks_from(graph: &InfluenceGraph, u: VertexId, max_walk_length: usize) -> Result<Vec<Walk>> {
    let mut out = Vec::new();
    let mut path = vec![u];
    extend_walks(graph, max_walk_length, &mut path, &mut out)?;
    Ok(out)
}

fn extend_walks(
    graph: &InfluenceGraph,
    max_len: usize,
    path: &mut Vec<VertexId>,
    out: &mut Vec<Walk>,
) -> Result<()> {
    if path.len() > max_len {
        return Ok(());
    }
    let last = *path.last().unwrap();
    for &v in graph.out_adjacency().neighbors(last) {
        path.push(v);
        if out.len() == MAX_ENUMERATED_WALKS {
            return Err(Error::capacity(format!(
                "more than {MAX_ENUMERATED_WALKS} walks to enumerate"
            )));
        }
        out.push(Walk {
            vertices: path.clone(),
        });
        extend_walks(graph, max_len, path, out)?;
        path.pop();
    }
    Ok(())
}

/// All walks of length `1..=L` from `u` to `v`.
pub fn walks_between(
    graph: &InfluenceGraph,
    u: VertexId,
    v: VertexId,
    max_walk_length: usize,
) -> Result<Vec<Walk>> {
    Ok(walks_from(graph, u, max_walk_length)?
        .into_iter()
        .filter(|w| w.end() == v)
        .collect())
}

pub(crate) fn check_vertex(graph: &InfluenceGraph, v: VertexId) -> Result<()> {
    if (v as usize) < graph.vertex_count() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "vertex {v} outside 0..{}",
            graph.vertex_count()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn walk(v: &[VertexId]) -> Walk {
        Walk::new(v.to_vec()).unwrap()
    }

    #[test]
    fn path_probability_is_product() {
        let g = InfluenceGraph::from_dense_edges(3, &[(0, 1, 0.5), (1, 2, 0.4)]).unwrap();
        assert_abs_diff_eq!(walk_probability(&g, &walk(&[0, 1, 2])).unwrap(), 0.2);
    }

    #[test]
    fn repeated_edges_raise_the_power() {
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        assert_eq!(walk_probability(&g, &walk(&[0, 1, 0, 1])).unwrap(), 0.125);
        assert!(matches!(
            walk_probability(&g, &walk(&[0, 0])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn single_edge_world_probabilities() {
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.5)]).unwrap();
        let pr = |a| exact_world_probability(&g, &MultiWorld::new(vec![a]), 2).unwrap();
        assert_eq!(pr(0), 0.5);
        assert_eq!(pr(1), 0.25);
        assert_eq!(pr(2), 0.25);
        assert!(matches!(
            exact_world_probability(&g, &MultiWorld::new(vec![3]), 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn worlds_sum_to_one() {
        let g = InfluenceGraph::from_dense_edges(3, &[(0, 1, 0.3), (1, 2, 0.7), (2, 0, 0.45)])
            .unwrap();
        let mut total = 0.0;
        let mut count = 0;
        for_each_multi_world(&g, 2, |_, pr| {
            total += pr;
            count += 1;
        })
        .unwrap();
        assert_eq!(count, 27);
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn shared_edges_count_once() {
        let g = InfluenceGraph::from_dense_edges(4, &[(0, 1, 0.5), (1, 2, 0.5), (1, 3, 0.5)])
            .unwrap();
        let walks = [walk(&[0, 1, 2]), walk(&[0, 1, 3])];
        assert_eq!(multi_walk_probability(&g, &walks).unwrap(), 0.125);
        assert_abs_diff_eq!(
            embedding_probability(&g, &walks, 3).unwrap(),
            0.125,
            epsilon = 1e-12
        );
    }

    #[test]
    fn enumerates_walks_with_cycles() {
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        let w = walks_from(&g, 0, 3).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(walks_between(&g, 0, 0, 3).unwrap(), vec![walk(&[0, 1, 0])]);
    }

    #[test]
    fn oversized_world_space_is_rejected() {
        let g = crate::graph::generate::erdos_renyi(10, 30, 1, 0.5);
        assert!(matches!(
            for_each_multi_world(&g, 3, |_, _| {}),
            Err(Error::Capacity(_))
        ));
    }
}
