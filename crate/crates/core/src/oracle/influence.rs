use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    check_vertex, collapsed_embeds, for_each_collapsed_world, max_profile, walk_probability,
    walks_between, walks_from, Walk, MAX_BASE_EDGES, MAX_WALK_SET,
};
use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, VertexId};

/// How [`exact_pair_influence_via`] evaluates `I(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfluenceRoute {
    /// Inclusion-exclusion over the walks from `u` to `v`, each term by the
    /// max-multiplicity product.
    InclusionExclusion,
    /// Enumeration of `G^L` worlds restricted to the edges on those walks.
    MultiWorlds,
    /// Enumeration of the `2^m` base worlds with hop-bounded reachability.
    BaseWorlds,
}

fn base_world_guard(graph: &InfluenceGraph) -> Result<()> {
    if graph.edge_count() > MAX_BASE_EDGES {
        return Err(Error::capacity(format!(
            "base-world enumeration needs m <= {MAX_BASE_EDGES}, graph has m = {}",
            graph.edge_count()
        )));
    }
    Ok(())
}

/// Visits every base world as a presence flag per edge index.
fn for_each_base_world(graph: &InfluenceGraph, mut visit: impl FnMut(&[bool], f64)) -> Result<()> {
    base_world_guard(graph)?;
    let probs = graph.out_adjacency().all_probs();
    let m = probs.len();
    let mut present = vec![false; m];
    for mask in 0u32..(1u32 << m) {
        let mut pr = 1.0;
        for (e, &p) in probs.iter().enumerate() {
            let on = mask >> e & 1 == 1;
            present[e] = on;
            pr *= if on { p } else { 1.0 - p };
        }
        visit(&present, pr);
    }
    Ok(())
}

/// Hop distance from the sources in a base world, `u32::MAX` if unreachable.
fn hop_distances(
    graph: &InfluenceGraph,
    present: &[bool],
    sources: &[VertexId],
    dist: &mut Vec<u32>,
) {
    dist.clear();
    dist.resize(graph.vertex_count(), u32::MAX);
    let out = graph.out_adjacency();
    let mut frontier: Vec<VertexId> = Vec::new();
    for &s in sources {
        if dist[s as usize] != 0 {
            dist[s as usize] = 0;
            frontier.push(s);
        }
    }
    let mut hop = 0;
    while !frontier.is_empty() {
        hop += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            let range = out.range(u);
            for (e, &v) in range.clone().zip(out.neighbors(u)) {
                if present[e] && dist[v as usize] == u32::MAX {
                    dist[v as usize] = hop;
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
}

/// Whether some walk of length `1..=L` from `u` to `v` exists in a base
/// world. With `u == v` this needs a closed walk.
fn walk_reaches(
    graph: &InfluenceGraph,
    present: &[bool],
    u: VertexId,
    v: VertexId,
    bound: usize,
) -> bool {
    let out = graph.out_adjacency();
    let mut level = vec![false; graph.vertex_count()];
    level[u as usize] = true;
    for _ in 0..bound {
        let mut next = vec![false; graph.vertex_count()];
        for x in 0..graph.vertex_count() as VertexId {
            if !level[x as usize] {
                continue;
            }
            for (e, &y) in out.range(x).zip(out.neighbors(x)) {
                if present[e] {
                    next[y as usize] = true;
                }
            }
        }
        if next[v as usize] {
            return true;
        }
        level = next;
    }
    false
}

/// Exact influence of `u` on `v`.
///
/// With `bound = None` this is the probability that `v` is reachable from `u`
/// in a base world (1 when `u == v`). With `bound = Some(L)` it is the
/// probability that at least one walk of length `1..=L` from `u` to `v` is
/// embedded in a `G^L` world; inclusion-exclusion is used when the walk set is
/// small enough, multi-world enumeration otherwise.
pub fn exact_pair_influence(
    graph: &InfluenceGraph,
    u: VertexId,
    v: VertexId,
    bound: Option<usize>,
) -> Result<f64> {
    match bound {
        None => exact_pair_influence_via(graph, u, v, None, InfluenceRoute::BaseWorlds),
        Some(l) => {
            let walks = walks_between(graph, u, v, l)?;
            let route = if walks.len() <= MAX_WALK_SET {
                InfluenceRoute::InclusionExclusion
            } else {
                InfluenceRoute::MultiWorlds
            };
            exact_pair_influence_via(graph, u, v, bound, route)
        }
    }
}

/// [`exact_pair_influence`] along a chosen route.
///
/// `BaseWorlds` with `Some(L)` counts base worlds in which `v` is reached by a
/// walk of at most `L` hops. This equals the `G^L` value: a shortest such walk
/// traverses each edge once, so it is embedded as soon as every edge on it
/// has `alpha >= 1`, which happens with probability `P(e)`.
pub fn exact_pair_influence_via(
    graph: &InfluenceGraph,
    u: VertexId,
    v: VertexId,
    bound: Option<usize>,
    route: InfluenceRoute,
) -> Result<f64> {
    check_vertex(graph, u)?;
    check_vertex(graph, v)?;
    match (route, bound) {
        (InfluenceRoute::BaseWorlds, None) => {
            if u == v {
                return Ok(1.0);
            }
            let mut total = 0.0;
            let mut dist = Vec::new();
            for_each_base_world(graph, |present, pr| {
                hop_distances(graph, present, &[u], &mut dist);
                if dist[v as usize] != u32::MAX {
                    total += pr;
                }
            })?;
            Ok(total)
        }
        (InfluenceRoute::BaseWorlds, Some(l)) => {
            let mut total = 0.0;
            for_each_base_world(graph, |present, pr| {
                if walk_reaches(graph, present, u, v, l) {
                    total += pr;
                }
            })?;
            Ok(total)
        }
        (_, None) => Err(Error::invalid(
            "walk-based routes need a finite walk length bound",
        )),
        (InfluenceRoute::InclusionExclusion, Some(l)) => {
            let walks = walks_between(graph, u, v, l)?;
            inclusion_exclusion(graph, &walks)
        }
        (InfluenceRoute::MultiWorlds, Some(l)) => {
            let x = walk_count_distribution(graph, u, v, l)?;
            Ok(x.iter().skip(1).sum())
        }
    }
}

fn inclusion_exclusion(graph: &InfluenceGraph, walks: &[Walk]) -> Result<f64> {
    if walks.len() > MAX_WALK_SET {
        return Err(Error::capacity(format!(
            "inclusion-exclusion over {} walks exceeds the limit of {MAX_WALK_SET}",
            walks.len()
        )));
    }
    let profiles = walks
        .iter()
        .map(|w| w.multiplicities(graph))
        .collect::<Result<Vec<_>>>()?;
    let probs = graph.out_adjacency().all_probs();
    let mut alpha = vec![0u32; graph.edge_count()];
    let mut total = 0.0;
    subset_terms(&profiles, probs, 0, 0, &mut alpha, &mut total);
    Ok(total)
}

fn subset_terms(
    profiles: &[Vec<(usize, u32)>],
    probs: &[f64],
    start: usize,
    size: usize,
    alpha: &mut [u32],
    total: &mut f64,
) {
    for j in start..profiles.len() {
        let mut saved: Vec<(usize, u32)> = Vec::new();
        for &(e, a) in &profiles[j] {
            if alpha[e] < a {
                saved.push((e, alpha[e]));
                alpha[e] = a;
            }
        }
        let pr: f64 = alpha
            .iter()
            .zip(probs)
            .filter(|(&a, _)| a > 0)
            .map(|(&a, &p)| p.powi(a as i32))
            .product();
        if size % 2 == 0 {
            *total += pr;
        } else {
            *total -= pr;
        }
        subset_terms(profiles, probs, j + 1, size + 1, alpha, total);
        for (e, a) in saved {
            alpha[e] = a;
        }
    }
}

/// `X^<i>(u, v)` for `i = 0..=h`: the probability mass of `G^L` worlds in
/// which exactly `i` of the `h` walks from `u` to `v` are embedded.
pub fn walk_count_distribution(
    graph: &InfluenceGraph,
    u: VertexId,
    v: VertexId,
    max_walk_length: usize,
) -> Result<Vec<f64>> {
    check_vertex(graph, u)?;
    check_vertex(graph, v)?;
    let walks = walks_between(graph, u, v, max_walk_length)?;
    let profiles = walks
        .iter()
        .map(|w| w.multiplicities(graph))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[(usize, u32)]> = profiles.iter().map(Vec::as_slice).collect();
    let caps = max_profile(&refs);
    let mut x = vec![0.0; walks.len() + 1];
    for_each_collapsed_world(graph, max_walk_length, &caps, |world, pr| {
        let count = profiles.iter().filter(|p| collapsed_embeds(world, p)).count();
        x[count] += pr;
    })?;
    Ok(x)
}

/// Expected spread `E|R_g(S)|` over all base worlds.
pub fn exact_seed_influence(graph: &InfluenceGraph, seeds: &[VertexId]) -> Result<f64> {
    for &s in seeds {
        check_vertex(graph, s)?;
    }
    let mut total = 0.0;
    let mut dist = Vec::new();
    for_each_base_world(graph, |present, pr| {
        hop_distances(graph, present, seeds, &mut dist);
        let reached = dist.iter().filter(|&&d| d != u32::MAX).count();
        total += pr * reached as f64;
    })?;
    Ok(total)
}

/// Exact spreads of many seed sets from a single pass over the base worlds.
/// Requires `n <= 64`.
pub fn exact_spreads(graph: &InfluenceGraph, seed_sets: &[Vec<VertexId>]) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    if n > 64 {
        return Err(Error::capacity(format!(
            "batched exact spreads need n <= 64, graph has n = {n}"
        )));
    }
    for &s in seed_sets.iter().flatten() {
        check_vertex(graph, s)?;
    }
    let edges: Vec<(usize, usize)> = graph
        .edges()
        .map(|(u, v, _)| (u as usize, v as usize))
        .collect();
    let mut totals = vec![0.0; seed_sets.len()];
    let mut reach = vec![0u64; n];
    for_each_base_world(graph, |present, pr| {
        for (i, r) in reach.iter_mut().enumerate() {
            *r = 1 << i;
        }
        // reach[u] |= reach[v] for every present (u, v) until stable.
        loop {
            let mut changed = false;
            for (e, &(u, v)) in edges.iter().enumerate() {
                if present[e] {
                    let merged = reach[u] | reach[v];
                    if merged != reach[u] {
                        reach[u] = merged;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for (t, set) in totals.iter_mut().zip(seed_sets) {
            let mask = set.iter().fold(0u64, |acc, &s| acc | reach[s as usize]);
            *t += pr * mask.count_ones() as f64;
        }
    })?;
    Ok(totals)
}

/// Per-target walk score of one source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetScore {
    pub target: VertexId,
    /// `W(u, v)`, the summed probability of the walks.
    pub score: f64,
    /// `h_uv`, the number of walks.
    pub walk_count: usize,
    /// `W` split by walk length; entry `j - 1` holds length `j`.
    pub by_length: Vec<f64>,
}

/// Walk score `I^(u) = sum_v W(u, v)` by explicit walk enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkScore {
    pub source: VertexId,
    pub max_walk_length: usize,
    pub total: f64,
    pub targets: Vec<TargetScore>,
}

impl WalkScore {
    pub fn target(&self, v: VertexId) -> Option<&TargetScore> {
        self.targets.iter().find(|t| t.target == v)
    }

    /// `W(u, v)`, zero when no walk exists.
    pub fn score_to(&self, v: VertexId) -> f64 {
        self.target(v).map_or(0.0, |t| t.score)
    }

    pub fn walk_count_to(&self, v: VertexId) -> usize {
        self.target(v).map_or(0, |t| t.walk_count)
    }
}

pub fn walk_score(graph: &InfluenceGraph, u: VertexId, max_walk_length: usize) -> Result<WalkScore> {
    check_vertex(graph, u)?;
    let mut targets: BTreeMap<VertexId, TargetScore> = BTreeMap::new();
    for w in walks_from(graph, u, max_walk_length)? {
        let pr = walk_probability(graph, &w)?;
        let t = targets.entry(w.end()).or_insert_with(|| TargetScore {
            target: w.end(),
            score: 0.0,
            walk_count: 0,
            by_length: vec![0.0; max_walk_length],
        });
        t.score += pr;
        t.walk_count += 1;
        t.by_length[w.len() - 1] += pr;
    }
    let targets: Vec<TargetScore> = targets.into_values().collect();
    Ok(WalkScore {
        source: u,
        max_walk_length,
        total: targets.iter().map(|t| t.score).sum(),
        targets,
    })
}

/// Exact quantities for one `(u, v)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub source: VertexId,
    pub target: VertexId,
    /// `h_uv`.
    pub walk_count: usize,
    /// `I(u, v)` under the `L`-bounded walk semantics.
    pub influence: f64,
    /// `W(u, v)`.
    pub score: f64,
    /// `W(u, v) - I(u, v)`.
    pub gap: f64,
    /// `p_m^3 h 2^h`.
    pub gap_bound: f64,
    /// `X^<i>(u, v)` for `i = 0..=h`.
    pub distribution: Vec<f64>,
}

/// Aggregates over all targets of one source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexReport {
    pub vertex: VertexId,
    pub influence: f64,
    pub score: f64,
    pub gap: f64,
    /// `p_m^3 L sum_v h_uv 2^h_uv`.
    pub gap_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactInfluenceReport {
    pub max_walk_length: usize,
    pub max_probability: f64,
    pub pairs: Vec<PairReport>,
    pub vertices: Vec<VertexReport>,
}

fn gap_bound(p_m: f64, h: usize) -> f64 {
    p_m.powi(3) * h as f64 * 2f64.powi(h as i32)
}

/// Influence, score and gap for every pair joined by at least one walk.
pub fn exact_influence_report(
    graph: &InfluenceGraph,
    max_walk_length: usize,
) -> Result<ExactInfluenceReport> {
    let p_m = graph.max_probability();
    let mut pairs = Vec::new();
    let mut vertices = Vec::new();
    for u in 0..graph.vertex_count() as VertexId {
        let ws = walk_score(graph, u, max_walk_length)?;
        let mut total_i = 0.0;
        let mut bound_terms = 0.0;
        for t in &ws.targets {
            let x = walk_count_distribution(graph, u, t.target, max_walk_length)?;
            let influence: f64 = x.iter().skip(1).sum();
            total_i += influence;
            bound_terms += t.walk_count as f64 * 2f64.powi(t.walk_count as i32);
            pairs.push(PairReport {
                source: u,
                target: t.target,
                walk_count: t.walk_count,
                influence,
                score: t.score,
                gap: t.score - influence,
                gap_bound: gap_bound(p_m, t.walk_count),
                distribution: x,
            });
        }
        vertices.push(VertexReport {
            vertex: u,
            influence: total_i,
            score: ws.total,
            gap: ws.total - total_i,
            gap_bound: p_m.powi(3) * max_walk_length as f64 * bound_terms,
        });
    }
    Ok(ExactInfluenceReport {
        max_walk_length,
        max_probability: p_m,
        pairs,
        vertices,
    })
}

/// One row of [`removal_gap`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalGapRow {
    pub vertex: VertexId,
    /// `|I_G1(u) - I_G2(u)|`, true spreads.
    pub influence_gap: f64,
    /// `|I^_G1(u) - I^_G2(u)|`, walk scores.
    pub score_gap: f64,
    /// `I_G2(u, w)`.
    pub influence_to_seed: f64,
    /// `W_G2(u, w)`.
    pub score_to_seed: f64,
    /// `h_uw` in `G`.
    pub walk_count: usize,
    /// `p_m^3 h_uw 2^h_uw`.
    pub score_bound: f64,
    pub influence_within: bool,
    pub score_within: bool,
}

/// Compares `G1` (every edge of `w` removed) with `G2` (only the out-edges of
/// `w` removed) for every `u != w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalGapReport {
    pub removed: VertexId,
    pub max_walk_length: usize,
    pub max_probability: f64,
    pub rows: Vec<RemovalGapRow>,
}

impl RemovalGapReport {
    pub fn influence_bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.influence_within)
    }

    pub fn score_bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.score_within)
    }
}

pub fn removal_gap(graph: &InfluenceGraph, w: VertexId, max_walk_length: usize) -> Result<RemovalGapReport> {
    check_vertex(graph, w)?;
    base_world_guard(graph)?;
    let g1 = graph.without_incident_edges(w);
    let g2 = graph.without_out_edges(&[w]);
    let p_m = graph.max_probability();
    let others: Vec<VertexId> = (0..graph.vertex_count() as VertexId).filter(|&u| u != w).collect();
    let singles: Vec<Vec<VertexId>> = others.iter().map(|&u| vec![u]).collect();
    let i1 = exact_spreads(&g1, &singles)?;
    let i2 = exact_spreads(&g2, &singles)?;
    let mut rows = Vec::with_capacity(others.len());
    for (k, &u) in others.iter().enumerate() {
        let s1 = walk_score(&g1, u, max_walk_length)?;
        let s2 = walk_score(&g2, u, max_walk_length)?;
        let h = walk_score(graph, u, max_walk_length)?.walk_count_to(w);
        let influence_gap = (i1[k] - i2[k]).abs();
        let score_gap = (s1.total - s2.total).abs();
        let score_bound = gap_bound(p_m, h);
        rows.push(RemovalGapRow {
            vertex: u,
            influence_gap,
            score_gap,
            influence_to_seed: exact_pair_influence(&g2, u, w, None)?,
            score_to_seed: s2.score_to(w),
            walk_count: h,
            score_bound,
            influence_within: (0.0..=1.0 + super::TOLERANCE).contains(&influence_gap),
            score_within: score_gap <= score_bound + super::TOLERANCE,
        });
    }
    Ok(RemovalGapReport {
        removed: w,
        max_walk_length,
        max_probability: p_m,
        rows,
    })
}
