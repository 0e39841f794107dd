//! Walk-probability scores.
//!
//! With `A[u, v] = P(u, v)`, the hop-`j` score of `u` is `(A^j 1)[u]`, the
//! summed probability of all length-`j` walks leaving `u`. [`score_est`]
//! computes hops `1..=L` with `L` sparse matrix-vector products; [`walk_pro`]
//! computes the reverse columns `A^j[*, w]` by traversing in-edges from `w`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, VertexId};

/// Per-hop score vectors `F_1..F_L` and their sum `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVectors {
    per_hop: Vec<Vec<f64>>,
    total: Vec<f64>,
}

impl ScoreVectors {
    pub(crate) fn from_per_hop(per_hop: Vec<Vec<f64>>) -> Self {
        let n = per_hop.first().map_or(0, Vec::len);
        let mut total = vec![0.0; n];
        for hop in &per_hop {
            for (t, &x) in total.iter_mut().zip(hop) {
                *t += x;
            }
        }
        ScoreVectors { per_hop, total }
    }

    pub fn max_walk_length(&self) -> usize {
        self.per_hop.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.total.len()
    }

    /// `F_j` for `1 <= j <= L`.
    pub fn hop(&self, j: usize) -> &[f64] {
        &self.per_hop[j - 1]
    }

    pub(crate) fn hop_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.per_hop[j - 1]
    }

    pub fn per_hop(&self) -> &[Vec<f64>] {
        &self.per_hop
    }

    /// `F = F_1 + ... + F_L`.
    pub fn total(&self) -> &[f64] {
        &self.total
    }

    pub(crate) fn total_mut(&mut self) -> &mut [f64] {
        &mut self.total
    }

    pub fn heap_bytes(&self) -> usize {
        let f = std::mem::size_of::<f64>();
        self.per_hop.iter().map(|h| h.capacity() * f).sum::<usize>() + self.total.capacity() * f
    }
}

/// Computes `F_j = A F_{j-1}` for `j = 1..=L` starting from the all-ones
/// vector, and keeps every hop.
pub fn score_est(graph: &InfluenceGraph, max_walk_length: usize) -> Result<ScoreVectors> {
    if max_walk_length == 0 {
        return Err(Error::invalid("maximum walk length L must be at least 1"));
    }
    let n = graph.vertex_count();
    let out = graph.out_adjacency();
    let mut per_hop: Vec<Vec<f64>> = Vec::with_capacity(max_walk_length);

    let first: Vec<f64> = (0..n as VertexId)
        .into_par_iter()
        .with_min_len(1024)
        .map(|u| out.probs(u).iter().sum())
        .collect();
    per_hop.push(first);

    for _ in 1..max_walk_length {
        let prev = per_hop.last().unwrap();
        let next: Vec<f64> = (0..n as VertexId)
            .into_par_iter()
            .with_min_len(1024)
            .map(|u| out.edges(u).map(|(v, p)| p * prev[v as usize]).sum())
            .collect();
        per_hop.push(next);
    }
    Ok(ScoreVectors::from_per_hop(per_hop))
}

/// Sparse columns `A^j[*, w]` for `j = 1..=depth`.
///
/// Values are stored row-wise: each vertex that reaches `w` within `depth`
/// hops owns `depth` consecutive slots, one per walk length, with 0.0 where no
/// walk of that length exists.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkColumnSet {
    seed: VertexId,
    depth: usize,
    vertices: Vec<VertexId>,
    values: Vec<f64>,
}

impl WalkColumnSet {
    pub fn empty(seed: VertexId, depth: usize) -> Self {
        WalkColumnSet {
            seed,
            depth,
            vertices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn seed(&self) -> VertexId {
        self.seed
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// All `A^1[u, w] .. A^depth[u, w]` of vertex `u`, or `None` if `u`
    /// cannot reach the seed within `depth` hops.
    #[inline]
    pub fn row(&self, u: VertexId) -> Option<&[f64]> {
        self.vertices
            .binary_search(&u)
            .ok()
            .map(|i| &self.values[i * self.depth..(i + 1) * self.depth])
    }

    /// `A^j[u, w]`.
    pub fn get(&self, j: usize, u: VertexId) -> f64 {
        assert!(j >= 1 && j <= self.depth, "walk length {j} outside 1..={}", self.depth);
        self.row(u).map_or(0.0, |r| r[j - 1])
    }

    /// Non-zero entries of column `A^j[*, w]`, in ascending vertex order.
    pub fn level(&self, j: usize) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        assert!(j >= 1 && j <= self.depth);
        self.vertices
            .iter()
            .enumerate()
            .map(move |(i, &u)| (u, self.values[i * self.depth + j - 1]))
            .filter(|&(_, x)| x != 0.0)
    }

    /// Vertices that reach the seed within `depth` hops, ascending.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn heap_bytes(&self) -> usize {
        self.vertices.capacity() * std::mem::size_of::<VertexId>()
            + self.values.capacity() * std::mem::size_of::<f64>()
    }
}

/// Scratch space for reverse traversals, reusable across seeds.
#[derive(Debug, Clone)]
pub struct WalkWorkspace {
    acc: Vec<f64>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl WalkWorkspace {
    pub fn new(n: usize) -> Self {
        WalkWorkspace {
            acc: vec![0.0; n],
            stamp: vec![0; n],
            epoch: 0,
        }
    }

    fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    /// Level-by-level reverse traversal from `seed`. In-neighbors flagged in
    /// `excluded` are never entered, so walks through them contribute nothing.
    pub fn walk_columns(
        &mut self,
        graph: &InfluenceGraph,
        depth: usize,
        seed: VertexId,
        excluded: &[bool],
    ) -> WalkColumnSet {
        debug_assert!(!excluded[seed as usize], "seed {seed} is excluded");
        let mut levels: Vec<Vec<(VertexId, f64)>> = Vec::with_capacity(depth);
        let mut frontier: Vec<(VertexId, f64)> = vec![(seed, 1.0)];
        for _ in 0..depth {
            let epoch = self.next_epoch();
            let mut touched: Vec<VertexId> = Vec::new();
            for &(u, val) in &frontier {
                for (v, p) in graph.in_edges(u) {
                    let vi = v as usize;
                    if excluded[vi] {
                        continue;
                    }
                    if self.stamp[vi] != epoch {
                        self.stamp[vi] = epoch;
                        self.acc[vi] = 0.0;
                        touched.push(v);
                    }
                    self.acc[vi] += val * p;
                }
            }
            // Ascending order keeps the next level's sums bit-reproducible.
            touched.sort_unstable();
            frontier = touched.iter().map(|&v| (v, self.acc[v as usize])).collect();
            levels.push(frontier.clone());
            if frontier.is_empty() {
                break;
            }
        }

        let mut vertices: Vec<VertexId> = levels.iter().flatten().map(|&(u, _)| u).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let mut values = vec![0.0; vertices.len() * depth];
        for (j, level) in levels.iter().enumerate() {
            for &(u, x) in level {
                let i = vertices.binary_search(&u).unwrap();
                values[i * depth + j] = x;
            }
        }
        WalkColumnSet {
            seed,
            depth,
            vertices,
            values,
        }
    }

    pub fn heap_bytes(&self) -> usize {
        self.acc.capacity() * std::mem::size_of::<f64>()
            + self.stamp.capacity() * std::mem::size_of::<u32>()
    }
}

/// Columns `A^j[*, w]` for `j = 1..=L`, skipping walks that pass through any
/// vertex flagged in `excluded`.
pub fn walk_pro(
    graph: &InfluenceGraph,
    max_walk_length: usize,
    seed: VertexId,
    excluded: &[bool],
) -> WalkColumnSet {
    WalkWorkspace::new(graph.vertex_count()).walk_columns(graph, max_walk_length, seed, excluded)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> InfluenceGraph {
        InfluenceGraph::from_dense_edges(3, &[(0, 1, 0.5), (1, 2, 0.5)]).unwrap()
    }

    #[test]
    fn single_edge_scores() {
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.3)]).unwrap();
        let s = score_est(&g, 3).unwrap();
        assert_eq!(s.total(), &[0.3, 0.0]);
        assert_eq!(s.max_walk_length(), 3);
    }

    #[test]
    fn chain_scores() {
        let s = score_est(&chain(), 2).unwrap();
        assert_eq!(s.total(), &[0.75, 0.5, 0.0]);
        assert_eq!(s.hop(1), &[0.5, 0.5, 0.0]);
        assert_eq!(s.hop(2), &[0.25, 0.0, 0.0]);
    }

    #[test]
    fn zero_length_rejected() {
        assert!(matches!(score_est(&chain(), 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn chain_columns() {
        let cols = walk_pro(&chain(), 2, 2, &[false; 3]);
        assert_eq!(cols.get(1, 1), 0.5);
        assert_eq!(cols.get(2, 0), 0.25);
        assert_eq!(cols.get(1, 0), 0.0);
        assert_eq!(cols.level(1).collect::<Vec<_>>(), vec![(1, 0.5)]);
        assert_eq!(cols.level(2).collect::<Vec<_>>(), vec![(0, 0.25)]);
    }

    #[test]
    fn source_without_in_edges_has_empty_columns() {
        let cols = walk_pro(&chain(), 3, 0, &[false; 3]);
        assert!(cols.is_empty());
        for j in 1..=3 {
            assert_eq!(cols.level(j).count(), 0);
        }
    }

    #[test]
    fn excluded_vertices_block_walks() {
        let cols = walk_pro(&chain(), 2, 2, &[false, true, false]);
        assert!(cols.is_empty());
    }

    #[test]
    fn cycles_revisit_the_seed() {
        // 0 <-> 1 with p = 0.5: A^2[1, 1] = 0.25 via 1 -> 0 -> 1.
        let g = InfluenceGraph::from_dense_edges(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        let cols = walk_pro(&g, 3, 1, &[false; 2]);
        assert_eq!(cols.get(1, 0), 0.5);
        assert_eq!(cols.get(2, 1), 0.25);
        assert_eq!(cols.get(3, 0), 0.125);
        assert_eq!(cols.get(2, 0), 0.0);
    }
}
