//! Directed influence graphs in dual CSR form.
//!
//! Every vertex keeps its out-edges and its in-edges, each sorted by neighbor
//! id, together with the influence probability of the edge. Vertices carry an
//! external label (the id used in the input file) and a dense internal id
//! `0..n` assigned in order of first appearance.

mod cache;
pub mod generate;
mod load;
mod probability;

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cache::{read_binary, write_binary, BINARY_MAGIC, BINARY_VERSION};
pub use load::{load_edge_list, read_graph, write_edge_list, GraphFormat};
pub use probability::{assign_probabilities, ModelKind, ProbabilityModel};

/// Dense internal vertex id.
pub type VertexId = u32;

/// One direction of the adjacency structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    probs: Vec<f64>,
}

impl Adjacency {
    fn empty(n: usize) -> Self {
        Adjacency {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
            probs: Vec::new(),
        }
    }

    /// Edge-index range of vertex `v`.
    #[inline]
    pub fn range(&self, v: VertexId) -> Range<usize> {
        self.offsets[v as usize]..self.offsets[v as usize + 1]
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[self.range(v)]
    }

    #[inline]
    pub fn probs(&self, v: VertexId) -> &[f64] {
        &self.probs[self.range(v)]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    #[inline]
    pub fn edges(&self, v: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        let r = self.range(v);
        self.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.probs[r].iter().copied())
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn all_neighbors(&self) -> &[VertexId] {
        &self.neighbors
    }

    pub fn all_probs(&self) -> &[f64] {
        &self.probs
    }

    fn heap_bytes(&self) -> usize {
        self.offsets.capacity() * std::mem::size_of::<usize>()
            + self.neighbors.capacity() * std::mem::size_of::<VertexId>()
            + self.probs.capacity() * std::mem::size_of::<f64>()
    }
}

/// Where the edge probabilities of a graph came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum ProbabilitySource {
    /// Loaded without a probability column; every edge holds 1.0.
    Unassigned,
    /// Third column of the input.
    Explicit,
    Model(ProbabilityModel),
}

impl fmt::Display for ProbabilitySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbabilitySource::Unassigned => f.write_str("unassigned"),
            ProbabilitySource::Explicit => f.write_str("explicit"),
            ProbabilitySource::Model(m) => write!(f, "{m}"),
        }
    }
}

/// Immutable directed graph with per-edge influence probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceGraph {
    out_adj: Adjacency,
    in_adj: Adjacency,
    labels: Vec<u64>,
    label_index: HashMap<u64, VertexId>,
    source: ProbabilitySource,
}

/// JSON summary of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub avg_out_degree: f64,
    pub probability_model: String,
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "influence probability {p} outside (0, 1]"
        )))
    }
}

impl InfluenceGraph {
    /// Builds a graph whose internal ids equal `0..n` and whose labels are the
    /// ids themselves. Vertices without edges are kept.
    pub fn from_dense_edges(n: usize, edges: &[(VertexId, VertexId, f64)]) -> Result<Self> {
        let labels = (0..n as u64).collect();
        Self::from_parts(labels, edges.to_vec(), ProbabilitySource::Explicit)
    }

    /// Builds a graph from labeled edges, assigning dense ids in order of first
    /// appearance.
    pub fn from_labeled_edges(edges: &[(u64, u64, f64)]) -> Result<Self> {
        let mut builder = GraphBuilder::new();
        for &(u, v, p) in edges {
            builder.add_edge(u, v, p);
        }
        builder.build(ProbabilitySource::Explicit)
    }

    pub(crate) fn from_parts(
        labels: Vec<u64>,
        mut edges: Vec<(VertexId, VertexId, f64)>,
        source: ProbabilitySource,
    ) -> Result<Self> {
        let n = labels.len();
        if n > VertexId::MAX as usize {
            return Err(Error::capacity(format!("{n} vertices exceed the u32 id space")));
        }
        for &(u, v, p) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::domain(format!("edge ({u}, {v}) references a missing vertex")));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop on vertex {}", labels[u as usize])));
            }
            check_probability(p)?;
        }
        edges.sort_unstable_by_key(|&(u, v, _)| (u, v));
        if let Some(w) = edges.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::domain(format!(
                "duplicate edge ({}, {})",
                labels[w[0].0 as usize], labels[w[0].1 as usize]
            )));
        }

        let mut out_adj = Adjacency::empty(n);
        out_adj.neighbors.reserve_exact(edges.len());
        out_adj.probs.reserve_exact(edges.len());
        for &(u, v, p) in &edges {
            out_adj.offsets[u as usize + 1] += 1;
            out_adj.neighbors.push(v);
            out_adj.probs.push(p);
        }
        for i in 0..n {
            out_adj.offsets[i + 1] += out_adj.offsets[i];
        }
        drop(edges);

        let in_adj = transpose(&out_adj, n);
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i as VertexId))
            .collect::<HashMap<_, _>>();
        if label_index.len() != n {
            return Err(Error::domain("vertex labels are not unique"));
        }
        Ok(InfluenceGraph {
            out_adj,
            in_adj,
            labels,
            label_index,
            source,
        })
    }

    /// Assembles a graph from raw CSR arrays, re-validating every invariant.
    pub(crate) fn from_csr(
        labels: Vec<u64>,
        out_adj: Adjacency,
        in_adj: Adjacency,
        source: ProbabilitySource,
    ) -> Result<Self> {
        let n = labels.len();
        let label_index: HashMap<u64, VertexId> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i as VertexId))
            .collect();
        if label_index.len() != n {
            return Err(Error::domain("vertex labels are not unique"));
        }
        let graph = InfluenceGraph {
            out_adj,
            in_adj,
            labels,
            label_index,
            source,
        };
        graph.validate()?;
        Ok(graph)
    }

    /// Checks every structural invariant, including that both adjacency
    /// directions describe the same edge set with identical probabilities.
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        for adj in [&self.out_adj, &self.in_adj] {
            if adj.offsets.len() != n + 1
                || adj.offsets[0] != 0
                || adj.offsets[n] != adj.neighbors.len()
                || adj.neighbors.len() != adj.probs.len()
                || adj.offsets.windows(2).any(|w| w[0] > w[1])
            {
                return Err(Error::domain("inconsistent CSR offsets"));
            }
            for v in 0..n as VertexId {
                let nb = adj.neighbors(v);
                if nb.iter().any(|&x| x as usize >= n || x == v) {
                    return Err(Error::domain(format!("bad neighbor list at vertex {v}")));
                }
                if nb.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::domain(format!("unsorted or duplicate neighbors at vertex {v}")));
                }
                for &p in adj.probs(v) {
                    check_probability(p)?;
                }
            }
        }
        if transpose(&self.out_adj, n) != self.in_adj {
            return Err(Error::domain("out- and in-adjacency disagree"));
        }
        Ok(())
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.out_adj.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn out_adjacency(&self) -> &Adjacency {
        &self.out_adj
    }

    #[inline]
    pub fn in_adjacency(&self) -> &Adjacency {
        &self.in_adj
    }

    #[inline]
    pub fn out_edges(&self, u: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.out_adj.edges(u)
    }

    #[inline]
    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.in_adj.edges(v)
    }

    #[inline]
    pub fn out_degree(&self, u: VertexId) -> usize {
        self.out_adj.degree(u)
    }

    #[inline]
    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_adj.degree(v)
    }

    /// All edges as `(u, v, p)` in out-CSR order; the position in this
    /// sequence is the edge index.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        (0..self.vertex_count() as VertexId)
            .flat_map(move |u| self.out_adj.edges(u).map(move |(v, p)| (u, v, p)))
    }

    /// Index of edge `(u, v)` in out-CSR order.
    pub fn edge_index(&self, u: VertexId, v: VertexId) -> Option<usize> {
        if u as usize >= self.vertex_count() {
            return None;
        }
        let r = self.out_adj.range(u);
        self.out_adj.neighbors[r.clone()]
            .binary_search(&v)
            .ok()
            .map(|i| r.start + i)
    }

    pub fn probability(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.edge_index(u, v).map(|e| self.out_adj.probs[e])
    }

    /// Largest edge probability, 0 for an edgeless graph.
    pub fn max_probability(&self) -> f64 {
        self.out_adj.probs.iter().copied().fold(0.0, f64::max)
    }

    #[inline]
    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn id_of(&self, label: u64) -> Option<VertexId> {
        self.label_index.get(&label).copied()
    }

    pub fn probability_source(&self) -> ProbabilitySource {
        self.source
    }

    /// Same topology and labels with new probabilities given in out-CSR order.
    pub fn with_probabilities(&self, probs: Vec<f64>, source: ProbabilitySource) -> Result<Self> {
        if probs.len() != self.edge_count() {
            return Err(Error::invalid(format!(
                "expected {} probabilities, got {}",
                self.edge_count(),
                probs.len()
            )));
        }
        for &p in &probs {
            check_probability(p)?;
        }
        let out_adj = Adjacency {
            offsets: self.out_adj.offsets.clone(),
            neighbors: self.out_adj.neighbors.clone(),
            probs,
        };
        let in_adj = transpose(&out_adj, self.vertex_count());
        Ok(InfluenceGraph {
            out_adj,
            in_adj,
            labels: self.labels.clone(),
            label_index: self.label_index.clone(),
            source,
        })
    }

    /// Subgraph on the same vertex set keeping the edges accepted by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(VertexId, VertexId) -> bool) -> Self {
        let n = self.vertex_count();
        let mut out_adj = Adjacency::empty(n);
        for u in 0..n as VertexId {
            for (v, p) in self.out_adj.edges(u) {
                if keep(u, v) {
                    out_adj.neighbors.push(v);
                    out_adj.probs.push(p);
                }
            }
            out_adj.offsets[u as usize + 1] = out_adj.neighbors.len();
        }
        let in_adj = transpose(&out_adj, n);
        InfluenceGraph {
            out_adj,
            in_adj,
            labels: self.labels.clone(),
            label_index: self.label_index.clone(),
            source: self.source,
        }
    }

    /// The graph with every out-edge of the given vertices removed.
    pub fn without_out_edges(&self, vertices: &[VertexId]) -> Self {
        let mut removed = vec![false; self.vertex_count()];
        for &v in vertices {
            removed[v as usize] = true;
        }
        self.filter_edges(|u, _| !removed[u as usize])
    }

    /// The graph with every edge incident to `w` removed.
    pub fn without_incident_edges(&self, w: VertexId) -> Self {
        self.filter_edges(|u, v| u != w && v != w)
    }

    /// Heap bytes of both CSR directions (labels and the label index excluded).
    pub fn csr_bytes(&self) -> usize {
        self.out_adj.heap_bytes() + self.in_adj.heap_bytes()
    }

    pub fn summary(&self) -> GraphSummary {
        let n = self.vertex_count();
        GraphSummary {
            n,
            m: self.edge_count(),
            avg_out_degree: if n == 0 {
                0.0
            } else {
                self.edge_count() as f64 / n as f64
            },
            probability_model: self.source.to_string(),
        }
    }
}

fn transpose(out_adj: &Adjacency, n: usize) -> Adjacency {
    let m = out_adj.neighbors.len();
    let mut offsets = vec![0usize; n + 1];
    for &v in &out_adj.neighbors {
        offsets[v as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut neighbors = vec![0 as VertexId; m];
    let mut probs = vec![0.0; m];
    // Sources are visited in ascending order, so every in-list comes out sorted.
    for u in 0..n {
        for e in out_adj.offsets[u]..out_adj.offsets[u + 1] {
            let v = out_adj.neighbors[e] as usize;
            let slot = cursor[v];
            neighbors[slot] = u as VertexId;
            probs[slot] = out_adj.probs[e];
            cursor[v] += 1;
        }
    }
    Adjacency {
        offsets,
        neighbors,
        probs,
    }
}

/// Incremental construction from labeled edges.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<u64>,
    index: HashMap<u64, VertexId>,
    edges: Vec<(VertexId, VertexId, f64)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, label: u64) -> VertexId {
        let next = self.labels.len() as VertexId;
        *self.index.entry(label).or_insert_with(|| {
            self.labels.push(label);
            next
        })
    }

    pub fn add_edge(&mut self, u: u64, v: u64, p: f64) {
        let u = self.intern(u);
        let v = self.intern(v);
        self.edges.push((u, v, p));
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn build(self, source: ProbabilitySource) -> Result<InfluenceGraph> {
        InfluenceGraph::from_parts(self.labels, self.edges, source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> InfluenceGraph {
        InfluenceGraph::from_labeled_edges(&[(10, 20, 0.5), (20, 30, 0.4)]).unwrap()
    }

    #[test]
    fn dense_ids_follow_first_appearance() {
        let g = InfluenceGraph::from_labeled_edges(&[(7, 3, 0.5), (3, 9, 0.5), (9, 7, 0.5)]).unwrap();
        assert_eq!(g.labels(), &[7, 3, 9]);
        assert_eq!(g.id_of(9), Some(2));
        assert_eq!(g.id_of(4), None);
    }

    #[test]
    fn adjacency_sorted_and_transposed() {
        let g = InfluenceGraph::from_dense_edges(
            4,
            &[(0, 3, 0.1), (0, 1, 0.2), (2, 1, 0.3), (3, 1, 0.4)],
        )
        .unwrap();
        assert_eq!(g.out_adjacency().neighbors(0), &[1, 3]);
        assert_eq!(g.in_adjacency().neighbors(1), &[0, 2, 3]);
        assert_eq!(g.in_adjacency().probs(1), &[0.2, 0.3, 0.4]);
        assert_eq!(g.in_degree(1), 3);
        assert_eq!(g.probability(2, 1), Some(0.3));
        assert_eq!(g.probability(1, 2), None);
        g.validate().unwrap();
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(
            InfluenceGraph::from_labeled_edges(&[(1, 1, 0.5)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            InfluenceGraph::from_labeled_edges(&[(1, 2, 0.5), (1, 2, 0.3)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            InfluenceGraph::from_labeled_edges(&[(1, 2, 0.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            InfluenceGraph::from_labeled_edges(&[(1, 2, 1.5)]),
            Err(Error::Domain(_))
        ));
        assert!(InfluenceGraph::from_labeled_edges(&[(1, 2, 1.0)]).is_ok());
    }

    #[test]
    fn filtering_keeps_vertex_set() {
        let g = chain();
        let h = g.without_out_edges(&[1]);
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.in_degree(2), 0);
        h.validate().unwrap();
        let h = g.without_incident_edges(1);
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn summary_reports_model() {
        let s = chain().summary();
        assert_eq!((s.n, s.m), (3, 2));
        assert!((s.avg_out_degree - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.probability_model, "explicit");
    }
}
