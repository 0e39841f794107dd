use serde::Serialize;

use super::{argmax_or_first, coefficient};
use crate::error::Result;
use crate::graph::{InfluenceGraph, VertexId};
use crate::score::{score_est, ScoreVectors, WalkColumnSet, WalkWorkspace};

/// Outcome of one full update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasicStep {
    pub seed: VertexId,
    /// `F^(t)[w]` at selection time.
    pub score: f64,
    /// `c_0 ..= c_L`.
    pub coeffs: Vec<f64>,
    /// Vertices whose scores were corrected.
    pub touched: usize,
    /// Set when every remaining score was zero.
    pub fallback: bool,
}

/// Keeps every per-hop vector current after each selection.
#[derive(Debug, Clone)]
pub struct BasicUpdater {
    scores: ScoreVectors,
    is_seed: Vec<bool>,
    seeds: Vec<VertexId>,
    workspace: WalkWorkspace,
}

impl BasicUpdater {
    pub fn new(graph: &InfluenceGraph, max_walk_length: usize) -> Result<Self> {
        Ok(Self::from_scores(score_est(graph, max_walk_length)?))
    }

    pub fn from_scores(scores: ScoreVectors) -> Self {
        let n = scores.vertex_count();
        BasicUpdater {
            scores,
            is_seed: vec![false; n],
            seeds: Vec::new(),
            workspace: WalkWorkspace::new(n),
        }
    }

    /// Current scores. Entries of seeds are stale.
    pub fn scores(&self) -> &ScoreVectors {
        &self.scores
    }

    pub fn seeds(&self) -> &[VertexId] {
        &self.seeds
    }

    pub fn is_seed(&self, v: VertexId) -> bool {
        self.is_seed[v as usize]
    }

    pub fn argmax(&self) -> Option<VertexId> {
        self.pick().map(|(u, _, _)| u)
    }

    fn pick(&self) -> Option<(VertexId, f64, bool)> {
        let total = self.scores.total();
        argmax_or_first(total.len(), |u| {
            (!self.is_seed[u as usize]).then(|| total[u as usize])
        })
    }

    /// Selects the current maximum and applies its update.
    pub fn step(&mut self, graph: &InfluenceGraph) -> Option<BasicStep> {
        let (w, _, fallback) = self.pick()?;
        let mut step = self.apply_basic_update(graph, w);
        step.fallback = fallback;
        Some(step)
    }

    /// Makes `w` a seed and brings every other score to the residual graph
    /// without `w`'s out-edges.
    pub fn apply_basic_update(&mut self, graph: &InfluenceGraph, w: VertexId) -> BasicStep {
        assert!(!self.is_seed[w as usize], "vertex {w} is already a seed");
        let l = self.scores.max_walk_length();
        let score = self.scores.total()[w as usize];
        let columns = if l > 1 {
            self.workspace.walk_columns(graph, l - 1, w, &self.is_seed)
        } else {
            WalkColumnSet::empty(w, 0)
        };

        let mut c = vec![0.0; l + 1];
        c[0] = coefficient(graph, w, 0, &self.is_seed, |_| 1.0);
        let hop1 = self.scores.hop(1);
        c[1] = coefficient(graph, w, 1, &self.is_seed, |v| hop1[v as usize]);
        for i in 2..=l {
            let hop = self.scores.hop_mut(i);
            for &u in columns.vertices() {
                if u == w {
                    continue;
                }
                let row = columns.row(u).unwrap();
                let delta: f64 = (1..i).map(|j| c[i - j - 1] * row[j - 1]).sum();
                hop[u as usize] += delta;
            }
            let hop = self.scores.hop(i);
            c[i] = coefficient(graph, w, i, &self.is_seed, |v| hop[v as usize]);
        }

        let mut touched = 0;
        for &u in columns.vertices() {
            if u == w {
                continue;
            }
            let total: f64 = (1..=l).fold(0.0, |acc, i| acc + self.scores.hop(i)[u as usize]);
            self.scores.total_mut()[u as usize] = total;
            touched += 1;
        }

        self.is_seed[w as usize] = true;
        self.seeds.push(w);
        BasicStep {
            seed: w,
            score,
            coeffs: c,
            touched,
            fallback: false,
        }
    }
}
