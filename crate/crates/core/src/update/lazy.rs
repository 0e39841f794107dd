use std::collections::{BTreeMap, HashMap};
use std::mem::size_of;

use serde::Serialize;

use super::{argmax_or_first, coefficient, prefix_sums, INVARIANT_TOLERANCE};
use crate::error::Result;
use crate::graph::{InfluenceGraph, VertexId};
use crate::score::{score_est, ScoreVectors, WalkColumnSet, WalkWorkspace};

/// Per-iteration data kept for the whole run.
#[derive(Debug, Clone)]
struct IterationRecord {
    seed: VertexId,
    c: Vec<f64>,
    g: Vec<f64>,
    /// `A^j[*, w]` for `j = 1..=L-1`; `A^L` never enters an update.
    columns: WalkColumnSet,
}

/// Statistics of one lazy iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LazyIteration {
    pub iteration: usize,
    pub seed: VertexId,
    /// `F^(t)[w]` at selection time.
    pub score: f64,
    /// Set when every remaining score was zero and the seed was taken by id.
    pub fallback: bool,
    /// Vertices whose score advanced by at least one step.
    pub updated: usize,
    /// Vertices skipped because their stale score could not beat the bound.
    pub skipped: usize,
    /// Per-iteration adjustments applied across all vertices.
    pub steps: usize,
    /// Vertices that stopped before reaching the current iteration.
    pub early_stops: usize,
    /// Vertices that reach the seed within `L - 1` hops.
    pub column_vertices: usize,
}

/// Counts of invariant checks that failed beyond roundoff.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Violations {
    /// Some `c_x > 0`.
    pub coefficient_sign: usize,
    /// Some `g_{x+1} > g_x`.
    pub prefix_increase: usize,
    /// A score rose between two materializations.
    pub score_increase: usize,
    /// A score went negative.
    pub negative_score: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.coefficient_sign + self.prefix_increase + self.score_increase + self.negative_score
    }
}

/// JSON-friendly snapshot of a [`LazyState`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LazyDiagnostics {
    pub iteration: usize,
    pub seeds: Vec<VertexId>,
    /// Non-seed vertices by timestamp.
    pub timestamp_histogram: BTreeMap<u32, usize>,
    pub f_cache_entries: usize,
    pub df_cache_entries: usize,
    pub column_vertices: usize,
    pub total_updated: usize,
    pub total_skipped: usize,
    pub total_steps: usize,
    pub aux_bytes: usize,
    pub peak_aux_bytes: usize,
    pub violations: Violations,
}

/// Lazy score updating.
///
/// `current[v]` holds `F^(t_v)[v]`. An iteration picks the maximum among the
/// vertices with `t_v = t`, records `c`, `g` and the walk columns of the new
/// seed, and then sweeps the other vertices in ascending id order, advancing
/// each one step at a time only while it can still beat the running bound
/// `f` on the next maximum. Since scores never increase, a vertex whose stale
/// score is already `<= f` cannot be the next maximum.
#[derive(Debug, Clone)]
pub struct LazyState {
    max_walk_length: usize,
    /// Index `t` of the next iteration, starting at 1.
    iteration: usize,
    initial: ScoreVectors,
    current: Vec<f64>,
    timestamps: Vec<u32>,
    is_seed: Vec<bool>,
    seeds: Vec<VertexId>,
    history: Vec<IterationRecord>,
    /// `(j, v) -> (t, F_j^(t)[v])`, newest only.
    f_cache: HashMap<(u32, VertexId), (u32, f64)>,
    /// `(j, v) -> (t, dF_j^(t)[v])`, newest only.
    df_cache: HashMap<(u32, VertexId), (u32, f64)>,
    lower_bound: f64,
    workspace: WalkWorkspace,
    violations: Violations,
    totals: (usize, usize, usize),
    peak_aux: usize,
}

impl LazyState {
    pub fn new(graph: &InfluenceGraph, max_walk_length: usize) -> Result<Self> {
        Ok(Self::from_scores(score_est(graph, max_walk_length)?))
    }

    pub fn from_scores(initial: ScoreVectors) -> Self {
        let n = initial.vertex_count();
        let mut state = LazyState {
            max_walk_length: initial.max_walk_length(),
            iteration: 1,
            current: initial.total().to_vec(),
            initial,
            timestamps: vec![1; n],
            is_seed: vec![false; n],
            seeds: Vec::new(),
            history: Vec::new(),
            f_cache: HashMap::new(),
            df_cache: HashMap::new(),
            lower_bound: 0.0,
            workspace: WalkWorkspace::new(n),
            violations: Violations::default(),
            totals: (0, 0, 0),
            peak_aux: 0,
        };
        state.peak_aux = state.aux_bytes();
        state
    }

    pub fn max_walk_length(&self) -> usize {
        self.max_walk_length
    }

    /// Index of the next iteration; `seeds().len() + 1`.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn seeds(&self) -> &[VertexId] {
        &self.seeds
    }

    pub fn is_seed(&self, v: VertexId) -> bool {
        self.is_seed[v as usize]
    }

    pub fn initial_scores(&self) -> &ScoreVectors {
        &self.initial
    }

    /// `F^(t_v)[v]`, possibly stale.
    pub fn current_score(&self, v: VertexId) -> f64 {
        self.current[v as usize]
    }

    pub fn current_scores(&self) -> &[f64] {
        &self.current
    }

    pub fn timestamp(&self, v: VertexId) -> u32 {
        self.timestamps[v as usize]
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    /// `c_0 ..= c_L` of iteration `t`.
    pub fn coeffs_c(&self, t: usize) -> &[f64] {
        &self.history[t - 1].c
    }

    /// `g_0 ..= g_L` of iteration `t`.
    pub fn coeffs_g(&self, t: usize) -> &[f64] {
        &self.history[t - 1].g
    }

    /// Walk columns of iteration `t`'s seed, lengths `1..=L-1`.
    pub fn seed_columns(&self, t: usize) -> &WalkColumnSet {
        &self.history[t - 1].columns
    }

    pub fn violations(&self) -> Violations {
        self.violations
    }

    /// `F_j^(t)[v]` for a vertex that is not a seed before iteration `t`.
    pub fn lazy_f(&mut self, t: usize, j: usize, v: VertexId) -> f64 {
        assert!(t >= 1 && t <= self.iteration, "iteration {t} not reached");
        if j == 0 {
            return 1.0;
        }
        let key = (j as u32, v);
        let cached = self.f_cache.get(&key).copied();
        let (mut y, mut val) = match cached {
            Some((ts, x)) if ts as usize <= t => (ts as usize, x),
            _ => (1, self.initial.hop(j)[v as usize]),
        };
        while y < t {
            val += self.lazy_df(y, j, v);
            y += 1;
        }
        if cached.map_or(true, |(ts, _)| (ts as usize) < t) {
            self.f_cache.insert(key, (t as u32, val));
        }
        val
    }

    /// `dF_j^(y)[v] = sum_{x=0}^{j-2} c_x^(y) A^{j-x-1}[v, w^(y)]`.
    pub fn lazy_df(&mut self, y: usize, j: usize, v: VertexId) -> f64 {
        if j <= 1 {
            return 0.0;
        }
        let key = (j as u32, v);
        let cached = self.df_cache.get(&key).copied();
        if let Some((ts, x)) = cached {
            if ts as usize == y {
                return x;
            }
        }
        let rec = &self.history[y - 1];
        let Some(row) = rec.columns.row(v) else {
            return 0.0;
        };
        debug_assert!(rec.c.len() >= j - 1, "c_{} of iteration {y} not ready", j - 2);
        let val: f64 = (0..=j - 2).map(|x| rec.c[x] * row[j - x - 2]).sum();
        if cached.map_or(true, |(ts, _)| (ts as usize) < y) {
            self.df_cache.insert(key, (y as u32, val));
        }
        val
    }

    /// Recomputes `c_x` for the seed of the latest iteration.
    pub fn compute_delta_coeff(&mut self, graph: &InfluenceGraph, x: usize) -> f64 {
        let t = self.history.len();
        assert!(t >= 1, "no seed selected yet");
        self.coefficient_at(graph, t, x)
    }

    fn coefficient_at(&mut self, graph: &InfluenceGraph, t: usize, x: usize) -> f64 {
        let w = self.history[t - 1].seed;
        let is_seed = std::mem::take(&mut self.is_seed);
        let c = coefficient(graph, w, x, &is_seed, |v| {
            self.lazy_df(t, x, v) + self.lazy_f(t, x, v)
        });
        self.is_seed = is_seed;
        c
    }

    /// Candidate for iteration `t`: the best fully updated vertex.
    fn select(&self) -> Option<(VertexId, f64, bool)> {
        let t = self.iteration as u32;
        argmax_or_first(self.current.len(), |u| {
            let i = u as usize;
            if self.is_seed[i] {
                None
            } else if self.timestamps[i] == t {
                Some(self.current[i])
            } else {
                Some(0.0)
            }
        })
    }

    /// `sum_{j=1}^{L-1} g^(y)_{L-j-1} A^j[u, w^(y)]`.
    #[inline]
    fn adjustment(&self, y: usize, u: VertexId) -> f64 {
        let rec = &self.history[y - 1];
        let l = self.max_walk_length;
        match rec.columns.row(u) {
            None => 0.0,
            Some(row) => (1..l).map(|j| rec.g[l - j - 1] * row[j - 1]).sum(),
        }
    }

    /// Runs one iteration: selects the next seed and lazily updates the rest.
    /// Returns `None` once every vertex is a seed.
    pub fn apply_lazy_update(&mut self, graph: &InfluenceGraph) -> Option<LazyIteration> {
        let t = self.iteration;
        let l = self.max_walk_length;
        let (w, score, fallback) = self.select()?;

        let columns = if l > 1 {
            self.workspace.walk_columns(graph, l - 1, w, &self.is_seed)
        } else {
            WalkColumnSet::empty(w, 0)
        };
        let column_vertices = columns.len();
        self.history.push(IterationRecord {
            seed: w,
            c: Vec::with_capacity(l + 1),
            g: Vec::new(),
            columns,
        });
        self.is_seed[w as usize] = true;
        self.seeds.push(w);

        for x in 0..=l {
            let c = self.coefficient_at(graph, t, x);
            if c > INVARIANT_TOLERANCE {
                self.violations.coefficient_sign += 1;
            }
            self.history[t - 1].c.push(c);
        }
        let g = prefix_sums(&self.history[t - 1].c);
        if g.windows(2).any(|p| p[1] > p[0] + INVARIANT_TOLERANCE) {
            self.violations.prefix_increase += 1;
        }
        self.history[t - 1].g = g;

        let mut stats = LazyIteration {
            iteration: t,
            seed: w,
            score,
            fallback,
            updated: 0,
            skipped: 0,
            steps: 0,
            early_stops: 0,
            column_vertices,
        };
        self.lower_bound = 0.0;
        let target = t as u32 + 1;
        for u in 0..self.current.len() as VertexId {
            let i = u as usize;
            if self.is_seed[i] {
                continue;
            }
            let f = self.lower_bound;
            let mut val = self.current[i];
            if val <= f {
                stats.skipped += 1;
                continue;
            }
            let mut y = self.timestamps[i];
            let advanced = y < target;
            while y < target {
                let next = val + self.adjustment(y as usize, u);
                if next > val + INVARIANT_TOLERANCE {
                    self.violations.score_increase += 1;
                }
                if next < -INVARIANT_TOLERANCE {
                    self.violations.negative_score += 1;
                }
                val = next;
                y += 1;
                stats.steps += 1;
                if val <= f {
                    break;
                }
            }
            self.current[i] = val;
            self.timestamps[i] = y;
            if advanced {
                stats.updated += 1;
            }
            if y < target {
                stats.early_stops += 1;
            } else if val > f {
                self.lower_bound = val;
            }
        }
        self.iteration += 1;
        self.totals.0 += stats.updated;
        self.totals.1 += stats.skipped;
        self.totals.2 += stats.steps;
        self.peak_aux = self.peak_aux.max(self.aux_bytes());
        Some(stats)
    }

    /// Brings every non-seed vertex to the current iteration.
    pub fn force_update_all(&mut self) {
        let target = self.iteration as u32;
        for u in 0..self.current.len() as VertexId {
            let i = u as usize;
            if self.is_seed[i] {
                continue;
            }
            let mut y = self.timestamps[i];
            while y < target {
                self.current[i] += self.adjustment(y as usize, u);
                y += 1;
            }
            self.timestamps[i] = target;
        }
    }

    /// `F_j` for `j = 1..=L` at the current iteration through [`Self::lazy_f`].
    /// Seed entries are 0.
    pub fn materialize_per_hop(&mut self) -> Vec<Vec<f64>> {
        let n = self.current.len();
        let t = self.iteration;
        (1..=self.max_walk_length)
            .map(|j| {
                (0..n as VertexId)
                    .map(|v| if self.is_seed[v as usize] { 0.0 } else { self.lazy_f(t, j, v) })
                    .collect()
            })
            .collect()
    }

    /// Bytes held by everything except the graph.
    pub fn aux_bytes(&self) -> usize {
        let cache_entry = size_of::<((u32, VertexId), (u32, f64))>() + 1;
        let history: usize = self
            .history
            .iter()
            .map(|r| {
                size_of::<IterationRecord>()
                    + (r.c.capacity() + r.g.capacity()) * size_of::<f64>()
                    + r.columns.heap_bytes()
            })
            .sum();
        self.initial.heap_bytes()
            + self.current.capacity() * size_of::<f64>()
            + self.timestamps.capacity() * size_of::<u32>()
            + self.is_seed.capacity()
            + self.seeds.capacity() * size_of::<VertexId>()
            + self.history.capacity().saturating_sub(self.history.len())
                * size_of::<IterationRecord>()
            + history
            + (self.f_cache.capacity() + self.df_cache.capacity()) * cache_entry
            + self.workspace.heap_bytes()
    }

    /// Largest [`Self::aux_bytes`] observed after any iteration.
    pub fn peak_aux_bytes(&self) -> usize {
        self.peak_aux
    }

    pub fn diagnostics(&self) -> LazyDiagnostics {
        let mut timestamp_histogram = BTreeMap::new();
        for (v, &ts) in self.timestamps.iter().enumerate() {
            if !self.is_seed[v] {
                *timestamp_histogram.entry(ts).or_insert(0) += 1;
            }
        }
        LazyDiagnostics {
            iteration: self.iteration,
            seeds: self.seeds.clone(),
            timestamp_histogram,
            f_cache_entries: self.f_cache.len(),
            df_cache_entries: self.df_cache.len(),
            column_vertices: self.history.iter().map(|r| r.columns.len()).sum(),
            total_updated: self.totals.0,
            total_skipped: self.totals.1,
            total_steps: self.totals.2,
            aux_bytes: self.aux_bytes(),
            peak_aux_bytes: self.peak_aux,
            violations: self.violations,
        }
    }
}
