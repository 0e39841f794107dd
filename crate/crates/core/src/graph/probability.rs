use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{InfluenceGraph, ProbabilitySource};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Weighted cascade: `P(u, v) = 1 / in_degree(v)`.
    Wc,
    /// Trivalency: uniform pick from `{p_t, p_t^2, p_t^3}`.
    Tr,
    /// Uniform constant `p_u`.
    Un,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityModel {
    pub kind: ModelKind,
    pub p_t: f64,
    pub p_u: f64,
    pub rng_seed: u64,
}

impl Default for ProbabilityModel {
    fn default() -> Self {
        ProbabilityModel {
            kind: ModelKind::Wc,
            p_t: 0.1,
            p_u: 0.1,
            rng_seed: 0,
        }
    }
}

impl ProbabilityModel {
    pub fn wc() -> Self {
        Self::default()
    }

    pub fn trivalency(p_t: f64, rng_seed: u64) -> Self {
        ProbabilityModel {
            kind: ModelKind::Tr,
            p_t,
            rng_seed,
            ..Self::default()
        }
    }

    pub fn uniform(p_u: f64) -> Self {
        ProbabilityModel {
            kind: ModelKind::Un,
            p_u,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open = |p: f64| p > 0.0 && p < 1.0;
        if !open(self.p_t) {
            return Err(Error::invalid(format!("p_t = {} must lie in (0, 1)", self.p_t)));
        }
        if !open(self.p_u) {
            return Err(Error::invalid(format!("p_u = {} must lie in (0, 1)", self.p_u)));
        }
        Ok(())
    }
}

impl fmt::Display for ProbabilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::Wc => f.write_str("wc"),
            ModelKind::Tr => write!(f, "tr(p_t={}, rng_seed={})", self.p_t, self.rng_seed),
            ModelKind::Un => write!(f, "un(p_u={})", self.p_u),
        }
    }
}

/// Draws the trivalency level (0, 1 or 2) of edge `e`.
///
/// The generator is positioned by the edge index, so the result depends only
/// on `(rng_seed, e)` and not on the order edges are visited in.
fn trivalency_level(rng: &mut ChaCha8Rng, e: usize) -> u32 {
    rng.set_word_pos(e as u128 * 16);
    rng.gen_range(0..3)
}

/// Returns a copy of `graph` with probabilities drawn from `model`.
pub fn assign_probabilities(graph: &InfluenceGraph, model: &ProbabilityModel) -> Result<InfluenceGraph> {
    model.validate()?;
    let out = graph.out_adjacency();
    let probs: Vec<f64> = match model.kind {
        ModelKind::Wc => out
            .all_neighbors()
            .iter()
            .map(|&v| 1.0 / graph.in_degree(v) as f64)
            .collect(),
        ModelKind::Un => vec![model.p_u; graph.edge_count()],
        ModelKind::Tr => {
            let levels = [model.p_t, model.p_t * model.p_t, model.p_t * model.p_t * model.p_t];
            (0..graph.edge_count())
                .into_par_iter()
                .map_init(
                    || ChaCha8Rng::seed_from_u64(model.rng_seed),
                    |rng, e| levels[trivalency_level(rng, e) as usize],
                )
                .collect()
        }
    };
    graph.with_probabilities(probs, ProbabilitySource::Model(*model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;

    #[test]
    fn wc_star_gets_quarter() {
        let g = InfluenceGraph::from_dense_edges(
            5,
            &[(1, 0, 1.0), (2, 0, 1.0), (3, 0, 1.0), (4, 0, 1.0)],
        )
        .unwrap();
        let g = assign_probabilities(&g, &ProbabilityModel::wc()).unwrap();
        assert!(g.edges().all(|(_, _, p)| p == 0.25));
        assert_eq!(g.summary().probability_model, "wc");
    }

    #[test]
    fn wc_in_probabilities_sum_to_one() {
        let g = generate::erdos_renyi(200, 1500, 3, 1.0);
        let g = assign_probabilities(&g, &ProbabilityModel::wc()).unwrap();
        for v in 0..g.vertex_count() as u32 {
            if g.in_degree(v) > 0 {
                let s: f64 = g.in_edges(v).map(|(_, p)| p).sum();
                assert!((s - 1.0).abs() <= 1e-12, "vertex {v}: {s}");
            }
        }
    }

    #[test]
    fn un_is_constant() {
        let g = generate::erdos_renyi(50, 300, 1, 1.0);
        let g = assign_probabilities(&g, &ProbabilityModel::uniform(0.1)).unwrap();
        assert!(g.edges().all(|(_, _, p)| p == 0.1));
    }

    #[test]
    fn tr_is_deterministic_and_uniform() {
        let g = generate::erdos_renyi(2_000, 10_000, 5, 1.0);
        let model = ProbabilityModel::trivalency(0.1, 42);
        let a = assign_probabilities(&g, &model).unwrap();
        let b = assign_probabilities(&g, &model).unwrap();
        assert_eq!(a, b);

        let levels = [0.1, 0.1 * 0.1, 0.1 * 0.1 * 0.1];
        let mut counts = [0usize; 3];
        for (_, _, p) in a.edges() {
            let i = levels.iter().position(|&l| l == p).expect("value outside {p, p^2, p^3}");
            counts[i] += 1;
        }
        // Each count is Binomial(N, 1/3); accept within three standard deviations.
        let n = g.edge_count() as f64;
        let sigma = (n * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - n / 3.0).abs() <= 3.0 * sigma, "{counts:?}");
        }
        // Pearson chi-square with 2 degrees of freedom, 99.9% quantile 13.82.
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - n / 3.0).powi(2) / (n / 3.0))
            .sum();
        assert!(chi2 < 13.82, "chi2 = {chi2}");

        let other = assign_probabilities(&g, &ProbabilityModel::trivalency(0.1, 43)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        let g = generate::erdos_renyi(5, 5, 1, 1.0);
        assert!(assign_probabilities(&g, &ProbabilityModel::uniform(1.0)).is_err());
        assert!(assign_probabilities(&g, &ProbabilityModel::trivalency(0.0, 1)).is_err());
    }
}
