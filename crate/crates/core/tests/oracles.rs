//! Library results against brute-force references computed here.

use quickim::graph::{generate, InfluenceGraph};
use quickim::oracle::{
    exact_influence_report, exact_pair_influence_via, exact_seed_influence, removal_gap, walk_score,
    InfluenceRoute,
};
use quickim::score::{score_est, walk_pro};
use quickim::select::{exact_greedy, mc_greedy};
use quickim::update::BasicUpdater;
use quickim::VertexId;

/// Sum of walk probabilities from `u` to `target` with exactly `left` more
/// steps, never stepping onto an excluded vertex.
fn walks_to(g: &InfluenceGraph, u: VertexId, target: VertexId, left: usize, excluded: &[bool]) -> f64 {
    if left == 0 {
        return if u == target { 1.0 } else { 0.0 };
    }
    g.out_edges(u)
        .filter(|&(v, _)| v == target || !excluded[v as usize])
        .map(|(v, p)| p * walks_to(g, v, target, left - 1, excluded))
        .sum()
}

#[test]
fn walk_columns_match_enumeration_on_thirty_vertices() {
    let g = generate::erdos_renyi(30, 90, 4, 0.4);
    let mut excluded = vec![false; 30];
    excluded[7] = true;
    excluded[19] = true;
    for w in [0u32, 3, 12, 25] {
        for ex in [&vec![false; 30], &excluded] {
            let cols = walk_pro(&g, 3, w, ex);
            for j in 1..=3 {
                for u in 0..30u32 {
                    let expected = if ex[u as usize] { 0.0 } else { walks_to(&g, u, w, j, ex) };
                    assert!((cols.get(j, u) - expected).abs() <= 1e-12, "w={w} j={j} u={u}");
                }
            }
        }
    }
}

#[test]
fn scores_match_walk_enumeration_on_thirty_vertices() {
    let g = generate::erdos_renyi(30, 90, 8, 0.4);
    let s = score_est(&g, 3).unwrap();
    for u in 0..30u32 {
        assert!((s.total()[u as usize] - walk_score(&g, u, 3).unwrap().total).abs() <= 1e-10);
    }
}

#[test]
fn influence_routes_agree_on_an_eight_edge_graph() {
    let g = generate::erdos_renyi(5, 8, 21, 0.45);
    for u in 0..5 {
        for v in 0..5 {
            let ie = exact_pair_influence_via(&g, u, v, Some(3), InfluenceRoute::InclusionExclusion).unwrap();
            let mw = exact_pair_influence_via(&g, u, v, Some(3), InfluenceRoute::MultiWorlds).unwrap();
            assert!((ie - mw).abs() <= 1e-10, "({u}, {v}): {ie} vs {mw}");
        }
    }
}

#[test]
fn vertex_gap_bound_on_a_ten_edge_graph() {
    let g = generate::erdos_renyi(6, 10, 13, 0.5);
    for v in exact_influence_report(&g, 3).unwrap().vertices {
        assert!(v.gap >= -1e-12 && v.gap <= v.gap_bound + 1e-12, "{v:?}");
    }
}

#[test]
fn removal_influence_gap_is_a_probability_on_an_eight_edge_graph() {
    let g = generate::erdos_renyi(5, 8, 2, 0.6);
    for w in 0..5 {
        let r = removal_gap(&g, w, 3).unwrap();
        assert!(r.influence_bound_holds());
        for row in &r.rows {
            // The score gap is exactly the walk mass into w that G2 keeps.
            assert!((row.score_gap - row.score_to_seed).abs() <= 1e-12);
            assert!((row.influence_gap - row.influence_to_seed).abs() <= 1e-12);
        }
    }
}

#[test]
fn basic_update_after_three_seeds_on_thirty_vertices() {
    let g = generate::erdos_renyi(30, 100, 6, 0.5);
    let mut up = BasicUpdater::new(&g, 3).unwrap();
    for _ in 0..3 {
        up.step(&g).unwrap();
    }
    let fresh = score_est(&g.without_out_edges(up.seeds()), 3).unwrap();
    for u in 0..30u32 {
        if !up.is_seed(u) {
            assert!((up.scores().total()[u as usize] - fresh.total()[u as usize]).abs() <= 1e-9);
        }
    }
}

#[test]
fn mc_greedy_tracks_exact_greedy() {
    for seed in 0..6 {
        let g = generate::erdos_renyi(7, 15, seed, 0.4);
        let exact = exact_greedy(&g, 2).unwrap();
        let mc = mc_greedy(&g, 2, 100_000, seed).unwrap();
        let e = exact_seed_influence(&g, &exact.seed_ids).unwrap();
        let m = exact_seed_influence(&g, &mc.seed_ids).unwrap();
        assert!(m >= 0.98 * e, "seed {seed}: {m} vs {e}");
    }
}
