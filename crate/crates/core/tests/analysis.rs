mod common;

use std::collections::BTreeMap;

use common::*;
use ideadiv::analysis::{
    bootstrap_compare, bootstrap_units, centroid, fit_fixation, first_idea_diversity, s_between, BootstrapConfig, Metric,
};
use ideadiv::gateway::EmbeddingVector;
use ideadiv::metrics::diversity_scores;
use ideadiv::{IdeaLabel, Session};
use proptest::prelude::*;

fn groups(seed: u64, per_condition: usize) -> BTreeMap<String, Vec<Session>> {
    let mut r = ideadiv::rng::stream(seed, &[]);
    ["a", "b"]
        .iter()
        .map(|c| {
            let sessions = (0..per_condition)
                .map(|i| {
                    let labels: Vec<IdeaLabel> = (0..10)
                        .map(|_| {
                            use rand::Rng;
                            label([r.random_range(0..4), r.random_range(0..4), r.random_range(0..5)])
                        })
                        .collect();
                    session_with(&format!("{c}{i}"), c, &labels)
                })
                .collect();
            (c.to_string(), sessions)
        })
        .collect()
}

/// Every size-`k` subset of `0..n`.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut with: Vec<Vec<usize>> = subsets(n - 1, k - 1);
    for s in &mut with {
        s.push(n - 1);
    }
    with.extend(subsets(n - 1, k));
    with
}

fn exhaustive_mean(sessions: &[Session], k: usize, metric: Metric) -> f64 {
    let all = subsets(sessions.len(), k);
    let total: f64 = all
        .iter()
        .map(|idx| {
            let pooled: Vec<&IdeaLabel> =
                idx.iter().flat_map(|&i| sessions[i].ideas.iter().map(|x| x.label.as_ref().unwrap())).collect();
            let s = diversity_scores(&pooled).unwrap();
            match metric {
                Metric::TCat => s.t_cat as f64,
                Metric::TComb => s.t_comb as f64,
                Metric::DMean => s.d_mean.unwrap(),
            }
        })
        .sum();
    total / all.len() as f64
}

#[test]
fn bootstrap_approaches_exhaustive_mean() {
    let g = groups(1, 5);
    let cfg = BootstrapConfig { group_size: 2, iterations: 4000, rng_seed: 9, replacement: false };
    for metric in Metric::ALL {
        let cmp = bootstrap_compare(&g, metric, &cfg).unwrap();
        for (name, sessions) in &g {
            let s = cmp.condition(name).unwrap();
            let target = exhaustive_mean(sessions, 2, metric);
            let tol = 3.0 * s.se / (cfg.iterations as f64).sqrt();
            assert!((s.mean - target).abs() <= tol, "{metric} {name}: {} vs {target} (tol {tol})", s.mean);
        }
    }
}

#[test]
fn bootstrap_with_replacement_matches_ordered_enumeration() {
    let pops: BTreeMap<String, Vec<f64>> = [("x".to_string(), vec![1.0, 4.0, 9.0])].into();
    let cfg = BootstrapConfig { group_size: 2, iterations: 6000, rng_seed: 2, replacement: true };
    let cmp = bootstrap_units(&pops, &cfg, "max", "units", |g| Ok(g.iter().map(|x| **x).fold(0.0, f64::max))).unwrap();
    // max over 9 ordered pairs: 1 once, 4 three times, 9 five times
    let target = (1.0 + 3.0 * 4.0 + 5.0 * 9.0) / 9.0;
    let s = &cmp.conditions[0];
    assert!((s.mean - target).abs() <= 3.0 * s.se / (cfg.iterations as f64).sqrt());
}

#[test]
fn bootstrap_is_deterministic_and_seed_sensitive() {
    let g = groups(2, 6);
    let cfg = BootstrapConfig { group_size: 3, iterations: 50, rng_seed: 1, replacement: false };
    let a = serde_json::to_string(&bootstrap_compare(&g, Metric::TComb, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&bootstrap_compare(&g, Metric::TComb, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = BootstrapConfig { rng_seed: 2, ..cfg };
    let c = serde_json::to_string(&bootstrap_compare(&g, Metric::TComb, &other).unwrap()).unwrap();
    assert_ne!(a, c);
}

#[test]
fn condition_results_do_not_depend_on_other_conditions() {
    let g = groups(3, 6);
    let cfg = BootstrapConfig { group_size: 3, iterations: 30, rng_seed: 4, replacement: false };
    let both = bootstrap_compare(&g, Metric::TCat, &cfg).unwrap();
    let only_a: BTreeMap<_, _> = g.iter().filter(|(k, _)| *k == "a").map(|(k, v)| (k.clone(), v.clone())).collect();
    let alone = bootstrap_compare(&only_a, Metric::TCat, &cfg).unwrap();
    assert_eq!(both.condition("a"), alone.condition("a"));
}

#[test]
fn groups_larger_than_population_are_rejected() {
    let g = groups(4, 3);
    let cfg = BootstrapConfig { group_size: 4, ..BootstrapConfig::default() };
    assert!(bootstrap_compare(&g, Metric::TCat, &cfg).is_err());
    assert!(first_idea_diversity(&g, Metric::TCat, &cfg).is_err());
}

#[test]
fn fixation_fit_is_deterministic() {
    let g = groups(5, 8);
    assert_eq!(fit_fixation(&g["a"]).unwrap(), fit_fixation(&g["a"]).unwrap());
}

fn point_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn s_between_is_translation_invariant_and_scales_linearly(
        points in (1usize..6).prop_flat_map(|d| (prop::collection::vec(point_strategy(d), 2..8), point_strategy(d))),
        scale in 0.01f64..100.0,
    ) {
        let (centroids, shift) = points;
        let refs: Vec<&[f64]> = centroids.iter().map(Vec::as_slice).collect();
        let base = s_between(&refs).unwrap();
        let moved: Vec<Vec<f64>> = centroids.iter().map(|c| c.iter().zip(&shift).map(|(x, s)| x + s).collect()).collect();
        let scaled: Vec<Vec<f64>> = centroids.iter().map(|c| c.iter().map(|x| x * scale).collect()).collect();
        let m: Vec<&[f64]> = moved.iter().map(Vec::as_slice).collect();
        let s: Vec<&[f64]> = scaled.iter().map(Vec::as_slice).collect();
        prop_assert!((s_between(&m).unwrap() - base).abs() <= 1e-9 * (1.0 + base));
        prop_assert!((s_between(&s).unwrap() - scale * base).abs() <= 1e-9 * (1.0 + scale * base));
        prop_assert!(base >= 0.0);
    }

    #[test]
    fn centroid_is_the_componentwise_mean(vs in (1usize..5).prop_flat_map(|d| prop::collection::vec(point_strategy(d), 1..10))) {
        let evs: Vec<EmbeddingVector> = vs.iter().map(|v| EmbeddingVector::new(v.clone(), "t")).collect();
        let c = centroid(&evs).unwrap();
        for d in 0..vs[0].len() {
            let mean = vs.iter().map(|v| v[d]).sum::<f64>() / vs.len() as f64;
            prop_assert!((c.values[d] - mean).abs() <= 1e-9);
        }
    }
}
