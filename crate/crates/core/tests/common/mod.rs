//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use ideadiv::{CategoryScheme, ConditionKind, ConditionSpec, Idea, IdeaLabel, Session, Source};
use proptest::prelude::*;

pub fn scheme() -> CategoryScheme {
    CategoryScheme::builtin()
}

pub fn label(idx: [usize; 3]) -> IdeaLabel {
    scheme().label_from_indices(idx)
}

pub fn index_strategy() -> impl Strategy<Value = [usize; 3]> {
    (0..9usize, 0..9usize, 0..10usize).prop_map(|(a, b, c)| [a, b, c])
}

/// Labels drawn from a narrow corner of the scheme so repeats are common.
pub fn clustered_index_strategy() -> impl Strategy<Value = [usize; 3]> {
    (0..3usize, 0..3usize, 0..3usize).prop_map(|(a, b, c)| [a, b, c])
}

pub fn labels_strategy(max: usize) -> impl Strategy<Value = Vec<IdeaLabel>> {
    prop_oneof![
        prop::collection::vec(index_strategy(), 0..=max),
        prop::collection::vec(clustered_index_strategy(), 0..=max),
    ]
    .prop_map(|v| v.into_iter().map(label).collect())
}

pub fn session_with(id: &str, condition: &str, labels: &[IdeaLabel]) -> Session {
    Session {
        id: id.to_string(),
        source: Source::Llm,
        condition: ConditionSpec::new(condition, ConditionKind::DefaultSequential, "m"),
        ideas: labels
            .iter()
            .enumerate()
            .map(|(i, l)| Idea { label: Some(l.clone()), ..Idea::new(id, i as u32 + 1, format!("idea {i}")) })
            .collect(),
        offtask_ratio: None,
    }
}

/// Distinct `(dimension, category)` pairs by linear search.
pub fn naive_t_cat(labels: &[IdeaLabel]) -> usize {
    let mut seen: Vec<(usize, &str)> = Vec::new();
    for l in labels {
        for (d, c) in l.categories().into_iter().enumerate() {
            if !seen.iter().any(|&(sd, sc)| sd == d && sc == c) {
                seen.push((d, c));
            }
        }
    }
    seen.len()
}

/// Labels not equal to any earlier label.
pub fn naive_t_comb(labels: &[IdeaLabel]) -> usize {
    (0..labels.len())
        .filter(|&i| (0..i).all(|j| labels[j].categories() != labels[i].categories()))
        .count()
}

pub fn naive_distance(a: &IdeaLabel, b: &IdeaLabel) -> u64 {
    (0..3).filter(|&d| a.categories()[d] != b.categories()[d]).count() as u64
}

/// Mean over all unordered pairs, summed pair by pair.
pub fn naive_d_mean(labels: &[IdeaLabel]) -> Option<f64> {
    let n = labels.len();
    if n < 2 {
        return None;
    }
    let mut total = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            total += naive_distance(&labels[i], &labels[j]);
        }
    }
    Some(total as f64 / (n * (n - 1) / 2) as f64)
}
