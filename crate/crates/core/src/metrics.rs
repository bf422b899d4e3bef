//! Category-based diversity metrics.
//!
//! * `t_cat`: distinct categories across all three dimensions. A category is
//!   qualified by its dimension, so the ceiling is the scheme total (28).
//! * `t_comb`: distinct (context, need, form) triples.
//! * `d_mean`: mean over unordered pairs of the number of dimensions on which
//!   two labels differ.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Session;
use crate::scheme::IdeaLabel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no labels")]
    Empty,
    #[error("labels come from different schemes ({0:?} vs {1:?})")]
    SchemeMismatch(String, String),
    #[error("session {session_id:?} idea {index} is unlabeled")]
    Unlabeled { session_id: String, index: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityScores {
    pub t_cat: usize,
    pub t_comb: usize,
    /// `None` for fewer than two labels.
    pub d_mean: Option<f64>,
    pub n_ideas: usize,
}

pub fn pairwise_distance(a: &IdeaLabel, b: &IdeaLabel) -> Result<u8, MetricsError> {
    if a.scheme_version != b.scheme_version {
        return Err(MetricsError::SchemeMismatch(a.scheme_version.clone(), b.scheme_version.clone()));
    }
    Ok(a.categories().iter().zip(b.categories()).filter(|(x, y)| **x != *y).count() as u8)
}

fn check_same_scheme<L: AsRef<IdeaLabel>>(labels: &[L]) -> Result<(), MetricsError> {
    let first = labels.first().ok_or(MetricsError::Empty)?.as_ref();
    for l in labels {
        let l = l.as_ref();
        if l.scheme_version != first.scheme_version {
            return Err(MetricsError::SchemeMismatch(first.scheme_version.clone(), l.scheme_version.clone()));
        }
    }
    Ok(())
}

/// Scores a pooled set of labels.
///
/// `d_mean` uses per-dimension category counts: the number of pairs that
/// differ on a dimension is `C(n,2)` minus the pairs sharing a category.
pub fn diversity_scores<L: AsRef<IdeaLabel>>(labels: &[L]) -> Result<DiversityScores, MetricsError> {
    check_same_scheme(labels)?;
    let n = labels.len();
    let mut cats: HashSet<(usize, &str)> = HashSet::new();
    let mut combs: HashSet<[&str; 3]> = HashSet::new();
    let mut per_dim: [std::collections::HashMap<&str, u64>; 3] = Default::default();
    for l in labels {
        let c = l.as_ref().categories();
        for d in 0..3 {
            cats.insert((d, c[d]));
            *per_dim[d].entry(c[d]).or_default() += 1;
        }
        combs.insert(c);
    }
    let d_mean = (n >= 2).then(|| {
        let pairs = (n as u64) * (n as u64 - 1) / 2;
        let differing: u64 = per_dim
            .iter()
            .map(|counts| pairs - counts.values().map(|&k| k * k.saturating_sub(1) / 2).sum::<u64>())
            .sum();
        differing as f64 / pairs as f64
    });
    Ok(DiversityScores { t_cat: cats.len(), t_comb: combs.len(), d_mean, n_ideas: n })
}

/// Labels of every idea, failing on the first unlabeled one.
pub fn session_labels(session: &Session) -> Result<Vec<&IdeaLabel>, MetricsError> {
    session
        .ideas
        .iter()
        .map(|i| {
            i.label.as_ref().ok_or_else(|| MetricsError::Unlabeled { session_id: session.id.clone(), index: i.index })
        })
        .collect()
}

pub fn session_scores(session: &Session) -> Result<DiversityScores, MetricsError> {
    diversity_scores(&session_labels(session)?)
}

/// Group score from all ideas of all sessions pooled together.
pub fn pooled_scores(sessions: &[&Session]) -> Result<DiversityScores, MetricsError> {
    let mut labels = Vec::new();
    for s in sessions {
        labels.extend(session_labels(s)?);
    }
    diversity_scores(&labels)
}

/// Per-session means of `t_cat`, `t_comb` and `d_mean` (the alternative to
/// pooling).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanScores {
    pub t_cat: f64,
    pub t_comb: f64,
    pub d_mean: Option<f64>,
    pub sessions: usize,
}

pub fn mean_session_scores(sessions: &[&Session]) -> Result<MeanScores, MetricsError> {
    if sessions.is_empty() {
        return Err(MetricsError::Empty);
    }
    let scores = sessions.iter().map(|s| session_scores(s)).collect::<Result<Vec<_>, _>>()?;
    let m = scores.len() as f64;
    let d: Option<Vec<f64>> = scores.iter().map(|s| s.d_mean).collect();
    Ok(MeanScores {
        t_cat: scores.iter().map(|s| s.t_cat as f64).sum::<f64>() / m,
        t_comb: scores.iter().map(|s| s.t_comb as f64).sum::<f64>() / m,
        d_mean: d.map(|d| d.iter().sum::<f64>() / m),
        sessions: scores.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccumulationCurve {
    /// `(idea_index, cumulative unique categories)`
    pub categories: Vec<(u32, usize)>,
    /// `(idea_index, cumulative unique combinations)`
    pub combinations: Vec<(u32, usize)>,
}

impl AccumulationCurve {
    pub fn category_counts(&self) -> Vec<usize> {
        self.categories.iter().map(|p| p.1).collect()
    }

    pub fn combination_counts(&self) -> Vec<usize> {
        self.combinations.iter().map(|p| p.1).collect()
    }
}

/// Cumulative unique categories and combinations after each idea, in order.
pub fn accumulation_curve(session: &Session) -> Result<AccumulationCurve, MetricsError> {
    let labels = session_labels(session)?;
    check_same_scheme(&labels)?;
    let mut cats: HashSet<(usize, &str)> = HashSet::new();
    let mut combs: HashSet<[&str; 3]> = HashSet::new();
    let mut curve = AccumulationCurve { categories: Vec::new(), combinations: Vec::new() };
    for (idea, label) in session.ideas.iter().zip(labels) {
        let c = label.categories();
        for (d, name) in c.iter().enumerate() {
            cats.insert((d, name));
        }
        combs.insert(c);
        curve.categories.push((idea.index, cats.len()));
        curve.combinations.push((idea.index, combs.len()));
    }
    Ok(curve)
}

/// One CSV row per session, for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionMetricRow {
    pub condition: String,
    pub session_id: String,
    pub n_ideas: usize,
    pub t_cat: usize,
    pub t_comb: usize,
    pub d_mean: Option<f64>,
}

pub fn session_metric_rows(sessions: &[Session]) -> Result<Vec<SessionMetricRow>, MetricsError> {
    sessions
        .iter()
        .map(|s| {
            let sc = session_scores(s)?;
            Ok(SessionMetricRow {
                condition: s.condition.name.clone(),
                session_id: s.id.clone(),
                n_ideas: sc.n_ideas,
                t_cat: sc.t_cat,
                t_comb: sc.t_comb,
                d_mean: sc.d_mean,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ConditionKind, ConditionSpec, Idea, Source};
    use crate::scheme::CategoryScheme;

    fn lab(s: &CategoryScheme, a: &str, b: &str, c: &str) -> IdeaLabel {
        s.label([a, b, c]).unwrap()
    }

    fn session_from(labels: Vec<IdeaLabel>) -> Session {
        Session {
            id: "s".into(),
            source: Source::Llm,
            condition: ConditionSpec::new("c", ConditionKind::DefaultSequential, "m"),
            ideas: labels
                .into_iter()
                .enumerate()
                .map(|(i, l)| {
                    let mut idea = Idea::new("s", i as u32 + 1, format!("idea {i}"));
                    idea.label = Some(l);
                    idea
                })
                .collect(),
            offtask_ratio: None,
        }
    }

    #[test]
    fn worked_example_distance_is_two() {
        let s = CategoryScheme::builtin();
        let a = lab(&s, "Cardio & Endurance", "Progress & Mastery", "Subscription / Coaching");
        let b = lab(&s, "Strength & Muscle", "Progress & Mastery", "Smart Equipment");
        assert_eq!(pairwise_distance(&a, &b).unwrap(), 2);
        assert_eq!(pairwise_distance(&a, &a).unwrap(), 0);
        let c = lab(&s, "Strength & Muscle", "Personalization", "Wearable");
        assert_eq!(pairwise_distance(&a, &c).unwrap(), 3);
        let mut other = a.clone();
        other.scheme_version = "v2".into();
        assert!(matches!(pairwise_distance(&a, &other), Err(MetricsError::SchemeMismatch(..))));
    }

    #[test]
    fn degenerate_and_maximal_sets() {
        let s = CategoryScheme::builtin();
        let a = lab(&s, "Cardio & Endurance", "Progress & Mastery", "Wearable");
        let same = vec![a.clone(); 10];
        let sc = diversity_scores(&same).unwrap();
        assert_eq!((sc.t_cat, sc.t_comb, sc.d_mean), (3, 1, Some(0.0)));
        let b = lab(&s, "Strength & Muscle", "Personalization", "Consumables");
        let sc = diversity_scores(&[a.clone(), b]).unwrap();
        assert_eq!((sc.t_cat, sc.t_comb, sc.d_mean), (6, 2, Some(3.0)));
        let single = diversity_scores(&[a]).unwrap();
        assert_eq!(single.d_mean, None);
        assert_eq!(diversity_scores::<IdeaLabel>(&[]).unwrap_err(), MetricsError::Empty);
    }

    #[test]
    fn accumulation_curves() {
        let s = CategoryScheme::builtin();
        let a = lab(&s, "Cardio & Endurance", "Progress & Mastery", "Wearable");
        let flat = accumulation_curve(&session_from(vec![a; 10])).unwrap();
        assert_eq!(flat.category_counts(), vec![3; 10]);
        assert_eq!(flat.combination_counts(), vec![1; 10]);

        // ideas 1..9 new in every dimension, idea 10 adds one new form
        let mut labels: Vec<IdeaLabel> = (0..9).map(|i| s.label_from_indices([i, i, i])).collect();
        labels.push(s.label_from_indices([0, 0, 9]));
        let curve = accumulation_curve(&session_from(labels.clone())).unwrap();
        assert_eq!(curve.category_counts(), vec![3, 6, 9, 12, 15, 18, 21, 24, 27, 28]);
        let total = diversity_scores(&labels).unwrap();
        assert_eq!(curve.category_counts().last().copied(), Some(total.t_cat));
        assert_eq!(curve.combination_counts().last().copied(), Some(total.t_comb));
    }

    #[test]
    fn unlabeled_idea_is_an_error() {
        let s = CategoryScheme::builtin();
        let mut sess = session_from(vec![s.label_from_indices([0, 0, 0]); 3]);
        sess.ideas[1].label = None;
        assert!(matches!(accumulation_curve(&sess), Err(MetricsError::Unlabeled { index: 2, .. })));
    }
}
