//! Group comparisons by bootstrap, fixation slopes and embedding dispersion.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::corpus::Session;
use crate::gateway::EmbeddingVector;
use crate::metrics::{accumulation_curve, diversity_scores, session_labels, MetricsError};
use crate::rng;
use crate::scheme::IdeaLabel;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("condition {condition:?} has {have} sessions, fewer than the group size {need}")]
    Insufficient { condition: String, have: usize, need: usize },
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("session {0:?} has fewer than two ideas")]
    TooShort(String),
    #[error("vector dimension {found} does not match {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("need at least {need} vectors, got {have}")]
    TooFew { need: usize, have: usize },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    TCat,
    TComb,
    DMean,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::TCat, Metric::TComb, Metric::DMean];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::TCat => "t_cat",
            Metric::TComb => "t_comb",
            Metric::DMean => "d_mean",
        }
    }

    fn of(self, labels: &[&IdeaLabel]) -> Result<f64, AnalysisError> {
        let s = diversity_scores(labels)?;
        match self {
            Metric::TCat => Ok(s.t_cat as f64),
            Metric::TComb => Ok(s.t_comb as f64),
            Metric::DMean => {
                s.d_mean.ok_or_else(|| AnalysisError::Config("d_mean needs at least two ideas per group".into()))
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| AnalysisError::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub group_size: usize,
    pub iterations: usize,
    pub rng_seed: u64,
    /// Sample participants with replacement within an iteration.
    pub replacement: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { group_size: 10, iterations: 100, rng_seed: 0, replacement: false }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.group_size == 0 {
            return Err(AnalysisError::Config("group_size must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(AnalysisError::Config("iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sampling(&self) -> &'static str {
        if self.replacement {
            "with replacement"
        } else {
            "without replacement"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: String,
    pub population: usize,
    pub mean: f64,
    /// Standard deviation of the iteration statistics.
    pub se: f64,
    /// 2.5th and 97.5th percentiles of the iteration statistics.
    pub ci_low: f64,
    pub ci_high: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub a: String,
    pub b: String,
    pub diff: f64,
    pub z: f64,
    /// Two-sided normal p-value.
    pub p: f64,
    /// Whether the two percentile intervals overlap.
    pub intervals_overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapComparison {
    pub metric: String,
    pub scope: String,
    pub method: String,
    pub sampling: String,
    pub config: BootstrapConfig,
    pub conditions: Vec<ConditionSummary>,
    pub pairs: Vec<PairTest>,
}

impl BootstrapComparison {
    pub fn condition(&self, name: &str) -> Option<&ConditionSummary> {
        self.conditions.iter().find(|c| c.condition == name)
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairTest> {
        self.pairs.iter().find(|p| p.a == a && p.b == b)
    }
}

pub const Z_TEST_METHOD: &str = "two-sided z-test on the difference of iteration means, using iteration standard deviations";

/// Mean and sample standard deviation (n - 1); the deviation is 0 for a
/// single value.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Linear-interpolated percentile of sorted values, `q` in [0, 1].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// z statistic and two-sided p-value for `mean_a - mean_b` with standard
/// errors `se_a`, `se_b`.
pub fn z_test(mean_a: f64, se_a: f64, mean_b: f64, se_b: f64) -> (f64, f64) {
    let diff = mean_a - mean_b;
    let se = (se_a * se_a + se_b * se_b).sqrt();
    if se == 0.0 {
        return if diff == 0.0 { (0.0, 1.0) } else { (diff.signum() * f64::INFINITY, 0.0) };
    }
    let z = diff / se;
    (z, erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0))
}

fn summarize(condition: &str, population: usize, values: Vec<f64>) -> ConditionSummary {
    let (mean, se) = mean_sd(&values);
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    ConditionSummary {
        condition: condition.to_string(),
        population,
        mean,
        se,
        ci_low: percentile(&sorted, 0.025),
        ci_high: percentile(&sorted, 0.975),
        values,
    }
}

fn pair_tests(conditions: &[ConditionSummary]) -> Vec<PairTest> {
    let mut out = Vec::new();
    for (i, a) in conditions.iter().enumerate() {
        for b in &conditions[i + 1..] {
            let (z, p) = z_test(a.mean, a.se, b.mean, b.se);
            out.push(PairTest {
                a: a.condition.clone(),
                b: b.condition.clone(),
                diff: a.mean - b.mean,
                z,
                p,
                intervals_overlap: a.ci_low <= b.ci_high && b.ci_low <= a.ci_high,
            });
        }
    }
    out
}

fn draw(rng: &mut impl Rng, population: usize, cfg: &BootstrapConfig) -> Vec<usize> {
    if cfg.replacement {
        (0..cfg.group_size).map(|_| rng.random_range(0..population)).collect()
    } else {
        index::sample(rng, population, cfg.group_size).into_vec()
    }
}

/// Generic bootstrap over populations of arbitrary units. Iteration `i` of
/// condition `c` draws from its own stream keyed by `(rng_seed, i, c)`, so
/// results do not depend on scheduling or on which other conditions are
/// present.
pub fn bootstrap_units<T>(
    populations: &BTreeMap<String, Vec<T>>,
    cfg: &BootstrapConfig,
    metric: &str,
    scope: &str,
    stat: impl Fn(&[&T]) -> Result<f64, AnalysisError>,
) -> Result<BootstrapComparison, AnalysisError> {
    cfg.validate()?;
    let mut conditions = Vec::with_capacity(populations.len());
    for (name, units) in populations {
        if units.is_empty() || (!cfg.replacement && units.len() < cfg.group_size) {
            return Err(AnalysisError::Insufficient {
                condition: name.clone(),
                have: units.len(),
                need: cfg.group_size,
            });
        }
        let key = rng::hash_str(name);
        let values = (0..cfg.iterations)
            .map(|i| {
                let mut r = rng::stream(cfg.rng_seed, &[i as u64, key]);
                let picked: Vec<&T> = draw(&mut r, units.len(), cfg).into_iter().map(|j| &units[j]).collect();
                stat(&picked)
            })
            .collect::<Result<Vec<_>, _>>()?;
        conditions.push(summarize(name, units.len(), values));
    }
    let pairs = pair_tests(&conditions);
    Ok(BootstrapComparison {
        metric: metric.to_string(),
        scope: scope.to_string(),
        method: Z_TEST_METHOD.to_string(),
        sampling: cfg.sampling().to_string(),
        config: *cfg,
        conditions,
        pairs,
    })
}

fn label_populations<'a>(
    groups: &'a BTreeMap<String, Vec<Session>>,
    first_only: bool,
) -> Result<BTreeMap<String, Vec<Vec<&'a IdeaLabel>>>, AnalysisError> {
    groups
        .iter()
        .map(|(name, sessions)| {
            let labels = sessions
                .iter()
                .map(|s| {
                    let mut l = session_labels(s)?;
                    if first_only {
                        l.truncate(1);
                    }
                    if l.is_empty() {
                        return Err(MetricsError::Empty.into());
                    }
                    Ok(l)
                })
                .collect::<Result<Vec<_>, AnalysisError>>()?;
            Ok((name.clone(), labels))
        })
        .collect()
}

fn pooled_metric(metric: Metric) -> impl Fn(&[&Vec<&IdeaLabel>]) -> Result<f64, AnalysisError> {
    move |group| {
        let pooled: Vec<&IdeaLabel> = group.iter().flat_map(|s| s.iter().copied()).collect();
        metric.of(&pooled)
    }
}

/// Compares conditions on a pooled group metric: each iteration samples
/// `group_size` sessions per condition and scores all their ideas together.
pub fn bootstrap_compare(
    groups: &BTreeMap<String, Vec<Session>>,
    metric: Metric,
    cfg: &BootstrapConfig,
) -> Result<BootstrapComparison, AnalysisError> {
    let pops = label_populations(groups, false)?;
    bootstrap_units(&pops, cfg, metric.as_str(), "all_ideas", pooled_metric(metric))
}

/// As [`bootstrap_compare`], but each sampled session contributes only its
/// first idea.
pub fn first_idea_diversity(
    groups: &BTreeMap<String, Vec<Session>>,
    metric: Metric,
    cfg: &BootstrapConfig,
) -> Result<BootstrapComparison, AnalysisError> {
    let pops = label_populations(groups, true)?;
    bootstrap_units(&pops, cfg, metric.as_str(), "first_ideas", pooled_metric(metric))
}

/// Ordinary least-squares `(slope, intercept)` of `ys` against `xs`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares slope of a curve sampled at x = 1..=n.
pub fn curve_slope(curve: &[usize]) -> (f64, f64) {
    let xs: Vec<f64> = (1..=curve.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = curve.iter().map(|&c| c as f64).collect();
    ols(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSlope {
    pub session_id: String,
    pub beta: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationFit {
    pub sessions: Vec<SessionSlope>,
    pub mean_beta: f64,
    /// Standard error of the mean per-session slope.
    pub se_beta: f64,
}

/// Fits a line to each session's category accumulation curve (points
/// `(k, categories after idea k)`).
pub fn fit_fixation(sessions: &[Session]) -> Result<FixationFit, AnalysisError> {
    if sessions.is_empty() {
        return Err(MetricsError::Empty.into());
    }
    let mut slopes = Vec::with_capacity(sessions.len());
    for s in sessions {
        if s.ideas.len() < 2 {
            return Err(AnalysisError::TooShort(s.id.clone()));
        }
        let (beta, intercept) = curve_slope(&accumulation_curve(s)?.category_counts());
        slopes.push(SessionSlope { session_id: s.id.clone(), beta, intercept });
    }
    let betas: Vec<f64> = slopes.iter().map(|s| s.beta).collect();
    let (mean_beta, sd) = mean_sd(&betas);
    Ok(FixationFit { sessions: slopes, mean_beta, se_beta: sd / (betas.len() as f64).sqrt() })
}

/// z-test on the difference of two groups' mean slopes.
pub fn compare_slopes(a_name: &str, a: &FixationFit, b_name: &str, b: &FixationFit) -> PairTest {
    let (z, p) = z_test(a.mean_beta, a.se_beta, b.mean_beta, b.se_beta);
    let half = |f: &FixationFit| (f.mean_beta - 1.96 * f.se_beta, f.mean_beta + 1.96 * f.se_beta);
    let ((al, ah), (bl, bh)) = (half(a), half(b));
    PairTest {
        a: a_name.to_string(),
        b: b_name.to_string(),
        diff: a.mean_beta - b.mean_beta,
        z,
        p,
        intervals_overlap: al <= bh && bl <= ah,
    }
}

fn check_dims(vectors: &[&[f64]]) -> Result<usize, AnalysisError> {
    let dim = vectors.first().map(|v| v.len()).ok_or(AnalysisError::TooFew { need: 1, have: 0 })?;
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(AnalysisError::Dimension { expected: dim, found: bad.len() });
    }
    Ok(dim)
}

/// Component-wise mean of the vectors.
pub fn centroid(vectors: &[EmbeddingVector]) -> Result<EmbeddingVector, AnalysisError> {
    let values: Vec<&[f64]> = vectors.iter().map(|v| v.values.as_slice()).collect();
    let dim = check_dims(&values)?;
    let n = vectors.len() as f64;
    let mut sum = vec![0.0; dim];
    for v in &values {
        for (s, x) in sum.iter_mut().zip(v.iter()) {
            *s += x;
        }
    }
    Ok(EmbeddingVector::new(sum.into_iter().map(|s| s / n).collect(), vectors[0].model_id.clone()))
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Mean Euclidean distance over ordered pairs of distinct centroids,
/// `1/(m(m-1)) * sum_i sum_{j != i} |C_i - C_j|`.
pub fn between_participant_variation(centroids: &[EmbeddingVector]) -> Result<f64, AnalysisError> {
    let values: Vec<&[f64]> = centroids.iter().map(|v| v.values.as_slice()).collect();
    s_between(&values)
}

/// [`between_participant_variation`] on plain slices.
pub fn s_between(centroids: &[&[f64]]) -> Result<f64, AnalysisError> {
    let m = centroids.len();
    if m < 2 {
        return Err(AnalysisError::TooFew { need: 2, have: m });
    }
    check_dims(centroids)?;
    let mut total = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            total += euclidean(centroids[i], centroids[j]);
        }
    }
    // each unordered pair stands for two ordered pairs
    Ok(2.0 * total / (m * (m - 1)) as f64)
}

pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, AnalysisError> {
    check_dims(&[&a.values, &b.values])?;
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    let na = a.values.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(AnalysisError::ZeroVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantCentroid {
    pub session_id: String,
    /// Number of idea vectors averaged.
    pub n: usize,
    pub centroid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitioningReport {
    pub condition: String,
    pub participants: Vec<ParticipantCentroid>,
    pub m: usize,
    pub dimension: usize,
    pub s_between: f64,
}

/// Centroid per participant and the between-participant variation of one
/// condition. `participants` holds `(session_id, idea vectors)`.
pub fn partitioning_report(
    condition: &str,
    participants: &[(String, Vec<EmbeddingVector>)],
) -> Result<PartitioningReport, AnalysisError> {
    let centroids = participants
        .iter()
        .map(|(id, vs)| {
            Ok(ParticipantCentroid { session_id: id.clone(), n: vs.len(), centroid: centroid(vs)?.values })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let values: Vec<&[f64]> = centroids.iter().map(|c| c.centroid.as_slice()).collect();
    let s = s_between(&values)?;
    Ok(PartitioningReport {
        condition: condition.to_string(),
        m: centroids.len(),
        dimension: values[0].len(),
        participants: centroids,
        s_between: s,
    })
}

/// Bootstrap of `s_between` over groups of participant centroids.
pub fn bootstrap_s_between(
    reports: &[PartitioningReport],
    cfg: &BootstrapConfig,
) -> Result<BootstrapComparison, AnalysisError> {
    if cfg.group_size < 2 {
        return Err(AnalysisError::Config("s_between needs groups of at least two".into()));
    }
    let pops: BTreeMap<String, Vec<&[f64]>> = reports
        .iter()
        .map(|r| (r.condition.clone(), r.participants.iter().map(|p| p.centroid.as_slice()).collect()))
        .collect();
    bootstrap_units(&pops, cfg, "s_between", "centroids", |group| {
        let v: Vec<&[f64]> = group.iter().map(|c| **c).collect();
        s_between(&v)
    })
}
