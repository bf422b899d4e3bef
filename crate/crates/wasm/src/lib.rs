//! Browser bindings. Every export takes and returns plain values or JSON
//! strings so the page needs no generated glue beyond wasm-bindgen's.

use ideadiv::analysis::{curve_slope, s_between};
use ideadiv::metrics::{diversity_scores, pairwise_distance};
use ideadiv::rng;
use ideadiv::simident::{generate_session_labels, hash_embedding, render_idea_text, sample_agent, PopulationParams};
use ideadiv::{CategoryScheme, IdeaLabel};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

const IDEAS_PER_AGENT: usize = 10;
const DEMO_EMBEDDING_DIM: usize = 64;
const SESSION_TAG: u64 = 0x5e55;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulation {
    /// Mean unique categories after idea k, k = 1..=10.
    pub mean_curve: Vec<f64>,
    pub mean_beta: f64,
    pub first_t_cat: usize,
    pub first_t_comb: usize,
    pub pooled_t_cat: usize,
    pub pooled_t_comb: usize,
    pub s_between: f64,
    /// First idea of up to five agents.
    pub sample_ideas: Vec<String>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Simulates `agents` sessions of ten ideas and summarizes them.
pub fn simulate_population(rho: f64, phi: f64, collapse: f64, agents: usize, seed: u64) -> Result<Simulation, String> {
    if agents < 2 {
        return Err("need at least two agents".into());
    }
    let scheme = CategoryScheme::builtin();
    let params = PopulationParams::new(rho, phi, scheme.clone(), seed)
        .and_then(|p| p.with_collapse(collapse))
        .map_err(|e| e.to_string())?;
    let mut curves = vec![0.0; IDEAS_PER_AGENT];
    let mut betas = Vec::with_capacity(agents);
    let mut first = Vec::with_capacity(agents);
    let mut pooled = Vec::with_capacity(agents * IDEAS_PER_AGENT);
    let mut centroids = Vec::with_capacity(agents);
    let mut sample_ideas = Vec::new();
    for a in 0..agents as u64 {
        let profile = sample_agent(&params, a);
        let mut r = rng::stream(seed, &[SESSION_TAG, a]);
        let labels = generate_session_labels(&profile, &scheme, phi, IDEAS_PER_AGENT, &mut r);
        let mut seen = std::collections::HashSet::new();
        let curve: Vec<usize> = labels
            .iter()
            .map(|l| {
                for (d, c) in l.categories().iter().enumerate() {
                    seen.insert((d, c.to_string()));
                }
                seen.len()
            })
            .collect();
        for (acc, &c) in curves.iter_mut().zip(&curve) {
            *acc += c as f64 / agents as f64;
        }
        betas.push(curve_slope(&curve).0);
        let mut centroid = vec![0.0; DEMO_EMBEDDING_DIM];
        for (k, l) in labels.iter().enumerate() {
            let text = render_idea_text(l, &mut r);
            if k == 0 && sample_ideas.len() < 5 {
                sample_ideas.push(text.clone());
            }
            for (c, x) in centroid.iter_mut().zip(hash_embedding(&text, seed, DEMO_EMBEDDING_DIM)) {
                *c += x / IDEAS_PER_AGENT as f64;
            }
        }
        centroids.push(centroid);
        first.push(labels[0].clone());
        pooled.extend(labels);
    }
    let firsts = diversity_scores(&first).map_err(|e| e.to_string())?;
    let all = diversity_scores(&pooled).map_err(|e| e.to_string())?;
    let refs: Vec<&[f64]> = centroids.iter().map(Vec::as_slice).collect();
    Ok(Simulation {
        mean_curve: curves,
        mean_beta: mean(&betas),
        first_t_cat: firsts.t_cat,
        first_t_comb: firsts.t_comb,
        pooled_t_cat: all.t_cat,
        pooled_t_comb: all.t_comb,
        s_between: s_between(&refs).map_err(|e| e.to_string())?,
        sample_ideas,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelReport {
    pub t_cat: usize,
    pub t_comb: usize,
    pub d_mean: Option<f64>,
    /// Distance between consecutive labels.
    pub steps: Vec<u8>,
}

#[derive(Deserialize)]
struct LabelTriple([String; 3]);

/// Diversity of category triples given as a JSON array of
/// `[context, need, form]` arrays, matched against the fitness scheme.
pub fn label_report(labels_json: &str) -> Result<LabelReport, String> {
    let scheme = CategoryScheme::builtin();
    let triples: Vec<LabelTriple> = serde_json::from_str(labels_json).map_err(|e| e.to_string())?;
    let labels: Vec<IdeaLabel> = triples
        .iter()
        .map(|LabelTriple(t)| scheme.label([&t[0], &t[1], &t[2]]).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let scores = diversity_scores(&labels).map_err(|e| e.to_string())?;
    let steps = labels
        .windows(2)
        .map(|w| pairwise_distance(&w[0], &w[1]).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    Ok(LabelReport { t_cat: scores.t_cat, t_comb: scores.t_comb, d_mean: scores.d_mean, steps })
}

/// Between-participant variation of 2-D points, each participant given as
/// a list of `[x, y]` ideas.
pub fn participant_spread(participants_json: &str) -> Result<f64, String> {
    let participants: Vec<Vec<Vec<f64>>> = serde_json::from_str(participants_json).map_err(|e| e.to_string())?;
    let mut centroids = Vec::with_capacity(participants.len());
    for ideas in &participants {
        let vectors: Vec<_> = ideas.iter().map(|v| ideadiv::gateway::EmbeddingVector::new(v.clone(), "demo")).collect();
        centroids.push(ideadiv::analysis::centroid(&vectors).map_err(|e| e.to_string())?.values);
    }
    let refs: Vec<&[f64]> = centroids.iter().map(Vec::as_slice).collect();
    s_between(&refs).map_err(|e| e.to_string())
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    r.map(|v| serde_json::to_string(&v).expect("serializes")).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(rho: f64, phi: f64, collapse: f64, agents: usize, seed: u32) -> Result<String, JsError> {
    to_js(simulate_population(rho, phi, collapse, agents, seed as u64))
}

#[wasm_bindgen(js_name = labelDiversity)]
pub fn label_diversity(labels_json: &str) -> Result<String, JsError> {
    to_js(label_report(labels_json))
}

#[wasm_bindgen(js_name = betweenVariation)]
pub fn between_variation(participants_json: &str) -> Result<f64, JsError> {
    participant_spread(participants_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = categories)]
pub fn categories() -> String {
    let scheme = CategoryScheme::builtin();
    serde_json::to_string(&scheme.dimensions).expect("serializes")
}
