//! Assigns each idea one category per dimension.
//!
//! Two modes share the same JSON-reply conventions:
//!
//! * fixed: every idea is labeled directly against a known
//!   [`CategoryScheme`] ([`label_idea_fixed`], [`label_sessions`]);
//! * pipeline: ideas first get free-text labels ([`initial_label`]), the
//!   distinct labels are consolidated into a scheme of target size
//!   ([`abstract_hierarchy`]) and the corpus is relabeled by lookup
//!   ([`relabel_corpus`]).
//!
//! Prompt wording is fixed by [`TEMPLATE_VERSION`]; any change to a template
//! must bump it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::corpus::{Idea, Session};
use crate::gateway::{ChatMessage, ChatRequest, Gateway, GatewayError};
use crate::scheme::{normalize_category, CategoryScheme, Dimension, IdeaLabel, SchemeError, DIMENSION_KEYS};

pub const TEMPLATE_VERSION: &str = "categorizer-v1";

pub const CATEGORIZER_SYSTEM_PROMPT: &str =
    "You are a careful research assistant who codes product ideas into categories.";

/// Categorizer calls use the most deterministic sampling setting.
pub const CATEGORIZER_TEMPERATURE: f64 = 0.0;

pub const LABEL_PROMPT_HEAD: &str = "Classify the fitness product idea below.";
pub const INITIAL_PROMPT_HEAD: &str = "Describe the fitness product idea below with detailed subcategory labels.";
pub const ABSTRACTION_PROMPT_HEAD: &str = "Consolidate the detailed labels below into broader, non-overlapping categories.";

const IDEA_MARKER: &str = "\n\nIdea: ";
const REPLY_MARKER: &str = "\n\nReturn ONLY";

#[derive(Debug, Error)]
pub enum CategorizerError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid reply after a corrective retry: {0}")]
    InvalidReply(String),
    #[error("abstraction for {dimension} yields {found} categories, expected {expected}")]
    SizeMismatch { dimension: String, expected: usize, found: usize },
    #[error("abstraction map is not total: {dimension} label {label:?} is unmapped")]
    Unmapped { dimension: String, label: String },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

fn scheme_listing(scheme: &CategoryScheme) -> String {
    scheme
        .dimensions
        .iter()
        .map(|d| {
            let cats: Vec<String> = d.categories.iter().map(|c| format!("- {c}")).collect();
            format!("{}:\n{}", d.name, cats.join("\n"))
        })
        .collect::<Vec<_>>()
        .join("\n\n")
}

fn single_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Fixed-scheme labeling prompt. The scheme is listed verbatim.
pub fn label_prompt(scheme: &CategoryScheme, idea_text: &str) -> String {
    format!(
        "{LABEL_PROMPT_HEAD} Choose exactly one category from each of the three dimensions, copying the category name exactly as written.\n\n{}{IDEA_MARKER}{}{REPLY_MARKER} a JSON object with the keys \"industry_context\", \"psychological_need\" and \"product_form\".",
        scheme_listing(scheme),
        single_line(idea_text)
    )
}

/// Free-text labeling prompt for the first pipeline stage.
pub fn initial_prompt(idea_text: &str) -> String {
    format!(
        "{INITIAL_PROMPT_HEAD} Give one short label per dimension: the industry context (for example strength, hydration or injury prevention), the psychological need it serves (for example fun, personalization or convenience) and the product form (for example wearable, app or AR).{IDEA_MARKER}{}{REPLY_MARKER} a JSON object with the keys \"industry_context\", \"psychological_need\" and \"product_form\", each a short free-text label.",
        single_line(idea_text)
    )
}

/// One dimension's share of the consolidation request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractionSection {
    pub key: String,
    pub target: usize,
    pub labels: Vec<String>,
}

/// Consolidation prompt covering every dimension that needs it.
pub fn abstraction_prompt(sections: &[AbstractionSection]) -> String {
    let body = sections
        .iter()
        .map(|s| {
            let labels: Vec<String> = s.labels.iter().map(|l| format!("- {l}")).collect();
            format!(
                "Dimension \"{}\": produce exactly {} categories.\nLabels:\n{}",
                s.key,
                s.target,
                labels.join("\n")
            )
        })
        .collect::<Vec<_>>()
        .join("\n\n");
    format!(
        "{ABSTRACTION_PROMPT_HEAD} Handle each dimension separately.\n\n{body}{REPLY_MARKER} a JSON object whose keys are the dimension names above. Each value is an array of objects with \"category\" (a short category name) and \"members\" (the labels it covers, copied exactly). Every label must appear in exactly one category."
    )
}

/// Inverse of [`abstraction_prompt`].
pub fn parse_abstraction_prompt(prompt: &str) -> Vec<AbstractionSection> {
    let mut out: Vec<AbstractionSection> = Vec::new();
    for line in prompt.lines() {
        if let Some(rest) = line.strip_prefix("Dimension \"") {
            let Some((key, tail)) = rest.split_once('"') else { continue };
            let target = tail
                .split("exactly ")
                .nth(1)
                .and_then(|t| t.split_whitespace().next())
                .and_then(|n| n.parse().ok())
                .unwrap_or(0);
            out.push(AbstractionSection { key: key.to_string(), target, labels: Vec::new() });
        } else if let (Some(label), Some(section)) = (line.strip_prefix("- "), out.last_mut()) {
            section.labels.push(label.to_string());
        }
    }
    out
}

pub fn correction_prompt(problem: &str) -> String {
    format!("Your previous answer could not be used ({problem}). Answer again following the format instructions exactly, and return only the JSON.")
}

/// The idea text embedded in a labeling prompt.
pub fn idea_from_prompt(prompt: &str) -> Option<&str> {
    let start = prompt.find(IDEA_MARKER)? + IDEA_MARKER.len();
    let end = prompt.rfind(REPLY_MARKER)?;
    prompt.get(start..end)
}

fn first_json_object(raw: &str) -> Option<Map<String, Value>> {
    raw.match_indices('{').find_map(|(pos, _)| {
        let mut stream = serde_json::Deserializer::from_str(&raw[pos..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(Value::Object(m))) => Some(m),
            _ => None,
        }
    })
}

fn three_strings(raw: &str) -> Result<[String; 3], String> {
    let obj = first_json_object(raw).ok_or("no JSON object found")?;
    let mut out: [String; 3] = Default::default();
    for (slot, key) in out.iter_mut().zip(DIMENSION_KEYS) {
        *slot = obj
            .get(key)
            .and_then(Value::as_str)
            .map(single_line)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format!("missing or empty {key:?}"))?;
    }
    Ok(out)
}

/// Sends a two-message request and validates the reply with `check`; on
/// failure the reply and a correction are appended and the call is retried
/// once.
fn ask_with_retry<T>(
    gateway: &Gateway,
    model_id: &str,
    prompt: String,
    check: impl Fn(&str) -> Result<T, String>,
) -> Result<Result<T, String>, GatewayError> {
    let mut messages = vec![ChatMessage::system(CATEGORIZER_SYSTEM_PROMPT), ChatMessage::user(prompt)];
    let request = |m: &[ChatMessage]| ChatRequest::new(model_id, m.to_vec(), CATEGORIZER_TEMPERATURE);
    let raw = gateway.complete_chat(&request(&messages))?;
    let problem = match check(&raw) {
        Ok(v) => return Ok(Ok(v)),
        Err(p) => p,
    };
    tracing::debug!(%problem, "categorizer reply rejected, retrying once");
    if !raw.trim().is_empty() {
        messages.push(ChatMessage::assistant(raw));
    }
    messages.push(ChatMessage::user(correction_prompt(&problem)));
    let raw = gateway.complete_chat(&request(&messages))?;
    Ok(check(&raw))
}

/// Labels one idea against `scheme`. Replies are matched after
/// normalization, so "Strength and muscle" resolves to "Strength & Muscle".
pub fn label_idea_fixed(
    idea_text: &str,
    scheme: &CategoryScheme,
    gateway: &Gateway,
    model_id: &str,
) -> Result<IdeaLabel, CategorizerError> {
    scheme.validate()?;
    let check = |raw: &str| {
        let names = three_strings(raw)?;
        scheme.label([&names[0], &names[1], &names[2]]).map_err(|e| e.to_string())
    };
    ask_with_retry(gateway, model_id, label_prompt(scheme, idea_text), check)?.map_err(CategorizerError::InvalidReply)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSummary {
    pub labeled: usize,
    pub flagged: usize,
}

fn is_fatal(e: &GatewayError) -> bool {
    matches!(e, GatewayError::Auth(_) | GatewayError::Quota(_) | GatewayError::CacheMiss | GatewayError::Cache(_))
}

/// Labels every idea in place. Ideas that still fail after the corrective
/// retry (or whose request exhausts its transport retries) get
/// `label_error` set and no label. Authentication, quota and cache failures
/// abort the whole run.
pub fn label_sessions(
    sessions: &mut [Session],
    scheme: &CategoryScheme,
    gateway: &Gateway,
    model_id: &str,
    workers: usize,
) -> Result<LabelSummary, CategorizerError> {
    scheme.validate()?;
    let refs: Vec<(usize, usize)> = sessions
        .iter()
        .enumerate()
        .flat_map(|(s, sess)| (0..sess.ideas.len()).map(move |i| (s, i)))
        .collect();
    let results = crate::par::par_map(&refs, workers, |&(s, i)| {
        label_idea_fixed(&sessions[s].ideas[i].text, scheme, gateway, model_id)
    });
    let mut summary = LabelSummary::default();
    for (&(s, i), result) in refs.iter().zip(results) {
        let idea = &mut sessions[s].ideas[i];
        match result {
            Ok(label) => {
                idea.label = Some(label);
                idea.label_error = None;
                summary.labeled += 1;
            }
            Err(CategorizerError::Gateway(e)) if is_fatal(&e) => return Err(e.into()),
            Err(e) => {
                tracing::warn!(session = %idea.session_id, index = idea.index, error = %e, "idea left unlabeled");
                idea.label = None;
                idea.label_error = Some(e.to_string());
                summary.flagged += 1;
            }
        }
    }
    Ok(summary)
}

/// Free-text label of one idea on one dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLabel {
    pub session_id: String,
    pub index: u32,
    /// One of [`DIMENSION_KEYS`].
    pub dimension: String,
    pub free_text_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLabelFailure {
    pub session_id: String,
    pub index: u32,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialLabels {
    pub labels: Vec<RawLabel>,
    pub failures: Vec<RawLabelFailure>,
}

/// First pipeline stage: three free-text labels per idea. A failing idea is
/// recorded and the batch continues.
pub fn initial_label(
    ideas: &[Idea],
    gateway: &Gateway,
    model_id: &str,
    workers: usize,
) -> Result<InitialLabels, CategorizerError> {
    if ideas.is_empty() {
        return Err(CategorizerError::Precondition("no ideas to label".into()));
    }
    let results = crate::par::par_map(ideas, workers, |idea| {
        ask_with_retry(gateway, model_id, initial_prompt(&idea.text), three_strings)
    });
    let mut out = InitialLabels::default();
    for (idea, result) in ideas.iter().zip(results) {
        let error = match result {
            Ok(Ok(names)) => {
                for (key, name) in DIMENSION_KEYS.iter().zip(names) {
                    out.labels.push(RawLabel {
                        session_id: idea.session_id.clone(),
                        index: idea.index,
                        dimension: (*key).to_string(),
                        free_text_label: name,
                    });
                }
                continue;
            }
            Ok(Err(problem)) => problem,
            Err(e) if is_fatal(&e) => return Err(e.into()),
            Err(e) => e.to_string(),
        };
        out.failures.push(RawLabelFailure { session_id: idea.session_id.clone(), index: idea.index, error });
    }
    Ok(out)
}

/// Mapping from free-text labels to the categories of a derived scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractionMap {
    pub scheme: CategoryScheme,
    /// Per dimension key: raw label → category name of `scheme`.
    pub entries: BTreeMap<String, BTreeMap<String, String>>,
}

impl AbstractionMap {
    /// Category for `label` on dimension `dim`; exact match first, then
    /// normalized.
    pub fn lookup(&self, dim: usize, label: &str) -> Option<&str> {
        let entries = self.entries.get(DIMENSION_KEYS[dim])?;
        if let Some(c) = entries.get(label) {
            return Some(c);
        }
        let wanted = normalize_category(label);
        entries.iter().find(|(k, _)| normalize_category(k) == wanted).map(|(_, c)| c.as_str())
    }

    /// Checks the scheme and that every mapped category belongs to it.
    pub fn validate(&self) -> Result<(), CategorizerError> {
        self.scheme.validate()?;
        for (d, key) in DIMENSION_KEYS.iter().enumerate() {
            for (label, cat) in self.entries.get(*key).into_iter().flatten() {
                if self.scheme.index_of(d, cat).is_none() {
                    return Err(CategorizerError::Unmapped { dimension: (*key).into(), label: label.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CategorizerError> {
        let map: Self = serde_json::from_str(text).map_err(|e| CategorizerError::Precondition(e.to_string()))?;
        map.validate()?;
        Ok(map)
    }
}

/// Distinct labels per dimension, deduplicated by normalized form. The
/// first spelling seen is kept as representative.
fn distinct_labels(raw: &[RawLabel]) -> Result<[Vec<String>; 3], CategorizerError> {
    let mut out: [Vec<String>; 3] = Default::default();
    let mut seen: [BTreeSet<String>; 3] = Default::default();
    for r in raw {
        let d = DIMENSION_KEYS
            .iter()
            .position(|k| *k == r.dimension)
            .ok_or_else(|| CategorizerError::Precondition(format!("unknown dimension {:?}", r.dimension)))?;
        if r.free_text_label.trim().is_empty() {
            return Err(CategorizerError::Precondition("empty raw label".into()));
        }
        if seen[d].insert(normalize_category(&r.free_text_label)) {
            out[d].push(single_line(&r.free_text_label));
        }
    }
    for (d, labels) in out.iter_mut().enumerate() {
        if labels.is_empty() {
            return Err(CategorizerError::Precondition(format!("no raw labels for {}", DIMENSION_KEYS[d])));
        }
        labels.sort();
    }
    Ok(out)
}

type Groups = Vec<(String, Vec<String>)>;

/// Checks a consolidation reply mechanically: exact category count,
/// distinct names, and each label in exactly one group.
fn check_abstraction(raw: &str, sections: &[AbstractionSection]) -> Result<Vec<Groups>, String> {
    let obj = first_json_object(raw).ok_or("no JSON object found")?;
    let mut all = Vec::with_capacity(sections.len());
    for section in sections {
        let items = obj
            .get(&section.key)
            .and_then(Value::as_array)
            .ok_or_else(|| format!("missing array for {:?}", section.key))?;
        if items.len() != section.target {
            return Err(format!("{}: {} categories, expected {}", section.key, items.len(), section.target));
        }
        let wanted: HashMap<String, &str> =
            section.labels.iter().map(|l| (normalize_category(l), l.as_str())).collect();
        let mut names = BTreeSet::new();
        let mut assigned: HashMap<&str, usize> = HashMap::new();
        let mut groups = Vec::with_capacity(items.len());
        for (g, item) in items.iter().enumerate() {
            let name = item
                .get("category")
                .and_then(Value::as_str)
                .map(single_line)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| format!("{}: group {} has no category name", section.key, g + 1))?;
            if !names.insert(normalize_category(&name)) {
                return Err(format!("{}: category {name:?} appears twice", section.key));
            }
            let members = item
                .get("members")
                .and_then(Value::as_array)
                .ok_or_else(|| format!("{}: group {name:?} has no members", section.key))?;
            let mut kept = Vec::new();
            for m in members {
                let m = m.as_str().ok_or_else(|| format!("{}: non-string member", section.key))?;
                let label = *wanted
                    .get(&normalize_category(m))
                    .ok_or_else(|| format!("{}: {m:?} is not one of the listed labels", section.key))?;
                if assigned.insert(label, g).is_some() {
                    return Err(format!("{}: {label:?} is assigned to more than one category", section.key));
                }
                kept.push(label.to_string());
            }
            groups.push((name, kept));
        }
        if let Some(missing) = section.labels.iter().find(|l| !assigned.contains_key(l.as_str())) {
            return Err(format!("{}: {missing:?} is not assigned", section.key));
        }
        all.push(groups);
    }
    Ok(all)
}

/// Second pipeline stage: consolidates the distinct raw labels of each
/// dimension into exactly `target_sizes[d]` categories.
///
/// A dimension whose distinct labels already number `target_sizes[d]` maps
/// onto itself without a backend call; the remaining dimensions go to the
/// backend in a single request, whose reply is validated mechanically and
/// retried once.
pub fn abstract_hierarchy(
    raw: &[RawLabel],
    target_sizes: [usize; 3],
    gateway: &Gateway,
    model_id: &str,
    scheme_version: &str,
) -> Result<AbstractionMap, CategorizerError> {
    let distinct = distinct_labels(raw)?;
    let builtin = CategoryScheme::builtin();
    let mut categories: [Vec<String>; 3] = Default::default();
    let mut members: [Groups; 3] = Default::default();
    let mut sections = Vec::new();
    for d in 0..3 {
        let (have, want) = (distinct[d].len(), target_sizes[d]);
        if want == 0 || have < want {
            return Err(CategorizerError::SizeMismatch {
                dimension: DIMENSION_KEYS[d].into(),
                expected: want,
                found: have,
            });
        }
        if have == want {
            members[d] = distinct[d].iter().map(|l| (l.clone(), vec![l.clone()])).collect();
        } else {
            sections.push((d, AbstractionSection {
                key: DIMENSION_KEYS[d].into(),
                target: want,
                labels: distinct[d].clone(),
            }));
        }
    }
    if !sections.is_empty() {
        let plain: Vec<AbstractionSection> = sections.iter().map(|(_, s)| s.clone()).collect();
        let groups = ask_with_retry(gateway, model_id, abstraction_prompt(&plain), |r| check_abstraction(r, &plain))?
            .map_err(CategorizerError::InvalidReply)?;
        for ((d, _), g) in sections.iter().zip(groups) {
            members[*d] = g;
        }
    }
    let mut entries = BTreeMap::new();
    for d in 0..3 {
        categories[d] = members[d].iter().map(|(c, _)| c.clone()).collect();
        let map: BTreeMap<String, String> = members[d]
            .iter()
            .flat_map(|(c, ms)| ms.iter().map(move |m| (m.clone(), c.clone())))
            .collect();
        entries.insert(DIMENSION_KEYS[d].to_string(), map);
    }
    let dims = (0..3)
        .map(|d| Dimension { name: builtin.dimensions[d].name.clone(), categories: std::mem::take(&mut categories[d]) })
        .collect();
    let map = AbstractionMap { scheme: CategoryScheme::new(scheme_version, dims)?, entries };
    // totality over every raw spelling, not just the representatives
    for r in raw {
        let d = DIMENSION_KEYS.iter().position(|k| *k == r.dimension).expect("checked");
        if map.lookup(d, &single_line(&r.free_text_label)).is_none() {
            return Err(CategorizerError::Unmapped { dimension: r.dimension.clone(), label: r.free_text_label.clone() });
        }
    }
    Ok(map)
}

/// Third pipeline stage: labels every idea by looking its raw labels up in
/// `map`. Ideas without raw labels are flagged; no backend calls are made.
pub fn relabel_corpus(
    sessions: &[Session],
    raw: &[RawLabel],
    map: &AbstractionMap,
) -> Result<Vec<Session>, CategorizerError> {
    let mut by_idea: HashMap<(&str, u32), [Option<&str>; 3]> = HashMap::new();
    for r in raw {
        let d = DIMENSION_KEYS
            .iter()
            .position(|k| *k == r.dimension)
            .ok_or_else(|| CategorizerError::Precondition(format!("unknown dimension {:?}", r.dimension)))?;
        by_idea.entry((r.session_id.as_str(), r.index)).or_default()[d] = Some(r.free_text_label.as_str());
    }
    let mut out = sessions.to_vec();
    for idea in out.iter_mut().flat_map(|s| s.ideas.iter_mut()) {
        let Some([Some(a), Some(b), Some(c)]) = by_idea.get(&(idea.session_id.as_str(), idea.index)).copied() else {
            idea.label = None;
            idea.label_error = Some("no raw labels for this idea".into());
            continue;
        };
        let mut names = [""; 3];
        for (d, raw_label) in [a, b, c].into_iter().enumerate() {
            names[d] = map.lookup(d, &single_line(raw_label)).ok_or_else(|| CategorizerError::Unmapped {
                dimension: DIMENSION_KEYS[d].into(),
                label: raw_label.to_string(),
            })?;
        }
        idea.label = Some(map.scheme.label(names)?);
        idea.label_error = None;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simident::{PopulationParams, SimulatorBackend};
    use std::sync::Arc;

    fn sim() -> SimulatorBackend {
        SimulatorBackend::new(PopulationParams::new(0.5, 0.5, CategoryScheme::builtin(), 1).unwrap())
    }

    fn gateway(backend: SimulatorBackend) -> Gateway {
        Gateway::new(Arc::new(backend))
    }

    #[test]
    fn prompt_round_trips_idea_text() {
        let s = CategoryScheme::builtin();
        let p = label_prompt(&s, "A mat\nthat folds");
        assert_eq!(idea_from_prompt(&p), Some("A mat that folds"));
        assert!(p.contains("- Subscription / Coaching"));
        assert_eq!(idea_from_prompt(&initial_prompt("x")), Some("x"));
    }

    #[test]
    fn normalizes_reply_names() {
        let gw = gateway(sim().with_script(
            "jump rope",
            r#"{"industry_context": "Cardio and endurance", "psychological_need": "fun & engagement", "product_form": "traditional equipment"}"#,
        ));
        let l = label_idea_fixed("A jump rope", &CategoryScheme::builtin(), &gw, "m").unwrap();
        assert_eq!(l.categories(), ["Cardio & Endurance", "Fun & Engagement", "Traditional Equipment"]);
    }

    #[test]
    fn invalid_reply_is_flagged_after_one_retry() {
        let backend = sim().with_script("juggling", r#"{"industry_context": "Juggling"}"#).with_script(
            "could not be used",
            r#"{"industry_context": "Juggling", "psychological_need": "x", "product_form": "y"}"#,
        );
        let gw = gateway(backend);
        let s = CategoryScheme::builtin();
        assert!(matches!(label_idea_fixed("juggling balls", &s, &gw, "m"), Err(CategorizerError::InvalidReply(_))));
        assert_eq!(gw.stats().backend_calls, 2);

        let mut sessions = vec![Session {
            id: "p".into(),
            source: crate::corpus::Source::Llm,
            condition: crate::corpus::ConditionSpec::new("c", crate::corpus::ConditionKind::DefaultSequential, "m"),
            ideas: vec![Idea::new("p", 1, "juggling balls"), Idea::new("p", 2, "A Wearable product for Strength & Muscle that delivers Personalization, with a playful twist.")],
            offtask_ratio: None,
        }];
        let summary = label_sessions(&mut sessions, &s, &gw, "m", 2).unwrap();
        assert_eq!(summary, LabelSummary { labeled: 1, flagged: 1 });
        assert!(sessions[0].ideas[0].label_error.is_some());
        assert_eq!(
            sessions[0].ideas[1].label.as_ref().unwrap().categories(),
            ["Strength & Muscle", "Personalization", "Wearable"]
        );
    }

    fn raw(session: &str, index: u32, labels: [&str; 3]) -> Vec<RawLabel> {
        DIMENSION_KEYS
            .iter()
            .zip(labels)
            .map(|(k, l)| RawLabel {
                session_id: session.into(),
                index,
                dimension: (*k).into(),
                free_text_label: l.into(),
            })
            .collect()
    }

    #[test]
    fn initial_label_passes_canned_labels_through() {
        let gw = gateway(sim().with_script(
            "hydration flask",
            r#"{"industry_context": "hydration tracking", "psychological_need": "habit building", "product_form": "smart bottle"}"#,
        ));
        let out = initial_label(&[Idea::new("p", 1, "A hydration flask")], &gw, "m", 1).unwrap();
        assert_eq!(out.labels, raw("p", 1, ["hydration tracking", "habit building", "smart bottle"]));
        assert!(matches!(initial_label(&[], &gw, "m", 1), Err(CategorizerError::Precondition(_))));
    }

    #[test]
    fn identity_abstraction_needs_no_call() {
        let gw = gateway(sim());
        let mut r = Vec::new();
        for i in 0..3u32 {
            r.extend(raw("p", i + 1, [&format!("ctx {i}"), &format!("need {i}"), &format!("form {i}")]));
        }
        let map = abstract_hierarchy(&r, [3, 3, 3], &gw, "m", "derived-v1").unwrap();
        assert_eq!(gw.stats().backend_calls, 0);
        assert_eq!(map.scheme.sizes(), [3, 3, 3]);
        assert_eq!(map.lookup(0, "ctx 1"), Some("ctx 1"));
        let relabeled = relabel_corpus(
            &[Session {
                id: "p".into(),
                source: crate::corpus::Source::Llm,
                condition: crate::corpus::ConditionSpec::new("c", crate::corpus::ConditionKind::DefaultSequential, "m"),
                ideas: (1..=3).map(|i| Idea::new("p", i, format!("idea {i}"))).collect(),
                offtask_ratio: None,
            }],
            &r,
            &map,
        )
        .unwrap();
        assert_eq!(relabeled[0].ideas[2].label.as_ref().unwrap().categories(), ["ctx 2", "need 2", "form 2"]);
        assert_eq!(relabel_corpus(&[], &r, &map).unwrap(), vec![]);
    }

    #[test]
    fn size_mismatch_and_unmapped_errors() {
        let gw = gateway(sim());
        let r = raw("p", 1, ["a", "b", "c"]);
        assert!(matches!(abstract_hierarchy(&r, [2, 1, 1], &gw, "m", "v"), Err(CategorizerError::SizeMismatch { .. })));
        let map = abstract_hierarchy(&r, [1, 1, 1], &gw, "m", "v").unwrap();
        let other = raw("p", 1, ["zzz", "b", "c"]);
        let sessions = vec![Session {
            id: "p".into(),
            source: crate::corpus::Source::Llm,
            condition: crate::corpus::ConditionSpec::new("c", crate::corpus::ConditionKind::DefaultSequential, "m"),
            ideas: vec![Idea::new("p", 1, "x")],
            offtask_ratio: None,
        }];
        match relabel_corpus(&sessions, &other, &map) {
            Err(CategorizerError::Unmapped { label, .. }) => assert_eq!(label, "zzz"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn abstraction_reply_validation() {
        let sections = vec![AbstractionSection { key: "product_form".into(), target: 2, labels: vec!["a".into(), "b".into(), "c".into()] }];
        let ok = r#"{"product_form": [{"category": "AB", "members": ["a", "b"]}, {"category": "C", "members": ["c"]}]}"#;
        assert_eq!(check_abstraction(ok, &sections).unwrap()[0].len(), 2);
        let missing = r#"{"product_form": [{"category": "AB", "members": ["a", "b"]}, {"category": "C", "members": []}]}"#;
        assert!(check_abstraction(missing, &sections).unwrap_err().contains("not assigned"));
        let overlap = r#"{"product_form": [{"category": "AB", "members": ["a", "b"]}, {"category": "C", "members": ["c", "a"]}]}"#;
        assert!(check_abstraction(overlap, &sections).unwrap_err().contains("more than one"));
        assert_eq!(parse_abstraction_prompt(&abstraction_prompt(&sections)), sections);
    }

    #[test]
    fn simulator_consolidation_is_validated() {
        let gw = gateway(sim());
        let mut r = Vec::new();
        for i in 0..30u32 {
            r.extend(raw("p", i + 1, [&format!("ctx {i:02}"), &format!("need {i:02}"), &format!("form {i:02}")]));
        }
        let map = abstract_hierarchy(&r, [9, 9, 10], &gw, "m", "derived-v1").unwrap();
        assert_eq!(map.scheme.sizes(), [9, 9, 10]);
        assert_eq!(gw.stats().backend_calls, 1);
        for x in &r {
            let d = DIMENSION_KEYS.iter().position(|k| *k == x.dimension).unwrap();
            assert!(map.lookup(d, &x.free_text_label).is_some());
        }
        assert_eq!(AbstractionMap::from_json(&map.to_json()).unwrap(), map);
    }
}
