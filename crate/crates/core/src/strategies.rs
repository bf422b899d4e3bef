//! Prompt construction and session orchestration for each prompting
//! condition.
//!
//! Sequential conditions issue one chat call per idea, replaying every prior
//! idea as an assistant turn. Batch conditions ask for all ideas at once as a
//! JSON array. The revision condition runs a sequential session and then asks
//! for a bolder, more varied rewrite of the whole list.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::corpus::{ConditionKind, ConditionSpec, CorpusError, Idea, PersonaPoolKind, Session, Source};
use crate::gateway::{ChatMessage, ChatRequest, Gateway, GatewayError};
use crate::rng;

pub const DEFAULT_SYSTEM_PROMPT: &str = "You are a helpful assistant.";

/// Default chat model for generation and labeling.
pub const DEFAULT_MODEL_ID: &str = "gpt-4o-2024-11-20";

/// Prefix shared by every persona instruction.
pub const PERSONA_PREFIX: &str = "You are acting as this persona: ";

const ORDINARY_PERSONAS: &str = include_str!("../data/personas/ordinary.txt");
const ENTREPRENEUR_PERSONAS: &str = include_str!("../data/personas/entrepreneur.txt");

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("{0} is a batch condition; it has no per-idea prompts")]
    BatchKind(ConditionKind),
    #[error("idea index {index} out of range (prior ideas: {prior}, session length: {num_ideas})")]
    IndexOutOfRange { index: usize, prior: usize, num_ideas: usize },
    #[error("seeded history must start with the seed text")]
    SeedMismatch,
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Condition(#[from] CorpusError),
    #[error("could not parse idea list after a corrective retry: {0}")]
    Parse(CotParseError),
    #[error("backend returned an empty reply for idea #{0}")]
    EmptyReply(usize),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("persona pool: {0}")]
    Personas(String),
}

/// Distinct failure modes of [`parse_cot_json`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CotParseError {
    #[error("empty response")]
    Empty,
    #[error("no JSON array found")]
    NoArray,
    #[error("array element {0} is not an object")]
    NotObject(usize),
    #[error("array element {position} lacks a valid {field:?}")]
    MissingField { position: usize, field: &'static str },
    #[error("expected {expected} ideas, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("idea_number {0} appears more than once")]
    DuplicateNumber(i64),
    #[error("idea_number {number} outside 1..={max}")]
    OutOfRange { number: i64, max: usize },
    #[error("idea {0} has empty content")]
    EmptyContent(i64),
}

impl CotParseError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Empty => "empty",
            Self::NoArray => "no_array",
            Self::NotObject(_) => "not_object",
            Self::MissingField { .. } => "missing_field",
            Self::WrongCount { .. } => "wrong_count",
            Self::DuplicateNumber(_) => "duplicate_number",
            Self::OutOfRange { .. } => "out_of_range",
            Self::EmptyContent(_) => "empty_content",
        }
    }
}

pub fn default_idea_prompt(k: usize) -> String {
    format!(
        "Give me 1 new idea for a new fitness product. The idea should be explained in exactly one sentence. Just give me the idea, labeled 'idea #{k}.'"
    )
}

pub fn persona_system_prompt(persona: &str) -> String {
    format!("{PERSONA_PREFIX}{persona}. Generate ideas from this persona's perspective.")
}

pub fn persona_idea_prompt(k: usize) -> String {
    format!(
        "Give me 1 new idea for a fitness product. The idea should be explained in exactly one sentence. Just give me the idea, labeled 'Idea #{k}'."
    )
}

pub fn cot_batch_prompt(n: usize) -> String {
    format!(
        "Generate fitness product ideas. Follow these steps:\n\
1. Generate a list of {n} ideas (short title only)\n\
2. Review and make them bolder and more different - no two ideas should be the same\n\
3. Return ONLY a JSON array with {n} objects, each with \"idea_number\" (1-{n}) and \"idea_content\" (one sentence description)\n\
\n\
Return ONLY the JSON array, no other text."
    )
}

pub fn persona_cot_batch_prompt(persona: &str, n: usize) -> String {
    format!(
        "{PERSONA_PREFIX}{persona}\n\
\n\
Generate fitness product ideas from this persona's perspective using chain of thought reasoning. Follow these steps:\n\
\n\
1. First, think about what this persona would value in fitness products based on their characteristics.\n\
2. Generate a list of {n} fitness product ideas that align with this persona's needs and preferences (short titles only).\n\
3. Review and refine ideas to make them bolder and more different - ensure that no two ideas are the same.\n\
4. Consider how this persona would uniquely approach or modify each idea.\n\
\n\
Return ONLY a JSON array with {n} objects, each with:\n\
- \"idea_number\" (1-{n})\n\
- \"idea_content\" (one sentence description from this persona's perspective)\n\
\n\
Return ONLY the JSON array, no other text or explanation."
    )
}

/// Revision request over a finished sequential session.
pub fn revision_prompt(ideas: &[String], persona: Option<&str>) -> String {
    let n = ideas.len();
    let listed = ideas
        .iter()
        .enumerate()
        .map(|(i, text)| format!("Idea #{}: {}", i + 1, strip_idea_label(text)))
        .collect::<Vec<_>>()
        .join("\n");
    let tail = format!(
        "Return ONLY a JSON array with {n} objects, each with \"idea_number\" (1-{n}) and \"idea_content\" (revised one-sentence description). Make them bolder and more distinctive."
    );
    match persona {
        None => format!(
            "Please review the {n} fitness product ideas below. Revise them to make them bolder and more different from one another. Ensure that no two ideas are the same across your ten responses.\n\n{listed}\n\n{tail}"
        ),
        Some(p) => format!(
            "{PERSONA_PREFIX}{p}.\n\nPlease review the {n} fitness product ideas below that you previously generated from this persona's perspective. Revise them to make them bolder and more different from one another while staying faithful to the persona. Ensure that no two ideas are the same across your ten responses.\n\n{listed}\n\n{tail}"
        ),
    }
}

/// Follow-up sent once when a JSON idea list fails to parse.
pub fn correction_prompt(error: &CotParseError, n: usize) -> String {
    format!(
        "Your previous response could not be used ({error}). Return ONLY a JSON array with exactly {n} objects, each with \"idea_number\" (1-{n}) and \"idea_content\", and no other text."
    )
}

/// Removes a leading `idea #k:` marker (any case, optional bold) from a reply.
pub fn strip_idea_label(text: &str) -> &str {
    let t = text.trim();
    let body = t.trim_start_matches('*');
    let lower = body.get(..6).map(str::to_ascii_lowercase);
    if lower.as_deref() != Some("idea #") {
        return t;
    }
    let rest = &body[6..];
    let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits == 0 {
        return t;
    }
    let rest = rest[digits..].trim_start_matches(['.', ':', '*']);
    let rest = rest.trim_start_matches(['.', ':', '*']).trim_start();
    if rest.is_empty() {
        t
    } else {
        rest
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub condition: ConditionSpec,
    pub num_ideas: usize,
    pub participant_id: String,
    /// Per-participant sampling seed forwarded to the backend.
    #[serde(default)]
    pub sampling_seed: Option<u64>,
}

impl SessionPlan {
    pub fn new(condition: ConditionSpec, participant_id: impl Into<String>) -> Self {
        Self {
            condition,
            num_ideas: crate::corpus::SESSION_LENGTH,
            participant_id: participant_id.into(),
            sampling_seed: None,
        }
    }

    pub fn with_sampling_seed(mut self, seed: u64) -> Self {
        self.sampling_seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<(), StrategyError> {
        if self.num_ideas == 0 {
            return Err(StrategyError::Plan("num_ideas must be at least 1".into()));
        }
        if self.condition.kind == ConditionKind::Seeded && self.num_ideas < 2 {
            return Err(StrategyError::Plan("seeded sessions need at least 2 ideas".into()));
        }
        self.condition.validate()?;
        Ok(())
    }

    fn persona(&self) -> Option<&str> {
        self.condition.persona.as_deref()
    }

    /// Persona prompts use the `Idea #k` casing; all others `idea #k.`.
    fn uses_persona_prompts(&self) -> bool {
        match self.condition.kind {
            ConditionKind::PersonaSequential => true,
            ConditionKind::CotRevisionSequential => self.persona().is_some(),
            _ => false,
        }
    }

    fn system_message(&self) -> ChatMessage {
        match (self.uses_persona_prompts(), self.persona()) {
            (true, Some(p)) => ChatMessage::system(persona_system_prompt(p)),
            _ => ChatMessage::system(DEFAULT_SYSTEM_PROMPT),
        }
    }

    fn idea_prompt(&self, k: usize) -> String {
        if self.uses_persona_prompts() {
            persona_idea_prompt(k)
        } else {
            default_idea_prompt(k)
        }
    }

    fn request(&self, messages: Vec<ChatMessage>) -> ChatRequest {
        ChatRequest::new(self.condition.model_id.clone(), messages, self.condition.temperature)
            .with_seed(self.sampling_seed)
    }
}

/// Message list for sequential idea `next_index` given the ideas so far.
pub fn build_messages(
    plan: &SessionPlan,
    prior_ideas: &[String],
    next_index: usize,
) -> Result<Vec<ChatMessage>, StrategyError> {
    if plan.condition.kind.is_batch() {
        return Err(StrategyError::BatchKind(plan.condition.kind));
    }
    if next_index == 0 || next_index != prior_ideas.len() + 1 || next_index > plan.num_ideas {
        return Err(StrategyError::IndexOutOfRange {
            index: next_index,
            prior: prior_ideas.len(),
            num_ideas: plan.num_ideas,
        });
    }
    if plan.condition.kind == ConditionKind::Seeded {
        let seed = plan.condition.seed_text.as_deref().ok_or(StrategyError::SeedMismatch)?;
        if prior_ideas.first().map(String::as_str) != Some(seed) {
            return Err(StrategyError::SeedMismatch);
        }
    }
    let mut messages = Vec::with_capacity(2 * next_index);
    messages.push(plan.system_message());
    for (i, idea) in prior_ideas.iter().enumerate() {
        messages.push(ChatMessage::user(plan.idea_prompt(i + 1)));
        messages.push(ChatMessage::assistant(idea.clone()));
    }
    messages.push(ChatMessage::user(plan.idea_prompt(next_index)));
    Ok(messages)
}

/// Message list for a batch condition.
pub fn build_batch_messages(plan: &SessionPlan) -> Result<Vec<ChatMessage>, StrategyError> {
    match (plan.condition.kind, plan.persona()) {
        (ConditionKind::CotBatch, _) => Ok(vec![ChatMessage::user(cot_batch_prompt(plan.num_ideas))]),
        (ConditionKind::PersonaCotBatch, Some(p)) => {
            Ok(vec![ChatMessage::user(persona_cot_batch_prompt(p, plan.num_ideas))])
        }
        (kind, _) => Err(StrategyError::Plan(format!("{kind} is not a batch condition"))),
    }
}

/// Message list for the revision call of a `cot_revision_sequential` session.
pub fn build_revision_messages(plan: &SessionPlan, ideas: &[String]) -> Vec<ChatMessage> {
    let persona = if plan.uses_persona_prompts() { plan.persona() } else { None };
    vec![plan.system_message(), ChatMessage::user(revision_prompt(ideas, persona))]
}

fn as_index(v: &Value) -> Option<i64> {
    match v {
        Value::Number(n) => n.as_i64().or_else(|| n.as_f64().filter(|f| f.fract() == 0.0).map(|f| f as i64)),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn first_json_array(raw: &str) -> Option<Vec<Value>> {
    raw.match_indices('[').find_map(|(pos, _)| {
        let mut stream = serde_json::Deserializer::from_str(&raw[pos..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(Value::Array(items))) => Some(items),
            _ => None,
        }
    })
}

/// Extracts `expected` `(idea_number, idea_content)` pairs from the first JSON
/// array in `raw`, sorted by number. Surrounding prose and code fences are
/// ignored.
pub fn parse_cot_json_n(raw: &str, expected: usize) -> Result<Vec<(u32, String)>, CotParseError> {
    if raw.trim().is_empty() {
        return Err(CotParseError::Empty);
    }
    let items = first_json_array(raw).ok_or(CotParseError::NoArray)?;
    if items.len() != expected {
        return Err(CotParseError::WrongCount { expected, found: items.len() });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(expected);
    for (position, item) in items.iter().enumerate() {
        let obj = item.as_object().ok_or(CotParseError::NotObject(position))?;
        let number = obj
            .get("idea_number")
            .and_then(as_index)
            .ok_or(CotParseError::MissingField { position, field: "idea_number" })?;
        let content = obj
            .get("idea_content")
            .and_then(Value::as_str)
            .ok_or(CotParseError::MissingField { position, field: "idea_content" })?;
        if number < 1 || number as usize > expected {
            return Err(CotParseError::OutOfRange { number, max: expected });
        }
        if !seen.insert(number) {
            return Err(CotParseError::DuplicateNumber(number));
        }
        if content.trim().is_empty() {
            return Err(CotParseError::EmptyContent(number));
        }
        out.push((number as u32, content.trim().to_string()));
    }
    out.sort_by_key(|(n, _)| *n);
    Ok(out)
}

/// [`parse_cot_json_n`] for the standard ten-idea session.
pub fn parse_cot_json(raw: &str) -> Result<Vec<(u32, String)>, CotParseError> {
    parse_cot_json_n(raw, crate::corpus::SESSION_LENGTH)
}

/// Sends `messages`, parsing the reply as an idea list. On a parse failure
/// the raw reply and a corrective instruction are appended and the call is
/// retried once.
fn request_idea_list(
    plan: &SessionPlan,
    gateway: &Gateway,
    mut messages: Vec<ChatMessage>,
) -> Result<Vec<String>, StrategyError> {
    let n = plan.num_ideas;
    let raw = gateway.complete_chat(&plan.request(messages.clone()))?;
    match parse_cot_json_n(&raw, n) {
        Ok(items) => Ok(items.into_iter().map(|(_, t)| t).collect()),
        Err(first) => {
            tracing::warn!(participant = %plan.participant_id, error = %first, "idea list unparseable, retrying once");
            if !raw.trim().is_empty() {
                messages.push(ChatMessage::assistant(raw));
            }
            messages.push(ChatMessage::user(correction_prompt(&first, n)));
            let raw = gateway.complete_chat(&plan.request(messages))?;
            parse_cot_json_n(&raw, n)
                .map(|items| items.into_iter().map(|(_, t)| t).collect())
                .map_err(StrategyError::Parse)
        }
    }
}

fn run_sequential(plan: &SessionPlan, gateway: &Gateway) -> Result<Vec<String>, StrategyError> {
    let mut ideas: Vec<String> = Vec::with_capacity(plan.num_ideas);
    if plan.condition.kind == ConditionKind::Seeded {
        ideas.push(plan.condition.seed_text.clone().expect("validated"));
    }
    while ideas.len() < plan.num_ideas {
        let k = ideas.len() + 1;
        let messages = build_messages(plan, &ideas, k)?;
        let reply = gateway.complete_chat(&plan.request(messages))?;
        if reply.trim().is_empty() {
            return Err(StrategyError::EmptyReply(k));
        }
        ideas.push(reply);
    }
    Ok(ideas)
}

/// Runs one participant's session against `gateway`.
pub fn run_session(plan: &SessionPlan, gateway: &Gateway) -> Result<Session, StrategyError> {
    plan.validate()?;
    let texts = match plan.condition.kind {
        ConditionKind::DefaultSequential | ConditionKind::Seeded | ConditionKind::PersonaSequential => {
            run_sequential(plan, gateway)?
        }
        ConditionKind::CotBatch | ConditionKind::PersonaCotBatch => {
            request_idea_list(plan, gateway, build_batch_messages(plan)?)?
        }
        ConditionKind::CotRevisionSequential => {
            let base = run_sequential(plan, gateway)?;
            request_idea_list(plan, gateway, build_revision_messages(plan, &base))?
        }
    };
    let ideas = texts
        .into_iter()
        .enumerate()
        .map(|(i, t)| Idea::new(plan.participant_id.clone(), i as u32 + 1, t))
        .collect();
    Ok(Session {
        id: plan.participant_id.clone(),
        source: Source::Llm,
        condition: plan.condition.clone(),
        ideas,
        offtask_ratio: None,
    })
}

/// Runs independent sessions on up to `workers` threads. Results keep the
/// order of `plans`; calls within a session stay serial.
pub fn run_sessions(
    plans: &[SessionPlan],
    gateway: &Gateway,
    workers: usize,
) -> Vec<Result<Session, StrategyError>> {
    crate::par::par_map(plans, workers, |plan| run_session(plan, gateway))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonaPool {
    pub name: PersonaPoolKind,
    pub personas: Vec<String>,
}

impl PersonaPool {
    pub fn new(name: PersonaPoolKind, personas: Vec<String>) -> Result<Self, StrategyError> {
        let mut seen = HashSet::new();
        for p in &personas {
            if p.trim().is_empty() {
                return Err(StrategyError::Personas("empty persona".into()));
            }
            if !seen.insert(p.trim()) {
                return Err(StrategyError::Personas(format!("duplicate persona {p:?}")));
            }
        }
        Ok(Self { name, personas })
    }

    /// One persona per nonempty line.
    pub fn parse(name: PersonaPoolKind, text: &str) -> Result<Self, StrategyError> {
        Self::new(
            name,
            text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect(),
        )
    }

    pub fn load(name: PersonaPoolKind, path: &Path) -> Result<Self, StrategyError> {
        let text = fs::read_to_string(path)
            .map_err(|e| StrategyError::Personas(format!("{}: {e}", path.display())))?;
        Self::parse(name, &text)
    }

    /// The shipped 99-persona lists.
    pub fn builtin(name: PersonaPoolKind) -> Option<Self> {
        let text = match name {
            PersonaPoolKind::Ordinary => ORDINARY_PERSONAS,
            PersonaPoolKind::Entrepreneur => ENTREPRENEUR_PERSONAS,
            PersonaPoolKind::None => return None,
        };
        Some(Self::parse(name, text).expect("built-in pool is valid"))
    }

    /// Assigns a distinct persona to each of `participants`, in a seeded
    /// random order. Fails when the pool is too small.
    pub fn assign(&self, participants: usize, seed: u64) -> Result<Vec<String>, StrategyError> {
        if participants > self.personas.len() {
            return Err(StrategyError::Personas(format!(
                "{participants} participants but only {} personas",
                self.personas.len()
            )));
        }
        let mut order: Vec<usize> = (0..self.personas.len()).collect();
        order.shuffle(&mut rng::stream(seed, &[rng::hash_str("persona-assignment")]));
        Ok(order[..participants].iter().map(|&i| self.personas[i].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::Role;

    fn plan(kind: ConditionKind) -> SessionPlan {
        SessionPlan::new(ConditionSpec::new("c", kind, DEFAULT_MODEL_ID), "p1")
    }

    #[test]
    fn default_first_call() {
        let msgs = build_messages(&plan(ConditionKind::DefaultSequential), &[], 1).unwrap();
        assert_eq!(msgs.len(), 2);
        assert_eq!(msgs[0], ChatMessage::system("You are a helpful assistant."));
        assert_eq!(
            msgs[1].content,
            "Give me 1 new idea for a new fitness product. The idea should be explained in exactly one sentence. Just give me the idea, labeled 'idea #1.'"
        );
    }

    #[test]
    fn history_replays_prior_ideas() {
        let p = plan(ConditionKind::DefaultSequential);
        let prior = vec!["one".to_string(), "two".to_string()];
        let msgs = build_messages(&p, &prior, 3).unwrap();
        let assistants: Vec<_> = msgs.iter().filter(|m| m.role == Role::Assistant).map(|m| m.content.as_str()).collect();
        assert_eq!(assistants, ["one", "two"]);
        assert!(msgs.last().unwrap().content.ends_with("labeled 'idea #3.'"));
    }

    #[test]
    fn index_and_kind_errors() {
        let p = plan(ConditionKind::DefaultSequential);
        assert!(matches!(build_messages(&p, &[], 2), Err(StrategyError::IndexOutOfRange { .. })));
        assert!(matches!(build_messages(&p, &[], 0), Err(StrategyError::IndexOutOfRange { .. })));
        let ten: Vec<String> = (0..10).map(|i| i.to_string()).collect();
        assert!(matches!(build_messages(&p, &ten, 11), Err(StrategyError::IndexOutOfRange { .. })));
        assert!(matches!(build_messages(&plan(ConditionKind::CotBatch), &[], 1), Err(StrategyError::BatchKind(_))));
    }

    #[test]
    fn seeded_history_starts_with_seed() {
        let mut p = plan(ConditionKind::Seeded);
        p.condition.seed_text = Some("resistance bands that clip onto a door frame".into());
        let seed = p.condition.seed_text.clone().unwrap();
        let msgs = build_messages(&p, std::slice::from_ref(&seed), 2).unwrap();
        assert_eq!(msgs[2], ChatMessage::assistant(seed));
        assert!(matches!(build_messages(&p, &["other".into()], 2), Err(StrategyError::SeedMismatch)));
    }

    #[test]
    fn strip_label_variants() {
        assert_eq!(strip_idea_label("**idea #1:** Smart Device that tracks"), "Smart Device that tracks");
        assert_eq!(strip_idea_label("Idea #10: A mat"), "A mat");
        assert_eq!(strip_idea_label("idea #2. A mat"), "A mat");
        assert_eq!(strip_idea_label("A mat"), "A mat");
        assert_eq!(strip_idea_label("Idea #3"), "Idea #3");
    }

    fn array(n: usize) -> String {
        let items: Vec<String> = (1..=n)
            .map(|i| format!("{{\"idea_number\": {i}, \"idea_content\": \"idea {i}\"}}"))
            .collect();
        format!("[{}]", items.join(", "))
    }

    #[test]
    fn parses_clean_and_fenced_arrays() {
        let clean = parse_cot_json(&array(10)).unwrap();
        assert_eq!(clean.len(), 10);
        assert_eq!(clean[0], (1, "idea 1".to_string()));
        let fenced = format!("Sure! [Note] here you go:\n```json\n{}\n```\nEnjoy.", array(10));
        assert_eq!(parse_cot_json(&fenced).unwrap(), clean);
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert_eq!(parse_cot_json(&array(9)).unwrap_err(), CotParseError::WrongCount { expected: 10, found: 9 });
        assert_eq!(parse_cot_json("no json here").unwrap_err(), CotParseError::NoArray);
        assert_eq!(parse_cot_json("  ").unwrap_err(), CotParseError::Empty);
        let dup = array(10).replace("\"idea_number\": 2,", "\"idea_number\": 1,");
        assert_eq!(parse_cot_json(&dup).unwrap_err(), CotParseError::DuplicateNumber(1));
        let oob = array(10).replace("\"idea_number\": 10,", "\"idea_number\": 11,");
        assert_eq!(parse_cot_json(&oob).unwrap_err().code(), "out_of_range");
        let empty = array(10).replace("\"idea 3\"", "\"  \"");
        assert_eq!(parse_cot_json(&empty).unwrap_err(), CotParseError::EmptyContent(3));
        let stringly = array(10).replace("\"idea_number\": 4,", "\"idea_number\": \"4\",");
        assert!(parse_cot_json(&stringly).is_ok());
    }

    #[test]
    fn builtin_pools_have_99_distinct_personas() {
        for kind in [PersonaPoolKind::Ordinary, PersonaPoolKind::Entrepreneur] {
            let pool = PersonaPool::builtin(kind).unwrap();
            assert_eq!(pool.personas.len(), 99);
        }
        assert!(PersonaPool::builtin(PersonaPoolKind::None).is_none());
    }

    #[test]
    fn persona_assignment_is_a_seeded_bijection() {
        let pool = PersonaPool::builtin(PersonaPoolKind::Ordinary).unwrap();
        let a = pool.assign(99, 5).unwrap();
        let b = pool.assign(99, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().collect::<HashSet<_>>().len(), 99);
        assert_ne!(a, pool.assign(99, 6).unwrap());
        assert!(pool.assign(100, 5).is_err());
        assert!(PersonaPool::parse(PersonaPoolKind::Ordinary, "a\nb\na\n").is_err());
    }
}
