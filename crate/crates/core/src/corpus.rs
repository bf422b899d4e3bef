//! Ideas, sessions and conditions, plus JSONL/CSV corpus files.
//!
//! A corpus file holds one idea per row. Session-level fields (source,
//! condition, off-task ratio) are repeated on every row of the session and
//! must agree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::scheme::{CategoryScheme, IdeaLabel, SchemeError};

/// Ideas per complete session.
pub const SESSION_LENGTH: usize = 10;

/// Default off-task exclusion threshold for human sessions.
pub const OFFTASK_THRESHOLD: f64 = 0.1;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: duplicate idea (session {session_id:?}, index {index})")]
    Duplicate { line: u64, session_id: String, index: u32 },
    #[error("session {session_id:?}: idea indices are not contiguous from 1 (missing {missing})")]
    IndexGap { session_id: String, missing: u32 },
    #[error("line {line}: session {session_id:?} field {field} disagrees with earlier rows")]
    Inconsistent { line: u64, session_id: String, field: &'static str },
    #[error("line {line}: {message}")]
    Invalid { line: u64, message: String },
    #[error("invalid condition {name:?}: {message}")]
    Condition { name: String, message: String },
    #[error("off-task threshold must be positive, got {0}")]
    Threshold(f64),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Human,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    DefaultSequential,
    Seeded,
    PersonaSequential,
    CotBatch,
    PersonaCotBatch,
    CotRevisionSequential,
}

impl ConditionKind {
    pub fn is_batch(self) -> bool {
        matches!(self, Self::CotBatch | Self::PersonaCotBatch)
    }

    pub fn needs_persona(self) -> bool {
        matches!(self, Self::PersonaSequential | Self::PersonaCotBatch)
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersonaPoolKind {
    Ordinary,
    Entrepreneur,
    #[default]
    None,
}

fn default_temperature() -> f64 {
    1.0
}

/// A fully resolved prompting strategy. `name` is the group label used to
/// compare conditions in analysis (e.g. `"llm_default"`, `"human"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSpec {
    pub name: String,
    pub kind: ConditionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona: Option<String>,
    #[serde(default)]
    pub persona_pool: PersonaPoolKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_text: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    pub model_id: String,
}

impl ConditionSpec {
    pub fn new(name: impl Into<String>, kind: ConditionKind, model_id: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind,
            persona: None,
            persona_pool: PersonaPoolKind::None,
            seed_text: None,
            temperature: default_temperature(),
            model_id: model_id.into(),
        }
    }

    pub fn with_persona(mut self, pool: PersonaPoolKind, persona: impl Into<String>) -> Self {
        self.persona_pool = pool;
        self.persona = Some(persona.into());
        self
    }

    pub fn with_seed_text(mut self, seed: impl Into<String>) -> Self {
        self.seed_text = Some(seed.into());
        self
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let fail = |message: &str| {
            Err(CorpusError::Condition { name: self.name.clone(), message: message.to_string() })
        };
        if self.kind.needs_persona() && self.persona.as_deref().is_none_or(|p| p.trim().is_empty()) {
            return fail("persona conditions require a persona");
        }
        if self.kind == ConditionKind::Seeded
            && self.seed_text.as_deref().is_none_or(|s| s.trim().is_empty())
        {
            return fail("seeded condition requires seed text");
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return fail("temperature must be a finite value >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Idea {
    pub session_id: String,
    pub index: u32,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<IdeaLabel>,
    /// Set when categorization failed for this idea.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_error: Option<String>,
}

impl Idea {
    pub fn new(session_id: impl Into<String>, index: u32, text: impl Into<String>) -> Self {
        Self {
            session_id: session_id.into(),
            index,
            text: text.into(),
            label: None,
            label_error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub source: Source,
    pub condition: ConditionSpec,
    pub ideas: Vec<Idea>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offtask_ratio: Option<f64>,
}

impl Session {
    pub fn is_complete(&self) -> bool {
        self.ideas.len() == SESSION_LENGTH
    }

    pub fn is_labeled(&self) -> bool {
        self.ideas.iter().all(|i| i.label.is_some())
    }

    pub fn labels(&self) -> Option<Vec<&IdeaLabel>> {
        self.ideas.iter().map(|i| i.label.as_ref()).collect()
    }

    /// Checks structural invariants: contiguous indices, nonempty text,
    /// no off-task ratio on LLM sessions.
    pub fn validate(&self) -> Result<(), CorpusError> {
        for (pos, idea) in self.ideas.iter().enumerate() {
            if idea.index as usize != pos + 1 {
                return Err(CorpusError::IndexGap { session_id: self.id.clone(), missing: pos as u32 + 1 });
            }
            if idea.text.trim().is_empty() {
                return Err(CorpusError::Invalid {
                    line: 0,
                    message: format!("session {:?} idea {} has empty text", self.id, idea.index),
                });
            }
        }
        if self.source == Source::Llm && self.offtask_ratio.is_some() {
            return Err(CorpusError::Invalid {
                line: 0,
                message: format!("LLM session {:?} carries an off-task ratio", self.id),
            });
        }
        Ok(())
    }

    /// Validates every label against `scheme`.
    pub fn check_labels(&self, scheme: &CategoryScheme) -> Result<(), CorpusError> {
        for idea in &self.ideas {
            if let Some(label) = &idea.label {
                scheme.check(label)?;
            }
        }
        Ok(())
    }
}

/// Keeps complete sessions unless `include_incomplete` is set.
pub fn analyzable(sessions: &[Session], include_incomplete: bool) -> Vec<Session> {
    sessions
        .iter()
        .filter(|s| include_incomplete || s.is_complete())
        .cloned()
        .collect()
}

/// Groups sessions by condition name, preserving input order within a group.
pub fn group_by_condition(sessions: &[Session]) -> BTreeMap<String, Vec<Session>> {
    let mut groups: BTreeMap<String, Vec<Session>> = BTreeMap::new();
    for s in sessions {
        groups.entry(s.condition.name.clone()).or_default().push(s.clone());
    }
    groups
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// Infers the format from the file extension (`.csv`, else JSONL).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Self::Csv,
            _ => Self::Jsonl,
        }
    }
}

/// One file row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Row {
    session_id: String,
    index: u32,
    text: String,
    #[serde(default = "default_source")]
    source: Source,
    #[serde(default)]
    condition: Option<String>,
    #[serde(default)]
    condition_kind: Option<ConditionKind>,
    #[serde(default)]
    persona: Option<String>,
    #[serde(default)]
    persona_pool: Option<PersonaPoolKind>,
    #[serde(default)]
    seed_text: Option<String>,
    #[serde(default)]
    temperature: Option<f64>,
    #[serde(default)]
    model_id: Option<String>,
    #[serde(default)]
    offtask_ratio: Option<f64>,
    #[serde(default)]
    industry_context: Option<String>,
    #[serde(default)]
    psychological_need: Option<String>,
    #[serde(default)]
    product_form: Option<String>,
    #[serde(default)]
    scheme_version: Option<String>,
    #[serde(default)]
    label_error: Option<String>,
}

fn default_source() -> Source {
    Source::Llm
}

impl Row {
    fn from_idea(session: &Session, idea: &Idea) -> Self {
        let c = &session.condition;
        let label = idea.label.as_ref();
        Self {
            session_id: session.id.clone(),
            index: idea.index,
            text: idea.text.clone(),
            source: session.source,
            condition: Some(c.name.clone()),
            condition_kind: Some(c.kind),
            persona: c.persona.clone(),
            persona_pool: Some(c.persona_pool),
            seed_text: c.seed_text.clone(),
            temperature: Some(c.temperature),
            model_id: Some(c.model_id.clone()),
            offtask_ratio: session.offtask_ratio,
            industry_context: label.map(|l| l.industry_context.clone()),
            psychological_need: label.map(|l| l.psychological_need.clone()),
            product_form: label.map(|l| l.product_form.clone()),
            scheme_version: label.map(|l| l.scheme_version.clone()),
            label_error: idea.label_error.clone(),
        }
    }

    fn condition_spec(&self) -> ConditionSpec {
        let default_model = match self.source {
            Source::Human => "human",
            Source::Llm => "unknown",
        };
        ConditionSpec {
            name: self.condition.clone().unwrap_or_else(|| match self.source {
                Source::Human => "human".to_string(),
                Source::Llm => "llm".to_string(),
            }),
            kind: self.condition_kind.unwrap_or(ConditionKind::DefaultSequential),
            persona: self.persona.clone(),
            persona_pool: self.persona_pool.unwrap_or_default(),
            seed_text: self.seed_text.clone(),
            temperature: self.temperature.unwrap_or(1.0),
            model_id: self.model_id.clone().unwrap_or_else(|| default_model.to_string()),
        }
    }

    fn label(&self, line: u64) -> Result<Option<IdeaLabel>, CorpusError> {
        match (&self.industry_context, &self.psychological_need, &self.product_form) {
            (None, None, None) => Ok(None),
            (Some(a), Some(b), Some(c)) => Ok(Some(IdeaLabel::new(
                a.clone(),
                b.clone(),
                c.clone(),
                self.scheme_version.clone().unwrap_or_default(),
            ))),
            _ => Err(CorpusError::Invalid {
                line,
                message: "label must set all three dimensions or none".into(),
            }),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.display().to_string(), source }
}

/// Reads a corpus, grouping rows into sessions (in order of first
/// appearance) with ideas sorted by index.
pub fn read_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Session>, CorpusError> {
    let rows = match format {
        CorpusFormat::Jsonl => read_jsonl_rows(path)?,
        CorpusFormat::Csv => read_csv_rows(path)?,
    };
    assemble(rows)
}

fn read_jsonl_rows(path: &Path) -> Result<Vec<(u64, Row)>, CorpusError> {
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut rows = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n as u64 + 1;
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Row = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Parse { line: line_no, message: e.to_string() })?;
        rows.push((line_no, row));
    }
    Ok(rows)
}

fn read_csv_rows(path: &Path) -> Result<Vec<(u64, Row)>, CorpusError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CorpusError::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: Row = record
            .deserialize(Some(&headers))
            .map_err(|e| CorpusError::Parse { line, message: e.to_string() })?;
        rows.push((line, row));
    }
    Ok(rows)
}

fn assemble(rows: Vec<(u64, Row)>) -> Result<Vec<Session>, CorpusError> {
    let mut order: Vec<String> = Vec::new();
    let mut sessions: HashMap<String, Session> = HashMap::new();
    for (line, row) in rows {
        if row.text.trim().is_empty() {
            return Err(CorpusError::Invalid { line, message: "idea text is empty".into() });
        }
        if row.index == 0 {
            return Err(CorpusError::Invalid { line, message: "idea index starts at 1".into() });
        }
        if let Some(r) = row.offtask_ratio {
            if row.source == Source::Llm {
                return Err(CorpusError::Invalid { line, message: "LLM rows cannot carry offtask_ratio".into() });
            }
            if !(r.is_finite() && r >= 0.0) {
                return Err(CorpusError::Invalid { line, message: format!("invalid offtask_ratio {r}") });
            }
        }
        let condition = row.condition_spec();
        let mut idea = Idea::new(row.session_id.clone(), row.index, row.text.clone());
        idea.label = row.label(line)?;
        idea.label_error = row.label_error.clone();

        match sessions.get_mut(&row.session_id) {
            Some(session) => {
                let inconsistent = |field| CorpusError::Inconsistent {
                    line,
                    session_id: row.session_id.clone(),
                    field,
                };
                if session.source != row.source {
                    return Err(inconsistent("source"));
                }
                if session.condition != condition {
                    return Err(inconsistent("condition"));
                }
                if session.offtask_ratio != row.offtask_ratio {
                    return Err(inconsistent("offtask_ratio"));
                }
                if session.ideas.iter().any(|i| i.index == row.index) {
                    return Err(CorpusError::Duplicate { line, session_id: row.session_id, index: row.index });
                }
                session.ideas.push(idea);
            }
            None => {
                condition.validate().map_err(|e| CorpusError::Invalid { line, message: e.to_string() })?;
                order.push(row.session_id.clone());
                sessions.insert(
                    row.session_id.clone(),
                    Session {
                        id: row.session_id,
                        source: row.source,
                        condition,
                        ideas: vec![idea],
                        offtask_ratio: row.offtask_ratio,
                    },
                );
            }
        }
    }

    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let mut session = sessions.remove(&id).expect("present");
        session.ideas.sort_by_key(|i| i.index);
        for (pos, idea) in session.ideas.iter().enumerate() {
            if idea.index as usize != pos + 1 {
                return Err(CorpusError::IndexGap { session_id: id, missing: pos as u32 + 1 });
            }
        }
        if !session.is_complete() {
            warn!(session = %session.id, ideas = session.ideas.len(), "incomplete session");
        }
        out.push(session);
    }
    Ok(out)
}

/// Writes sessions in order, ideas by index. Reading the file back with
/// [`read_corpus`] yields structurally equal sessions.
pub fn write_corpus(sessions: &[Session], path: &Path, format: CorpusFormat) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(io_err(path))?;
    let rows = sessions.iter().flat_map(|s| s.ideas.iter().map(move |i| Row::from_idea(s, i)));
    match format {
        CorpusFormat::Jsonl => {
            let mut w = BufWriter::new(file);
            for row in rows {
                let line = serde_json::to_string(&row).expect("row serializes");
                writeln!(w, "{line}").map_err(io_err(path))?;
            }
            w.flush().map_err(io_err(path))?;
        }
        CorpusFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            let mut wrote = false;
            for row in rows {
                w.serialize(row)?;
                wrote = true;
            }
            if !wrote {
                w.write_record(CSV_HEADER)?;
            }
            w.flush().map_err(io_err(path))?;
        }
    }
    Ok(())
}

const CSV_HEADER: [&str; 17] = [
    "session_id",
    "index",
    "text",
    "source",
    "condition",
    "condition_kind",
    "persona",
    "persona_pool",
    "seed_text",
    "temperature",
    "model_id",
    "offtask_ratio",
    "industry_context",
    "psychological_need",
    "product_form",
    "scheme_version",
    "label_error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub sessions: Vec<Session>,
    pub removed: usize,
    /// Human sessions kept despite lacking an off-task ratio.
    pub missing_ratio: Vec<String>,
}

/// Drops human sessions whose off-task ratio strictly exceeds `threshold`.
pub fn filter_offtask(sessions: &[Session], threshold: f64) -> Result<FilterOutcome, CorpusError> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(CorpusError::Threshold(threshold));
    }
    let mut kept = Vec::with_capacity(sessions.len());
    let mut removed = 0;
    let mut missing_ratio = Vec::new();
    for s in sessions {
        match (s.source, s.offtask_ratio) {
            (Source::Human, Some(r)) if r > threshold => removed += 1,
            (Source::Human, None) => {
                warn!(session = %s.id, "human session without off-task ratio kept");
                missing_ratio.push(s.id.clone());
                kept.push(s.clone());
            }
            _ => kept.push(s.clone()),
        }
    }
    Ok(FilterOutcome { sessions: kept, removed, missing_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn human(id: &str, ratio: Option<f64>) -> Session {
        Session {
            id: id.into(),
            source: Source::Human,
            condition: ConditionSpec::new("human", ConditionKind::DefaultSequential, "human"),
            ideas: vec![Idea::new(id, 1, "a foam roller")],
            offtask_ratio: ratio,
        }
    }

    #[test]
    fn groups_rows_and_flags_incomplete() {
        let f = write_tmp(
            "{\"session_id\":\"s1\",\"index\":2,\"text\":\"b\"}\n{\"session_id\":\"s1\",\"index\":1,\"text\":\"a\"}\n",
            ".jsonl",
        );
        let sessions = read_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(sessions.len(), 1);
        assert_eq!(sessions[0].ideas.len(), 2);
        assert_eq!(sessions[0].ideas[0].text, "a");
        assert!(!sessions[0].is_complete());
        assert!(analyzable(&sessions, false).is_empty());
        assert_eq!(analyzable(&sessions, true).len(), 1);
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let f = write_tmp("", ".jsonl");
        assert!(read_corpus(f.path(), CorpusFormat::Jsonl).unwrap().is_empty());
        let f = write_tmp("", ".csv");
        assert!(read_corpus(f.path(), CorpusFormat::Csv).unwrap().is_empty());
    }

    #[test]
    fn duplicate_names_offending_line() {
        let f = write_tmp(
            "{\"session_id\":\"s1\",\"index\":1,\"text\":\"a\"}\n{\"session_id\":\"s1\",\"index\":1,\"text\":\"b\"}\n",
            ".jsonl",
        );
        let err = read_corpus(f.path(), CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(err, CorpusError::Duplicate { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn index_gap_and_parse_errors() {
        let f = write_tmp(
            "{\"session_id\":\"s1\",\"index\":1,\"text\":\"a\"}\n{\"session_id\":\"s1\",\"index\":3,\"text\":\"c\"}\n",
            ".jsonl",
        );
        assert!(matches!(
            read_corpus(f.path(), CorpusFormat::Jsonl),
            Err(CorpusError::IndexGap { missing: 2, .. })
        ));
        let f = write_tmp("{\"session_id\":\"s1\",\"index\":1,\"text\":\"a\"}\nnot json\n", ".jsonl");
        assert!(matches!(read_corpus(f.path(), CorpusFormat::Jsonl), Err(CorpusError::Parse { line: 2, .. })));
        let f = write_tmp("{\"session_id\":\"s1\",\"index\":1,\"text\":\"  \"}\n", ".jsonl");
        assert!(matches!(read_corpus(f.path(), CorpusFormat::Jsonl), Err(CorpusError::Invalid { line: 1, .. })));
        let f = write_tmp("{\"session_id\":\"s1\",\"index\":1,\"text\":\"a\",\"source\":\"llm\",\"offtask_ratio\":0.2}\n", ".jsonl");
        assert!(read_corpus(f.path(), CorpusFormat::Jsonl).is_err());
    }

    #[test]
    fn csv_reports_row_line() {
        let f = write_tmp("session_id,index,text\ns1,1,a\ns1,1,b\n", ".csv");
        assert!(matches!(
            read_corpus(f.path(), CorpusFormat::Csv),
            Err(CorpusError::Duplicate { line: 3, .. })
        ));
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("corpus.jsonl");
        assert!(matches!(write_corpus(&[], &path, CorpusFormat::Jsonl), Err(CorpusError::Io { .. })));
    }

    #[test]
    fn empty_list_writes_valid_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        for (name, fmt) in [("c.jsonl", CorpusFormat::Jsonl), ("c.csv", CorpusFormat::Csv)] {
            let path = dir.path().join(name);
            write_corpus(&[], &path, fmt).unwrap();
            assert!(read_corpus(&path, fmt).unwrap().is_empty());
        }
    }

    #[test]
    fn offtask_filter_boundaries() {
        let mut llm = human("l", None);
        llm.source = Source::Llm;
        let sessions = vec![human("a", Some(0.15)), human("b", Some(0.10)), llm, human("c", None)];
        let out = filter_offtask(&sessions, OFFTASK_THRESHOLD).unwrap();
        let ids: Vec<_> = out.sessions.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["b", "l", "c"]);
        assert_eq!(out.removed, 1);
        assert_eq!(out.missing_ratio, ["c"]);
        assert!(filter_offtask(&sessions, 0.0).is_err());
    }

    #[test]
    fn condition_rules() {
        let c = ConditionSpec::new("p", ConditionKind::PersonaSequential, "m");
        assert!(c.validate().is_err());
        assert!(c.with_persona(PersonaPoolKind::Ordinary, "A chef").validate().is_ok());
        let s = ConditionSpec::new("s", ConditionKind::Seeded, "m");
        assert!(s.validate().is_err());
        assert!(s.with_seed_text("resistance bands").validate().is_ok());
        let mut t = ConditionSpec::new("t", ConditionKind::DefaultSequential, "m");
        t.temperature = -1.0;
        assert!(t.validate().is_err());
        assert_eq!(ConditionKind::CotRevisionSequential.to_string(), "cot_revision_sequential");
    }
}
