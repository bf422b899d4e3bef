//! Experiment configuration and the generate → categorize → analyze
//! pipeline. Each stage reads and writes files under the output directory so
//! any stage can be rerun on its own.
//!
//! Output files (stable names, all under `paths.out`):
//!
//! | stage      | files |
//! |------------|-------|
//! | generate   | `corpus.jsonl`, `generate_failures.json` |
//! | categorize | `labeled.jsonl`, `embeddings.csv`, pipeline mode adds `raw_labels.jsonl`, `abstraction_map.json` |
//! | analyze    | `full_sample.csv`, `session_metrics.csv`, `accumulation.csv`, `bootstrap.json`, `bootstrap.csv`, `first_ideas.json`, `fixation.json`, `fixation.csv`, `partitioning.json`, `centroids.csv`, `report.json` |
//! | sweep      | `sweep.csv`, one `temperature_<t>/` directory per value |
//!
//! Every report carries the config hash, scheme version and code version.
//! Wall-clock timestamps appear only in `run.json`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{self, AnalysisError, BootstrapComparison, BootstrapConfig, FixationFit, Metric, PairTest};
use crate::categorizer::{self, AbstractionMap, CategorizerError, RawLabel};
use crate::corpus::{self, ConditionKind, ConditionSpec, CorpusError, CorpusFormat, PersonaPoolKind, Session};
use crate::gateway::{ChatBackend, EmbeddingBackend, EmbeddingVector, Gateway, GatewayError, RetryPolicy};
use crate::metrics::{self, MetricsError};
use crate::rng;
use crate::scheme::{CategoryScheme, SchemeError};
use crate::simident::{PopulationParams, SimError, SimulatorBackend, SIM_EMBEDDING_DIM};
use crate::strategies::{self, PersonaPool, SessionPlan, StrategyError, DEFAULT_MODEL_ID};
use crate::CODE_VERSION;

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const LABELED_FILE: &str = "labeled.jsonl";
pub const EMBEDDINGS_FILE: &str = "embeddings.csv";

/// Prefix of persona-pool entries that refer to the shipped lists.
pub const BUILTIN_POOL_PREFIX: &str = "builtin:";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("backend error: {0}")]
    Backend(String),
    #[error("data error: {0}")]
    Data(String),
}

impl ExperimentError {
    /// Process exit code: 1 config, 2 backend, 3 data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Backend(_) => 2,
            Self::Data(_) => 3,
        }
    }
}

impl From<GatewayError> for ExperimentError {
    fn from(e: GatewayError) -> Self {
        Self::Backend(e.to_string())
    }
}

impl From<CorpusError> for ExperimentError {
    fn from(e: CorpusError) -> Self {
        Self::Data(e.to_string())
    }
}

impl From<StrategyError> for ExperimentError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::Gateway(g) => g.into(),
            StrategyError::Plan(_) | StrategyError::Condition(_) | StrategyError::Personas(_) => {
                Self::Config(e.to_string())
            }
            other => Self::Data(other.to_string()),
        }
    }
}

impl From<CategorizerError> for ExperimentError {
    fn from(e: CategorizerError) -> Self {
        match e {
            CategorizerError::Gateway(g) => g.into(),
            other => Self::Data(other.to_string()),
        }
    }
}

impl From<AnalysisError> for ExperimentError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Config(_) | AnalysisError::UnknownMetric(_) => Self::Config(e.to_string()),
            other => Self::Data(other.to_string()),
        }
    }
}

impl From<MetricsError> for ExperimentError {
    fn from(e: MetricsError) -> Self {
        Self::Data(e.to_string())
    }
}

impl From<SimError> for ExperimentError {
    fn from(e: SimError) -> Self {
        Self::Config(e.to_string())
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |e| ExperimentError::Data(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Live,
    #[default]
    Sim,
}

fn default_name() -> String {
    "experiment".into()
}
fn default_model() -> String {
    DEFAULT_MODEL_ID.into()
}
fn default_temperature() -> f64 {
    1.0
}
fn default_num_ideas() -> usize {
    corpus::SESSION_LENGTH
}
fn default_true() -> bool {
    true
}
fn default_threshold() -> f64 {
    corpus::OFFTASK_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionConfig {
    pub name: String,
    pub kind: ConditionKind,
    pub participants: usize,
    #[serde(default = "default_model")]
    pub model_id: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default)]
    pub persona_pool: PersonaPoolKind,
    /// Fixed first idea for `seeded` sessions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_text: Option<String>,
    /// Seed ideas, one per line; participant `i` gets line `i mod n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_corpus: Option<PathBuf>,
    #[serde(default = "default_num_ideas")]
    pub num_ideas: usize,
    /// Simulator parameters for this condition only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimOverrides>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSettings {
    pub rho: f64,
    pub phi: f64,
    #[serde(default)]
    pub collapse: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self { rho: 0.5, phi: 0.5, collapse: 0.0 }
    }
}

fn default_base_url() -> String {
    "https://api.openai.com/v1".into()
}
fn default_key_env() -> String {
    "OPENAI_API_KEY".into()
}
fn default_embedding_model() -> String {
    "text-embedding-3-small".into()
}
fn default_embedding_dim() -> usize {
    SIM_EMBEDDING_DIM
}
fn default_in_flight() -> usize {
    crate::gateway::DEFAULT_MAX_IN_FLIGHT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    #[serde(default)]
    pub kind: BackendKind,
    #[serde(default = "default_base_url")]
    pub base_url: String,
    /// Name of the environment variable holding the API key.
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_embedding_model")]
    pub embedding_model: String,
    #[serde(default = "default_embedding_dim")]
    pub embedding_dim: usize,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    /// Serve only cached responses.
    #[serde(default)]
    pub replay_only: bool,
    #[serde(default)]
    pub sim: SimSettings,
}

impl Default for BackendConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSettings {
    #[serde(default = "default_group")]
    pub group_size: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub replacement: bool,
    /// Defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_group() -> usize {
    10
}
fn default_iterations() -> usize {
    100
}

impl Default for BootstrapSettings {
    fn default() -> Self {
        Self { group_size: 10, iterations: 100, replacement: false, seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategorizerMode {
    /// Label directly against the configured scheme.
    #[default]
    Fixed,
    /// Free-text labels, consolidation, then lookup.
    Pipeline,
}

fn default_targets() -> [usize; 3] {
    [9, 9, 10]
}
fn default_derived_version() -> String {
    "derived-v1".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorizerSettings {
    #[serde(default)]
    pub mode: CategorizerMode,
    #[serde(default = "default_model")]
    pub model_id: String,
    #[serde(default = "default_targets")]
    pub target_sizes: [usize; 3],
    /// Version given to a scheme derived in pipeline mode.
    #[serde(default = "default_derived_version")]
    pub derived_scheme_version: String,
}

impl Default for CategorizerSettings {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Response cache; defaults to `<out>/cache`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
    /// Category scheme JSON; defaults to the built-in fitness scheme.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<PathBuf>,
    /// Persona pool files by pool name (`ordinary`, `entrepreneur`). A value
    /// of `builtin:<name>` selects a shipped list.
    #[serde(default)]
    pub personas: BTreeMap<String, String>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self { out: default_out(), cache: None, scheme: None, personas: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub conditions: Vec<ConditionConfig>,
    #[serde(default)]
    pub backend: BackendConfig,
    #[serde(default)]
    pub bootstrap: BootstrapSettings,
    #[serde(default)]
    pub categorizer: CategorizerSettings,
    #[serde(default)]
    pub paths: PathsConfig,
    /// Embed every idea during categorization.
    #[serde(default = "default_true")]
    pub embed: bool,
    #[serde(default = "default_threshold")]
    pub offtask_threshold: f64,
    /// Analyze sessions with fewer ideas than planned.
    #[serde(default)]
    pub include_incomplete: bool,
    /// Temperatures used by the sweep command when none are given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_temperatures: Vec<f64>,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub backend: Option<BackendKind>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn pool_key(kind: PersonaPoolKind) -> &'static str {
    match kind {
        PersonaPoolKind::Ordinary => "ordinary",
        PersonaPoolKind::Entrepreneur => "entrepreneur",
        PersonaPoolKind::None => "none",
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(format!("invalid config: {e}")))
    }

    /// Loads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.paths.out);
        if let Some(p) = self.paths.cache.as_mut() {
            fix(p);
        }
        if let Some(p) = self.paths.scheme.as_mut() {
            fix(p);
        }
        for v in self.paths.personas.values_mut() {
            if !v.starts_with(BUILTIN_POOL_PREFIX) && Path::new(v).is_relative() {
                *v = base.join(&*v).display().to_string();
            }
        }
        for c in &mut self.conditions {
            if let Some(p) = c.seed_corpus.as_mut() {
                fix(p);
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(b) = o.backend {
            self.backend.kind = b;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(out) = &o.out {
            self.paths.out = out.clone();
        }
    }

    pub fn out_dir(&self) -> &Path {
        &self.paths.out
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.paths.cache.clone().unwrap_or_else(|| self.paths.out.join("cache"))
    }

    pub fn bootstrap_config(&self) -> BootstrapConfig {
        BootstrapConfig {
            group_size: self.bootstrap.group_size,
            iterations: self.bootstrap.iterations,
            rng_seed: self.bootstrap.seed.unwrap_or(self.seed),
            replacement: self.bootstrap.replacement,
        }
    }

    pub fn scheme(&self) -> Result<CategoryScheme, ExperimentError> {
        match &self.paths.scheme {
            None => Ok(CategoryScheme::builtin()),
            Some(p) => CategoryScheme::load(p)
                .map_err(|e: SchemeError| ExperimentError::Config(format!("{}: {e}", p.display()))),
        }
    }

    /// Hash of the config with output and cache locations blanked, so the
    /// same experiment written to a different directory hashes the same.
    pub fn config_hash(&self) -> String {
        let mut c = self.clone();
        c.paths.out = PathBuf::new();
        c.paths.cache = None;
        let canonical = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |m: String| Err(ExperimentError::Config(m));
        if self.conditions.is_empty() {
            return fail("at least one condition is required".into());
        }
        let mut names = std::collections::HashSet::new();
        for c in &self.conditions {
            if !names.insert(c.name.as_str()) {
                return fail(format!("duplicate condition name {:?}", c.name));
            }
            if c.participants == 0 {
                return fail(format!("{}: participants must be at least 1", c.name));
            }
            if c.num_ideas == 0 {
                return fail(format!("{}: num_ideas must be at least 1", c.name));
            }
            if !(c.temperature.is_finite() && (0.0..=2.0).contains(&c.temperature)) {
                return fail(format!("{}: temperature must lie in [0, 2]", c.name));
            }
            if c.kind.needs_persona() && c.persona_pool == PersonaPoolKind::None {
                return fail(format!("{}: {} needs a persona_pool", c.name, c.kind));
            }
            if c.kind == ConditionKind::Seeded && c.seed_text.is_none() && c.seed_corpus.is_none() {
                return fail(format!("{}: seeded conditions need seed_text or seed_corpus", c.name));
            }
            if let Some(sim) = &c.sim {
                self.sim_params(sim, &CategoryScheme::builtin())?;
            }
        }
        if self.bootstrap.group_size == 0 || self.bootstrap.iterations == 0 {
            return fail("bootstrap group_size and iterations must be at least 1".into());
        }
        if !(self.offtask_threshold.is_finite() && self.offtask_threshold > 0.0) {
            return fail("offtask_threshold must be positive".into());
        }
        if self.backend.embedding_dim == 0 {
            return fail("embedding_dim must be at least 1".into());
        }
        self.scheme()?;
        self.sim_params(&SimOverrides::default(), &CategoryScheme::builtin())?;
        Ok(())
    }

    fn sim_params(&self, o: &SimOverrides, scheme: &CategoryScheme) -> Result<PopulationParams, ExperimentError> {
        let s = &self.backend.sim;
        Ok(PopulationParams::new(o.rho.unwrap_or(s.rho), o.phi.unwrap_or(s.phi), scheme.clone(), self.seed)?
            .with_collapse(o.collapse.unwrap_or(s.collapse))?)
    }

    /// Loads the persona pool a condition refers to.
    pub fn persona_pool(&self, kind: PersonaPoolKind) -> Result<PersonaPool, ExperimentError> {
        let key = pool_key(kind);
        let entry = self
            .paths
            .personas
            .get(key)
            .ok_or_else(|| ExperimentError::Config(format!("no persona pool file configured for {key:?}")))?;
        if let Some(name) = entry.strip_prefix(BUILTIN_POOL_PREFIX) {
            let builtin = match name {
                "ordinary" => PersonaPoolKind::Ordinary,
                "entrepreneur" => PersonaPoolKind::Entrepreneur,
                _ => return Err(ExperimentError::Config(format!("unknown built-in pool {name:?}"))),
            };
            let personas = PersonaPool::builtin(builtin).expect("named pool").personas;
            return Ok(PersonaPool::new(kind, personas)?);
        }
        PersonaPool::load(kind, Path::new(entry)).map_err(|e| ExperimentError::Config(e.to_string()))
    }
}

/// Provenance block embedded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub scheme_version: String,
    pub code_version: String,
}

impl Provenance {
    fn new(cfg: &ExperimentConfig, scheme_version: &str) -> Self {
        Self {
            config_hash: cfg.config_hash(),
            scheme_version: scheme_version.to_string(),
            code_version: CODE_VERSION.to_string(),
        }
    }
}

fn write_json<T: Serialize>(path: &Path, provenance: &Provenance, body: &T) -> Result<(), ExperimentError> {
    let mut value = serde_json::to_value(body).expect("report serializes");
    let obj = value.as_object_mut().expect("reports are objects");
    obj.insert("provenance".into(), serde_json::to_value(provenance).expect("serializes"));
    let text = serde_json::to_string_pretty(&value).expect("serializes");
    fs::write(path, text + "\n").map_err(io_error(path))
}

/// Writes a CSV table with three trailing provenance columns.
fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>], p: &Provenance) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| ExperimentError::Data(format!("{}: {e}", path.display())))?;
    let csv_err = |e: csv::Error| ExperimentError::Data(format!("{}: {e}", path.display()));
    let mut head: Vec<&str> = header.to_vec();
    head.extend(["config_hash", "scheme_version", "code_version"]);
    w.write_record(&head).map_err(csv_err)?;
    for row in rows {
        let mut r: Vec<&str> = row.iter().map(String::as_str).collect();
        r.extend([p.config_hash.as_str(), p.scheme_version.as_str(), p.code_version.as_str()]);
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush().map_err(io_error(path))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Records the invocation with a wall-clock timestamp; the only output that
/// varies between identical runs.
fn write_run_metadata(cfg: &ExperimentConfig, command: &str) -> Result<(), ExperimentError> {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let path = cfg.out_dir().join("run.json");
    let body = serde_json::json!({
        "command": command,
        "timestamp_unix": secs,
        "config_hash": cfg.config_hash(),
        "code_version": CODE_VERSION,
        "backend": cfg.backend.kind,
    });
    fs::write(&path, serde_json::to_string_pretty(&body).expect("serializes") + "\n").map_err(io_error(&path))
}

fn ensure_out(cfg: &ExperimentConfig) -> Result<(), ExperimentError> {
    fs::create_dir_all(cfg.out_dir()).map_err(|e| ExperimentError::Config(format!("{}: {e}", cfg.out_dir().display())))
}

#[cfg(feature = "live")]
fn live_backend(cfg: &ExperimentConfig) -> Result<Arc<crate::gateway::http::HttpBackend>, ExperimentError> {
    use crate::gateway::http::{HttpBackend, HttpConfig};
    let b = &cfg.backend;
    let http = HttpConfig::from_env(&b.base_url, &b.api_key_env, &b.embedding_model, b.embedding_dim)
        .map_err(ExperimentError::Config)?;
    Ok(Arc::new(HttpBackend::new(http)))
}

/// Builds a gateway for `overrides` (simulator) or the live service.
fn build_gateway(cfg: &ExperimentConfig, overrides: &SimOverrides) -> Result<Gateway, ExperimentError> {
    let (chat, embed): (Arc<dyn ChatBackend>, Arc<dyn EmbeddingBackend>) = match cfg.backend.kind {
        BackendKind::Sim => {
            let sim = Arc::new(
                SimulatorBackend::new(cfg.sim_params(overrides, &cfg.scheme()?)?)
                    .with_embedding_dim(cfg.backend.embedding_dim),
            );
            (sim.clone(), sim)
        }
        #[cfg(feature = "live")]
        BackendKind::Live => {
            let http = live_backend(cfg)?;
            (http.clone(), http)
        }
        #[cfg(not(feature = "live"))]
        BackendKind::Live => {
            return Err(ExperimentError::Config("this build has no live backend".into()));
        }
    };
    let mut gw = Gateway::new(chat)
        .with_embedder(embed)
        .with_max_in_flight(cfg.backend.max_in_flight)
        .replay_only(cfg.backend.replay_only)
        .with_cache_dir(cfg.cache_dir())?;
    if cfg.backend.kind == BackendKind::Sim {
        gw = gw.with_retry(RetryPolicy::immediate());
    }
    Ok(gw)
}

fn seed_texts(c: &ConditionConfig) -> Result<Vec<String>, ExperimentError> {
    if let Some(t) = &c.seed_text {
        return Ok(vec![t.clone()]);
    }
    let Some(path) = &c.seed_corpus else { return Ok(Vec::new()) };
    let text = fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
    let lines: Vec<String> = text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
    if lines.is_empty() {
        return Err(ExperimentError::Config(format!("{}: no seed ideas", path.display())));
    }
    Ok(lines)
}

/// Session plans for every (condition, participant) pair, in config order.
/// Persona pools and seed corpora are loaded here, before any backend call.
pub fn plan_sessions(cfg: &ExperimentConfig) -> Result<Vec<(usize, SessionPlan)>, ExperimentError> {
    cfg.validate()?;
    let mut plans = Vec::new();
    for (ci, c) in cfg.conditions.iter().enumerate() {
        let key = rng::hash_str(&c.name);
        let personas = match c.persona_pool {
            PersonaPoolKind::None => None,
            kind => Some(cfg.persona_pool(kind)?.assign(c.participants, rng::derive_seed(cfg.seed, &[key]))?),
        };
        let seeds = seed_texts(c)?;
        for i in 0..c.participants {
            let mut spec = ConditionSpec::new(&c.name, c.kind, &c.model_id);
            spec.temperature = c.temperature;
            if let Some(p) = &personas {
                spec = spec.with_persona(c.persona_pool, p[i].clone());
            }
            if c.kind == ConditionKind::Seeded {
                spec = spec.with_seed_text(seeds[i % seeds.len()].clone());
            }
            let mut plan = SessionPlan::new(spec, format!("{}-{:03}", c.name, i + 1))
                .with_sampling_seed(rng::derive_seed(cfg.seed, &[key, i as u64]));
            plan.num_ideas = c.num_ideas;
            plan.validate()?;
            plans.push((ci, plan));
        }
    }
    Ok(plans)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionFailure {
    pub condition: String,
    pub participant_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateReport {
    pub corpus: PathBuf,
    pub sessions: usize,
    pub reused: usize,
    pub failures: Vec<SessionFailure>,
}

/// Runs every planned session and writes `corpus.jsonl`. A failing session
/// is recorded in `generate_failures.json` without stopping the others.
/// With `resume`, complete sessions already in the corpus are kept.
pub fn cmd_generate(cfg: &ExperimentConfig, resume: bool) -> Result<GenerateReport, ExperimentError> {
    let plans = plan_sessions(cfg)?;
    ensure_out(cfg)?;
    let corpus_path = cfg.out_dir().join(CORPUS_FILE);
    let mut existing: HashMap<String, Session> = HashMap::new();
    if resume && corpus_path.exists() {
        for s in corpus::read_corpus(&corpus_path, CorpusFormat::Jsonl)? {
            existing.insert(s.id.clone(), s);
        }
    }
    let gateways = cfg
        .conditions
        .iter()
        .map(|c| build_gateway(cfg, c.sim.as_ref().unwrap_or(&SimOverrides::default())))
        .collect::<Result<Vec<_>, _>>()?;
    let todo: Vec<&(usize, SessionPlan)> = plans
        .iter()
        .filter(|(_, p)| !existing.get(&p.participant_id).is_some_and(|s| s.ideas.len() == p.num_ideas))
        .collect();
    let reused = plans.len() - todo.len();
    let results = crate::par::par_map(&todo, cfg.backend.max_in_flight, |(ci, plan)| {
        strategies::run_session(plan, &gateways[*ci])
    });
    let mut fresh: HashMap<String, Session> = HashMap::new();
    let mut failures = Vec::new();
    for ((_, plan), result) in todo.iter().zip(results) {
        match result {
            Ok(s) => {
                fresh.insert(s.id.clone(), s);
            }
            Err(e) => {
                tracing::error!(participant = %plan.participant_id, error = %e, "session failed");
                failures.push(SessionFailure {
                    condition: plan.condition.name.clone(),
                    participant_id: plan.participant_id.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    let sessions: Vec<Session> = plans
        .iter()
        .filter_map(|(_, p)| fresh.remove(&p.participant_id).or_else(|| existing.remove(&p.participant_id)))
        .collect();
    corpus::write_corpus(&sessions, &corpus_path, CorpusFormat::Jsonl)?;
    let provenance = Provenance::new(cfg, &cfg.scheme()?.version);
    write_json(
        &cfg.out_dir().join("generate_failures.json"),
        &provenance,
        &serde_json::json!({ "failures": failures }),
    )?;
    write_run_metadata(cfg, "generate")?;
    if sessions.is_empty() && !failures.is_empty() {
        return Err(ExperimentError::Backend(format!("all {} sessions failed; first: {}", failures.len(), failures[0].error)));
    }
    Ok(GenerateReport { corpus: corpus_path, sessions: sessions.len(), reused, failures })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorizeReport {
    pub labeled_corpus: PathBuf,
    pub labeled: usize,
    pub flagged: usize,
    pub embeddings: Option<PathBuf>,
}

fn read_any(path: &Path) -> Result<Vec<Session>, ExperimentError> {
    if !path.exists() {
        return Err(ExperimentError::Data(format!("{} does not exist", path.display())));
    }
    Ok(corpus::read_corpus(path, CorpusFormat::from_path(path))?)
}

/// Labels a corpus (default `<out>/corpus.jsonl`) and, when enabled, embeds
/// every idea.
pub fn cmd_categorize(cfg: &ExperimentConfig, corpus_path: Option<&Path>) -> Result<CategorizeReport, ExperimentError> {
    cfg.validate()?;
    ensure_out(cfg)?;
    let default_path = cfg.out_dir().join(CORPUS_FILE);
    let mut sessions = read_any(corpus_path.unwrap_or(&default_path))?;
    let gateway = build_gateway(cfg, &SimOverrides::default())?;
    let workers = cfg.backend.max_in_flight;
    let model = &cfg.categorizer.model_id;
    let (scheme_version, labeled, flagged) = match cfg.categorizer.mode {
        CategorizerMode::Fixed => {
            let scheme = cfg.scheme()?;
            let summary = categorizer::label_sessions(&mut sessions, &scheme, &gateway, model, workers)?;
            (scheme.version, summary.labeled, summary.flagged)
        }
        CategorizerMode::Pipeline => {
            let ideas: Vec<_> = sessions.iter().flat_map(|s| s.ideas.iter().cloned()).collect();
            let initial = categorizer::initial_label(&ideas, &gateway, model, workers)?;
            write_raw_labels(&cfg.out_dir().join("raw_labels.jsonl"), &initial.labels)?;
            let map = categorizer::abstract_hierarchy(
                &initial.labels,
                cfg.categorizer.target_sizes,
                &gateway,
                model,
                &cfg.categorizer.derived_scheme_version,
            )?;
            let map_path = cfg.out_dir().join("abstraction_map.json");
            fs::write(&map_path, map.to_json() + "\n").map_err(io_error(&map_path))?;
            sessions = categorizer::relabel_corpus(&sessions, &initial.labels, &map)?;
            let flagged = sessions.iter().flat_map(|s| &s.ideas).filter(|i| i.label.is_none()).count();
            (map.scheme.version.clone(), ideas.len() - flagged, flagged)
        }
    };
    let labeled_path = cfg.out_dir().join(LABELED_FILE);
    corpus::write_corpus(&sessions, &labeled_path, CorpusFormat::Jsonl)?;
    let embeddings = if cfg.embed {
        let path = cfg.out_dir().join(EMBEDDINGS_FILE);
        embed_corpus(&sessions, &gateway, workers, &path, &Provenance::new(cfg, &scheme_version))?;
        Some(path)
    } else {
        None
    };
    write_run_metadata(cfg, "categorize")?;
    Ok(CategorizeReport { labeled_corpus: labeled_path, labeled, flagged, embeddings })
}

fn write_raw_labels(path: &Path, labels: &[RawLabel]) -> Result<(), ExperimentError> {
    let mut f = std::io::BufWriter::new(fs::File::create(path).map_err(io_error(path))?);
    for l in labels {
        writeln!(f, "{}", serde_json::to_string(l).expect("serializes")).map_err(io_error(path))?;
    }
    f.flush().map_err(io_error(path))
}

/// Reads an abstraction map written by [`cmd_categorize`].
pub fn read_abstraction_map(path: &Path) -> Result<AbstractionMap, ExperimentError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    Ok(AbstractionMap::from_json(&text)?)
}

fn join_vector(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn embed_corpus(
    sessions: &[Session],
    gateway: &Gateway,
    workers: usize,
    path: &Path,
    provenance: &Provenance,
) -> Result<(), ExperimentError> {
    let ideas: Vec<_> = sessions.iter().flat_map(|s| s.ideas.iter()).collect();
    let vectors = crate::par::par_map(&ideas, workers, |idea| gateway.embed_text(&idea.text))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = ideas
        .iter()
        .zip(&vectors)
        .map(|(i, v)| vec![i.session_id.clone(), i.index.to_string(), v.model_id.clone(), join_vector(&v.values)])
        .collect();
    write_table(path, &["session_id", "index", "model_id", "vector"], &rows, provenance)
}

/// Embedding vectors keyed by `(session_id, idea index)`.
pub fn read_embeddings(path: &Path) -> Result<HashMap<(String, u32), EmbeddingVector>, ExperimentError> {
    let data_err = |e: String| ExperimentError::Data(format!("{}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| data_err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| data_err(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| data_err(format!("missing column {name}")));
    let (sid, idx, model, vec) = (col("session_id")?, col("index")?, col("model_id")?, col("vector")?);
    let mut out = HashMap::new();
    for record in reader.records() {
        let r = record.map_err(|e| data_err(e.to_string()))?;
        let index: u32 = r[idx].parse().map_err(|_| data_err(format!("bad index {:?}", &r[idx])))?;
        let values = r[vec]
            .split_whitespace()
            .map(|x| x.parse::<f64>().map_err(|_| data_err(format!("bad vector entry {x:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        out.insert((r[sid].to_string(), index), EmbeddingVector::new(values, &r[model]));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullSampleRow {
    pub condition: String,
    pub sessions: usize,
    pub total_ideas: usize,
    pub total_categories: usize,
    pub unique_combinations: usize,
    pub d_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationReport {
    pub conditions: BTreeMap<String, FixationFit>,
    pub pairs: Vec<PairTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitioningSummary {
    pub reports: Vec<analysis::PartitioningReport>,
    /// `None` when some condition has fewer participants than the group
    /// size (or the group size is below 2).
    pub bootstrap: Option<BootstrapComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub scheme_version: String,
    pub sessions_read: usize,
    pub removed_offtask: usize,
    pub excluded_incomplete: usize,
    pub excluded_unlabeled: usize,
    pub full_sample: Vec<FullSampleRow>,
    pub bootstrap: Vec<BootstrapComparison>,
    pub first_ideas: Vec<BootstrapComparison>,
    pub fixation: FixationReport,
    pub partitioning: Option<PartitioningSummary>,
    pub files: Vec<String>,
}

/// Computes every analysis over labeled corpora (default
/// `<out>/labeled.jsonl`) and writes the report files.
pub fn cmd_analyze(cfg: &ExperimentConfig, corpora: &[PathBuf]) -> Result<AnalyzeReport, ExperimentError> {
    cfg.validate()?;
    ensure_out(cfg)?;
    let default = [cfg.out_dir().join(LABELED_FILE)];
    let paths: &[PathBuf] = if corpora.is_empty() { &default } else { corpora };
    let mut all = Vec::new();
    for p in paths {
        all.extend(read_any(p)?);
    }
    let sessions_read = all.len();
    let filtered = corpus::filter_offtask(&all, cfg.offtask_threshold)?;
    let complete = corpus::analyzable(&filtered.sessions, cfg.include_incomplete);
    let excluded_incomplete = filtered.sessions.len() - complete.len();
    let labeled: Vec<Session> = complete.into_iter().filter(|s| s.is_labeled()).collect();
    let excluded_unlabeled = filtered.sessions.len() - excluded_incomplete - labeled.len();
    if labeled.is_empty() {
        return Err(ExperimentError::Data("no fully labeled sessions to analyze".into()));
    }
    let scheme_version = labeled[0].ideas[0].label.as_ref().expect("labeled").scheme_version.clone();
    let provenance = Provenance::new(cfg, &scheme_version);
    let groups = corpus::group_by_condition(&labeled);
    let out = cfg.out_dir();
    let mut files = Vec::new();
    let mut record = |name: &str| files.push(name.to_string());

    let mut full_sample = Vec::new();
    for (name, sessions) in &groups {
        let refs: Vec<&Session> = sessions.iter().collect();
        let s = metrics::pooled_scores(&refs)?;
        full_sample.push(FullSampleRow {
            condition: name.clone(),
            sessions: sessions.len(),
            total_ideas: s.n_ideas,
            total_categories: s.t_cat,
            unique_combinations: s.t_comb,
            d_mean: s.d_mean,
        });
    }
    let rows: Vec<Vec<String>> = full_sample
        .iter()
        .map(|r| {
            vec![
                r.condition.clone(),
                r.sessions.to_string(),
                r.total_ideas.to_string(),
                r.total_categories.to_string(),
                r.unique_combinations.to_string(),
                fmt_opt(r.d_mean),
            ]
        })
        .collect();
    write_table(
        &out.join("full_sample.csv"),
        &["condition", "sessions", "total_ideas", "total_categories", "unique_combinations", "d_mean"],
        &rows,
        &provenance,
    )?;
    record("full_sample.csv");

    let mut fixation = FixationReport { conditions: BTreeMap::new(), pairs: Vec::new() };
    let mut metric_rows = Vec::new();
    let mut curve_rows = Vec::new();
    for (name, sessions) in &groups {
        let fit = analysis::fit_fixation(sessions)?;
        for (s, slope) in sessions.iter().zip(&fit.sessions) {
            let sc = metrics::session_scores(s)?;
            metric_rows.push(vec![
                name.clone(),
                s.id.clone(),
                sc.n_ideas.to_string(),
                sc.t_cat.to_string(),
                sc.t_comb.to_string(),
                fmt_opt(sc.d_mean),
                slope.beta.to_string(),
                slope.intercept.to_string(),
            ]);
            let curve = metrics::accumulation_curve(s)?;
            for ((k, c), (_, m)) in curve.categories.iter().zip(&curve.combinations) {
                curve_rows.push(vec![name.clone(), s.id.clone(), k.to_string(), c.to_string(), m.to_string()]);
            }
        }
        fixation.conditions.insert(name.clone(), fit);
    }
    let names: Vec<&String> = fixation.conditions.keys().collect();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            fixation.pairs.push(analysis::compare_slopes(a, &fixation.conditions[*a], b, &fixation.conditions[*b]));
        }
    }
    write_table(
        &out.join("session_metrics.csv"),
        &["condition", "session_id", "n_ideas", "t_cat", "t_comb", "d_mean", "beta", "intercept"],
        &metric_rows,
        &provenance,
    )?;
    record("session_metrics.csv");
    write_table(
        &out.join("accumulation.csv"),
        &["condition", "session_id", "idea_index", "categories", "combinations"],
        &curve_rows,
        &provenance,
    )?;
    record("accumulation.csv");
    write_json(&out.join("fixation.json"), &provenance, &fixation)?;
    record("fixation.json");
    let fit_rows: Vec<Vec<String>> = fixation
        .conditions
        .iter()
        .map(|(n, f)| vec![n.clone(), f.sessions.len().to_string(), f.mean_beta.to_string(), f.se_beta.to_string()])
        .collect();
    write_table(&out.join("fixation.csv"), &["condition", "sessions", "mean_beta", "se_beta"], &fit_rows, &provenance)?;
    record("fixation.csv");

    let boot = cfg.bootstrap_config();
    let mut bootstrap = Vec::new();
    let mut first_ideas = Vec::new();
    for metric in Metric::ALL {
        bootstrap.push(analysis::bootstrap_compare(&groups, metric, &boot)?);
        // d_mean over single first ideas is undefined
        if metric != Metric::DMean || boot.group_size >= 2 {
            first_ideas.push(analysis::first_idea_diversity(&groups, metric, &boot)?);
        }
    }
    write_json(&out.join("bootstrap.json"), &provenance, &serde_json::json!({ "comparisons": bootstrap }))?;
    record("bootstrap.json");
    write_json(&out.join("first_ideas.json"), &provenance, &serde_json::json!({ "comparisons": first_ideas }))?;
    record("first_ideas.json");
    let mut boot_rows = Vec::new();
    for c in bootstrap.iter().chain(&first_ideas) {
        for s in &c.conditions {
            boot_rows.push(vec![
                c.scope.clone(),
                c.metric.clone(),
                s.condition.clone(),
                s.mean.to_string(),
                s.se.to_string(),
                s.ci_low.to_string(),
                s.ci_high.to_string(),
            ]);
        }
    }
    write_table(
        &out.join("bootstrap.csv"),
        &["scope", "metric", "condition", "mean", "se", "ci_low", "ci_high"],
        &boot_rows,
        &provenance,
    )?;
    record("bootstrap.csv");

    let emb_path = out.join(EMBEDDINGS_FILE);
    let partitioning = if emb_path.exists() {
        let vectors = read_embeddings(&emb_path)?;
        let p = partitioning(&groups, &vectors, &boot)?;
        if let Some(p) = &p {
            write_json(&out.join("partitioning.json"), &provenance, p)?;
            record("partitioning.json");
            let rows: Vec<Vec<String>> = p
                .reports
                .iter()
                .flat_map(|r| {
                    r.participants.iter().map(move |c| {
                        vec![r.condition.clone(), c.session_id.clone(), c.n.to_string(), join_vector(&c.centroid)]
                    })
                })
                .collect();
            write_table(&out.join("centroids.csv"), &["condition", "session_id", "n", "centroid"], &rows, &provenance)?;
            record("centroids.csv");
        }
        p
    } else {
        None
    };
    record("report.json");
    let report = AnalyzeReport {
        scheme_version,
        sessions_read,
        removed_offtask: filtered.removed,
        excluded_incomplete,
        excluded_unlabeled,
        full_sample,
        bootstrap,
        first_ideas,
        fixation,
        partitioning,
        files,
    };
    write_json(&out.join("report.json"), &provenance, &report)?;
    write_run_metadata(cfg, "analyze")?;
    Ok(report)
}

/// Per-condition centroids of the sessions whose ideas all have vectors.
fn partitioning(
    groups: &BTreeMap<String, Vec<Session>>,
    vectors: &HashMap<(String, u32), EmbeddingVector>,
    boot: &BootstrapConfig,
) -> Result<Option<PartitioningSummary>, ExperimentError> {
    let mut reports = Vec::new();
    for (name, sessions) in groups {
        let participants: Vec<(String, Vec<EmbeddingVector>)> = sessions
            .iter()
            .filter_map(|s| {
                let vs: Option<Vec<EmbeddingVector>> =
                    s.ideas.iter().map(|i| vectors.get(&(s.id.clone(), i.index)).cloned()).collect();
                vs.map(|v| (s.id.clone(), v))
            })
            .collect();
        if participants.len() >= 2 {
            reports.push(analysis::partitioning_report(name, &participants)?);
        }
    }
    if reports.is_empty() {
        return Ok(None);
    }
    let enough = boot.group_size >= 2 && reports.iter().all(|r| boot.replacement || r.m >= boot.group_size);
    let bootstrap = if enough { Some(analysis::bootstrap_s_between(&reports, boot)?) } else { None };
    Ok(Some(PartitioningSummary { reports, bootstrap }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub temperature: f64,
    pub condition: String,
    pub sessions: usize,
    pub total_ideas: usize,
    pub total_categories: usize,
    pub unique_combinations: usize,
    pub d_mean: Option<f64>,
}

/// Directory of one sweep value.
pub fn sweep_dir(out: &Path, t: f64) -> PathBuf {
    out.join(format!("temperature_{t}"))
}

/// Runs generate, categorize and analyze once per temperature, each in its
/// own subdirectory with a shared response cache, and writes `sweep.csv`.
pub fn cmd_sweep_temperature(cfg: &ExperimentConfig, values: &[f64]) -> Result<Vec<SweepRow>, ExperimentError> {
    if values.is_empty() {
        return Err(ExperimentError::Config("no temperature values given".into()));
    }
    cfg.validate()?;
    ensure_out(cfg)?;
    let mut rows = Vec::new();
    for &t in values {
        let mut sub = cfg.clone();
        for c in &mut sub.conditions {
            c.temperature = t;
        }
        sub.paths.out = sweep_dir(cfg.out_dir(), t);
        sub.paths.cache = Some(cfg.cache_dir());
        sub.validate()?;
        cmd_generate(&sub, false)?;
        cmd_categorize(&sub, None)?;
        let report = cmd_analyze(&sub, &[])?;
        rows.extend(report.full_sample.into_iter().map(|r| SweepRow {
            temperature: t,
            condition: r.condition,
            sessions: r.sessions,
            total_ideas: r.total_ideas,
            total_categories: r.total_categories,
            unique_combinations: r.unique_combinations,
            d_mean: r.d_mean,
        }));
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.temperature.to_string(),
                r.condition.clone(),
                r.sessions.to_string(),
                r.total_ideas.to_string(),
                r.total_categories.to_string(),
                r.unique_combinations.to_string(),
                fmt_opt(r.d_mean),
            ]
        })
        .collect();
    let provenance = Provenance::new(cfg, &cfg.scheme()?.version);
    write_table(
        &cfg.out_dir().join("sweep.csv"),
        &["temperature", "condition", "sessions", "total_ideas", "total_categories", "unique_combinations", "d_mean"],
        &table,
        &provenance,
    )?;
    write_run_metadata(cfg, "sweep-temperature")?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = config(r#"{"conditions": [{"name": "d", "kind": "default_sequential", "participants": 2}]}"#);
        assert_eq!(c.conditions[0].model_id, DEFAULT_MODEL_ID);
        assert_eq!(c.conditions[0].temperature, 1.0);
        assert_eq!(c.backend.kind, BackendKind::Sim);
        assert_eq!(c.bootstrap_config(), BootstrapConfig::default());
        assert_eq!(c.categorizer.mode, CategorizerMode::Fixed);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        assert!(ExperimentConfig::from_json(r#"{"conditions": [], "bogus": 1}"#).is_err());
        let empty = config(r#"{"conditions": []}"#);
        assert!(matches!(empty.validate(), Err(ExperimentError::Config(_))));
        let zero = config(r#"{"conditions": [{"name": "d", "kind": "cot_batch", "participants": 0}]}"#);
        assert!(zero.validate().is_err());
        let hot = config(r#"{"conditions": [{"name": "d", "kind": "cot_batch", "participants": 1, "temperature": 2.5}]}"#);
        assert!(hot.validate().is_err());
    }

    #[test]
    fn persona_condition_without_pool_file_fails_before_calls() {
        let c = config(
            r#"{"conditions": [{"name": "p", "kind": "persona_sequential", "participants": 3, "persona_pool": "ordinary"}]}"#,
        );
        match plan_sessions(&c) {
            Err(ExperimentError::Config(m)) => assert!(m.contains("persona pool")),
            other => panic!("unexpected {other:?}"),
        }
        let mut ok = c.clone();
        ok.paths.personas.insert("ordinary".into(), "builtin:ordinary".into());
        let plans = plan_sessions(&ok).unwrap();
        assert_eq!(plans.len(), 3);
        assert!(plans.iter().all(|(_, p)| p.condition.persona.is_some()));
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = config(r#"{"conditions": [{"name": "d", "kind": "cot_batch", "participants": 1}]}"#);
        let mut b = a.clone();
        b.paths.out = PathBuf::from("/elsewhere");
        assert_eq!(a.config_hash(), b.config_hash());
        b.seed = 9;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(ExperimentError::Config(String::new()).exit_code(), 1);
        assert_eq!(ExperimentError::Backend(String::new()).exit_code(), 2);
        assert_eq!(ExperimentError::Data(String::new()).exit_code(), 3);
    }
}
