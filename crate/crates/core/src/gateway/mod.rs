//! Uniform access to chat-completion and embedding services.
//!
//! A [`Gateway`] wraps a chat backend (and optionally an embedding backend)
//! with a content-addressed response cache, bounded retries and a limit on
//! in-flight requests. Backends are either the in-process simulator
//! ([`crate::simident::SimulatorBackend`]) or, with the `live` feature, an
//! HTTPS service speaking the messages-array JSON schema.

mod cache;
#[cfg(feature = "live")]
pub mod http;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::{debug, warn};

pub use cache::{CacheKey, ResponseCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model_id: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    /// Backend sampling seed, forwarded when the service supports one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChatRequest {
    pub fn new(model_id: impl Into<String>, messages: Vec<ChatMessage>, temperature: f64) -> Self {
        Self { model_id: model_id.into(), messages, temperature, seed: None }
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.messages.is_empty() {
            return Err(GatewayError::Precondition("chat request has no messages".into()));
        }
        if let Some(pos) = self.messages.iter().position(|m| m.content.is_empty()) {
            return Err(GatewayError::Precondition(format!("message {pos} is empty")));
        }
        if self.messages.iter().skip(1).any(|m| m.role == Role::System) {
            return Err(GatewayError::Precondition("only the first message may be a system message".into()));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(GatewayError::Precondition(format!("invalid temperature {}", self.temperature)));
        }
        Ok(())
    }

    /// Content of the last user message.
    pub fn last_user(&self) -> Option<&str> {
        self.messages.iter().rev().find(|m| m.role == Role::User).map(|m| m.content.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f64>,
    pub model_id: String,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>, model_id: impl Into<String>) -> Self {
        Self { values, model_id: model_id.into() }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Failure reported by a backend for a single attempt.
#[derive(Debug, Clone, Error)]
pub enum BackendError {
    /// Retryable: connection failures, timeouts, 5xx, rate limiting.
    #[error("transport: {0}")]
    Transport(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("quota exceeded: {0}")]
    Quota(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("quota exceeded: {0}")]
    Quota(String),
    #[error("backend error: {0}")]
    Backend(String),
    #[error("embedding has dimension {found}, backend declares {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("embedding contains non-finite values")]
    NonFinite,
    #[error("no embedding backend configured")]
    NoEmbedder,
    #[error("replay-only gateway has no cached response for this request")]
    CacheMiss,
    #[error("cache error: {0}")]
    Cache(String),
}

pub trait ChatBackend: Send + Sync {
    /// Identifier that separates cache entries of different backends.
    fn id(&self) -> String;
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError>;
}

pub trait EmbeddingBackend: Send + Sync {
    fn id(&self) -> String;
    fn model_id(&self) -> String;
    fn dimension(&self) -> usize;
    fn embed(&self, text: &str) -> Result<Vec<f64>, BackendError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
    pub jitter: bool,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(8),
            jitter: true,
        }
    }
}

impl RetryPolicy {
    /// No waiting between attempts; for tests and the simulator.
    pub fn immediate() -> Self {
        Self { base_delay: Duration::ZERO, max_delay: Duration::ZERO, jitter: false, ..Self::default() }
    }

    fn delay(&self, failed_attempt: u32) -> Duration {
        let exp = self.base_delay.saturating_mul(1 << (failed_attempt - 1).min(16));
        let capped = exp.min(self.max_delay);
        if self.jitter && !capped.is_zero() {
            capped.mul_f64(1.0 + jitter_fraction())
        } else {
            capped
        }
    }
}

/// Uniform-ish value in [0, 0.5) from the per-process hasher keys; avoids
/// an OS entropy dependency.
fn jitter_fraction() -> f64 {
    use std::hash::{BuildHasher, Hasher};
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u8(0);
    (h.finish() % 1_000_000) as f64 / 2_000_000.0
}

/// Caps concurrent backend calls.
#[derive(Debug)]
struct Limiter {
    max: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

impl Limiter {
    fn new(max: usize) -> Self {
        Self { max: max.max(1), in_flight: Mutex::new(0), freed: Condvar::new() }
    }

    fn acquire(&self) -> LimiterGuard<'_> {
        let mut n = self.in_flight.lock().expect("limiter poisoned");
        while *n >= self.max {
            n = self.freed.wait(n).expect("limiter poisoned");
        }
        *n += 1;
        LimiterGuard(self)
    }
}

struct LimiterGuard<'a>(&'a Limiter);

impl Drop for LimiterGuard<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().expect("limiter poisoned");
        *n -= 1;
        self.0.freed.notify_one();
    }
}

/// Call counters, mainly for tests and run logs.
#[derive(Debug, Default)]
pub struct GatewayStats {
    pub backend_calls: AtomicUsize,
    pub cache_hits: AtomicUsize,
    pub failed_attempts: AtomicUsize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatsSnapshot {
    pub backend_calls: usize,
    pub cache_hits: usize,
    pub failed_attempts: usize,
}

pub const DEFAULT_MAX_IN_FLIGHT: usize = 4;

pub struct Gateway {
    chat: Arc<dyn ChatBackend>,
    embedder: Option<Arc<dyn EmbeddingBackend>>,
    cache: Option<ResponseCache>,
    retry: RetryPolicy,
    limiter: Limiter,
    replay_only: bool,
    stats: GatewayStats,
}

impl Gateway {
    pub fn new(chat: Arc<dyn ChatBackend>) -> Self {
        Self {
            chat,
            embedder: None,
            cache: None,
            retry: RetryPolicy::default(),
            limiter: Limiter::new(DEFAULT_MAX_IN_FLIGHT),
            replay_only: false,
            stats: GatewayStats::default(),
        }
    }

    pub fn with_embedder(mut self, embedder: Arc<dyn EmbeddingBackend>) -> Self {
        self.embedder = Some(embedder);
        self
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Result<Self, GatewayError> {
        self.cache = Some(ResponseCache::open(dir.into())?);
        Ok(self)
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_max_in_flight(mut self, max: usize) -> Self {
        self.limiter = Limiter::new(max);
        self
    }

    /// Serve only from the cache; any miss is an error.
    pub fn replay_only(mut self, on: bool) -> Self {
        self.replay_only = on;
        self
    }

    pub fn chat_backend_id(&self) -> String {
        self.chat.id()
    }

    pub fn embedding_dimension(&self) -> Option<usize> {
        self.embedder.as_ref().map(|e| e.dimension())
    }

    pub fn stats(&self) -> StatsSnapshot {
        StatsSnapshot {
            backend_calls: self.stats.backend_calls.load(Ordering::Relaxed),
            cache_hits: self.stats.cache_hits.load(Ordering::Relaxed),
            failed_attempts: self.stats.failed_attempts.load(Ordering::Relaxed),
        }
    }

    /// Returns the assistant text for `request`, from cache when possible.
    pub fn complete_chat(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        request.validate()?;
        let key = CacheKey::chat(&self.chat.id(), request);
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.get_chat(&key)? {
                self.stats.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(hit);
            }
        }
        if self.replay_only {
            return Err(GatewayError::CacheMiss);
        }
        let text = self.with_retries(|| self.chat.complete(request))?;
        if let Some(cache) = &self.cache {
            cache.put_chat(&key, &text)?;
        }
        Ok(text)
    }

    pub fn embed_text(&self, text: &str) -> Result<EmbeddingVector, GatewayError> {
        if text.trim().is_empty() {
            return Err(GatewayError::Precondition("cannot embed empty text".into()));
        }
        let embedder = self.embedder.as_ref().ok_or(GatewayError::NoEmbedder)?;
        let model_id = embedder.model_id();
        let key = CacheKey::embedding(&embedder.id(), &model_id, text);
        if let Some(cache) = &self.cache {
            if let Some(values) = cache.get_embedding(&key)? {
                self.stats.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(EmbeddingVector::new(values, model_id));
            }
        }
        if self.replay_only {
            return Err(GatewayError::CacheMiss);
        }
        let values = self.with_retries(|| embedder.embed(text))?;
        if values.len() != embedder.dimension() {
            return Err(GatewayError::Dimension { expected: embedder.dimension(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GatewayError::NonFinite);
        }
        if let Some(cache) = &self.cache {
            cache.put_embedding(&key, &values)?;
        }
        Ok(EmbeddingVector::new(values, model_id))
    }

    fn with_retries<T>(&self, mut call: impl FnMut() -> Result<T, BackendError>) -> Result<T, GatewayError> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            let result = {
                let _slot = self.limiter.acquire();
                self.stats.backend_calls.fetch_add(1, Ordering::Relaxed);
                call()
            };
            match result {
                Ok(v) => return Ok(v),
                Err(BackendError::Transport(message)) => {
                    self.stats.failed_attempts.fetch_add(1, Ordering::Relaxed);
                    if attempt >= self.retry.attempts {
                        return Err(GatewayError::Transport { attempts: attempt, message });
                    }
                    let delay = self.retry.delay(attempt);
                    warn!(attempt, ?delay, %message, "transient backend failure, retrying");
                    std::thread::sleep(delay);
                }
                Err(BackendError::Auth(m)) => return Err(GatewayError::Auth(m)),
                Err(BackendError::Quota(m)) => return Err(GatewayError::Quota(m)),
                Err(BackendError::Other(m)) => {
                    debug!(%m, "backend rejected request");
                    return Err(GatewayError::Backend(m));
                }
            }
        }
    }
}
