//! Append-only, content-addressed response cache: one JSON file per request
//! hash. Entries are written to a temporary file and renamed into place.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ChatMessage, ChatRequest, GatewayError};

/// Everything that determines a response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CacheKey {
    Chat {
        backend: String,
        model_id: String,
        messages: Vec<ChatMessage>,
        temperature: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Embedding {
        backend: String,
        model_id: String,
        text: String,
    },
}

impl CacheKey {
    pub fn chat(backend: &str, request: &ChatRequest) -> Self {
        Self::Chat {
            backend: backend.to_string(),
            model_id: request.model_id.clone(),
            messages: request.messages.clone(),
            temperature: request.temperature,
            seed: request.seed,
        }
    }

    pub fn embedding(backend: &str, model_id: &str, text: &str) -> Self {
        Self::Embedding { backend: backend.into(), model_id: model_id.into(), text: text.into() }
    }

    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("cache key serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Payload {
    Text(String),
    Vector(Vec<f64>),
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    key: CacheKey,
    response: Payload,
}

#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn open(dir: PathBuf) -> Result<Self, GatewayError> {
        fs::create_dir_all(&dir).map_err(|e| GatewayError::Cache(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir })
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    fn get(&self, key: &CacheKey) -> Result<Option<Payload>, GatewayError> {
        let path = self.path_for(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(GatewayError::Cache(format!("{}: {e}", path.display()))),
        };
        let entry: Entry = serde_json::from_slice(&bytes)
            .map_err(|e| GatewayError::Cache(format!("{}: {e}", path.display())))?;
        if &entry.key != key {
            return Err(GatewayError::Cache(format!("{}: key does not match its hash", path.display())));
        }
        Ok(Some(entry.response))
    }

    fn put(&self, key: &CacheKey, response: Payload) -> Result<(), GatewayError> {
        let path = self.path_for(key);
        if path.exists() {
            return Ok(());
        }
        let err = |e: &dyn std::fmt::Display| GatewayError::Cache(format!("{}: {e}", path.display()));
        let entry = Entry { key: key.clone(), response };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| err(&e))?;
        serde_json::to_writer_pretty(&mut tmp, &entry).map_err(|e| err(&e))?;
        tmp.write_all(b"\n").map_err(|e| err(&e))?;
        match tmp.persist_noclobber(&path) {
            Ok(_) => Ok(()),
            // another writer won the race with identical content
            Err(e) if e.error.kind() == std::io::ErrorKind::AlreadyExists => Ok(()),
            Err(e) => Err(err(&e.error)),
        }
    }

    pub fn get_chat(&self, key: &CacheKey) -> Result<Option<String>, GatewayError> {
        match self.get(key)? {
            None => Ok(None),
            Some(Payload::Text(t)) => Ok(Some(t)),
            Some(Payload::Vector(_)) => Err(GatewayError::Cache("expected text entry".into())),
        }
    }

    pub fn put_chat(&self, key: &CacheKey, text: &str) -> Result<(), GatewayError> {
        self.put(key, Payload::Text(text.to_string()))
    }

    pub fn get_embedding(&self, key: &CacheKey) -> Result<Option<Vec<f64>>, GatewayError> {
        match self.get(key)? {
            None => Ok(None),
            Some(Payload::Vector(v)) => Ok(Some(v)),
            Some(Payload::Text(_)) => Err(GatewayError::Cache("expected vector entry".into())),
        }
    }

    pub fn put_embedding(&self, key: &CacheKey, values: &[f64]) -> Result<(), GatewayError> {
        self.put(key, Payload::Vector(values.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_digest_depends_on_every_field() {
        let base = ChatRequest::new("m", vec![ChatMessage::user("a")], 1.0);
        let k = |r: &ChatRequest| CacheKey::chat("b", r).digest();
        let d0 = k(&base);
        assert_eq!(d0, k(&base.clone()));
        assert_eq!(d0.len(), 64);
        assert_ne!(d0, k(&base.clone().with_seed(Some(1))));
        let mut r = base.clone();
        r.model_id = "n".into();
        assert_ne!(d0, k(&r));
        assert_ne!(d0, CacheKey::chat("c", &base).digest());
    }

    #[test]
    fn entries_are_append_only() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path().to_path_buf()).unwrap();
        let key = CacheKey::embedding("b", "m", "t");
        cache.put_chat(&key, "first").unwrap();
        cache.put_chat(&key, "second").unwrap();
        assert_eq!(cache.get_chat(&key).unwrap().as_deref(), Some("first"));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
