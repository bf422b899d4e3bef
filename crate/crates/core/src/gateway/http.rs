//! HTTPS backend for services that accept the messages-array chat schema
//! (`POST {base}/chat/completions`) and `POST {base}/embeddings`.

use std::time::Duration;

use serde_json::{json, Value};

use super::{BackendError, ChatBackend, ChatRequest, EmbeddingBackend};

pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const DEFAULT_API_KEY_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub base_url: String,
    pub api_key: String,
    pub embedding_model: String,
    pub embedding_dim: usize,
    pub timeout: Duration,
}

impl HttpConfig {
    /// Reads the API key from the environment variable `key_env`.
    pub fn from_env(base_url: &str, key_env: &str, embedding_model: &str, embedding_dim: usize) -> Result<Self, String> {
        let api_key = std::env::var(key_env).map_err(|_| format!("environment variable {key_env} is not set"))?;
        Ok(Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            api_key,
            embedding_model: embedding_model.to_string(),
            embedding_dim,
            timeout: Duration::from_secs(120),
        })
    }
}

pub struct HttpBackend {
    config: HttpConfig,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        Self { config, agent }
    }

    fn post(&self, path: &str, body: Value) -> Result<Value, BackendError> {
        let url = format!("{}/{path}", self.config.base_url);
        let mut response = self
            .agent
            .post(&url)
            .header("Authorization", &format!("Bearer {}", self.config.api_key))
            .send_json(&body)
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        classify(status, &text)?;
        serde_json::from_str(&text).map_err(|e| BackendError::Other(format!("invalid JSON response: {e}")))
    }
}

/// Maps an HTTP status to the retry class; the body is passed through as-is.
fn classify(status: u16, body: &str) -> Result<(), BackendError> {
    match status {
        200..=299 => Ok(()),
        401 | 403 => Err(BackendError::Auth(body.to_string())),
        429 if body.contains("insufficient_quota") => Err(BackendError::Quota(body.to_string())),
        408 | 409 | 429 | 500..=599 => Err(BackendError::Transport(format!("HTTP {status}: {body}"))),
        _ => Err(BackendError::Other(format!("HTTP {status}: {body}"))),
    }
}

pub(crate) fn chat_body(request: &ChatRequest) -> Value {
    let mut body = json!({
        "model": request.model_id,
        "messages": request.messages,
        "temperature": request.temperature,
    });
    if let Some(seed) = request.seed {
        body["seed"] = json!(seed);
    }
    body
}

impl ChatBackend for HttpBackend {
    fn id(&self) -> String {
        format!("http:{}", self.config.base_url)
    }

    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError> {
        let value = self.post("chat/completions", chat_body(request))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| BackendError::Other("response has no choices[0].message.content".into()))
    }
}

impl EmbeddingBackend for HttpBackend {
    fn id(&self) -> String {
        format!("http:{}", self.config.base_url)
    }

    fn model_id(&self) -> String {
        self.config.embedding_model.clone()
    }

    fn dimension(&self) -> usize {
        self.config.embedding_dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, BackendError> {
        let value = self.post("embeddings", json!({ "model": self.config.embedding_model, "input": text }))?;
        let data = value["data"][0]["embedding"]
            .as_array()
            .ok_or_else(|| BackendError::Other("response has no data[0].embedding".into()))?;
        data.iter()
            .map(|v| v.as_f64().ok_or_else(|| BackendError::Other("non-numeric embedding entry".into())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{ChatMessage, Gateway, GatewayError, RetryPolicy};
    use std::sync::Arc;

    #[test]
    fn wire_body_uses_messages_array() {
        let req = ChatRequest::new(
            "gpt-4o-2024-11-20",
            vec![ChatMessage::system("You are a helpful assistant."), ChatMessage::user("hi")],
            1.0,
        )
        .with_seed(Some(3));
        let body = chat_body(&req);
        assert_eq!(
            body,
            json!({
                "model": "gpt-4o-2024-11-20",
                "messages": [
                    {"role": "system", "content": "You are a helpful assistant."},
                    {"role": "user", "content": "hi"}
                ],
                "temperature": 1.0,
                "seed": 3
            })
        );
    }

    #[test]
    fn status_classification() {
        assert!(classify(200, "").is_ok());
        assert!(matches!(classify(401, "no"), Err(BackendError::Auth(b)) if b == "no"));
        assert!(matches!(classify(429, "{\"code\":\"insufficient_quota\"}"), Err(BackendError::Quota(_))));
        assert!(matches!(classify(429, "slow down"), Err(BackendError::Transport(_))));
        assert!(matches!(classify(503, ""), Err(BackendError::Transport(_))));
        assert!(matches!(classify(400, "bad"), Err(BackendError::Other(_))));
    }

    #[test]
    fn unreachable_endpoint_fails_after_three_attempts() {
        // port 9 on localhost: nothing listens, the connection is refused
        let backend = HttpBackend::new(HttpConfig {
            base_url: "http://127.0.0.1:9".into(),
            api_key: "test".into(),
            embedding_model: "e".into(),
            embedding_dim: 4,
            timeout: Duration::from_secs(5),
        });
        let gw = Gateway::new(Arc::new(backend)).with_retry(RetryPolicy::immediate());
        let req = ChatRequest::new("m", vec![ChatMessage::user("hi")], 1.0);
        match gw.complete_chat(&req) {
            Err(GatewayError::Transport { attempts, .. }) => assert_eq!(attempts, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(gw.stats().backend_calls, 3);
    }
}
