//! Pluggable consistency judge.
//!
//! The external judge speaks a chat-completion-shaped JSON protocol over
//! HTTP, configured through `JUDGE_URL`, `JUDGE_TOKEN`, and `JUDGE_MODEL`.
//! When `JUDGE_URL` is unset, the deterministic mock stands in: a
//! description is consistent exactly when it mentions at least one
//! attribute word of the sample's class. Tests run entirely on the mock or
//! on an injected fake transport; nothing here gates on a live service.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("judge transport failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("judge returned an unparseable reply: {raw}")]
    Protocol { raw: String },
    #[error("judge configuration error: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub consistent: bool,
    pub rationale: String,
}

/// What the judge sees for one record.
#[derive(Debug, Clone)]
pub struct JudgeRequest<'a> {
    pub sample_id: &'a str,
    pub description: &'a str,
    pub class_name: &'a str,
    pub attribute_words: &'a [String],
}

pub trait JudgeClient {
    fn judge(&self, request: &JudgeRequest<'_>) -> Result<JudgeVerdict, JudgeError>;
    fn name(&self) -> &'static str;
}

/// Deterministic stand-in for the external referee model.
#[derive(Debug, Default)]
pub struct MockJudge;

impl JudgeClient for MockJudge {
    fn judge(&self, request: &JudgeRequest<'_>) -> Result<JudgeVerdict, JudgeError> {
        let description = request.description.to_lowercase();
        let hit = request
            .attribute_words
            .iter()
            .find(|w| description.contains(&w.to_lowercase()));
        Ok(match hit {
            Some(word) => JudgeVerdict {
                consistent: true,
                rationale: format!("description mentions class attribute '{word}'"),
            },
            None => JudgeVerdict {
                consistent: false,
                rationale: format!(
                    "description mentions none of the {} attributes",
                    request.class_name
                ),
            },
        })
    }

    fn name(&self) -> &'static str {
        "mock"
    }
}

/// Transport abstraction so the HTTP client's protocol handling is testable
/// without a network.
pub trait ChatTransport: Send + Sync {
    fn post_json(
        &self,
        url: &str,
        token: &str,
        body: &serde_json::Value,
    ) -> Result<String, String>;
}

/// Blocking HTTP transport.
pub struct UreqTransport {
    agent: ureq::Agent,
}

impl Default for UreqTransport {
    fn default() -> Self {
        Self {
            agent: ureq::AgentBuilder::new()
                .timeout(Duration::from_secs(30))
                .build(),
        }
    }
}

impl ChatTransport for UreqTransport {
    fn post_json(
        &self,
        url: &str,
        token: &str,
        body: &serde_json::Value,
    ) -> Result<String, String> {
        let mut request = self.agent.post(url).set("Content-Type", "application/json");
        if !token.is_empty() {
            request = request.set("Authorization", &format!("Bearer {token}"));
        }
        match request.send_string(&body.to_string()) {
            Ok(response) => response.into_string().map_err(|e| e.to_string()),
            Err(e) => Err(e.to_string()),
        }
    }
}

const JUDGE_INSTRUCTION: &str = "You assess whether a tactile description is consistent with \
the touched object. Reply with strict JSON: {\"consistent\": true|false, \"rationale\": \"...\"}.";

/// External judge speaking JSON-over-HTTP chat completions, with bounded
/// retry on transport failure.
pub struct HttpJudge<T: ChatTransport> {
    pub url: String,
    pub token: String,
    pub model: String,
    pub max_attempts: u32,
    pub backoff: Duration,
    transport: T,
}

impl<T: ChatTransport> HttpJudge<T> {
    pub fn new(url: String, token: String, model: String, transport: T) -> Self {
        Self { url, token, model, max_attempts: 3, backoff: Duration::from_millis(200), transport }
    }

    fn request_body(&self, request: &JudgeRequest<'_>) -> serde_json::Value {
        serde_json::json!({
            "model": self.model,
            "temperature": 0,
            "messages": [
                { "role": "system", "content": JUDGE_INSTRUCTION },
                { "role": "user", "content": format!(
                    "Object class: {}\nExpected attributes: {}\nDescription: {}",
                    request.class_name,
                    request.attribute_words.join(", "),
                    request.description,
                ) },
            ],
        })
    }

    fn parse_reply(raw: &str) -> Result<JudgeVerdict, JudgeError> {
        let protocol_err = || JudgeError::Protocol { raw: raw.to_string() };
        let outer: serde_json::Value = serde_json::from_str(raw).map_err(|_| protocol_err())?;
        let content = outer
            .pointer("/choices/0/message/content")
            .and_then(|v| v.as_str())
            .ok_or_else(protocol_err)?;
        // Tolerate fenced replies.
        let trimmed = content
            .trim()
            .trim_start_matches("```json")
            .trim_start_matches("```")
            .trim_end_matches("```")
            .trim();
        serde_json::from_str::<JudgeVerdict>(trimmed).map_err(|_| protocol_err())
    }
}

impl<T: ChatTransport> JudgeClient for HttpJudge<T> {
    fn judge(&self, request: &JudgeRequest<'_>) -> Result<JudgeVerdict, JudgeError> {
        let body = self.request_body(request);
        let mut last_error = String::new();
        for attempt in 0..self.max_attempts {
            if attempt > 0 {
                std::thread::sleep(self.backoff * 2u32.pow(attempt - 1));
            }
            match self.transport.post_json(&self.url, &self.token, &body) {
                Ok(raw) => return Self::parse_reply(&raw),
                Err(message) => last_error = message,
            }
        }
        Err(JudgeError::Transport { attempts: self.max_attempts, message: last_error })
    }

    fn name(&self) -> &'static str {
        "http"
    }
}

/// Judge selection: `JUDGE_URL` set picks the HTTP client, otherwise the
/// deterministic mock.
pub fn judge_from_env() -> Box<dyn JudgeClient> {
    match std::env::var("JUDGE_URL") {
        Ok(url) if !url.is_empty() => {
            let token = std::env::var("JUDGE_TOKEN").unwrap_or_default();
            let model = std::env::var("JUDGE_MODEL").unwrap_or_else(|_| "judge".to_string());
            Box::new(HttpJudge::new(url, token, model, UreqTransport::default()))
        }
        _ => Box::new(MockJudge),
    }
}
