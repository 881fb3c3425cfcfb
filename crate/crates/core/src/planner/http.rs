//! OpenAI-compatible chat-completions client.
//!
//! The wire format is documented in `docs/wire_format.md`; captured request
//! and response fixtures live under `crates/core/tests/fixtures/`.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::{ChatRequest, ContentPart, Role};
use super::provider::{ChatProvider, ChatResponse, ProviderError};

/// How audio attachments travel to the provider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AudioTransport {
    /// File contents, base64 encoded, as an `input_audio` part.
    #[default]
    Inline,
    /// The reference itself, as an `audio_url` part.
    Uri,
}

fn audio_format(path: &str) -> String {
    Path::new(path)
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_else(|| "wav".to_string())
}

/// Builds the JSON body for `POST {base_url}/chat/completions`.
///
/// `load_audio` returns the bytes of an audio reference; it is only called
/// in inline mode.
pub fn to_wire(
    request: &ChatRequest,
    transport: AudioTransport,
    mut load_audio: impl FnMut(&str) -> Result<Vec<u8>, ProviderError>,
) -> Result<Value, ProviderError> {
    let mut messages = Vec::with_capacity(request.messages.len());
    for msg in &request.messages {
        let role = match msg.role {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        };
        let has_audio = msg.parts.iter().any(|p| matches!(p, ContentPart::Audio { .. }));
        let content = if !has_audio {
            Value::String(msg.text_content())
        } else {
            let mut parts = Vec::with_capacity(msg.parts.len());
            for part in &msg.parts {
                parts.push(match part {
                    ContentPart::Text { text } => json!({"type": "text", "text": text}),
                    ContentPart::Audio { audio_ref } => match transport {
                        AudioTransport::Inline => {
                            let bytes = load_audio(audio_ref)?;
                            json!({
                                "type": "input_audio",
                                "input_audio": {
                                    "data": base64::engine::general_purpose::STANDARD.encode(bytes),
                                    "format": audio_format(audio_ref),
                                }
                            })
                        }
                        AudioTransport::Uri => json!({"type": "audio_url", "audio_url": {"url": audio_ref}}),
                    },
                });
            }
            Value::Array(parts)
        };
        messages.push(json!({"role": role, "content": content}));
    }
    Ok(json!({
        "model": request.model,
        "temperature": request.temperature,
        "messages": messages,
    }))
}

#[derive(Deserialize)]
struct WireResponse {
    model: Option<String>,
    choices: Vec<WireChoice>,
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    content: Option<Value>,
}

#[derive(Deserialize)]
struct WireUsage {
    prompt_tokens: Option<u64>,
    completion_tokens: Option<u64>,
}

/// Parses a chat-completions response body. `content` may be a string or an
/// array of `{"type": "text", "text": ...}` parts.
pub fn from_wire(body: &str) -> Result<ChatResponse, ProviderError> {
    let wire: WireResponse = serde_json::from_str(body).map_err(|e| ProviderError::Malformed(e.to_string()))?;
    let choice = wire.choices.into_iter().next().ok_or_else(|| ProviderError::Malformed("no choices".into()))?;
    let text = match choice.message.content {
        Some(Value::String(s)) => s,
        Some(Value::Array(parts)) => parts
            .iter()
            .filter_map(|p| p.get("text").and_then(Value::as_str))
            .collect::<Vec<_>>()
            .join(""),
        Some(Value::Null) | None => return Err(ProviderError::Malformed("message has no content".into())),
        Some(other) => return Err(ProviderError::Malformed(format!("unexpected content {other}"))),
    };
    Ok(ChatResponse {
        text,
        model: wire.model,
        latency_ms: 0,
        prompt_tokens: wire.usage.as_ref().and_then(|u| u.prompt_tokens),
        completion_tokens: wire.usage.as_ref().and_then(|u| u.completion_tokens),
    })
}

/// Maps a non-success status to an error. `retry_after` is the raw header.
pub fn status_error(status: u16, retry_after: Option<&str>, body: String) -> ProviderError {
    match status {
        401 | 403 => ProviderError::Auth(body),
        429 => ProviderError::RateLimited {
            retry_after: retry_after.and_then(|v| v.trim().parse::<f64>().ok()).map(Duration::from_secs_f64),
        },
        _ => ProviderError::Status { status, body },
    }
}

pub struct OpenAiCompatible {
    endpoint: String,
    api_key: Option<String>,
    transport: AudioTransport,
    audio_root: Option<PathBuf>,
    client: reqwest::blocking::Client,
}

impl OpenAiCompatible {
    pub fn new(base_url: &str, api_key: Option<String>, transport: AudioTransport, timeout: Duration) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ProviderError::Config(e.to_string()))?;
        Ok(OpenAiCompatible {
            endpoint: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            api_key,
            transport,
            audio_root: None,
            client,
        })
    }

    /// Relative audio references resolve against this directory.
    pub fn with_audio_root(mut self, root: impl Into<PathBuf>) -> Self {
        self.audio_root = Some(root.into());
        self
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn load_audio(&self, audio_ref: &str) -> Result<Vec<u8>, ProviderError> {
        let path = Path::new(audio_ref);
        let path = match &self.audio_root {
            Some(root) if path.is_relative() => root.join(path),
            _ => path.to_path_buf(),
        };
        std::fs::read(&path).map_err(|e| ProviderError::Config(format!("audio {}: {e}", path.display())))
    }
}

impl ChatProvider for OpenAiCompatible {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let body = to_wire(request, self.transport, |r| self.load_audio(r))?;
        let mut http = self
            .client
            .post(&self.endpoint)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body.to_string());
        if let Some(key) = &self.api_key {
            http = http.bearer_auth(key);
        }
        let start = Instant::now();
        let resp = http.send().map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get(reqwest::header::RETRY_AFTER)
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        let text = resp.text().map_err(|e| ProviderError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(status_error(status, retry_after.as_deref(), text));
        }
        let mut out = from_wire(&text)?;
        out.latency_ms = start.elapsed().as_millis() as u64;
        Ok(out)
    }
}
