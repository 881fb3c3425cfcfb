//! Video planning: example retrieval, prompt assembly, model call and
//! corrective retries.

pub mod config;
pub mod http;
pub mod prompt;
pub mod provider;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::{clamp_to_canvas, Canvas};
use crate::parser::{parse_response, ParseError, ParsedResponse, TemplateConfig};
use crate::retrieval::{CandidateDatabase, EmbeddingVector, RetrievalError, SelectionStrategy};

pub use config::{ProviderConfig, ProviderProfile};
pub use http::{AudioTransport, OpenAiCompatible};
pub use prompt::{assemble_prompt, ChatMessage, ChatRequest, ContentPart, Role, SystemInstruction};
pub use provider::{Bounded, ChatProvider, ChatResponse, EchoProvider, FnProvider, ProviderError, ScriptedProvider};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanConfig {
    /// Number of in-context example conversations.
    pub k: usize,
    pub temperature: f64,
    pub keyframes: usize,
    pub canvas: Canvas,
    pub max_retries: usize,
    pub strategy: SelectionStrategy,
    pub model: String,
    /// First retry delay; doubles per attempt unless the provider sends
    /// Retry-After.
    pub backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            k: 3,
            temperature: 0.5,
            keyframes: 5,
            canvas: Canvas::PLANNING,
            max_retries: 2,
            strategy: SelectionStrategy::Knn,
            model: "gemini-2.0-flash".into(),
            backoff_ms: 1000,
            max_backoff_ms: 30_000,
        }
    }
}

impl PlanConfig {
    pub fn template(&self) -> TemplateConfig {
        TemplateConfig::with_canvas(self.canvas, self.keyframes)
    }

    pub fn check(&self) -> Result<(), PlanError> {
        if self.keyframes == 0 {
            return Err(PlanError::InvalidConfig("keyframes must be at least 1".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(PlanError::InvalidConfig(format!("temperature {} must be non-negative", self.temperature)));
        }
        Ok(())
    }

    fn backoff(&self, attempt: usize, err: &ProviderError) -> Duration {
        let cap = Duration::from_millis(self.max_backoff_ms);
        err.retry_after()
            .unwrap_or_else(|| Duration::from_millis(self.backoff_ms.saturating_mul(1 << (attempt - 1).min(16))))
            .min(cap)
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("provider failed after {attempts} attempt(s): {source}")]
    Provider { source: ProviderError, attempts: usize },
    #[error("no usable layout after {attempts} attempt(s): {last_error}")]
    ExhaustedRetries { last_error: String, partial: Option<Box<ParsedResponse>>, attempts: usize },
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error("invalid plan configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanOutcome {
    /// Parsed response with the layout clamped to the canvas.
    pub parsed: ParsedResponse,
    pub attempts: usize,
    /// Ids of the retrieved examples, in prompt order.
    pub examples: Vec<String>,
}

fn corrective_message(err: &str) -> String {
    format!(
        "Your previous answer could not be used: {err}. Reply again with the reasoning statement and the complete layout, \
         following the required format exactly."
    )
}

/// Plans a layout for one query recording.
pub fn plan(
    query_audio_ref: &str,
    query_embedding: &EmbeddingVector,
    db: &CandidateDatabase,
    cfg: &PlanConfig,
    provider: &dyn ChatProvider,
    instruction: &SystemInstruction,
) -> Result<PlanOutcome, PlanError> {
    plan_excluding(query_audio_ref, query_embedding, db, cfg, provider, instruction, &[])
}

/// [`plan`] with database ids that must not be used as examples.
pub fn plan_excluding(
    query_audio_ref: &str,
    query_embedding: &EmbeddingVector,
    db: &CandidateDatabase,
    cfg: &PlanConfig,
    provider: &dyn ChatProvider,
    instruction: &SystemInstruction,
    excluded: &[&str],
) -> Result<PlanOutcome, PlanError> {
    cfg.check()?;
    let neighbors = db.select_excluding(query_embedding, cfg.k, cfg.strategy, excluded)?;
    let examples: Vec<_> = neighbors.iter().map(|n| n.example).collect();
    let template = cfg.template();
    let mut request = assemble_prompt(instruction, &examples, query_audio_ref, &template, &cfg.model, cfg.temperature);
    let example_ids = examples.iter().map(|e| e.id.clone()).collect();

    let total = cfg.max_retries + 1;
    let mut last_error = String::new();
    let mut partial: Option<Box<ParsedResponse>> = None;
    for attempt in 1..=total {
        let response = match provider.send(&request) {
            Ok(r) => r,
            Err(e) if e.is_retryable() && attempt < total => {
                let delay = cfg.backoff(attempt, &e);
                log::warn!("attempt {attempt}: {e}; retrying in {delay:?}");
                std::thread::sleep(delay);
                continue;
            }
            Err(source) => return Err(PlanError::Provider { source, attempts: attempt }),
        };
        let error = match parse_response(&response.text, &template) {
            Ok(mut parsed) => match clamp_to_canvas(&parsed.vsl) {
                Ok(vsl) => {
                    parsed.vsl = vsl;
                    return Ok(PlanOutcome { parsed, attempts: attempt, examples: example_ids });
                }
                Err(e) => e.to_string(),
            },
            Err(e) => {
                if let Some(p) = e.partial() {
                    if let Ok(vsl) = clamp_to_canvas(&p.vsl) {
                        partial = Some(Box::new(ParsedResponse { vsl, ..p.clone() }));
                    }
                }
                if matches!(e, ParseError::MissingLayoutBlock) {
                    log::debug!("response without layout: {:?}", response.text);
                }
                e.to_string()
            }
        };
        log::warn!("attempt {attempt}: {error}");
        request.messages.push(ChatMessage::text(Role::Assistant, response.text));
        request.messages.push(ChatMessage::text(Role::User, corrective_message(&error)));
        last_error = error;
    }
    Err(PlanError::ExhaustedRetries { last_error, partial, attempts: total })
}
