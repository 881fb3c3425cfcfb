use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use super::prompt::ChatRequest;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ChatResponse {
    pub text: String,
    pub model: Option<String>,
    pub latency_ms: u64,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

impl ChatResponse {
    pub fn text(text: impl Into<String>) -> Self {
        ChatResponse { text: text.into(), ..Default::default() }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProviderError {
    #[error("rate limited (retry after {retry_after:?})")]
    RateLimited { retry_after: Option<Duration> },
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("malformed provider response: {0}")]
    Malformed(String),
    #[error("provider configuration: {0}")]
    Config(String),
}

impl ProviderError {
    pub fn is_retryable(&self) -> bool {
        match self {
            ProviderError::RateLimited { .. } | ProviderError::Transport(_) => true,
            ProviderError::Status { status, .. } => matches!(status, 408 | 500 | 502 | 503 | 504),
            _ => false,
        }
    }

    pub fn retry_after(&self) -> Option<Duration> {
        match self {
            ProviderError::RateLimited { retry_after } => *retry_after,
            _ => None,
        }
    }
}

/// A chat-completion backend. Implementations must tolerate concurrent calls.
pub trait ChatProvider: Send + Sync {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError>;
}

impl<P: ChatProvider + ?Sized> ChatProvider for &P {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        (**self).send(request)
    }
}

impl<P: ChatProvider + ?Sized> ChatProvider for Box<P> {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        (**self).send(request)
    }
}

/// Replies from a fixed script, in order, and records every request.
#[derive(Debug, Default)]
pub struct ScriptedProvider {
    script: Mutex<VecDeque<Result<String, ProviderError>>>,
    requests: Mutex<Vec<ChatRequest>>,
}

impl ScriptedProvider {
    pub fn new(script: impl IntoIterator<Item = Result<String, ProviderError>>) -> Self {
        ScriptedProvider { script: Mutex::new(script.into_iter().collect()), requests: Mutex::new(Vec::new()) }
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.requests.lock().unwrap().clone()
    }

    pub fn calls(&self) -> usize {
        self.requests.lock().unwrap().len()
    }
}

impl ChatProvider for ScriptedProvider {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        self.requests.lock().unwrap().push(request.clone());
        match self.script.lock().unwrap().pop_front() {
            Some(reply) => reply.map(ChatResponse::text),
            None => Err(ProviderError::Config("scripted provider ran out of replies".into())),
        }
    }
}

/// Looks the reply up by the query's audio reference.
#[derive(Debug, Default)]
pub struct EchoProvider {
    replies: HashMap<String, String>,
    calls: AtomicUsize,
}

impl EchoProvider {
    pub fn new(replies: HashMap<String, String>) -> Self {
        EchoProvider { replies, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatProvider for EchoProvider {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let audio = request.query_audio().ok_or_else(|| ProviderError::Malformed("request has no query audio".into()))?;
        self.replies
            .get(audio)
            .map(ChatResponse::text)
            .ok_or_else(|| ProviderError::Status { status: 404, body: format!("no reply for {audio}") })
    }
}

/// Wraps a closure as a provider.
pub struct FnProvider<F>(pub F);

impl<F> ChatProvider for FnProvider<F>
where
    F: Fn(&ChatRequest) -> Result<ChatResponse, ProviderError> + Send + Sync,
{
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        (self.0)(request)
    }
}

/// Caps the number of requests in flight across all callers.
pub struct Bounded<P> {
    inner: P,
    limit: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
    peak: AtomicUsize,
}

impl<P> Bounded<P> {
    pub fn new(inner: P, limit: usize) -> Self {
        Bounded { inner, limit: limit.max(1), in_flight: Mutex::new(0), freed: Condvar::new(), peak: AtomicUsize::new(0) }
    }

    /// Highest number of concurrent requests observed.
    pub fn peak(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

struct Permit<'a> {
    count: &'a Mutex<usize>,
    freed: &'a Condvar,
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.count.lock().unwrap() -= 1;
        self.freed.notify_one();
    }
}

impl<P: ChatProvider> ChatProvider for Bounded<P> {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let _permit = {
            let mut n = self.in_flight.lock().unwrap();
            while *n >= self.limit {
                n = self.freed.wait(n).unwrap();
            }
            *n += 1;
            self.peak.fetch_max(*n, Ordering::SeqCst);
            Permit { count: &self.in_flight, freed: &self.freed }
        };
        let start = Instant::now();
        let mut resp = self.inner.send(request)?;
        if resp.latency_ms == 0 {
            resp.latency_ms = start.elapsed().as_millis() as u64;
        }
        Ok(resp)
    }
}
