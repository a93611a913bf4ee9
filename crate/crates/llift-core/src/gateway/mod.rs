//! Conversation-level abstraction over interchangeable model backends.
//!
//! A [`Gateway`] owns one backend — deterministic replay from fixture
//! transcripts, a live OpenAI-compatible HTTP endpoint, or a scripted
//! test stand-in — plus an optional response cache, call counters, and a
//! global in-flight limit. Conversations are opened per case and driven
//! turn by turn; the handle enforces the turn cap and keeps token
//! accounting.

mod http;
mod record;
mod replay;
mod script;

pub use http::HttpBackend;
pub use record::{RecordingBackend, RecordingHandle};
pub use replay::{ReplayBackend, TranscriptDoc, TranscriptEntry, TranscriptTurn};
pub use script::{Script, ScriptEntry, ScriptFile, ScriptedBackend};

use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Conversation label within a case: the extraction conversation or the
/// summarization conversation. Cases whose first conversation reports
/// several initializers get one summarization conversation per initializer,
/// distinguished by ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConvoLabel {
    Convo1,
    Convo2 { initializer: u32 },
}

impl ConvoLabel {
    pub const CONVO2: ConvoLabel = ConvoLabel::Convo2 { initializer: 0 };

    pub fn parse(text: &str) -> Option<ConvoLabel> {
        match text {
            "convo1" => Some(ConvoLabel::Convo1),
            "convo2" => Some(ConvoLabel::CONVO2),
            other => {
                let ordinal = other.strip_prefix("convo2_")?.parse().ok()?;
                Some(ConvoLabel::Convo2 { initializer: ordinal })
            }
        }
    }
}

impl fmt::Display for ConvoLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvoLabel::Convo1 => f.write_str("convo1"),
            ConvoLabel::Convo2 { initializer: 0 } => f.write_str("convo2"),
            ConvoLabel::Convo2 { initializer } => write!(f, "convo2_{initializer}"),
        }
    }
}

/// (case id, conversation label, run ordinal) — the replay key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConversationId {
    pub case: String,
    pub label: ConvoLabel,
    pub run: u32,
}

impl ConversationId {
    pub fn new(case: impl Into<String>, label: ConvoLabel, run: u32) -> Self {
        ConversationId { case: case.into(), label, run }
    }
}

impl fmt::Display for ConversationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.case, self.label, self.run)
    }
}

/// One prompt/response pair with token accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Turn {
    pub index: u32,
    pub prompt: String,
    pub response: String,
    pub prompt_tokens: u64,
    pub response_tokens: u64,
    pub elapsed: Duration,
}

/// An ordered sequence of turns under one system prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversation {
    pub id: ConversationId,
    pub system_prompt: String,
    pub turns: Vec<Turn>,
}

impl Conversation {
    pub fn total_tokens(&self) -> u64 {
        self.turns
            .iter()
            .map(|t| t.prompt_tokens + t.response_tokens)
            .sum()
    }

    pub fn turn_count(&self) -> u32 {
        self.turns.len() as u32
    }

    /// Human-readable transcript text for the store.
    pub fn render_text(&self) -> String {
        let mut out = format!("=== conversation {} ===\n--- system ---\n{}\n", self.id, self.system_prompt);
        for turn in &self.turns {
            out.push_str(&format!(
                "--- turn {}: prompt ({} tokens) ---\n{}\n--- turn {}: response ({} tokens) ---\n{}\n",
                turn.index, turn.prompt_tokens, turn.prompt, turn.index, turn.response_tokens, turn.response
            ));
        }
        out
    }
}

/// Deterministic token approximation: ceil(bytes / 4). Used for budget
/// reporting only, never for truncation decisions.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.len() as u64).div_ceil(4)
}

pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Replay,
    Http,
}

/// Retry policy for transport and rate-limit failures.
#[derive(Debug, Clone, PartialEq)]
pub struct RetryConfig {
    pub attempts: u32,
    pub initial_backoff: Duration,
    pub multiplier: f64,
}

impl Default for RetryConfig {
    fn default() -> Self {
        RetryConfig {
            attempts: 3,
            initial_backoff: Duration::from_secs(1),
            multiplier: 2.0,
        }
    }
}

impl RetryConfig {
    pub fn backoff(&self, attempt: u32) -> Duration {
        let factor = self.multiplier.powi(attempt as i32);
        self.initial_backoff.mul_f64(factor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub model: String,
    pub temperature: f64,
    pub max_response_tokens: u32,
    pub endpoint: Option<String>,
    pub api_key: Option<String>,
    pub transcript_path: Option<PathBuf>,
    pub max_turns: u32,
    pub retry: RetryConfig,
    /// Global cap on concurrently outstanding backend requests.
    pub max_inflight: Option<u32>,
}

pub const DEFAULT_MAX_TURNS: u32 = 8;
pub const DEFAULT_MAX_RESPONSE_TOKENS: u32 = 1024;
pub const DEFAULT_TEMPERATURE: f64 = 1.0;

impl BackendConfig {
    pub fn replay(transcript_path: impl Into<PathBuf>) -> BackendConfig {
        BackendConfig {
            kind: BackendKind::Replay,
            model: "replay".into(),
            temperature: DEFAULT_TEMPERATURE,
            max_response_tokens: DEFAULT_MAX_RESPONSE_TOKENS,
            endpoint: None,
            api_key: None,
            transcript_path: Some(transcript_path.into()),
            max_turns: DEFAULT_MAX_TURNS,
            retry: RetryConfig::default(),
            max_inflight: None,
        }
    }

    pub fn http(endpoint: impl Into<String>, model: impl Into<String>) -> BackendConfig {
        BackendConfig {
            kind: BackendKind::Http,
            model: model.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_response_tokens: DEFAULT_MAX_RESPONSE_TOKENS,
            endpoint: Some(endpoint.into()),
            api_key: None,
            transcript_path: None,
            max_turns: DEFAULT_MAX_TURNS,
            retry: RetryConfig::default(),
            max_inflight: Some(4),
        }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.max_turns < 1 {
            return Err(GatewayError::Config("max_turns must be >= 1".into()));
        }
        match self.kind {
            BackendKind::Http if self.endpoint.is_none() => {
                Err(GatewayError::Config("http backend requires an endpoint".into()))
            }
            BackendKind::Replay if self.transcript_path.is_none() => Err(GatewayError::Config(
                "replay backend requires a transcript directory".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("backend configuration error: {0}")]
    Config(String),
    #[error("conversation setup error: {0}")]
    Setup(String),
    #[error("turn cap of {cap} reached")]
    TurnCap { cap: u32 },
    #[error("transcript drift at turn {turn}: {detail}")]
    Drift { turn: u32, detail: String },
    #[error("transcript for {id} has no response for turn {turn}")]
    TranscriptExhausted { id: String, turn: u32 },
    #[error("context window overflow: {0}")]
    Overflow(String),
    #[error("backend failure: {0}")]
    Backend(String),
}

/// Everything a backend needs to produce the next response: the full
/// ordered history of the conversation plus the outgoing prompt.
pub struct TurnRequest<'a> {
    pub id: &'a ConversationId,
    pub turn_index: u32,
    pub model: &'a str,
    pub temperature: f64,
    pub max_response_tokens: u32,
    pub system_prompt: &'a str,
    pub history: &'a [Turn],
    pub prompt: &'a str,
}

impl TurnRequest<'_> {
    /// Digest over the model and the complete ordered message history,
    /// the response-cache key.
    pub fn history_digest(&self) -> String {
        let mut hasher = Sha256::new();
        let mut feed = |tag: &str, text: &str| {
            hasher.update(tag.as_bytes());
            hasher.update((text.len() as u64).to_le_bytes());
            hasher.update(text.as_bytes());
        };
        feed("model", self.model);
        feed("system", self.system_prompt);
        for turn in self.history {
            feed("user", &turn.prompt);
            feed("assistant", &turn.response);
        }
        feed("user", self.prompt);
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub trait ChatBackend: Send + Sync {
    fn complete(&self, req: &TurnRequest<'_>) -> Result<String, GatewayError>;

    fn describe(&self) -> String;

    /// Deterministic backends make repeated votes redundant.
    fn deterministic(&self) -> bool {
        false
    }

    /// Called at open_conversation; replay verifies a transcript exists.
    fn verify_conversation(&self, _id: &ConversationId) -> Result<(), GatewayError> {
        Ok(())
    }
}

/// Response cache keyed by (model, full-history digest). Bypassed for
/// replay backends.
pub trait ResponseCache: Send + Sync {
    fn get(&self, key: &str) -> Option<String>;
    fn put(&self, key: &str, response: &str);
}

#[derive(Debug, Default)]
pub struct GatewayCounters {
    backend_calls: AtomicU64,
    cache_hits: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub backend_calls: u64,
    pub cache_hits: u64,
}

/// Counting semaphore bounding concurrently outstanding backend calls.
struct Inflight {
    available: Mutex<u32>,
    signal: Condvar,
}

impl Inflight {
    fn new(limit: u32) -> Inflight {
        Inflight {
            available: Mutex::new(limit),
            signal: Condvar::new(),
        }
    }

    fn acquire(&self) -> InflightPermit<'_> {
        let mut available = self.available.lock().expect("inflight lock");
        while *available == 0 {
            available = self.signal.wait(available).expect("inflight wait");
        }
        *available -= 1;
        InflightPermit { semaphore: self }
    }
}

struct InflightPermit<'a> {
    semaphore: &'a Inflight,
}

impl Drop for InflightPermit<'_> {
    fn drop(&mut self) {
        let mut available = self.semaphore.available.lock().expect("inflight lock");
        *available += 1;
        self.semaphore.signal.notify_one();
    }
}

pub struct Gateway {
    backend: Box<dyn ChatBackend>,
    model: String,
    temperature: f64,
    max_response_tokens: u32,
    max_turns: u32,
    cache: Option<Box<dyn ResponseCache>>,
    counters: GatewayCounters,
    inflight: Option<Inflight>,
}

impl Gateway {
    /// Build a gateway with the backend named by the config.
    pub fn from_config(cfg: &BackendConfig) -> Result<Gateway, GatewayError> {
        cfg.validate()?;
        let backend: Box<dyn ChatBackend> = match cfg.kind {
            BackendKind::Replay => Box::new(ReplayBackend::load(
                cfg.transcript_path.as_ref().expect("validated"),
            )?),
            BackendKind::Http => Box::new(HttpBackend::new(cfg)?),
        };
        Ok(Gateway::with_backend(cfg, backend))
    }

    /// Build a gateway around an explicit backend (scripted, recording).
    pub fn with_backend(cfg: &BackendConfig, backend: Box<dyn ChatBackend>) -> Gateway {
        Gateway {
            backend,
            model: cfg.model.clone(),
            temperature: cfg.temperature,
            max_response_tokens: cfg.max_response_tokens,
            max_turns: cfg.max_turns,
            cache: None,
            counters: GatewayCounters::default(),
            inflight: cfg.max_inflight.map(Inflight::new),
        }
    }

    pub fn with_cache(mut self, cache: Box<dyn ResponseCache>) -> Gateway {
        self.cache = Some(cache);
        self
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn max_turns(&self) -> u32 {
        self.max_turns
    }

    pub fn describe(&self) -> String {
        self.backend.describe()
    }

    pub fn deterministic(&self) -> bool {
        self.backend.deterministic()
    }

    pub fn counters(&self) -> CounterSnapshot {
        CounterSnapshot {
            backend_calls: self.counters.backend_calls.load(Ordering::Relaxed),
            cache_hits: self.counters.cache_hits.load(Ordering::Relaxed),
        }
    }

    /// Register an empty conversation. The replay backend verifies a
    /// transcript exists for the id.
    pub fn open_conversation(
        &self,
        system_prompt: &str,
        id: ConversationId,
    ) -> Result<ConversationHandle<'_>, GatewayError> {
        self.backend.verify_conversation(&id)?;
        Ok(ConversationHandle {
            gateway: self,
            conversation: Conversation {
                id,
                system_prompt: system_prompt.to_string(),
                turns: Vec::new(),
            },
        })
    }
}

/// Single-owner handle driving one conversation.
pub struct ConversationHandle<'g> {
    gateway: &'g Gateway,
    conversation: Conversation,
}

impl ConversationHandle<'_> {
    pub fn conversation(&self) -> &Conversation {
        &self.conversation
    }

    pub fn into_conversation(self) -> Conversation {
        self.conversation
    }

    pub fn turns_used(&self) -> u32 {
        self.conversation.turn_count()
    }

    pub fn turns_remaining(&self) -> u32 {
        self.gateway.max_turns - self.turns_used()
    }

    /// Append one turn. Replay verifies the prompt digest for this ordinal;
    /// http transmits the complete ordered history.
    pub fn send_turn(&mut self, prompt: &str) -> Result<String, GatewayError> {
        if self.turns_used() >= self.gateway.max_turns {
            return Err(GatewayError::TurnCap {
                cap: self.gateway.max_turns,
            });
        }
        let request = TurnRequest {
            id: &self.conversation.id,
            turn_index: self.turns_used(),
            model: &self.gateway.model,
            temperature: self.gateway.temperature,
            max_response_tokens: self.gateway.max_response_tokens,
            system_prompt: &self.conversation.system_prompt,
            history: &self.conversation.turns,
            prompt,
        };
        let started = Instant::now();
        let cache_key = self
            .gateway
            .cache
            .as_ref()
            .filter(|_| !self.gateway.backend.deterministic())
            .map(|_| request.history_digest());
        let mut cached = false;
        let response = match cache_key
            .as_ref()
            .and_then(|key| self.gateway.cache.as_ref().unwrap().get(key))
        {
            Some(hit) => {
                cached = true;
                self.gateway.counters.cache_hits.fetch_add(1, Ordering::Relaxed);
                hit
            }
            None => {
                let _permit = self.gateway.inflight.as_ref().map(|s| s.acquire());
                let response = self.gateway.backend.complete(&request)?;
                self.gateway
                    .counters
                    .backend_calls
                    .fetch_add(1, Ordering::Relaxed);
                response
            }
        };
        if !cached {
            if let Some(key) = &cache_key {
                self.gateway.cache.as_ref().unwrap().put(key, &response);
            }
        }
        let turn = Turn {
            index: self.turns_used(),
            prompt: prompt.to_string(),
            response: response.clone(),
            prompt_tokens: estimate_tokens(prompt),
            response_tokens: estimate_tokens(&response),
            elapsed: started.elapsed(),
        };
        self.conversation.turns.push(turn);
        Ok(response)
    }
}
