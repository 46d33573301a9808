//! LLM completion providers: an OpenAI-compatible chat-completions client and
//! a deterministic in-process stub.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub total_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub usage: Usage,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("LLM configuration: {0}")]
    Config(String),
    #[error("LLM authentication failed ({status}): {body}")]
    Auth { status: u16, body: String },
    #[error("LLM rate limit persisted after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("LLM request timed out after {attempts} attempts")]
    Timeout { attempts: u32 },
    #[error("LLM transport error after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("LLM server answered {status}: {body}")]
    Server { status: u16, body: String },
    #[error("unexpected LLM response: {0}")]
    Protocol(String),
    #[error("stub failure: {0}")]
    Scripted(String),
}

pub trait CompletionClient: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError>;
}

impl<C: CompletionClient + ?Sized> CompletionClient for Box<C> {
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        (**self).complete(prompt)
    }
}

impl<C: CompletionClient + ?Sized> CompletionClient for std::sync::Arc<C> {
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        (**self).complete(prompt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChatConfig {
    /// API root such as `https://api.openai.com/v1`; requests go to
    /// `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
    /// Sent as a bearer token when present.
    #[serde(skip_serializing)]
    pub api_key: Option<String>,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
    pub backoff_cap_ms: u64,
    /// Decoding overrides; omitted from the request (provider default) when unset.
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
}

impl Default for ChatConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4o-mini".into(),
            api_key: None,
            timeout_secs: 60,
            max_retries: 4,
            backoff_base_ms: 500,
            backoff_cap_ms: 8_000,
            temperature: None,
            max_tokens: None,
        }
    }
}

impl ChatConfig {
    /// Delay before retry number `attempt` (0-based): `base * 2^attempt`, capped.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self.backoff_base_ms.saturating_mul(1u64 << attempt.min(32));
        Duration::from_millis(ms.min(self.backoff_cap_ms))
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_tokens: Option<u32>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

enum Attempt {
    Done(Result<Completion, LlmError>),
    Retry(LlmError),
}

/// Chat-completions client. Transient failures (HTTP 429, 5xx, timeouts,
/// connection errors) are retried with capped exponential backoff; auth and
/// other client errors fail immediately.
#[derive(Debug, Clone)]
pub struct HttpChatClient {
    config: ChatConfig,
    endpoint: url::Url,
    client: reqwest::blocking::Client,
}

impl HttpChatClient {
    /// Validates the endpoint before any request is made.
    pub fn new(config: ChatConfig) -> Result<Self, LlmError> {
        let endpoint = super::endpoint(&config.base_url, "chat/completions")
            .map_err(|m| LlmError::Config(format!("base URL {:?}: {m}", config.base_url)))?;
        if config.model.trim().is_empty() {
            return Err(LlmError::Config("model name is empty".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs.max(1)))
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(Self { config, endpoint, client })
    }

    pub fn config(&self) -> &ChatConfig {
        &self.config
    }

    fn attempt(&self, prompt: &str, attempts: u32) -> Attempt {
        let body = ChatRequest {
            model: &self.config.model,
            messages: [ChatMessage { role: "user", content: prompt }],
            temperature: self.config.temperature,
            max_tokens: self.config.max_tokens,
        };
        let mut req = self.client.post(self.endpoint.clone()).json(&body);
        if let Some(key) = &self.config.api_key {
            req = req.bearer_auth(key);
        }
        let resp = match req.send() {
            Ok(r) => r,
            Err(e) if e.is_timeout() => return Attempt::Retry(LlmError::Timeout { attempts }),
            Err(e) => {
                return Attempt::Retry(LlmError::Transport { attempts, message: e.to_string() });
            }
        };
        let status = resp.status().as_u16();
        match status {
            200..=299 => {}
            401 | 403 => {
                let body = resp.text().unwrap_or_default();
                return Attempt::Done(Err(LlmError::Auth { status, body }));
            }
            429 => return Attempt::Retry(LlmError::RateLimited { attempts }),
            500..=599 => {
                let body = resp.text().unwrap_or_default();
                return Attempt::Retry(LlmError::Server { status, body });
            }
            _ => {
                let body = resp.text().unwrap_or_default();
                return Attempt::Done(Err(LlmError::Server { status, body }));
            }
        }
        let parsed: ChatResponse = match resp.json() {
            Ok(p) => p,
            Err(e) if e.is_timeout() => return Attempt::Retry(LlmError::Timeout { attempts }),
            Err(e) => return Attempt::Done(Err(LlmError::Protocol(e.to_string()))),
        };
        let Some(choice) = parsed.choices.into_iter().next() else {
            return Attempt::Done(Err(LlmError::Protocol("response has no choices".into())));
        };
        Attempt::Done(Ok(Completion {
            text: choice.message.content.unwrap_or_default().trim().to_string(),
            usage: parsed.usage.unwrap_or_default(),
        }))
    }
}

impl CompletionClient for HttpChatClient {
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(prompt, attempts) {
                Attempt::Done(r) => return r,
                Attempt::Retry(err) if attempts > self.config.max_retries => return Err(err),
                Attempt::Retry(err) => {
                    let delay = self.config.backoff(attempts - 1);
                    tracing::warn!(%err, attempt = attempts, ?delay, "retrying LLM request");
                    std::thread::sleep(delay);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StubMode {
    /// Returns the last non-empty line of the prompt.
    EchoLastLine,
    /// Returns the content line sharing the most words with the question
    /// (earliest on ties), without its `text_id` prefix; falls back to the
    /// question line when there is no content.
    Extractive,
}

/// Deterministic offline completion client. Failures can be scripted by
/// prompt substring, and concurrent calls are counted so batch tests can
/// check the in-flight budget.
#[derive(Debug)]
pub struct StubLlm {
    mode: StubMode,
    fail_when_contains: Vec<String>,
    delay: Duration,
    in_flight: AtomicUsize,
    max_in_flight_seen: AtomicUsize,
    calls: AtomicUsize,
}

impl StubLlm {
    pub fn new(mode: StubMode) -> Self {
        Self {
            mode,
            fail_when_contains: Vec::new(),
            delay: Duration::ZERO,
            in_flight: AtomicUsize::new(0),
            max_in_flight_seen: AtomicUsize::new(0),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn failing_on(mut self, needle: impl Into<String>) -> Self {
        self.fail_when_contains.push(needle.into());
        self
    }

    /// Sleep inside each call, to make overlapping calls observable.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn max_in_flight_seen(&self) -> usize {
        self.max_in_flight_seen.load(Ordering::SeqCst)
    }

    fn answer(&self, prompt: &str) -> String {
        let lines: Vec<&str> = prompt.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        match self.mode {
            StubMode::EchoLastLine => lines.last().copied().unwrap_or("").to_string(),
            StubMode::Extractive => extractive_answer(&lines),
        }
    }
}

fn words(s: &str) -> BTreeSet<String> {
    s.split(|c: char| !c.is_alphanumeric()).filter(|w| w.len() > 2).map(str::to_lowercase).collect()
}

fn extractive_answer(lines: &[&str]) -> String {
    let question = lines.iter().rev().find_map(|l| l.strip_prefix("Question:")).map(str::trim).unwrap_or("");
    let mut content: Vec<&str> = Vec::new();
    let mut in_content = false;
    for l in lines {
        if let Some(rest) = l.strip_prefix("Content:") {
            in_content = true;
            if !rest.trim().is_empty() {
                content.push(rest.trim());
            }
        } else if l.starts_with("Question:") {
            in_content = false;
        } else if in_content {
            content.push(l);
        }
    }
    let q = words(question);
    let best =
        content.iter().enumerate().max_by_key(|(i, l)| (words(l).intersection(&q).count(), std::cmp::Reverse(*i)));
    match best {
        Some((_, line)) => {
            let sentence = match line.split_once('\t') {
                Some((id, rest)) if id.starts_with("text_") => rest,
                _ => line,
            };
            sentence.trim().to_string()
        }
        None => question.to_string(),
    }
}

fn count_tokens(s: &str) -> u64 {
    s.split_whitespace().count() as u64
}

impl CompletionClient for StubLlm {
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.max_in_flight_seen.fetch_max(now, Ordering::SeqCst);
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        let result = match self.fail_when_contains.iter().find(|n| prompt.contains(n.as_str())) {
            Some(n) => Err(LlmError::Scripted(format!("prompt contains {n:?}"))),
            None => {
                let text = self.answer(prompt);
                let usage = Usage {
                    prompt_tokens: count_tokens(prompt),
                    completion_tokens: count_tokens(&text),
                    total_tokens: count_tokens(prompt) + count_tokens(&text),
                };
                Ok(Completion { text, usage })
            }
        };
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        result
    }
}
