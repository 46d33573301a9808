//! Run configuration: a TOML file whose values command-line flags override.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use groundedkg::embed::{EmbedParams, Scheme};
use groundedkg::ingest::ParseKind;
use groundedkg::providers::{
    ChatConfig, CompletionClient, Embedder, FileCacheEmbedder, HttpChatClient, HttpEmbedder, HttpEmbedderConfig,
    StubEmbedder, StubLlm, StubMode,
};
use groundedkg::retrieval::{RetrievalParams, VectorSimParams};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub parse_kind: Option<ParseKind>,
    pub embedding: Embedding,
    pub embedder: EmbedderConfig,
    pub retrieval: Retrieval,
    pub llm: LlmConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub bundle: Option<PathBuf>,
    pub graph: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub results: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Embedding {
    pub scheme: Scheme,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Embedding {
    fn default() -> Self {
        let p = EmbedParams::default();
        Self { scheme: p.scheme, alpha: p.alpha, beta: p.beta }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedderKind {
    #[default]
    Stub,
    FileCache,
    Http,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedderConfig {
    pub kind: EmbedderKind,
    /// Vector dimension; defaults to 64 for the stub and 384 for HTTP.
    pub dim: Option<usize>,
    pub seed: u64,
    /// Vectors file for `file_cache`.
    pub path: Option<PathBuf>,
    /// Embed cache misses with the stub instead of failing.
    pub stub_fallback: bool,
    pub base_url: String,
    pub batch_size: usize,
    pub max_in_flight: usize,
    pub timeout_secs: u64,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        let http = HttpEmbedderConfig::default();
        Self {
            kind: EmbedderKind::Stub,
            dim: None,
            seed: 0,
            path: None,
            stub_fallback: false,
            base_url: http.base_url,
            batch_size: http.batch_size,
            max_in_flight: http.max_in_flight,
            timeout_secs: http.timeout_secs,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Retrieval {
    pub k: usize,
    pub tau: Option<f64>,
    pub top_k_texts: Option<usize>,
    pub ret_count_min: Option<usize>,
    pub max_context_sentences: Option<usize>,
}

impl Default for Retrieval {
    fn default() -> Self {
        Self {
            k: RetrievalParams::default().k,
            tau: None,
            top_k_texts: None,
            ret_count_min: None,
            max_context_sentences: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlmKind {
    #[default]
    Stub,
    Http,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    pub kind: LlmKind,
    pub stub_mode: StubMode,
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub max_in_flight: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        let chat = ChatConfig::default();
        Self {
            kind: LlmKind::Stub,
            stub_mode: StubMode::Extractive,
            base_url: chat.base_url,
            model: chat.model,
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: chat.timeout_secs,
            max_retries: chat.max_retries,
            temperature: chat.temperature,
            max_tokens: chat.max_tokens,
            max_in_flight: 4,
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub k: Option<usize>,
    pub scheme: Option<Scheme>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub top_k_texts: Option<usize>,
    pub ret_count_min: Option<usize>,
    pub max_context_sentences: Option<usize>,
    pub embedder: Option<EmbedderKind>,
    pub embed_url: Option<String>,
    pub llm: Option<LlmKind>,
    pub llm_url: Option<String>,
    pub model: Option<String>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        // relative paths in the file are relative to the file
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(x) = p.as_mut() {
                if x.is_relative() {
                    *x = base.join(&*x);
                }
            }
        };
        fix(&mut cfg.paths.bundle);
        fix(&mut cfg.paths.graph);
        fix(&mut cfg.paths.index);
        fix(&mut cfg.paths.results);
        fix(&mut cfg.embedder.path);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        fn set<T>(dst: &mut Option<T>, src: Option<T>) {
            if src.is_some() {
                *dst = src;
            }
        }
        if let Some(k) = o.k {
            self.retrieval.k = k;
        }
        if let Some(s) = o.scheme {
            self.embedding.scheme = s;
        }
        if let Some(a) = o.alpha {
            self.embedding.alpha = a;
        }
        if let Some(b) = o.beta {
            self.embedding.beta = b;
        }
        set(&mut self.retrieval.tau, o.tau);
        set(&mut self.retrieval.top_k_texts, o.top_k_texts);
        set(&mut self.retrieval.ret_count_min, o.ret_count_min);
        set(&mut self.retrieval.max_context_sentences, o.max_context_sentences);
        if let Some(kind) = o.embedder {
            self.embedder.kind = kind;
        }
        if let Some(url) = &o.embed_url {
            self.embedder.base_url = url.clone();
        }
        if let Some(kind) = o.llm {
            self.llm.kind = kind;
        }
        if let Some(url) = &o.llm_url {
            self.llm.base_url = url.clone();
        }
        if let Some(m) = &o.model {
            self.llm.model = m.clone();
        }
    }

    pub fn embed_params(&self) -> Result<EmbedParams> {
        let p = EmbedParams::new(self.embedding.scheme, self.embedding.alpha, self.embedding.beta);
        p.validate()?;
        Ok(p)
    }

    pub fn retrieval_params(&self, scheme: Option<Scheme>) -> Result<RetrievalParams> {
        let r = &self.retrieval;
        if r.top_k_texts.is_some() && r.tau.is_none() {
            bail!("top_k_texts needs tau (VectorSim filter)");
        }
        let p = RetrievalParams {
            k: r.k,
            vector_sim: r.tau.map(|tau| VectorSimParams { tau, top_k_texts: r.top_k_texts }),
            ret_count_min: r.ret_count_min,
            max_context_sentences: r.max_context_sentences,
            scheme,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn embedder(&self) -> Result<Box<dyn Embedder>> {
        let c = &self.embedder;
        Ok(match c.kind {
            EmbedderKind::Stub => Box::new(StubEmbedder::new(c.dim.unwrap_or(StubEmbedder::DEFAULT_DIM), c.seed)),
            EmbedderKind::FileCache => {
                let path = c.path.as_ref().context("embedder.kind = file_cache needs embedder.path")?;
                let cache = FileCacheEmbedder::open(path).with_context(|| format!("opening {}", path.display()))?;
                if c.stub_fallback {
                    let dim = cache.dim();
                    Box::new(cache.with_fallback(Box::new(StubEmbedder::new(dim, c.seed)))?)
                } else {
                    Box::new(cache)
                }
            }
            EmbedderKind::Http => Box::new(HttpEmbedder::new(HttpEmbedderConfig {
                base_url: c.base_url.clone(),
                dim: c.dim.unwrap_or(HttpEmbedderConfig::default().dim),
                batch_size: c.batch_size,
                max_in_flight: c.max_in_flight,
                timeout_secs: c.timeout_secs,
            })?),
        })
    }

    pub fn llm(&self) -> Result<Box<dyn CompletionClient>> {
        let c = &self.llm;
        Ok(match c.kind {
            LlmKind::Stub => Box::new(StubLlm::new(c.stub_mode)),
            LlmKind::Http => {
                let api_key = std::env::var(&c.api_key_env).ok().filter(|k| !k.is_empty());
                if api_key.is_none() {
                    tracing::warn!(var = %c.api_key_env, "API key variable is not set; sending requests without a key");
                }
                Box::new(HttpChatClient::new(ChatConfig {
                    base_url: c.base_url.clone(),
                    model: c.model.clone(),
                    api_key,
                    timeout_secs: c.timeout_secs,
                    max_retries: c.max_retries,
                    temperature: c.temperature,
                    max_tokens: c.max_tokens,
                    ..ChatConfig::default()
                })?)
            }
        })
    }
}
