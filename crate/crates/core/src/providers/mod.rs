//! External-service clients behind narrow traits, each with an offline stub.

mod embedder;
mod llm;

pub use embedder::{
    normalize, text_hash, write_vector_cache, EmbedError, Embedder, FileCacheEmbedder, HttpEmbedder,
    HttpEmbedderConfig, StubEmbedder,
};
pub use llm::{ChatConfig, Completion, CompletionClient, HttpChatClient, LlmError, StubLlm, StubMode, Usage};

/// `{base}/{path}` for an absolute http(s) base URL.
pub(crate) fn endpoint(base: &str, path: &str) -> Result<url::Url, String> {
    let mut url = url::Url::parse(base.trim()).map_err(|e| e.to_string())?;
    if !matches!(url.scheme(), "http" | "https") {
        return Err(format!("unsupported scheme {:?}", url.scheme()));
    }
    if url.host_str().is_none_or(str::is_empty) {
        return Err("missing host".into());
    }
    if !url.path().ends_with('/') {
        let p = format!("{}/", url.path());
        url.set_path(&p);
    }
    url.join(path).map_err(|e| e.to_string())
}
