//! Text embedding providers. Every implementation returns one L2-normalized
//! vector of length [`Embedder::dim`] per input text, in input order.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exec::bounded_map;

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("text {index} is empty")]
    EmptyText { index: usize },
    #[error("embedder returned dimension {found}, expected {expected}")]
    DimMismatch { expected: usize, found: usize },
    #[error("embedder returned {found} vectors for {expected} texts")]
    CountMismatch { expected: usize, found: usize },
    #[error("embedder returned a zero or non-finite vector for text {index}")]
    Degenerate { index: usize },
    #[error("no cached vector for {0:?}")]
    CacheMiss(String),
    #[error("vector cache {path}: {message}")]
    CacheFormat { path: PathBuf, message: String },
    #[error("vector cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid embedder endpoint {url:?}: {message}")]
    Config { url: String, message: String },
    #[error("embedding request failed: {0}")]
    Transport(String),
    #[error("embedding server answered {status}: {body}")]
    Server { status: u16, body: String },
}

pub trait Embedder: Send + Sync {
    fn dim(&self) -> usize;

    /// One unit vector per text, order-preserving.
    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError>;

    fn embed_one(&self, text: &str) -> Result<Vec<f32>, EmbedError> {
        let mut v = self.embed_texts(&[text.to_string()])?;
        Ok(v.pop().expect("one vector per text"))
    }
}

impl<E: Embedder + ?Sized> Embedder for Box<E> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        (**self).embed_texts(texts)
    }
}

impl<E: Embedder + ?Sized> Embedder for std::sync::Arc<E> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        (**self).embed_texts(texts)
    }
}

/// Scales `v` to unit L2 norm (accumulating in f64). Returns false for zero or
/// non-finite input, leaving it untouched.
pub fn normalize(v: &mut [f32]) -> bool {
    let norm = v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    for x in v.iter_mut() {
        *x = (f64::from(*x) / norm) as f32;
    }
    true
}

fn check_texts(texts: &[String]) -> Result<(), EmbedError> {
    match texts.iter().position(|t| t.trim().is_empty()) {
        Some(index) => Err(EmbedError::EmptyText { index }),
        None => Ok(()),
    }
}

/// Cache key of a text: the first 8 bytes of its SHA-256 digest, little-endian.
pub fn text_hash(text: &str) -> u64 {
    let digest = Sha256::digest(text.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Deterministic offline embedder: a hashed bag of words.
///
/// Text is lowercased and split on non-alphanumeric characters; a trailing
/// plural `s` is dropped from tokens longer than three characters. Each token
/// seeds a ChaCha8 stream (seed = SHA-256 of the embedder seed and the token)
/// that draws a vector uniformly from [-1, 1]^dim; the sum over tokens is
/// normalized. Texts sharing words therefore land close together, which is
/// what the retrieval tests need from a stand-in for a sentence encoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubEmbedder {
    dim: usize,
    seed: u64,
}

impl StubEmbedder {
    pub const DEFAULT_DIM: usize = 64;

    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self { dim, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tokens(text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(|t| {
                let t = t.to_lowercase();
                match t.strip_suffix('s') {
                    Some(stem) if t.chars().count() > 3 && !stem.ends_with('s') => stem.to_string(),
                    _ => t,
                }
            })
            .collect()
    }

    fn token_vector(&self, token: &str, out: &mut [f64]) {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(token.as_bytes());
        let seed: [u8; 32] = h.finalize().into();
        let mut rng = ChaCha8Rng::from_seed(seed);
        for x in out.iter_mut() {
            *x += rng.random_range(-1.0f64..1.0);
        }
    }

    fn embed(&self, text: &str) -> Vec<f32> {
        let mut acc = vec![0.0f64; self.dim];
        let tokens = Self::tokens(text);
        if tokens.is_empty() {
            self.token_vector(text, &mut acc);
        }
        for t in &tokens {
            self.token_vector(t, &mut acc);
        }
        let mut v: Vec<f32> = acc.iter().map(|&x| x as f32).collect();
        if !normalize(&mut v) {
            // Only reachable for a vanishingly unlikely exact cancellation.
            v = vec![0.0; self.dim];
            v[0] = 1.0;
        }
        v
    }
}

impl Default for StubEmbedder {
    fn default() -> Self {
        Self::new(Self::DEFAULT_DIM, 0)
    }
}

impl Embedder for StubEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        check_texts(texts)?;
        Ok(texts.iter().map(|t| self.embed(t)).collect())
    }
}

const CACHE_MAGIC: &[u8; 4] = b"GKVC";
const CACHE_VERSION: u32 = 1;

/// Precomputed vectors keyed by [`text_hash`].
///
/// File layout (little-endian): magic `GKVC`, version `u32`, dim `u32`,
/// count `u64`, then `count` entries of `u64` hash followed by `dim` `f32`s.
/// Misses are errors unless a fallback embedder is attached.
pub struct FileCacheEmbedder {
    dim: usize,
    vectors: HashMap<u64, Vec<f32>>,
    fallback: Option<Box<dyn Embedder>>,
}

impl std::fmt::Debug for FileCacheEmbedder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FileCacheEmbedder")
            .field("dim", &self.dim)
            .field("entries", &self.vectors.len())
            .field("fallback", &self.fallback.is_some())
            .finish()
    }
}

impl FileCacheEmbedder {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, EmbedError> {
        let path = path.as_ref();
        let bad = |message: &str| EmbedError::CacheFormat { path: path.to_path_buf(), message: message.to_string() };
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if &magic != CACHE_MAGIC {
            return Err(bad("bad magic"));
        }
        let version = read_u32(&mut r).map_err(|_| bad("truncated header"))?;
        if version != CACHE_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let dim = read_u32(&mut r).map_err(|_| bad("truncated header"))? as usize;
        if dim == 0 {
            return Err(bad("zero dimension"));
        }
        let count = read_u64(&mut r).map_err(|_| bad("truncated header"))?;
        let mut vectors = HashMap::new();
        let mut buf = vec![0u8; dim * 4];
        for _ in 0..count {
            let hash = read_u64(&mut r).map_err(|_| bad("truncated entry"))?;
            r.read_exact(&mut buf).map_err(|_| bad("truncated entry"))?;
            let mut v: Vec<f32> =
                buf.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes"))).collect();
            if !normalize(&mut v) {
                return Err(bad(&format!("degenerate vector for hash {hash:016x}")));
            }
            vectors.insert(hash, v);
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(bad("trailing bytes after last entry"));
        }
        Ok(Self { dim, vectors, fallback: None })
    }

    /// Embeds cache misses with `fallback` instead of failing.
    pub fn with_fallback(mut self, fallback: Box<dyn Embedder>) -> Result<Self, EmbedError> {
        if fallback.dim() != self.dim {
            return Err(EmbedError::DimMismatch { expected: self.dim, found: fallback.dim() });
        }
        self.fallback = Some(fallback);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

impl Embedder for FileCacheEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        check_texts(texts)?;
        let mut out: Vec<Option<Vec<f32>>> = texts.iter().map(|t| self.vectors.get(&text_hash(t)).cloned()).collect();
        let missing: Vec<usize> = (0..texts.len()).filter(|&i| out[i].is_none()).collect();
        if let Some(&first) = missing.first() {
            let Some(fallback) = &self.fallback else {
                return Err(EmbedError::CacheMiss(texts[first].clone()));
            };
            let batch: Vec<String> = missing.iter().map(|&i| texts[i].clone()).collect();
            for (i, v) in missing.into_iter().zip(fallback.embed_texts(&batch)?) {
                out[i] = Some(v);
            }
        }
        Ok(out.into_iter().map(|v| v.expect("filled")).collect())
    }
}

/// Writes a vector cache readable by [`FileCacheEmbedder::open`]. Entries are
/// written in the given order; a repeated text keeps its last vector.
pub fn write_vector_cache<'a>(
    path: impl AsRef<Path>,
    dim: usize,
    entries: impl IntoIterator<Item = (&'a str, &'a [f32])>,
) -> Result<usize, EmbedError> {
    let path = path.as_ref();
    let mut table: Vec<(u64, &[f32])> = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    for (text, v) in entries {
        if v.len() != dim {
            return Err(EmbedError::DimMismatch { expected: dim, found: v.len() });
        }
        let h = text_hash(text);
        match index.get(&h) {
            Some(&i) => table[i].1 = v,
            None => {
                index.insert(h, table.len());
                table.push((h, v));
            }
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&(dim as u32).to_le_bytes())?;
    w.write_all(&(table.len() as u64).to_le_bytes())?;
    for (h, v) in &table {
        w.write_all(&h.to_le_bytes())?;
        for x in v.iter() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(table.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpEmbedderConfig {
    /// Service root; requests go to `{base_url}/embed`.
    pub base_url: String,
    pub dim: usize,
    pub batch_size: usize,
    pub max_in_flight: usize,
    pub timeout_secs: u64,
}

impl Default for HttpEmbedderConfig {
    fn default() -> Self {
        Self { base_url: "http://127.0.0.1:8088".into(), dim: 384, batch_size: 64, max_in_flight: 4, timeout_secs: 60 }
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    dim: usize,
    vectors: Vec<Vec<f32>>,
}

/// Client for the `/embed` JSON service: `{"texts": [...]}` in,
/// `{"dim": n, "vectors": [[...], ...]}` out. Batches are sent concurrently up
/// to `max_in_flight`; returned vectors are re-normalized.
#[derive(Debug, Clone)]
pub struct HttpEmbedder {
    config: HttpEmbedderConfig,
    endpoint: url::Url,
    client: reqwest::blocking::Client,
}

impl HttpEmbedder {
    pub fn new(config: HttpEmbedderConfig) -> Result<Self, EmbedError> {
        let endpoint = super::endpoint(&config.base_url, "embed")
            .map_err(|message| EmbedError::Config { url: config.base_url.clone(), message })?;
        if config.dim == 0 || config.batch_size == 0 {
            return Err(EmbedError::Config {
                url: config.base_url.clone(),
                message: "dim and batch_size must be positive".into(),
            });
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs.max(1)))
            .build()
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        Ok(Self { config, endpoint, client })
    }

    fn post(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        let resp = self
            .client
            .post(self.endpoint.clone())
            .json(&EmbedRequest { texts })
            .send()
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let body = resp.text().unwrap_or_default();
            return Err(EmbedError::Server { status: status.as_u16(), body });
        }
        let body: EmbedResponse = resp.json().map_err(|e| EmbedError::Transport(e.to_string()))?;
        if body.dim != self.config.dim {
            return Err(EmbedError::DimMismatch { expected: self.config.dim, found: body.dim });
        }
        if body.vectors.len() != texts.len() {
            return Err(EmbedError::CountMismatch { expected: texts.len(), found: body.vectors.len() });
        }
        Ok(body.vectors)
    }
}

impl Embedder for HttpEmbedder {
    fn dim(&self) -> usize {
        self.config.dim
    }

    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        check_texts(texts)?;
        let batches: Vec<&[String]> = texts.chunks(self.config.batch_size).collect();
        let results = bounded_map(&batches, self.config.max_in_flight, |_, b| self.post(b));
        let mut out = Vec::with_capacity(texts.len());
        for r in results {
            out.extend(r?);
        }
        for (index, v) in out.iter_mut().enumerate() {
            if v.len() != self.config.dim {
                return Err(EmbedError::DimMismatch { expected: self.config.dim, found: v.len() });
            }
            if !normalize(v) {
                return Err(EmbedError::Degenerate { index });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(v: &[f32]) -> f64 {
        v.iter().map(|&x| f64::from(x).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn stub_is_deterministic_and_normalized() {
        let e = StubEmbedder::new(32, 7);
        let texts = vec!["camomile tea".to_string(), "camomile tea".to_string(), "Peter".to_string()];
        let v = e.embed_texts(&texts).unwrap();
        assert_eq!(v[0], v[1]);
        assert_ne!(v[0], v[2]);
        for x in &v {
            assert_eq!(x.len(), 32);
            assert!((norm(x) - 1.0).abs() < 1e-6);
        }
        assert_eq!(StubEmbedder::new(32, 8).embed_one("Peter").unwrap().len(), 32);
        assert_ne!(StubEmbedder::new(32, 8).embed_one("Peter").unwrap(), v[2]);
    }

    #[test]
    fn stub_tokens_fold_case_and_plurals() {
        assert_eq!(StubEmbedder::tokens("Rabbits' shoes, GLASS bus"), ["rabbit", "shoe", "glass", "bus"]);
        let e = StubEmbedder::default();
        assert_eq!(e.embed_one("the Rabbits").unwrap(), e.embed_one("the rabbit").unwrap());
        assert!(e.embed_one("!!").is_ok());
    }

    #[test]
    fn empty_text_rejected() {
        let e = StubEmbedder::default();
        assert!(matches!(e.embed_texts(&["a".into(), " ".into()]), Err(EmbedError::EmptyText { index: 1 })));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.bin");
        let a = [3.0f32, 4.0];
        let b = [0.0f32, 2.0];
        assert_eq!(write_vector_cache(&path, 2, [("camomile tea", &a[..]), ("Peter", &b[..])]).unwrap(), 2);
        let c = FileCacheEmbedder::open(&path).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.embed_one("camomile tea").unwrap(), [0.6, 0.8]);
        assert_eq!(c.embed_one("Peter").unwrap(), [0.0, 1.0]);
        assert!(matches!(c.embed_one("tea"), Err(EmbedError::CacheMiss(_))));
        let c = c.with_fallback(Box::new(StubEmbedder::new(2, 0))).unwrap();
        assert_eq!(c.embed_one("tea").unwrap(), StubEmbedder::new(2, 0).embed_one("tea").unwrap());
    }

    #[test]
    fn cache_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.bin");
        write_vector_cache(&path, 2, [("x", &[1.0f32, 0.0][..])]).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.push(0);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(FileCacheEmbedder::open(&path), Err(EmbedError::CacheFormat { .. })));
        bytes.truncate(10);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(FileCacheEmbedder::open(&path), Err(EmbedError::CacheFormat { .. })));
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(FileCacheEmbedder::open(&path).is_err());
    }

    #[test]
    fn http_config_validation() {
        let bad = HttpEmbedderConfig { base_url: "not a url".into(), ..Default::default() };
        assert!(matches!(HttpEmbedder::new(bad), Err(EmbedError::Config { .. })));
        let ftp = HttpEmbedderConfig { base_url: "ftp://host/".into(), ..Default::default() };
        assert!(matches!(HttpEmbedder::new(ftp), Err(EmbedError::Config { .. })));
        assert!(HttpEmbedder::new(HttpEmbedderConfig::default()).is_ok());
    }
}
