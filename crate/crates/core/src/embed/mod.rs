//! Node vector index over a grounded graph.
//!
//! Three node embedding schemes over a text embedder `f`:
//!
//! - `basic`: `Embed(v) = α·f(label) + (1−α)·mean_t f(t)` over the node's mention
//!   texts. `f` outputs, the mean, and the combination are each normalized.
//! - `neighbor_avg`: `β·Embed(v) + (1−β)·mean_j Embed(v_j)` over undirected
//!   graph neighbors, normalized at the end.
//! - `neighbor_attn`: `β·Embed(v) + (1−β)·Σ_j a_j·Embed(v_j)` with
//!   `a = softmax_j(Embed(v)·Embed(v_j))` (no temperature), normalized at the end.
//!
//! Isolated nodes keep `Embed(v)` under both neighbor schemes. Arithmetic is
//! done in f64; stored vectors are f32.

mod io;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::kg::GroundedKg;
use crate::providers::{EmbedError, Embedder};

pub use io::{load_index, read_index, save_index, write_index, IndexFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Basic,
    NeighborAvg,
    NeighborAttn,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Basic, Scheme::NeighborAvg, Scheme::NeighborAttn];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Basic => "basic",
            Scheme::NeighborAvg => "neighbor_avg",
            Scheme::NeighborAttn => "neighbor_attn",
        }
    }

    fn code(self) -> u8 {
        match self {
            Scheme::Basic => 0,
            Scheme::NeighborAvg => 1,
            Scheme::NeighborAttn => 2,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        Scheme::ALL.into_iter().find(|s| s.code() == c)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown scheme {s:?} (expected basic, neighbor_avg or neighbor_attn)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedParams {
    pub scheme: Scheme,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for EmbedParams {
    fn default() -> Self {
        Self { scheme: Scheme::Basic, alpha: 0.5, beta: 0.8 }
    }
}

impl EmbedParams {
    pub fn new(scheme: Scheme, alpha: f64, beta: f64) -> Self {
        Self { scheme, alpha, beta }
    }

    pub fn validate(&self) -> Result<(), IndexError> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(IndexError::InvalidParam(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("embedding node {node_id:?}: {source}")]
    Embed {
        node_id: String,
        #[source]
        source: EmbedError,
    },
    #[error("{0}")]
    InvalidParam(String),
    #[error("vector has dimension {found}, index has {expected}")]
    DimMismatch { expected: usize, found: usize },
    #[error("query vector is zero or non-finite")]
    DegenerateQuery,
    #[error("index does not match the graph: {0}")]
    Coverage(String),
    #[error("index file I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("index file JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("index file is malformed: {0}")]
    Format(String),
}

/// Vectors for every graph node, rows in ascending `node_id` order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeIndex {
    pub params: EmbedParams,
    pub dim: usize,
    ids: Vec<String>,
    /// Row-major `ids.len() × dim`.
    data: Vec<f32>,
}

impl NodeIndex {
    /// Rows must be sorted by id, unique, of length `dim` and unit-norm.
    pub fn from_rows(params: EmbedParams, dim: usize, rows: Vec<(String, Vec<f32>)>) -> Result<Self, IndexError> {
        params.validate()?;
        if dim == 0 {
            return Err(IndexError::Format("dimension must be positive".into()));
        }
        let mut ids = Vec::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (id, v) in rows {
            if v.len() != dim {
                return Err(IndexError::DimMismatch { expected: dim, found: v.len() });
            }
            if ids.last().is_some_and(|last: &String| *last >= id) {
                return Err(IndexError::Format(format!("node ids not strictly ascending at {id:?}")));
            }
            let n = norm(&v);
            if (n - 1.0).abs() > 1e-5 {
                return Err(IndexError::Format(format!("vector for {id:?} has norm {n}")));
            }
            ids.push(id);
            data.extend(v);
        }
        Ok(Self { params, dim, ids, data })
    }

    pub fn scheme(&self) -> Scheme {
        self.params.scheme
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, node_id: &str) -> Option<&[f32]> {
        self.ids.binary_search_by(|x| x.as_str().cmp(node_id)).ok().map(|i| self.row(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), self.row(i)))
    }

    /// The index must hold exactly the graph's node ids.
    pub fn check_covers(&self, kg: &GroundedKg) -> Result<(), IndexError> {
        if self.ids.len() != kg.nodes.len() {
            return Err(IndexError::Coverage(format!("{} vectors for {} nodes", self.ids.len(), kg.nodes.len())));
        }
        match self.ids.iter().zip(kg.nodes.keys()).find(|(a, b)| a != b) {
            Some((a, b)) => Err(IndexError::Coverage(format!("index has {a:?} where graph has {b:?}"))),
            None => Ok(()),
        }
    }

    /// The `k` rows most cosine-similar to `query`, descending by score with
    /// ties broken by ascending node id. The query need not be unit-length.
    pub fn top_k(&self, query: &[f32], k: usize) -> Result<Vec<(String, f64)>, IndexError> {
        self.top_k_with(query, k, Execution::default())
    }

    pub fn top_k_with(&self, query: &[f32], k: usize, exec: Execution) -> Result<Vec<(String, f64)>, IndexError> {
        if query.len() != self.dim {
            return Err(IndexError::DimMismatch { expected: self.dim, found: query.len() });
        }
        if k == 0 {
            return Err(IndexError::InvalidParam("k must be positive".into()));
        }
        let qn = norm(query);
        if qn == 0.0 || !qn.is_finite() {
            return Err(IndexError::DegenerateQuery);
        }
        let q: Vec<f64> = query.iter().map(|&x| f64::from(x) / qn).collect();
        let partial = exec.map_chunks(self.len(), TOP_K_CHUNK, |start, end| {
            let mut scored: Vec<(f64, usize)> = (start..end).map(|i| (dot64(&q, self.row(i)), i)).collect();
            keep_best(&mut scored, k);
            scored
        });
        let mut all: Vec<(f64, usize)> = partial.into_iter().flatten().collect();
        keep_best(&mut all, k);
        Ok(all.into_iter().map(|(s, i)| (self.ids[i].clone(), s.clamp(-1.0, 1.0))).collect())
    }
}

const TOP_K_CHUNK: usize = 2048;

/// Larger score first; equal scores by row index, which is node-id order.
fn rank_cmp(a: &(f64, usize), b: &(f64, usize)) -> std::cmp::Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

fn keep_best(v: &mut Vec<(f64, usize)>, k: usize) {
    if v.len() > k {
        v.select_nth_unstable_by(k - 1, rank_cmp);
        v.truncate(k);
    }
    v.sort_by(rank_cmp);
}

fn norm(v: &[f32]) -> f64 {
    v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt()
}

fn dot64(a: &[f64], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, &y)| x * f64::from(y)).sum()
}

fn unit(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

fn to_f64(v: &[f32]) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().map(|&x| f64::from(x)).collect();
    unit(&mut out);
    out
}

/// Embeds every distinct label/text once, in batches, and returns the
/// normalized vectors in the order of `texts`.
fn embed_all(texts: &[(&str, &str)], embedder: &dyn Embedder, exec: Execution) -> Result<Vec<Vec<f64>>, IndexError> {
    const BATCH: usize = 256;
    let batches: Vec<&[(&str, &str)]> = texts.chunks(BATCH).collect();
    let results = exec.map(&batches, |batch| {
        let owned: Vec<String> = batch.iter().map(|(_, t)| t.to_string()).collect();
        embedder.embed_texts(&owned).map_err(|source| IndexError::Embed { node_id: batch[0].0.to_string(), source })
    });
    let dim = embedder.dim();
    let mut out = Vec::with_capacity(texts.len());
    for (batch, r) in batches.iter().zip(results) {
        let vectors = r?;
        if vectors.len() != batch.len() {
            return Err(IndexError::Embed {
                node_id: batch[0].0.to_string(),
                source: EmbedError::CountMismatch { expected: batch.len(), found: vectors.len() },
            });
        }
        for ((owner, _), v) in batch.iter().zip(vectors) {
            if v.len() != dim {
                return Err(IndexError::Embed {
                    node_id: owner.to_string(),
                    source: EmbedError::DimMismatch { expected: dim, found: v.len() },
                });
            }
            out.push(to_f64(&v));
        }
    }
    Ok(out)
}

/// Basic embeddings for nodes described by `(node_id, label, texts)`.
pub(crate) fn basic_vectors(
    nodes: &[(&str, &str, &[String])],
    embedder: &dyn Embedder,
    alpha: f64,
    exec: Execution,
) -> Result<Vec<Vec<f64>>, IndexError> {
    // Unique strings in first-use order, each attributed to its first node.
    let mut slot: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    let mut unique: Vec<(&str, &str)> = Vec::new();
    let mut refs: Vec<(usize, Vec<usize>)> = Vec::with_capacity(nodes.len());
    for &(id, label, texts) in nodes {
        let l = intern(&mut slot, &mut unique, id, label);
        let ts = texts.iter().map(|t| intern(&mut slot, &mut unique, id, t)).collect();
        refs.push((l, ts));
    }
    let vecs = embed_all(&unique, embedder, exec)?;
    Ok(exec.map(&refs, |(l, ts)| combine_basic(&vecs[*l], ts.iter().map(|&i| vecs[i].as_slice()), alpha)))
}

fn intern<'a>(
    slot: &mut std::collections::HashMap<&'a str, usize>,
    unique: &mut Vec<(&'a str, &'a str)>,
    owner: &'a str,
    s: &'a str,
) -> usize {
    *slot.entry(s).or_insert_with(|| {
        unique.push((owner, s));
        unique.len() - 1
    })
}

fn combine_basic<'a>(label: &[f64], texts: impl Iterator<Item = &'a [f64]>, alpha: f64) -> Vec<f64> {
    let mut mean = vec![0.0; label.len()];
    let mut n = 0usize;
    for t in texts {
        n += 1;
        mean.iter_mut().zip(t).for_each(|(m, x)| *m += x);
    }
    if n == 0 {
        return label.to_vec();
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    if !unit(&mut mean) {
        return label.to_vec();
    }
    let mut out: Vec<f64> = label.iter().zip(&mean).map(|(l, m)| alpha * l + (1.0 - alpha) * m).collect();
    if !unit(&mut out) {
        return label.to_vec();
    }
    out
}

fn aggregate(self_vec: &[f64], neighbors: &[&[f64]], scheme: Scheme, beta: f64) -> Vec<f64> {
    if neighbors.is_empty() || scheme == Scheme::Basic {
        return self_vec.to_vec();
    }
    let weights: Vec<f64> = match scheme {
        Scheme::NeighborAvg => vec![1.0 / neighbors.len() as f64; neighbors.len()],
        _ => {
            let logits: Vec<f64> =
                neighbors.iter().map(|n| self_vec.iter().zip(*n).map(|(a, b)| a * b).sum()).collect();
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
            let z: f64 = exps.iter().sum();
            exps.into_iter().map(|e| e / z).collect()
        }
    };
    let mut out: Vec<f64> = self_vec.iter().map(|x| beta * x).collect();
    for (w, n) in weights.iter().zip(neighbors) {
        for (o, x) in out.iter_mut().zip(*n) {
            *o += (1.0 - beta) * w * x;
        }
    }
    if !unit(&mut out) {
        return self_vec.to_vec();
    }
    out
}

/// Builds the index for `kg` under `params`.
pub fn build_index(
    kg: &GroundedKg,
    embedder: &dyn Embedder,
    params: EmbedParams,
    exec: Execution,
) -> Result<NodeIndex, IndexError> {
    params.validate()?;
    let nodes: Vec<(&str, &str, &[String])> =
        kg.nodes.values().map(|n| (n.node_id.as_str(), n.label.as_str(), n.texts.as_slice())).collect();
    let basic = basic_vectors(&nodes, embedder, params.alpha, exec)?;
    let final_vecs = match params.scheme {
        Scheme::Basic => basic,
        scheme => {
            let position: std::collections::HashMap<&str, usize> =
                nodes.iter().enumerate().map(|(i, n)| (n.0, i)).collect();
            let adj = kg.neighbors();
            let lists: Vec<Vec<usize>> = nodes
                .iter()
                .map(|(id, _, _)| adj.get(id).map(|s| s.iter().map(|n| position[n]).collect()).unwrap_or_default())
                .collect();
            exec.map_range(nodes.len(), |i| {
                let ns: Vec<&[f64]> = lists[i].iter().map(|&j| basic[j].as_slice()).collect();
                aggregate(&basic[i], &ns, scheme, params.beta)
            })
        }
    };
    let rows = nodes
        .iter()
        .zip(final_vecs)
        .map(|((id, _, _), v)| (id.to_string(), v.into_iter().map(|x| x as f32).collect()))
        .collect();
    NodeIndex::from_rows(params, embedder.dim(), rows)
}

pub fn embed_nodes_basic(kg: &GroundedKg, embedder: &dyn Embedder, alpha: f64) -> Result<NodeIndex, IndexError> {
    build_index(
        kg,
        embedder,
        EmbedParams { scheme: Scheme::Basic, alpha, ..EmbedParams::default() },
        Execution::default(),
    )
}

pub fn embed_nodes_neighbor_avg(
    kg: &GroundedKg,
    embedder: &dyn Embedder,
    alpha: f64,
    beta: f64,
) -> Result<NodeIndex, IndexError> {
    build_index(kg, embedder, EmbedParams::new(Scheme::NeighborAvg, alpha, beta), Execution::default())
}

pub fn embed_nodes_neighbor_attn(
    kg: &GroundedKg,
    embedder: &dyn Embedder,
    alpha: f64,
    beta: f64,
) -> Result<NodeIndex, IndexError> {
    build_index(kg, embedder, EmbedParams::new(Scheme::NeighborAttn, alpha, beta), Execution::default())
}

/// Embeds the nodes of a query graph the way `build_index` embeds document
/// nodes, with the same parameters. Returns `(node_id, vector)` in node-id order.
pub fn embed_graph_nodes(
    kg: &GroundedKg,
    embedder: &dyn Embedder,
    params: EmbedParams,
    exec: Execution,
) -> Result<Vec<(String, Vec<f32>)>, IndexError> {
    let index = build_index(kg, embedder, params, exec)?;
    Ok(index.iter().map(|(id, v)| (id.to_string(), v.to_vec())).collect())
}
