//! Query-time retrieval: query graph → per-query-node top-K over the node
//! index → union of the retrieved nodes' grounded sentences → optional
//! RetCount and VectorSim filters → document-ordered context.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::embed::{build_index, IndexError, NodeIndex, Scheme};
use crate::exec::Execution;
use crate::ingest::{DocumentParse, TextId};
use crate::kg::{build_query_graph, BuildError, GroundedKg, KgNode};
use crate::providers::{EmbedError, Embedder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectorSimParams {
    pub tau: f64,
    /// Keep at most this many of the passing sentences; `None` keeps all.
    #[serde(default)]
    pub top_k_texts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalParams {
    pub k: usize,
    pub vector_sim: Option<VectorSimParams>,
    pub ret_count_min: Option<usize>,
    pub max_context_sentences: Option<usize>,
    /// When set, the index must have been built with this scheme.
    pub scheme: Option<Scheme>,
}

impl Default for RetrievalParams {
    fn default() -> Self {
        Self { k: 10, vector_sim: None, ret_count_min: None, max_context_sentences: None, scheme: None }
    }
}

impl RetrievalParams {
    pub fn validate(&self) -> Result<(), RetrievalError> {
        let bad = |m: String| Err(RetrievalError::InvalidParams(m));
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        if let Some(vs) = &self.vector_sim {
            if !(-1.0..=1.0).contains(&vs.tau) {
                return bad(format!("tau = {} is outside [-1, 1]", vs.tau));
            }
            if vs.top_k_texts == Some(0) {
                return bad("top_k_texts must be positive".into());
            }
        }
        if self.ret_count_min == Some(0) {
            return bad("ret_count_min must be positive".into());
        }
        if self.max_context_sentences == Some(0) {
            return bad("max_context_sentences must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("invalid retrieval parameters: {0}")]
    InvalidParams(String),
    #[error("the node index is empty")]
    EmptyIndex,
    #[error("index was built with scheme {index}, but {requested} was requested")]
    SchemeMismatch { index: Scheme, requested: Scheme },
    #[error("embedder dimension {embedder} does not match index dimension {index}")]
    DimMismatch { index: usize, embedder: usize },
    #[error("query graph: {0}")]
    Query(#[from] BuildError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("embedding sentences for VectorSim: {0}")]
    Embed(#[from] EmbedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterName {
    RetCount,
    VectorSim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextDiagnostics {
    pub retrieval_count: usize,
    pub vector_sim: Option<f64>,
    pub filtered_by: Option<FilterName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredNode {
    pub node_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedText {
    pub text_id: TextId,
    pub sentence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub query: String,
    pub k: usize,
    pub scheme: Scheme,
    /// Query node id → ranked document nodes.
    pub per_query_node: BTreeMap<String, Vec<ScoredNode>>,
    /// Document-ordered, duplicate-free.
    pub selected_texts: Vec<SelectedText>,
    /// Every candidate sentence, including ones a filter removed.
    pub diagnostics: BTreeMap<TextId, TextDiagnostics>,
}

impl RetrievalResult {
    pub fn selected_ids(&self) -> Vec<TextId> {
        self.selected_texts.iter().map(|s| s.text_id).collect()
    }

    /// Distinct document nodes retrieved for any query node.
    pub fn retrieved_nodes(&self) -> BTreeSet<&str> {
        self.per_query_node.values().flatten().map(|n| n.node_id.as_str()).collect()
    }
}

/// RetCount of every sentence grounded by some retrieved node: the number of
/// distinct retrieved nodes whose grounded_texts contain it.
pub fn ret_counts<'a>(retrieved: impl IntoIterator<Item = &'a KgNode>) -> BTreeMap<TextId, usize> {
    let mut counts = BTreeMap::new();
    for node in retrieved {
        let distinct: BTreeSet<TextId> = node.grounded_texts.iter().copied().collect();
        for t in distinct {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    counts
}

/// Keeps texts with `counts[t] >= min_count`, preserving input order.
pub fn filter_ret_count(selected: &[TextId], counts: &BTreeMap<TextId, usize>, min_count: usize) -> Vec<TextId> {
    selected.iter().copied().filter(|t| counts.get(t).copied().unwrap_or(0) >= min_count).collect()
}

/// Scores each sentence by `cos(f(query), f(sentence))`, keeps those at or
/// above `tau`, then the `top_k_texts` best (earlier text wins ties). Returns
/// the kept ids in input order and every score.
pub fn filter_vector_sim(
    selected: &[(TextId, &str)],
    query_text: &str,
    embedder: &dyn Embedder,
    tau: f64,
    top_k_texts: Option<usize>,
) -> Result<(Vec<TextId>, BTreeMap<TextId, f64>), EmbedError> {
    if selected.is_empty() {
        return Ok((Vec::new(), BTreeMap::new()));
    }
    let q = embedder.embed_one(query_text)?;
    let texts: Vec<String> = selected.iter().map(|(_, s)| s.to_string()).collect();
    let vecs = embedder.embed_texts(&texts)?;
    let scores: Vec<f64> = vecs.iter().map(|v| cosine(&q, v)).collect();
    let mut passing: Vec<usize> = (0..selected.len()).filter(|&i| scores[i] >= tau).collect();
    if let Some(limit) = top_k_texts {
        passing.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        passing.truncate(limit);
        passing.sort_unstable();
    }
    let kept = passing.into_iter().map(|i| selected[i].0).collect();
    let all = selected.iter().zip(&scores).map(|((t, _), &s)| (*t, s)).collect();
    Ok((kept, all))
}

fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
    let na: f64 = a.iter().map(|&x| f64::from(x).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|&x| f64::from(x).powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// One `text_id<TAB>sentence` line per selected sentence in document order,
/// keeping the first `max_sentences` when set.
pub fn assemble_context(selected: &[SelectedText], max_sentences: Option<usize>) -> String {
    let mut sorted: Vec<&SelectedText> = selected.iter().collect();
    sorted.sort_by_key(|s| s.text_id);
    sorted.dedup_by_key(|s| s.text_id);
    let n = max_sentences.unwrap_or(usize::MAX);
    sorted.iter().take(n).map(|s| format!("{}\t{}", s.text_id, s.sentence)).collect::<Vec<_>>().join("\n")
}

/// Runs retrieval for a parsed question.
pub fn retrieve(
    query: &DocumentParse,
    kg: &GroundedKg,
    index: &NodeIndex,
    embedder: &dyn Embedder,
    params: &RetrievalParams,
) -> Result<RetrievalResult, RetrievalError> {
    retrieve_with(query, kg, index, embedder, params, Execution::default())
}

pub fn retrieve_with(
    query: &DocumentParse,
    kg: &GroundedKg,
    index: &NodeIndex,
    embedder: &dyn Embedder,
    params: &RetrievalParams,
    exec: Execution,
) -> Result<RetrievalResult, RetrievalError> {
    params.validate()?;
    if index.is_empty() {
        return Err(RetrievalError::EmptyIndex);
    }
    if let Some(requested) = params.scheme {
        if requested != index.scheme() {
            return Err(RetrievalError::SchemeMismatch { index: index.scheme(), requested });
        }
    }
    if embedder.dim() != index.dim {
        return Err(RetrievalError::DimMismatch { index: index.dim, embedder: embedder.dim() });
    }
    index.check_covers(kg)?;

    let query_text =
        query.sentences.iter().map(|s| s.original.trim()).filter(|s| !s.is_empty()).collect::<Vec<_>>().join(" ");
    let qgraph = build_query_graph(query)?;
    let qindex = build_index(&qgraph, embedder, index.params, exec)?;

    let rows: Vec<(&str, &[f32])> = qindex.iter().collect();
    let ranked = exec.map(&rows, |(_, v)| index.top_k_with(v, params.k, Execution::Sequential));
    let mut per_query_node = BTreeMap::new();
    for ((qid, _), r) in rows.iter().zip(ranked) {
        let list = r?.into_iter().map(|(node_id, score)| ScoredNode { node_id, score }).collect();
        per_query_node.insert(qid.to_string(), list);
    }

    let retrieved: BTreeSet<&str> =
        per_query_node.values().flatten().map(|n: &ScoredNode| n.node_id.as_str()).collect();
    let counts = ret_counts(retrieved.iter().filter_map(|id| kg.node(id)));
    let mut diagnostics: BTreeMap<TextId, TextDiagnostics> = counts
        .iter()
        .map(|(t, &c)| (*t, TextDiagnostics { retrieval_count: c, vector_sim: None, filtered_by: None }))
        .collect();
    let mut selected: Vec<TextId> = counts.keys().copied().collect();

    if let Some(min) = params.ret_count_min {
        let kept = filter_ret_count(&selected, &counts, min);
        mark_removed(&mut diagnostics, &selected, &kept, FilterName::RetCount);
        selected = kept;
    }
    if let Some(vs) = params.vector_sim {
        let pairs: Vec<(TextId, &str)> = selected.iter().map(|t| (*t, sentence_text(kg, *t))).collect();
        let (kept, scores) = filter_vector_sim(&pairs, &query_text, embedder, vs.tau, vs.top_k_texts)?;
        for (t, s) in scores {
            if let Some(d) = diagnostics.get_mut(&t) {
                d.vector_sim = Some(s);
            }
        }
        mark_removed(&mut diagnostics, &selected, &kept, FilterName::VectorSim);
        selected = kept;
    }

    let selected_texts =
        selected.into_iter().map(|t| SelectedText { text_id: t, sentence: sentence_text(kg, t).to_string() }).collect();
    Ok(RetrievalResult {
        query: query_text,
        k: params.k,
        scheme: index.scheme(),
        per_query_node,
        selected_texts,
        diagnostics,
    })
}

fn sentence_text(kg: &GroundedKg, t: TextId) -> &str {
    kg.sentence(t).map(|s| s.original.as_str()).unwrap_or("")
}

fn mark_removed(diag: &mut BTreeMap<TextId, TextDiagnostics>, before: &[TextId], after: &[TextId], by: FilterName) {
    let kept: BTreeSet<&TextId> = after.iter().collect();
    for t in before.iter().filter(|t| !kept.contains(t)) {
        if let Some(d) = diag.get_mut(t) {
            d.filtered_by = Some(by);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(c: u32, s: u32, text: &str) -> SelectedText {
        SelectedText { text_id: TextId::new(c, s), sentence: text.into() }
    }

    #[test]
    fn context_is_document_ordered() {
        let s = [
            sel(1, 11, "But-- Flopsy, Mopsy and Cottontail had bread and milk."),
            sel(1, 9, "His mother put him to bed"),
        ];
        assert_eq!(
            assemble_context(&s, None),
            "text_1-9\tHis mother put him to bed\ntext_1-11\tBut-- Flopsy, Mopsy and Cottontail had bread and milk."
        );
        assert_eq!(assemble_context(&s, Some(1)), "text_1-9\tHis mother put him to bed");
        assert_eq!(assemble_context(&[], None), "");
    }

    #[test]
    fn params_validation() {
        assert!(RetrievalParams::default().validate().is_ok());
        let p = RetrievalParams { k: 0, ..Default::default() };
        assert!(p.validate().is_err());
        let p =
            RetrievalParams { vector_sim: Some(VectorSimParams { tau: 1.5, top_k_texts: None }), ..Default::default() };
        assert!(p.validate().is_err());
        let p = RetrievalParams { ret_count_min: Some(0), ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn ret_count_identity_at_one() {
        let ids = [TextId::new(0, 0), TextId::new(0, 1)];
        let counts: BTreeMap<TextId, usize> = ids.iter().map(|t| (*t, 1)).collect();
        assert_eq!(filter_ret_count(&ids, &counts, 1), ids);
        assert!(filter_ret_count(&ids, &counts, 2).is_empty());
    }
}
