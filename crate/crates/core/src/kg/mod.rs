//! Grounded knowledge graph: entity and action nodes, role-labeled and
//! temporal edges, every element tied to the sentences it came from.

mod amr;
mod io;
mod merge;
mod query;
mod srl;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::ingest::{DocumentParse, ParseKind, SentenceRecord, TextId};

pub use amr::{build_from_amr, build_from_amr_with, is_action_concept};
pub use io::{export_graph, import_graph, read_graph, write_graph, GraphIoError};
pub use query::{build_query_graph, query_parse_from_text};
pub use srl::{build_from_srl, build_from_srl_with};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeType {
    Entity,
    Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeType {
    #[serde(rename = "action-entity")]
    ActionEntity,
    #[serde(rename = "action-action")]
    ActionAction,
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeType::ActionEntity => "action-entity",
            EdgeType::ActionAction => "action-action",
        })
    }
}

/// Role of the temporal edges chaining actions inside one sentence.
pub const NEXT_ROLE: &str = "next";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KgNode {
    pub node_id: String,
    pub label: String,
    /// Mention variants, longest first.
    pub texts: Vec<String>,
    pub node_type: NodeType,
    /// One entry per source parse the node was extracted from, in document order.
    pub grounded_texts: Vec<TextId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KgEdge {
    pub source_node: String,
    pub target_node: String,
    pub edge_role: String,
    pub edge_type: EdgeType,
    pub grounded_texts: Vec<TextId>,
}

impl fmt::Display for KgEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, [", self.edge_role, self.source_node, self.target_node, self.edge_type)?;
        for (i, t) in self.grounded_texts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("])")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundedKg {
    pub doc_id: String,
    pub nodes: BTreeMap<String, KgNode>,
    pub edges: Vec<KgEdge>,
    pub sentence_table: BTreeMap<TextId, SentenceRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("expected a {expected} parse, got {found}")]
    ParseKindMismatch { expected: ParseKind, found: ParseKind },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundingViolation {
    #[error("node {0} has no grounded texts")]
    UngroundedNode(String),
    #[error("edge {0} has no grounded texts")]
    UngroundedEdge(String),
    #[error("{owner} is grounded to unknown sentence {text_id}")]
    UnresolvedText { owner: String, text_id: TextId },
    #[error("edge {edge} references missing node {node}")]
    MissingEndpoint { edge: String, node: String },
    #[error("edge {0} links nodes of the wrong types for its edge_type")]
    EdgeTypeMismatch(String),
}

impl GroundedKg {
    pub fn empty(doc_id: impl Into<String>) -> Self {
        Self { doc_id: doc_id.into(), ..Self::default() }
    }

    pub fn node(&self, id: &str) -> Option<&KgNode> {
        self.nodes.get(id)
    }

    pub fn nodes_of_type(&self, node_type: NodeType) -> impl Iterator<Item = &KgNode> {
        self.nodes.values().filter(move |n| n.node_type == node_type)
    }

    pub fn sentence(&self, id: TextId) -> Option<&SentenceRecord> {
        self.sentence_table.get(&id)
    }

    /// Undirected, de-duplicated neighbor sets; self loops dropped.
    pub fn neighbors(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> =
            self.nodes.keys().map(|k| (k.as_str(), BTreeSet::new())).collect();
        for e in &self.edges {
            if e.source_node == e.target_node {
                continue;
            }
            if let Some(s) = adj.get_mut(e.source_node.as_str()) {
                s.insert(e.target_node.as_str());
            }
            if let Some(t) = adj.get_mut(e.target_node.as_str()) {
                t.insert(e.source_node.as_str());
            }
        }
        adj
    }

    /// Checks total grounding and edge endpoint/type consistency.
    pub fn validate(&self) -> Result<(), GroundingViolation> {
        for n in self.nodes.values() {
            if n.grounded_texts.is_empty() {
                return Err(GroundingViolation::UngroundedNode(n.node_id.clone()));
            }
            if let Some(t) = n.grounded_texts.iter().find(|t| !self.sentence_table.contains_key(t)) {
                return Err(GroundingViolation::UnresolvedText { owner: n.node_id.clone(), text_id: *t });
            }
        }
        for e in &self.edges {
            let name = || format!("{}->{}", e.source_node, e.target_node);
            if e.grounded_texts.is_empty() {
                return Err(GroundingViolation::UngroundedEdge(name()));
            }
            if let Some(t) = e.grounded_texts.iter().find(|t| !self.sentence_table.contains_key(t)) {
                return Err(GroundingViolation::UnresolvedText { owner: name(), text_id: *t });
            }
            let lookup = |id: &str| {
                self.nodes
                    .get(id)
                    .ok_or_else(|| GroundingViolation::MissingEndpoint { edge: name(), node: id.to_string() })
            };
            let (s, t) = (lookup(&e.source_node)?, lookup(&e.target_node)?);
            let ok = match e.edge_type {
                EdgeType::ActionEntity => s.node_type == NodeType::Action && t.node_type == NodeType::Entity,
                EdgeType::ActionAction => {
                    s.node_type == NodeType::Action && t.node_type == NodeType::Action && e.edge_role == NEXT_ROLE
                }
            };
            if !ok {
                return Err(GroundingViolation::EdgeTypeMismatch(name()));
            }
        }
        Ok(())
    }
}

/// Builds the graph with the constructor matching the parse kind.
pub fn build_graph(parse: &DocumentParse) -> Result<GroundedKg, BuildError> {
    build_graph_with(parse, Execution::default())
}

pub fn build_graph_with(parse: &DocumentParse, exec: Execution) -> Result<GroundedKg, BuildError> {
    match parse.parse_kind {
        Some(ParseKind::Srl) => build_from_srl_with(parse, exec),
        _ => build_from_amr_with(parse, exec),
    }
}

/// Merge key for entity nodes: case-folded, whitespace-collapsed label.
pub fn entity_key(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn check_kind(parse: &DocumentParse, expected: ParseKind) -> Result<(), BuildError> {
    match parse.parse_kind {
        Some(found) if found != expected => Err(BuildError::ParseKindMismatch { expected, found }),
        _ => Ok(()),
    }
}
