use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap, HashSet};

use indexmap::IndexMap;

use super::{entity_key, EdgeType, GroundedKg, KgEdge, KgNode, NodeType, NEXT_ROLE};
use crate::ingest::{DocumentParse, TextId};

/// Graph elements extracted from one parse (an AMR graph, or all SRL frames
/// of a sentence), before global IDs are assigned.
#[derive(Debug, Default)]
pub(crate) struct Fragment {
    /// Actions in temporal order.
    pub actions: Vec<LocalNode>,
    /// Keyed by [`entity_key`].
    pub entities: IndexMap<String, LocalNode>,
    pub edges: Vec<LocalEdge>,
}

#[derive(Debug, Clone)]
pub(crate) struct LocalNode {
    pub label: String,
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct LocalEdge {
    pub action: usize,
    pub entity: String,
    pub role: String,
}

impl Fragment {
    pub fn add_entity(&mut self, label: &str, texts: impl IntoIterator<Item = String>) -> String {
        let key = entity_key(label);
        let node = self
            .entities
            .entry(key.clone())
            .or_insert_with(|| LocalNode { label: label.to_string(), texts: Vec::new() });
        for t in texts {
            push_unique(&mut node.texts, t);
        }
        key
    }

    pub fn add_edge(&mut self, action: usize, entity: String, role: String) {
        let edge = LocalEdge { action, entity, role };
        if !self.edges.contains(&edge) {
            self.edges.push(edge);
        }
    }
}

pub(crate) fn push_unique(v: &mut Vec<String>, s: String) {
    if !s.trim().is_empty() && !v.contains(&s) {
        v.push(s);
    }
}

pub(crate) fn sort_texts(texts: &mut [String]) {
    texts.sort_by(|a, b| (Reverse(a.chars().count()), a.as_str()).cmp(&(Reverse(b.chars().count()), b.as_str())));
}

/// Single-writer reduction of per-sentence fragments (in document order) into
/// one graph. Entities merge on their key; actions get a global occurrence
/// counter; each sentence's actions are chained by `next` edges.
pub(crate) fn merge(doc: &DocumentParse, per_sentence: Vec<(TextId, Vec<Fragment>)>) -> GroundedKg {
    let mut nodes: BTreeMap<String, KgNode> = BTreeMap::new();
    let mut edges: Vec<KgEdge> = Vec::new();
    let mut entity_ids: HashMap<String, String> = HashMap::new();
    let mut action_counter = 0usize;

    for (text_id, fragments) in per_sentence {
        let mut sentence_actions: Vec<String> = Vec::new();
        for frag in fragments {
            let mut local_actions = Vec::with_capacity(frag.actions.len());
            for a in frag.actions {
                action_counter += 1;
                let id = unique_id(&nodes, format!("{}_{}", a.label, action_counter));
                nodes.insert(
                    id.clone(),
                    KgNode {
                        node_id: id.clone(),
                        label: a.label,
                        texts: a.texts,
                        node_type: NodeType::Action,
                        grounded_texts: vec![text_id],
                    },
                );
                local_actions.push(id.clone());
                sentence_actions.push(id);
            }

            let mut touched: HashSet<String> = HashSet::new();
            for (key, e) in frag.entities {
                let id = match entity_ids.get(&key) {
                    Some(id) => id.clone(),
                    None => {
                        let id = unique_id(&nodes, e.label.clone());
                        nodes.insert(
                            id.clone(),
                            KgNode {
                                node_id: id.clone(),
                                label: e.label.clone(),
                                texts: Vec::new(),
                                node_type: NodeType::Entity,
                                grounded_texts: Vec::new(),
                            },
                        );
                        entity_ids.insert(key.clone(), id.clone());
                        id
                    }
                };
                let node = nodes.get_mut(&id).expect("entity inserted above");
                for t in e.texts {
                    push_unique(&mut node.texts, t);
                }
                if touched.insert(id) {
                    node.grounded_texts.push(text_id);
                }
            }

            for edge in frag.edges {
                let target = entity_ids[&edge.entity].clone();
                edges.push(KgEdge {
                    source_node: local_actions[edge.action].clone(),
                    target_node: target,
                    edge_role: edge.role,
                    edge_type: EdgeType::ActionEntity,
                    grounded_texts: vec![text_id],
                });
            }
        }
        for pair in sentence_actions.windows(2) {
            edges.push(KgEdge {
                source_node: pair[0].clone(),
                target_node: pair[1].clone(),
                edge_role: NEXT_ROLE.to_string(),
                edge_type: EdgeType::ActionAction,
                grounded_texts: vec![text_id],
            });
        }
    }

    for node in nodes.values_mut() {
        sort_texts(&mut node.texts);
    }

    GroundedKg {
        doc_id: doc.doc_id.clone(),
        nodes,
        edges,
        sentence_table: doc.sentences.iter().map(|s| (s.text_id, s.clone())).collect(),
    }
}

fn unique_id(nodes: &BTreeMap<String, KgNode>, base: String) -> String {
    if !nodes.contains_key(&base) {
        return base;
    }
    (2..).map(|i| format!("{base}~{i}")).find(|id| !nodes.contains_key(id)).expect("unbounded suffix search")
}
