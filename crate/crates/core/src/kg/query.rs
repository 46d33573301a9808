use super::{build_graph, BuildError, GroundedKg, KgNode, NodeType};
use crate::ingest::{DocumentParse, SentenceRecord, TextId};

/// A parse of a raw query string with no semantic parses attached; building a
/// query graph from it yields the whole-query fallback node.
pub fn query_parse_from_text(query: &str) -> DocumentParse {
    let mut doc = DocumentParse::empty("query");
    let text = query.trim();
    if !text.is_empty() {
        doc.sentences.push(SentenceRecord::new(0, 0, text, text, text));
    }
    doc
}

/// Builds the query graph with the same constructor as documents. When
/// construction yields no nodes, the whole query becomes one entity node.
pub fn build_query_graph(query_parse: &DocumentParse) -> Result<GroundedKg, BuildError> {
    let mut kg = build_graph(query_parse)?;
    if !kg.nodes.is_empty() {
        return Ok(kg);
    }
    let text =
        query_parse.sentences.iter().map(|s| s.original.trim()).filter(|s| !s.is_empty()).collect::<Vec<_>>().join(" ");
    if text.is_empty() {
        return Err(BuildError::InvalidInput("query is empty".into()));
    }
    let text_id = match query_parse.sentences.first() {
        Some(s) => s.text_id,
        None => {
            let id = TextId::new(0, 0);
            kg.sentence_table.insert(id, SentenceRecord::new(0, 0, text.clone(), text.clone(), text.clone()));
            id
        }
    };
    kg.nodes.insert(
        text.clone(),
        KgNode {
            node_id: text.clone(),
            label: text.clone(),
            texts: vec![text],
            node_type: NodeType::Entity,
            grounded_texts: vec![text_id],
        },
    );
    Ok(kg)
}
