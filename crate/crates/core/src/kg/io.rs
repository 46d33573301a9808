//! Node-link JSON graph file:
//! `{"doc_id", "nodes": [...], "edges": [...], "sentences": [...]}` with nodes
//! sorted by id, edges in construction order and sentences in document order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GroundedKg, GroundingViolation, KgEdge, KgNode};
use crate::ingest::SentenceRecord;

#[derive(Debug, thiserror::Error)]
pub enum GraphIoError {
    #[error("graph file I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("graph file JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph file is inconsistent: {0}")]
    Invalid(#[from] GroundingViolation),
    #[error("graph file has duplicate node id {0:?}")]
    DuplicateNode(String),
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    doc_id: String,
    nodes: Vec<KgNode>,
    edges: Vec<KgEdge>,
    sentences: Vec<SentenceRecord>,
}

pub fn write_graph(kg: &GroundedKg, mut writer: impl Write) -> Result<(), GraphIoError> {
    let file = GraphFile {
        doc_id: kg.doc_id.clone(),
        nodes: kg.nodes.values().cloned().collect(),
        edges: kg.edges.clone(),
        sentences: kg.sentence_table.values().cloned().collect(),
    };
    serde_json::to_writer_pretty(&mut writer, &file)?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn read_graph(reader: impl Read) -> Result<GroundedKg, GraphIoError> {
    let file: GraphFile = serde_json::from_reader(reader)?;
    let mut kg = GroundedKg::empty(file.doc_id);
    for n in file.nodes {
        if kg.nodes.contains_key(&n.node_id) {
            return Err(GraphIoError::DuplicateNode(n.node_id));
        }
        kg.nodes.insert(n.node_id.clone(), n);
    }
    kg.edges = file.edges;
    kg.sentence_table = file.sentences.into_iter().map(|s| (s.text_id, s)).collect();
    kg.validate()?;
    Ok(kg)
}

pub fn export_graph(kg: &GroundedKg, path: impl AsRef<Path>) -> Result<(), GraphIoError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_graph(kg, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn import_graph(path: impl AsRef<Path>) -> Result<GroundedKg, GraphIoError> {
    read_graph(BufReader::new(File::open(path)?))
}
