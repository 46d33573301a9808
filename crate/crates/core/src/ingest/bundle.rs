//! Line-delimited JSON parse bundles.
//!
//! One record per line, discriminated by `kind`:
//!
//! ```text
//! {"kind":"sentence","doc_id":..,"chunk_index":..,"sent_index":..,"original":..,"normalized":..,"coref_resolved":..}
//! {"kind":"amr","text_id":"text_0-3","penman":"(a / and ...)"}
//! {"kind":"srl","text_id":"text_0-3","predicate":"give","pred_span":[s,e],"args":[{"role":"A0","text":..,"span":[s,e]}]}
//! ```
//!
//! `comment` and `provenance` records and unknown fields are ignored. Spans are
//! character offsets into `coref_resolved`, end-exclusive.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::penman::{parse_penman, PenmanError};
use super::types::{DocumentParse, ParseKind, SentenceParses, SentenceRecord, SrlArgument, SrlFrame, TextId};

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("cannot read bundle {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bundle line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("bundle line {line}: invalid PENMAN for {text_id}: {source}")]
    Penman {
        line: usize,
        text_id: TextId,
        #[source]
        source: PenmanError,
    },
    #[error("parse record references {0} but the bundle has no such sentence")]
    DanglingReference(TextId),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Record {
    Sentence {
        doc_id: String,
        chunk_index: u32,
        sent_index: u32,
        original: String,
        normalized: String,
        coref_resolved: String,
    },
    Amr {
        text_id: TextId,
        penman: String,
    },
    Srl {
        text_id: TextId,
        predicate: String,
        pred_span: (usize, usize),
        #[serde(default)]
        args: Vec<SrlArgRecord>,
    },
    Comment {},
    Provenance {},
}

#[derive(Deserialize)]
struct SrlArgRecord {
    role: String,
    text: String,
    span: (usize, usize),
}

fn valid_role(role: &str) -> bool {
    !role.is_empty()
        && role.chars().any(|c| c.is_ascii_uppercase())
        && role.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '-')
}

/// Reads a bundle from disk.
pub fn load_parse_bundle(path: impl AsRef<Path>) -> Result<DocumentParse, BundleError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| BundleError::Io { path: path.display().to_string(), source })?;
    read_parse_bundle(BufReader::new(file)).map_err(|e| match e {
        BundleError::Io { source, .. } => BundleError::Io { path: path.display().to_string(), source },
        other => other,
    })
}

/// Streams a bundle from any reader, validating every record.
pub fn read_parse_bundle(reader: impl BufRead) -> Result<DocumentParse, BundleError> {
    let mut doc_id: Option<String> = None;
    let mut sentences: Vec<SentenceRecord> = Vec::new();
    let mut seen_ids: HashSet<TextId> = HashSet::new();
    // (line, text_id, parse) in file order; resolved after all sentences are known
    let mut pending: Vec<(usize, TextId, Pending)> = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| BundleError::Io { path: String::new(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let schema = |message: String| BundleError::Schema { line: line_no, message };
        let record: Record = serde_json::from_str(&line).map_err(|e| schema(e.to_string()))?;
        match record {
            Record::Sentence { doc_id: d, chunk_index, sent_index, original, normalized, coref_resolved } => {
                match &doc_id {
                    None => doc_id = Some(d),
                    Some(existing) if *existing != d => {
                        return Err(schema(format!("sentence belongs to document {d:?}, bundle is {existing:?}")))
                    }
                    Some(_) => {}
                }
                let record = SentenceRecord::new(chunk_index, sent_index, original, normalized, coref_resolved);
                if !record.original.is_empty() && record.coref_resolved.is_empty() {
                    return Err(schema(format!("sentence {} has empty coref_resolved text", record.text_id)));
                }
                if !seen_ids.insert(record.text_id) {
                    return Err(schema(format!("duplicate sentence {}", record.text_id)));
                }
                sentences.push(record);
            }
            Record::Amr { text_id, penman } => {
                let mut graph =
                    parse_penman(&penman).map_err(|source| BundleError::Penman { line: line_no, text_id, source })?;
                graph.sentence_ref = Some(text_id);
                pending.push((line_no, text_id, Pending::Amr(graph)));
            }
            Record::Srl { text_id, predicate, pred_span, args } => {
                if predicate.trim().is_empty() {
                    return Err(schema(format!("srl record for {text_id} has an empty predicate")));
                }
                let mut frame_args = Vec::with_capacity(args.len());
                for a in args {
                    if !valid_role(&a.role) {
                        return Err(schema(format!(
                            "srl argument role {:?} for {text_id} is not an uppercase tag",
                            a.role
                        )));
                    }
                    frame_args.push(SrlArgument { role: a.role, text: a.text, span: a.span });
                }
                pending.push((
                    line_no,
                    text_id,
                    Pending::Srl(SrlFrame {
                        predicate_lemma: predicate,
                        predicate_char_span: pred_span,
                        args: frame_args,
                        sentence_ref: text_id,
                    }),
                ));
            }
            Record::Comment {} | Record::Provenance {} => {}
        }
    }

    sentences.sort_by_key(|s| s.text_id);
    let char_len: BTreeMap<TextId, usize> =
        sentences.iter().map(|s| (s.text_id, s.coref_resolved.chars().count())).collect();

    let mut parse_kind: Option<ParseKind> = None;
    let mut parses: BTreeMap<TextId, SentenceParses> = BTreeMap::new();
    for (line, text_id, parse) in pending {
        let Some(&len) = char_len.get(&text_id) else {
            return Err(BundleError::DanglingReference(text_id));
        };
        let kind = match &parse {
            Pending::Amr(_) => ParseKind::Amr,
            Pending::Srl(_) => ParseKind::Srl,
        };
        match parse_kind {
            None => parse_kind = Some(kind),
            Some(k) if k != kind => {
                return Err(BundleError::Schema { line, message: format!("bundle mixes {k} and {kind} parse records") })
            }
            Some(_) => {}
        }
        match parse {
            Pending::Amr(g) => match parses.entry(text_id).or_insert_with(|| SentenceParses::Amr(Vec::new())) {
                SentenceParses::Amr(v) => v.push(g),
                SentenceParses::Srl(_) => unreachable!("kind checked above"),
            },
            Pending::Srl(f) => {
                let spans = std::iter::once(f.predicate_char_span).chain(f.args.iter().map(|a| a.span));
                for (s, e) in spans {
                    if s > e || e > len {
                        return Err(BundleError::Schema {
                            line,
                            message: format!("span [{s},{e}] lies outside sentence {text_id} ({len} chars)"),
                        });
                    }
                }
                match parses.entry(text_id).or_insert_with(|| SentenceParses::Srl(Vec::new())) {
                    SentenceParses::Srl(v) => v.push(f),
                    SentenceParses::Amr(_) => unreachable!("kind checked above"),
                }
            }
        }
    }

    Ok(DocumentParse { doc_id: doc_id.unwrap_or_default(), sentences, parses, parse_kind })
}

enum Pending {
    Amr(crate::ingest::AmrGraph),
    Srl(SrlFrame),
}
