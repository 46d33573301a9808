use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Stable grounding identifier of one sentence, rendered `text_{chunk}-{sent}`.
///
/// Orders by `(chunk, sent)`, which is document order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TextId {
    pub chunk: u32,
    pub sent: u32,
}

impl TextId {
    pub fn new(chunk: u32, sent: u32) -> Self {
        Self { chunk, sent }
    }
}

impl fmt::Display for TextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "text_{}-{}", self.chunk, self.sent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid text id {0:?}, expected text_<chunk>-<sent>")]
pub struct TextIdParseError(pub String);

impl FromStr for TextId {
    type Err = TextIdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TextIdParseError(s.to_string());
        let rest = s.strip_prefix("text_").ok_or_else(err)?;
        let (chunk, sent) = rest.split_once('-').ok_or_else(err)?;
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        if !digits(chunk) || !digits(sent) {
            return Err(err());
        }
        Ok(TextId { chunk: chunk.parse().map_err(|_| err())?, sent: sent.parse().map_err(|_| err())? })
    }
}

impl Serialize for TextId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TextId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One coreference-resolved sentence of the source document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub text_id: TextId,
    pub chunk_index: u32,
    pub sent_index: u32,
    pub original: String,
    pub normalized: String,
    pub coref_resolved: String,
}

impl SentenceRecord {
    pub fn new(
        chunk_index: u32,
        sent_index: u32,
        original: impl Into<String>,
        normalized: impl Into<String>,
        coref_resolved: impl Into<String>,
    ) -> Self {
        Self {
            text_id: TextId::new(chunk_index, sent_index),
            chunk_index,
            sent_index,
            original: original.into(),
            normalized: normalized.into(),
            coref_resolved: coref_resolved.into(),
        }
    }
}

/// A PENMAN constant: quoted string or bare symbol/number such as `-` or `5`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Constant {
    Str(String),
    Symbol(String),
}

impl Constant {
    pub fn text(&self) -> &str {
        match self {
            Constant::Str(s) | Constant::Symbol(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub source: String,
    pub role: String,
    pub value: Constant,
}

/// Variable-to-variable relation, recorded in the direction it was written:
/// `source` is the node the role appeared under, so `:ARG0-of` stays inverted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub source: String,
    pub role: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmrGraph {
    pub root: String,
    /// Variable to concept, in declaration order.
    pub instances: IndexMap<String, String>,
    pub attributes: Vec<Attribute>,
    pub relations: Vec<Relation>,
    pub sentence_ref: Option<TextId>,
}

impl AmrGraph {
    pub fn concept(&self, var: &str) -> Option<&str> {
        self.instances.get(var).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrlArgument {
    pub role: String,
    pub text: String,
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrlFrame {
    pub predicate_lemma: String,
    pub predicate_char_span: (usize, usize),
    pub args: Vec<SrlArgument>,
    pub sentence_ref: TextId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseKind {
    Amr,
    Srl,
}

impl fmt::Display for ParseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseKind::Amr => "amr",
            ParseKind::Srl => "srl",
        })
    }
}

impl FromStr for ParseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "amr" => Ok(ParseKind::Amr),
            "srl" => Ok(ParseKind::Srl),
            other => Err(format!("unknown parse kind {other:?} (expected amr or srl)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SentenceParses {
    Amr(Vec<AmrGraph>),
    Srl(Vec<SrlFrame>),
}

impl SentenceParses {
    pub fn kind(&self) -> ParseKind {
        match self {
            SentenceParses::Amr(_) => ParseKind::Amr,
            SentenceParses::Srl(_) => ParseKind::Srl,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SentenceParses::Amr(g) => g.len(),
            SentenceParses::Srl(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parsed document: sentences in document order plus their semantic parses.
///
/// `parse_kind` is `None` only when the bundle carried no parse records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentParse {
    pub doc_id: String,
    pub sentences: Vec<SentenceRecord>,
    pub parses: BTreeMap<TextId, SentenceParses>,
    pub parse_kind: Option<ParseKind>,
}

impl DocumentParse {
    pub fn empty(doc_id: impl Into<String>) -> Self {
        Self { doc_id: doc_id.into(), sentences: Vec::new(), parses: BTreeMap::new(), parse_kind: None }
    }

    pub fn sentence(&self, id: TextId) -> Option<&SentenceRecord> {
        self.sentences.binary_search_by(|s| s.text_id.cmp(&id)).ok().map(|i| &self.sentences[i])
    }
}
