//! Seeded synthetic data: random parse bundles, graphs and indices.
//!
//! Used by the property tests and benchmarks; everything is a deterministic
//! function of the seed.

use indexmap::IndexMap;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embed::{EmbedParams, NodeIndex};
use crate::ingest::{
    AmrGraph, Attribute, Constant, DocumentParse, ParseKind, Relation, SentenceParses, SentenceRecord, SrlArgument,
    SrlFrame, TextId,
};
use crate::kg::{EdgeType, GroundedKg, KgEdge, KgNode, NodeType};

const NOUNS: &[&str] = &[
    "rabbit", "garden", "gate", "tea", "bread", "jacket", "shoe", "cabbage", "frame", "pond", "mouse", "cat", "wood",
    "sieve", "net", "potato", "bean", "lettuce", "radish", "onion",
];
const VERBS: &[&str] =
    &["run", "eat", "find", "lose", "give", "make", "see", "hide", "jump", "cry", "meet", "go", "sit", "buy", "shut"];
const MODS: &[&str] = &["little", "old", "brown", "big", "some", "five", "blue"];
const ROLES: &[&str] = &[":ARG0", ":ARG1", ":ARG2", ":mod", ":location", ":time", ":quant"];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick<'a>(r: &mut ChaCha8Rng, xs: &'a [&'a str]) -> &'a str {
    xs.choose(r).copied().expect("non-empty vocabulary")
}

fn sentence(chunk: u32, sent: u32, text: &str) -> SentenceRecord {
    SentenceRecord::new(chunk, sent, text, text, text)
}

/// Random AMR graph over `n` variables: a tree with occasional reentrancy,
/// coordination, inverse roles and constants.
pub fn random_amr(r: &mut ChaCha8Rng, n: usize, text_id: TextId) -> AmrGraph {
    let n = n.max(1);
    let mut instances = IndexMap::new();
    for i in 0..n {
        let concept = match r.random_range(0..10) {
            0..=3 => format!("{}-0{}", pick(r, VERBS), r.random_range(1..4)),
            4 if i > 0 => "and".to_string(),
            5 => "person".to_string(),
            6 if i > 0 => pick(r, MODS).to_string(),
            _ => pick(r, NOUNS).to_string(),
        };
        instances.insert(format!("v{i}"), concept);
    }
    let mut relations = Vec::new();
    let mut op = vec![0usize; n];
    for i in 1..n {
        let parent = r.random_range(0..i);
        let role = if instances[parent] == "and" {
            op[parent] += 1;
            format!(":op{}", op[parent])
        } else if r.random_bool(0.15) {
            // same edge written inverted under the child
            relations.push(Relation { source: format!("v{i}"), role: ":ARG0-of".into(), target: format!("v{parent}") });
            continue;
        } else {
            pick(r, ROLES).to_string()
        };
        relations.push(Relation { source: format!("v{parent}"), role, target: format!("v{i}") });
    }
    if n > 2 && r.random_bool(0.3) {
        let a = r.random_range(0..n - 1);
        let b = r.random_range(a + 1..n);
        relations.push(Relation { source: format!("v{a}"), role: ":ARG1".into(), target: format!("v{b}") });
    }
    let mut attributes = Vec::new();
    if r.random_bool(0.3) {
        attributes.push(Attribute {
            source: format!("v{}", r.random_range(0..n)),
            role: ":name".into(),
            value: Constant::Str(pick(r, NOUNS).to_string()),
        });
    }
    if r.random_bool(0.2) {
        attributes.push(Attribute {
            source: "v0".into(),
            role: ":polarity".into(),
            value: Constant::Symbol("-".into()),
        });
    }
    AmrGraph { root: "v0".into(), instances, attributes, relations, sentence_ref: Some(text_id) }
}

/// Random SRL frames whose spans point into the generated sentence text.
pub fn random_srl(r: &mut ChaCha8Rng, frames: usize, chunk: u32, sent: u32) -> (SentenceRecord, Vec<SrlFrame>) {
    let text_id = TextId::new(chunk, sent);
    let mut text = String::new();
    let mut out = Vec::new();
    let push = |text: &mut String, word: &str| {
        if !text.is_empty() {
            text.push(' ');
        }
        let start = text.len();
        text.push_str(word);
        (start, text.len())
    };
    for _ in 0..frames {
        let mut args = Vec::new();
        let subject = format!("the {}", pick(r, NOUNS));
        let s0 = push(&mut text, &subject);
        args.push(SrlArgument { role: "A0".into(), text: subject, span: s0 });
        let verb = pick(r, VERBS).to_string();
        let pv = push(&mut text, &verb);
        for k in 1..r.random_range(1..4) {
            let arg = format!("{} {}", pick(r, MODS), pick(r, NOUNS));
            let sp = push(&mut text, &arg);
            args.push(SrlArgument { role: format!("A{k}"), text: arg, span: sp });
        }
        if r.random_bool(0.2) {
            let sp = push(&mut text, "yesterday");
            args.push(SrlArgument { role: "AM-TMP".into(), text: "yesterday".into(), span: sp });
        }
        out.push(SrlFrame { predicate_lemma: verb, predicate_char_span: pv, args, sentence_ref: text_id });
    }
    text.push('.');
    (sentence(chunk, sent, &text), out)
}

/// Random document of `chunks × sents_per_chunk` sentences; some sentences
/// carry no parse and some carry several.
pub fn random_bundle(seed: u64, kind: ParseKind, chunks: u32, sents_per_chunk: u32) -> DocumentParse {
    let mut r = rng(seed);
    let mut doc = DocumentParse::empty(format!("synthetic-{seed}"));
    doc.parse_kind = Some(kind);
    for c in 0..chunks {
        for s in 0..sents_per_chunk {
            let id = TextId::new(c, s);
            let parses = r.random_range(0..3);
            match kind {
                ParseKind::Amr => {
                    let words: Vec<&str> = (0..6).map(|_| pick(&mut r, NOUNS)).collect();
                    doc.sentences.push(sentence(c, s, &words.join(" ")));
                    let graphs: Vec<AmrGraph> = (0..parses)
                        .map(|_| {
                            let n = r.random_range(1..9);
                            random_amr(&mut r, n, id)
                        })
                        .collect();
                    if !graphs.is_empty() {
                        doc.parses.insert(id, SentenceParses::Amr(graphs));
                    }
                }
                ParseKind::Srl => {
                    let (rec, frames) = random_srl(&mut r, parses, c, s);
                    doc.sentences.push(rec);
                    if !frames.is_empty() {
                        doc.parses.insert(id, SentenceParses::Srl(frames));
                    }
                }
            }
        }
    }
    doc
}

/// Random well-formed graph with `n_nodes` nodes and about `n_edges` edges,
/// grounded in `n_sentences` synthetic sentences.
pub fn random_graph(seed: u64, n_nodes: usize, n_edges: usize, n_sentences: u32) -> GroundedKg {
    let mut r = rng(seed);
    let n_sentences = n_sentences.max(1);
    let mut kg = GroundedKg::empty(format!("synthetic-{seed}"));
    for s in 0..n_sentences {
        let words: Vec<&str> = (0..5).map(|_| pick(&mut r, NOUNS)).collect();
        let rec = sentence(0, s, &words.join(" "));
        kg.sentence_table.insert(rec.text_id, rec);
    }
    let mut ids = Vec::new();
    for i in 0..n_nodes {
        let action = r.random_bool(0.4);
        let label = if action { pick(&mut r, VERBS) } else { pick(&mut r, NOUNS) }.to_string();
        let texts: Vec<String> = (0..r.random_range(0..3)).map(|_| format!("{} {label}", pick(&mut r, MODS))).collect();
        let grounded = (0..r.random_range(1..4)).map(|_| TextId::new(0, r.random_range(0..n_sentences))).collect();
        let node_id = format!("{label}_{i}");
        ids.push((node_id.clone(), action));
        kg.nodes.insert(
            node_id.clone(),
            KgNode {
                node_id,
                label,
                texts,
                node_type: if action { NodeType::Action } else { NodeType::Entity },
                grounded_texts: grounded,
            },
        );
    }
    if ids.len() >= 2 {
        for _ in 0..n_edges {
            let a = &ids[r.random_range(0..ids.len())];
            let b = &ids[r.random_range(0..ids.len())];
            let (src, dst, edge_type) = match (a.1, b.1) {
                (true, true) => (a, b, EdgeType::ActionAction),
                (true, false) => (a, b, EdgeType::ActionEntity),
                (false, true) => (b, a, EdgeType::ActionEntity),
                (false, false) => continue,
            };
            kg.edges.push(KgEdge {
                source_node: src.0.clone(),
                target_node: dst.0.clone(),
                edge_role: if edge_type == EdgeType::ActionAction { "next".into() } else { "A1".into() },
                edge_type,
                grounded_texts: vec![TextId::new(0, r.random_range(0..n_sentences))],
            });
        }
    }
    kg
}

/// Random unit vector of dimension `dim`.
pub fn random_unit(r: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| (x / n) as f32).collect();
        }
    }
}

/// Random index of `n` unit rows. With `ties`, rows are drawn from a small
/// pool so equal scores are common.
pub fn random_index(seed: u64, n: usize, dim: usize, ties: bool) -> NodeIndex {
    let mut r = rng(seed);
    let pool: Vec<Vec<f32>> = (0..4).map(|_| random_unit(&mut r, dim)).collect();
    let rows = (0..n)
        .map(|i| {
            let v = if ties && r.random_bool(0.5) {
                pool[r.random_range(0..pool.len())].clone()
            } else {
                random_unit(&mut r, dim)
            };
            (format!("n{i:05}"), v)
        })
        .collect();
    NodeIndex::from_rows(EmbedParams::default(), dim, rows).expect("generated rows are valid")
}

/// Public constructor for the generator so callers need not depend on ChaCha.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    rng(seed)
}
