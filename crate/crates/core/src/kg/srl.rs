//! Graph construction from SRL frames: one action per predicate occurrence,
//! one entity per distinct argument text, `next` edges in predicate order.

use super::merge::{merge, Fragment, LocalNode};
use super::{check_kind, BuildError, GroundedKg};
use crate::exec::Execution;
use crate::ingest::{DocumentParse, ParseKind, SentenceParses, SentenceRecord, SrlFrame, TextId};

fn span_text(sentence: Option<&SentenceRecord>, (start, end): (usize, usize)) -> Option<String> {
    let s = sentence?;
    let text: String = s.coref_resolved.chars().skip(start).take(end.saturating_sub(start)).collect();
    let text = text.trim().to_string();
    (!text.is_empty()).then_some(text)
}

pub(crate) fn srl_fragment(frames: &[SrlFrame], sentence: Option<&SentenceRecord>) -> Fragment {
    let mut ordered: Vec<&SrlFrame> = frames.iter().collect();
    ordered.sort_by_key(|f| f.predicate_char_span.0);

    let mut frag = Fragment::default();
    for frame in ordered {
        let idx = frag.actions.len();
        let lemma = frame.predicate_lemma.trim().to_string();
        let mut texts = Vec::new();
        if let Some(surface) = span_text(sentence, frame.predicate_char_span) {
            texts.push(surface);
        }
        if !texts.contains(&lemma) {
            texts.push(lemma.clone());
        }
        frag.actions.push(LocalNode { label: lemma, texts });
        for arg in &frame.args {
            let text = arg.text.split_whitespace().collect::<Vec<_>>().join(" ");
            if text.is_empty() {
                continue;
            }
            let key = frag.add_entity(&text, [text.clone()]);
            frag.add_edge(idx, key, arg.role.clone());
        }
    }
    frag
}

pub fn build_from_srl(parse: &DocumentParse) -> Result<GroundedKg, BuildError> {
    build_from_srl_with(parse, Execution::default())
}

pub fn build_from_srl_with(parse: &DocumentParse, exec: Execution) -> Result<GroundedKg, BuildError> {
    check_kind(parse, ParseKind::Srl)?;
    let sentences: Vec<(&TextId, &SentenceParses)> = parse.parses.iter().collect();
    let per_sentence = exec.map(&sentences, |(tid, parses)| {
        let frags = match parses {
            SentenceParses::Srl(frames) => vec![srl_fragment(frames, parse.sentence(**tid))],
            SentenceParses::Amr(_) => Vec::new(),
        };
        (**tid, frags)
    });
    Ok(merge(parse, per_sentence))
}
