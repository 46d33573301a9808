//! Answer metrics (exact match, sequence match, ROUGE-L F1) and reports.
//!
//! Normalization: lowercase, split on Unicode whitespace, strip
//! non-alphanumeric characters from both ends of every token, drop tokens
//! that become empty. All three metrics work on these token sequences, which
//! keeps "exact match ⇒ sequence match" true for every pair.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::ingest::TextId;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("no results to evaluate")]
    Empty,
    #[error("example {index} has no reference answers")]
    NoReferences { index: usize },
    #[error("bertscore present on {present} of {total} examples; merge it for all or none")]
    PartialBertscore { present: usize, total: usize },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One line of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaExample {
    pub question: String,
    pub references: Vec<String>,
    pub prediction: String,
    #[serde(default)]
    pub context_text_ids: Vec<TextId>,
    /// Filled in by an external scorer, if at all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bertscore: Option<f64>,
    /// Why no prediction was produced; such examples score zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleScores {
    pub em: f64,
    pub sm: f64,
    pub rouge_l_f1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bertscore: Option<f64>,
}

/// Mean scores as percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub exact_match: f64,
    pub sequence_match: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bertscore: Option<f64>,
    pub rouge_l_f1: f64,
}

impl Aggregates {
    pub fn rounded(&self) -> Aggregates {
        Aggregates {
            exact_match: self.exact_match.round(),
            sequence_match: self.sequence_match.round(),
            bertscore: self.bertscore.map(f64::round),
            rouge_l_f1: self.rouge_l_f1.round(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub count: usize,
    pub per_example: Vec<ExampleScores>,
    /// Rounded to whole percentages, the way result tables present them.
    pub aggregates: Aggregates,
    /// Unrounded percentages.
    pub means: Aggregates,
}

pub fn normalize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

/// 1 when the reference tokens occur contiguously in the prediction tokens.
pub fn exact_match(prediction: &str, reference: &str) -> f64 {
    let (p, r) = (normalize(prediction), normalize(reference));
    if r.is_empty() || r.len() > p.len() {
        return 0.0;
    }
    if p.windows(r.len()).any(|w| w == r.as_slice()) {
        1.0
    } else {
        0.0
    }
}

/// 1 when the reference tokens occur in order, not necessarily adjacent.
pub fn sequence_match(prediction: &str, reference: &str) -> f64 {
    let (p, r) = (normalize(prediction), normalize(reference));
    if r.is_empty() {
        return 0.0;
    }
    let mut it = p.iter();
    if r.iter().all(|t| it.any(|x| x == t)) {
        1.0
    } else {
        0.0
    }
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_l_f1(prediction: &str, reference: &str) -> f64 {
    let (p, r) = (normalize(prediction), normalize(reference));
    if p.is_empty() || r.is_empty() {
        return 0.0;
    }
    let lcs = lcs_len(&p, &r) as f64;
    if lcs == 0.0 {
        return 0.0;
    }
    let precision = lcs / p.len() as f64;
    let recall = lcs / r.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Scores against every reference and keeps the best per metric.
pub fn score_example(prediction: &str, references: &[String]) -> ExampleScores {
    let best = |m: fn(&str, &str) -> f64| references.iter().map(|r| m(prediction, r)).fold(0.0, f64::max);
    ExampleScores { em: best(exact_match), sm: best(sequence_match), rouge_l_f1: best(rouge_l_f1), bertscore: None }
}

pub fn evaluate(results: &[QaExample]) -> Result<MetricReport, EvalError> {
    evaluate_with(results, Execution::default())
}

pub fn evaluate_with(results: &[QaExample], exec: Execution) -> Result<MetricReport, EvalError> {
    if results.is_empty() {
        return Err(EvalError::Empty);
    }
    if let Some(index) = results.iter().position(|r| r.references.is_empty()) {
        return Err(EvalError::NoReferences { index });
    }
    let with_bs = results.iter().filter(|r| r.bertscore.is_some()).count();
    if with_bs != 0 && with_bs != results.len() {
        return Err(EvalError::PartialBertscore { present: with_bs, total: results.len() });
    }
    let per_example: Vec<ExampleScores> =
        exec.map(results, |r| ExampleScores { bertscore: r.bertscore, ..score_example(&r.prediction, &r.references) });
    let n = per_example.len() as f64;
    let mean = |f: fn(&ExampleScores) -> f64| 100.0 * per_example.iter().map(f).sum::<f64>() / n;
    let means = Aggregates {
        exact_match: mean(|s| s.em),
        sequence_match: mean(|s| s.sm),
        bertscore: (with_bs > 0).then(|| mean(|s| s.bertscore.unwrap_or(0.0))),
        rouge_l_f1: mean(|s| s.rouge_l_f1),
    };
    Ok(MetricReport { count: per_example.len(), per_example, aggregates: means.rounded(), means })
}

/// Aligned text table: one header row and one row for `model`.
pub fn format_table(report: &MetricReport, model: &str) -> String {
    let a = &report.aggregates;
    let mut cols: Vec<(&str, f64)> = vec![("Exact match", a.exact_match), ("Sequence match", a.sequence_match)];
    if let Some(b) = a.bertscore {
        cols.push(("Bertscore", b));
    }
    cols.push(("RougeL F1", a.rouge_l_f1));
    let width = model.len().max("Model".len());
    let mut out = String::new();
    let _ = write!(out, "{:<width$}", "Model");
    for (name, _) in &cols {
        let _ = write!(out, "  {name}");
    }
    out.push('\n');
    let _ = write!(out, "{model:<width$}");
    for (name, v) in &cols {
        let _ = write!(out, "  {:>w$}", format!("{v:.0}"), w = name.len());
    }
    out.push('\n');
    out
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<QaExample>, EvalError> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ex = serde_json::from_str(&line).map_err(|e| EvalError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(ex);
    }
    Ok(out)
}

pub fn write_results<'a>(
    path: impl AsRef<Path>,
    results: impl IntoIterator<Item = &'a QaExample>,
) -> Result<(), EvalError> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in results {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
