use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use groundedkg::embed::{build_index, load_index, save_index, Scheme};
use groundedkg::evalkit::{evaluate_with, format_table, read_results, write_results, QaExample};
use groundedkg::exec::Execution;
use groundedkg::ingest::{load_parse_bundle, ParseKind};
use groundedkg::kg::{
    build_from_amr_with, build_from_srl_with, build_graph_with, export_graph as write_graph_file, import_graph,
    query_parse_from_text, EdgeType, GroundedKg, NodeType,
};
use groundedkg::ragen::{answer_batch, PromptSpec};
use groundedkg::retrieval::{assemble_context, retrieve_with, RetrievalResult};
use serde::Deserialize;

use crate::config::RunConfig;
use crate::ExportFormat;

pub struct Ctx {
    pub cfg: RunConfig,
    pub exec: Execution,
    pub scheme_flag: Option<Scheme>,
    pub no_llm: bool,
}

fn need(path: Option<PathBuf>, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    path.or_else(|| fallback.clone())
        .with_context(|| format!("no {what} path: pass --{what} or set paths.{what} in the config"))
}

fn load_graph(path: &Path) -> Result<GroundedKg> {
    import_graph(path).with_context(|| format!("reading graph {}", path.display()))
}

fn build_from_bundle(ctx: &Ctx, bundle: &Path, kind: Option<ParseKind>) -> Result<GroundedKg> {
    let doc = load_parse_bundle(bundle).with_context(|| format!("reading bundle {}", bundle.display()))?;
    let kg = match kind.or(ctx.cfg.parse_kind) {
        Some(ParseKind::Amr) => build_from_amr_with(&doc, ctx.exec),
        Some(ParseKind::Srl) => build_from_srl_with(&doc, ctx.exec),
        None => build_graph_with(&doc, ctx.exec),
    }
    .with_context(|| format!("building graph from {}", bundle.display()))?;
    kg.validate().context("built graph failed validation")?;
    Ok(kg)
}

fn summary(kg: &GroundedKg) -> String {
    let actions = kg.nodes_of_type(NodeType::Action).count();
    let next = kg.edges.iter().filter(|e| e.edge_type == EdgeType::ActionAction).count();
    format!(
        "nodes: {} ({} action, {} entity)\nedges: {} ({} action-entity, {} action-action)",
        kg.nodes.len(),
        actions,
        kg.nodes.len() - actions,
        kg.edges.len(),
        kg.edges.len() - next,
        next
    )
}

pub fn build_graph(ctx: &Ctx, bundle: Option<PathBuf>, kind: Option<ParseKind>, out: Option<PathBuf>) -> Result<()> {
    let bundle = need(bundle, &ctx.cfg.paths.bundle, "bundle")?;
    let out = need(out, &ctx.cfg.paths.graph, "graph")?;
    let kg = build_from_bundle(ctx, &bundle, kind)?;
    write_graph_file(&kg, &out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", summary(&kg));
    Ok(())
}

pub fn index(ctx: &Ctx, graph: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let graph = need(graph, &ctx.cfg.paths.graph, "graph")?;
    let out = need(out, &ctx.cfg.paths.index, "index")?;
    let kg = load_graph(&graph)?;
    let params = ctx.cfg.embed_params()?;
    let embedder = ctx.cfg.embedder()?;
    let idx = build_index(&kg, embedder.as_ref(), params, ctx.exec)?;
    save_index(&idx, &out).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "indexed {} nodes (scheme {}, alpha {}, beta {}, dim {})",
        idx.len(),
        params.scheme,
        params.alpha,
        params.beta,
        idx.dim
    );
    Ok(())
}

pub enum QueryInput {
    Text(String),
    Parse(PathBuf),
    Batch(PathBuf),
}

#[derive(Deserialize)]
struct QuestionRecord {
    #[serde(default)]
    id: Option<String>,
    question: String,
    #[serde(default)]
    query_parse: Option<PathBuf>,
    #[serde(default)]
    answers: Vec<String>,
}

struct Prepared {
    id: String,
    question: String,
    references: Vec<String>,
    retrieval: Option<RetrievalResult>,
}

fn prompt(ctx: &Ctx, p: &Prepared, book: Option<&str>) -> PromptSpec {
    match (book, &p.retrieval) {
        (Some(b), _) => PromptSpec::without_content(b, p.question.clone()),
        (None, Some(r)) => PromptSpec::with_content(
            assemble_context(&r.selected_texts, ctx.cfg.retrieval.max_context_sentences),
            p.question.clone(),
        ),
        (None, None) => unreachable!("retrieval runs whenever no book is given"),
    }
}

pub fn query(
    ctx: &Ctx,
    graph: Option<PathBuf>,
    index: Option<PathBuf>,
    input: QueryInput,
    results: Option<PathBuf>,
    trace: Option<PathBuf>,
    book: Option<String>,
) -> Result<()> {
    let memory_only = book.is_some();
    if memory_only && ctx.no_llm {
        bail!("--book answers from memory, which needs the LLM; drop --no-llm");
    }
    let (kg, idx, embedder) = if memory_only {
        (None, None, None)
    } else {
        let graph = need(graph, &ctx.cfg.paths.graph, "graph")?;
        let index = need(index, &ctx.cfg.paths.index, "index")?;
        let kg = load_graph(&graph)?;
        let idx = load_index(&index).with_context(|| format!("reading index {}", index.display()))?;
        (Some(kg), Some(idx), Some(ctx.cfg.embedder()?))
    };
    let params = ctx.cfg.retrieval_params(ctx.scheme_flag)?;

    let records: Vec<QuestionRecord> = match &input {
        QueryInput::Text(q) => {
            vec![QuestionRecord { id: None, question: q.clone(), query_parse: None, answers: vec![] }]
        }
        QueryInput::Parse(p) => {
            let doc = load_parse_bundle(p).with_context(|| format!("reading query parse {}", p.display()))?;
            let question = doc.sentences.iter().map(|s| s.original.trim()).collect::<Vec<_>>().join(" ");
            vec![QuestionRecord { id: None, question, query_parse: Some(p.clone()), answers: vec![] }]
        }
        QueryInput::Batch(f) => read_questions(f)?,
    };

    let mut prepared = Vec::with_capacity(records.len());
    for (i, rec) in records.into_iter().enumerate() {
        let id = rec.id.clone().unwrap_or_else(|| format!("q{}", i + 1));
        let retrieval = match (&kg, &idx, &embedder) {
            (Some(kg), Some(idx), Some(e)) => {
                let parse = match &rec.query_parse {
                    Some(p) => load_parse_bundle(p).with_context(|| format!("{id}: reading {}", p.display()))?,
                    None => query_parse_from_text(&rec.question),
                };
                Some(
                    retrieve_with(&parse, kg, idx, e.as_ref(), &params, ctx.exec)
                        .with_context(|| format!("{id}: retrieval"))?,
                )
            }
            _ => None,
        };
        prepared.push(Prepared { id, question: rec.question, references: rec.answers, retrieval });
    }

    if let Some(path) = &trace {
        write_trace(path, &prepared, matches!(input, QueryInput::Batch(_)))?;
    }

    let answers = if ctx.no_llm {
        None
    } else {
        let llm = ctx.cfg.llm()?;
        let specs: Vec<PromptSpec> = prepared.iter().map(|p| prompt(ctx, p, book.as_deref())).collect();
        Some(answer_batch(&specs, llm.as_ref(), ctx.cfg.llm.max_in_flight))
    };

    let mut out = String::new();
    let batch = matches!(input, QueryInput::Batch(_));
    let mut failed = 0;
    let mut rows = Vec::new();
    for (i, p) in prepared.iter().enumerate() {
        let ids: Vec<String> = p
            .retrieval
            .as_ref()
            .map(|r| r.selected_texts.iter().map(|s| s.text_id.to_string()).collect())
            .unwrap_or_default();
        let answer = answers.as_ref().map(|a| &a[i]);
        if batch {
            let _ = write!(out, "{}\t{} texts", p.id, ids.len());
            match answer {
                Some(Ok(a)) => {
                    let _ = write!(out, "\t{}", a.answer);
                }
                Some(Err(e)) => {
                    let _ = write!(out, "\terror: {e}");
                }
                None => {
                    let _ = write!(out, "\t{}", ids.join(" "));
                }
            }
            out.push('\n');
        } else {
            if let Some(r) = &p.retrieval {
                let _ = writeln!(out, "selected: {}", ids.join(" "));
                let ctx_text = assemble_context(&r.selected_texts, ctx.cfg.retrieval.max_context_sentences);
                if !ctx_text.is_empty() {
                    let _ = writeln!(out, "{ctx_text}");
                }
            }
            match answer {
                Some(Ok(a)) => {
                    let _ = writeln!(out, "answer: {}", a.answer);
                }
                Some(Err(e)) => {
                    let _ = writeln!(out, "answer failed: {e}");
                }
                None => {}
            }
        }
        if let Some(a) = answer {
            if a.is_err() {
                failed += 1;
            }
            rows.push(QaExample {
                question: p.question.clone(),
                references: p.references.clone(),
                prediction: a.as_ref().map(|x| x.answer.clone()).unwrap_or_default(),
                context_text_ids: p.retrieval.as_ref().map(|r| r.selected_ids()).unwrap_or_default(),
                bertscore: None,
                error: a.as_ref().err().map(|e| e.to_string()),
            });
        }
    }
    print!("{out}");

    if let Some(path) = results.or_else(|| if batch { ctx.cfg.paths.results.clone() } else { None }) {
        if ctx.no_llm {
            bail!("--no-llm produces no predictions; drop --results");
        }
        write_results(&path, &rows).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {} results to {}", rows.len(), path.display());
    }
    if failed > 0 {
        eprintln!("{failed} of {} questions failed", prepared.len());
    }
    Ok(())
}

fn read_questions(path: &Path) -> Result<Vec<QuestionRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut rec: QuestionRecord =
            serde_json::from_str(line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        if let Some(p) = rec.query_parse.as_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        out.push(rec);
    }
    Ok(out)
}

fn write_trace(path: &Path, prepared: &[Prepared], lines: bool) -> Result<()> {
    let mut f =
        std::io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for p in prepared {
        let Some(r) = &p.retrieval else { continue };
        if lines {
            serde_json::to_writer(&mut f, r)?;
        } else {
            serde_json::to_writer_pretty(&mut f, r)?;
        }
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

pub fn eval(ctx: &Ctx, results: Option<PathBuf>, report: Option<PathBuf>, model_name: &str) -> Result<()> {
    let path = need(results, &ctx.cfg.paths.results, "results")?;
    let rows = read_results(&path).with_context(|| format!("reading {}", path.display()))?;
    let rep = evaluate_with(&rows, ctx.exec).with_context(|| format!("evaluating {}", path.display()))?;
    if let Some(out) = report {
        let mut text = serde_json::to_string_pretty(&rep)?;
        text.push('\n');
        fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    print!("{}", format_table(&rep, model_name));
    Ok(())
}

pub fn export_graph(
    ctx: &Ctx,
    graph: Option<PathBuf>,
    bundle: Option<PathBuf>,
    format: ExportFormat,
    out: PathBuf,
) -> Result<()> {
    let kg = match bundle {
        Some(b) => build_from_bundle(ctx, &b, None)?,
        None => load_graph(&need(graph, &ctx.cfg.paths.graph, "graph")?)?,
    };
    match format {
        ExportFormat::Json => write_graph_file(&kg, &out)?,
        ExportFormat::Triples => {
            let mut s = String::new();
            for e in &kg.edges {
                let _ = writeln!(s, "{e}");
            }
            fs::write(&out, s)?;
        }
        ExportFormat::Dot => fs::write(&out, to_dot(&kg))?,
    }
    println!("{}", summary(&kg));
    Ok(())
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn to_dot(kg: &GroundedKg) -> String {
    let mut s = String::from("digraph groundedkg {\n  rankdir=LR;\n");
    for n in kg.nodes.values() {
        let shape = if n.node_type == NodeType::Action { "box" } else { "ellipse" };
        let _ = writeln!(s, "  {} [label={}, shape={shape}];", quote(&n.node_id), quote(&n.label));
    }
    for e in &kg.edges {
        let style = if e.edge_type == EdgeType::ActionAction { ", style=dashed" } else { "" };
        let _ = writeln!(
            s,
            "  {} -> {} [label={}{style}];",
            quote(&e.source_node),
            quote(&e.target_node),
            quote(&e.edge_role)
        );
    }
    s.push_str("}\n");
    s
}
