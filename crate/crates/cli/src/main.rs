mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use groundedkg::embed::Scheme;
use groundedkg::exec::Execution;
use groundedkg::ingest::ParseKind;

use crate::config::{EmbedderKind, LlmKind, Overrides};

#[derive(Parser, Debug)]
#[command(name = "groundedkg", version, about = "Sentence-grounded knowledge graph retrieval for long-document QA")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, env = "GROUNDEDKG_CONFIG")]
    config: Option<PathBuf>,
    /// Nodes retrieved per query node.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Enable the VectorSim filter with this threshold.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// With --tau, keep at most this many sentences.
    #[arg(long, global = true)]
    top_k_texts: Option<usize>,
    /// Enable the RetCount filter with this minimum.
    #[arg(long, global = true)]
    ret_count_min: Option<usize>,
    #[arg(long, global = true)]
    max_context: Option<usize>,
    /// Retrieve only; do not call the LLM.
    #[arg(long, global = true)]
    no_llm: bool,
    #[arg(long, global = true, value_enum)]
    embedder: Option<EmbedderArg>,
    #[arg(long, global = true, env = "GROUNDEDKG_EMBED_URL")]
    embed_url: Option<String>,
    #[arg(long, global = true, value_enum)]
    llm: Option<LlmArg>,
    #[arg(long, global = true, env = "GROUNDEDKG_LLM_URL")]
    llm_url: Option<String>,
    #[arg(long, global = true, env = "GROUNDEDKG_LLM_MODEL")]
    model: Option<String>,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EmbedderArg {
    Stub,
    FileCache,
    Http,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LlmArg {
    Stub,
    Http,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Amr,
    Srl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExportFormat {
    /// The graph file itself (node-link JSON).
    Json,
    /// One `(role, source, target, type, [text ids])` line per edge.
    Triples,
    /// Graphviz.
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a grounded graph from a parse bundle.
    BuildGraph {
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, value_enum)]
        parse_kind: Option<KindArg>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Embed every graph node into an index file (.json or binary).
    Index {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Retrieve context for one question or a questions file and answer it.
    Query {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        /// Raw question text (embedded as a single query node).
        #[arg(long, conflicts_with_all = ["query_parse", "questions"])]
        question: Option<String>,
        /// Parse bundle of the question.
        #[arg(long, conflicts_with = "questions")]
        query_parse: Option<PathBuf>,
        /// JSON Lines of {id, question, query_parse?, answers?}.
        #[arg(long)]
        questions: Option<PathBuf>,
        /// Results file for batch runs.
        #[arg(long)]
        results: Option<PathBuf>,
        /// Write the retrieval trace (JSON; JSON Lines for batches).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Answer from memory of this book instead of retrieved content.
        #[arg(long)]
        book: Option<String>,
    },
    /// Score a results file.
    Eval {
        #[arg(long)]
        results: Option<PathBuf>,
        /// Also write the report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value = "GroundedKG-RAG")]
        model_name: String,
    },
    /// Write a graph (from a graph file or a bundle) in an export format.
    ExportGraph {
        #[arg(long, conflicts_with = "bundle")]
        graph: Option<PathBuf>,
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            k: self.k,
            scheme: self.scheme,
            alpha: self.alpha,
            beta: self.beta,
            tau: self.tau,
            top_k_texts: self.top_k_texts,
            ret_count_min: self.ret_count_min,
            max_context_sentences: self.max_context,
            embedder: self.embedder.map(|e| match e {
                EmbedderArg::Stub => EmbedderKind::Stub,
                EmbedderArg::FileCache => EmbedderKind::FileCache,
                EmbedderArg::Http => EmbedderKind::Http,
            }),
            embed_url: self.embed_url.clone(),
            llm: self.llm.map(|l| match l {
                LlmArg::Stub => LlmKind::Stub,
                LlmArg::Http => LlmKind::Http,
            }),
            llm_url: self.llm_url.clone(),
            model: self.model.clone(),
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = config::RunConfig::load(cli.global.config.as_deref())?;
    cfg.apply(&cli.global.overrides());
    let exec = if cli.global.sequential { Execution::Sequential } else { Execution::default() };
    let ctx = commands::Ctx { cfg, exec, scheme_flag: cli.global.scheme, no_llm: cli.global.no_llm };
    match cli.command {
        Command::BuildGraph { bundle, parse_kind, out } => {
            let kind = parse_kind.map(|k| match k {
                KindArg::Amr => ParseKind::Amr,
                KindArg::Srl => ParseKind::Srl,
            });
            commands::build_graph(&ctx, bundle, kind, out)
        }
        Command::Index { graph, out } => commands::index(&ctx, graph, out),
        Command::Query { graph, index, question, query_parse, questions, results, trace, book } => {
            let input = match (question, query_parse, questions) {
                (Some(q), None, None) => commands::QueryInput::Text(q),
                (None, Some(p), None) => commands::QueryInput::Parse(p),
                (None, None, Some(f)) => commands::QueryInput::Batch(f),
                _ => anyhow::bail!("give one of --question, --query-parse or --questions"),
            };
            commands::query(&ctx, graph, index, input, results, trace, book)
        }
        Command::Eval { results, report, model_name } => commands::eval(&ctx, results, report, &model_name),
        Command::ExportGraph { graph, bundle, format, out } => commands::export_graph(&ctx, graph, bundle, format, out),
    }
}
