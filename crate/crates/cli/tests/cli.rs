use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groundedkg"))
        .args(args)
        .env_remove("GROUNDEDKG_CONFIG")
        .env_remove("GROUNDEDKG_EMBED_URL")
        .env_remove("GROUNDEDKG_LLM_URL")
        .env_remove("GROUNDEDKG_LLM_MODEL")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = bin(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_graph_prints_counts() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let out = ok(&["build-graph", "--bundle", s(&fixture("bedtime_amr.jsonl")), "-o", s(&g)]);
    assert_eq!(out, "nodes: 7 (3 action, 4 entity)\nedges: 10 (8 action-entity, 2 action-action)\n");
    assert!(g.exists());
}

#[test]
fn parse_kind_flag_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let out = bin(&["build-graph", "--bundle", s(&fixture("bedtime_srl.jsonl")), "--parse-kind", "amr", "-o", s(&g)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn empty_bundle_gives_empty_graph() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("empty.jsonl");
    std::fs::write(&b, "").unwrap();
    let out = ok(&["build-graph", "--bundle", s(&b), "-o", s(&dir.path().join("g.json"))]);
    assert!(out.starts_with("nodes: 0 "), "{out}");
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = fixture("give_amr.jsonl");
    let t = dir.path().join("t.txt");
    ok(&["export-graph", "--bundle", s(&bundle), "--format", "triples", "-o", s(&t)]);
    let triples = std::fs::read_to_string(&t).unwrap();
    assert!(triples.lines().any(|l| l == "(A1, give-01_1, tea, action-entity, [text_0-0])"), "{triples}");

    let d = dir.path().join("g.dot");
    ok(&["export-graph", "--bundle", s(&bundle), "--format", "dot", "-o", s(&d)]);
    let dot = std::fs::read_to_string(&d).unwrap();
    assert!(dot.starts_with("digraph") && dot.contains("\"give-01_1\" -> \"tea\" [label=\"A1\"]"), "{dot}");

    let j = dir.path().join("g.json");
    ok(&["build-graph", "--bundle", s(&bundle), "-o", s(&j)]);
    let j2 = dir.path().join("g2.json");
    ok(&["export-graph", "--graph", s(&j), "-o", s(&j2)]);
    assert_eq!(std::fs::read(&j).unwrap(), std::fs::read(&j2).unwrap());
}

struct Built {
    _dir: tempfile::TempDir,
    graph: PathBuf,
    index: PathBuf,
}

fn peter_rabbit(extra: &[&str]) -> Built {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    let index = dir.path().join("i.json");
    ok(&["build-graph", "--bundle", s(&fixture("peter_rabbit_amr.jsonl")), "-o", s(&graph)]);
    let mut args = vec!["index", "--graph", s(&graph), "-o", s(&index)];
    args.extend_from_slice(extra);
    ok(&args);
    Built { _dir: dir, graph, index }
}

#[test]
fn single_question_without_llm() {
    let b = peter_rabbit(&[]);
    let out = ok(&[
        "query",
        "--graph",
        s(&b.graph),
        "--index",
        s(&b.index),
        "--query-parse",
        s(&fixture("queries/q2_dinner.jsonl")),
        "--no-llm",
        "--max-context",
        "2",
    ]);
    let mut lines = out.lines();
    let selected = lines.next().unwrap();
    assert!(selected.starts_with("selected: ") && selected.contains("text_1-9"), "{selected}");
    assert_eq!(lines.count(), 2, "context is capped at two sentences");
    assert!(!out.contains("answer"));
}

#[test]
fn scheme_flag_must_match_index() {
    let b = peter_rabbit(&[]);
    let out = bin(&[
        "query",
        "--graph",
        s(&b.graph),
        "--index",
        s(&b.index),
        "--question",
        "Who is Peter?",
        "--scheme",
        "neighbor_attn",
        "--no-llm",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("neighbor_attn"));
}

#[test]
fn memory_prompt_skips_retrieval() {
    let out = ok(&["query", "--question", "Who is Peter?", "--book", "The Tale of Peter Rabbit"]);
    assert!(!out.contains("selected"), "{out}");
    assert!(out.starts_with("answer: "), "{out}");
}

#[test]
fn config_file_supplies_paths_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "[paths]\nbundle = {:?}\ngraph = \"g.json\"\nindex = \"i.bin\"\n[embedding]\nscheme = \"neighbor_avg\"\n[retrieval]\nk = 3\n",
            fixture("peter_rabbit_amr.jsonl")
        ),
    )
    .unwrap();
    ok(&["--config", s(&cfg), "build-graph"]);
    let idx = ok(&["--config", s(&cfg), "index"]);
    assert!(idx.contains("scheme neighbor_avg"), "{idx}");
    assert!(dir.path().join("i.bin").exists());
    let k3 = ok(&["--config", s(&cfg), "query", "--question", "camomile tea", "--no-llm"]);
    let k10 = ok(&["--config", s(&cfg), "--k", "10", "query", "--question", "camomile tea", "--no-llm"]);
    let n = |o: &str| o.lines().next().unwrap().split_whitespace().count();
    assert!(n(&k3) <= n(&k10));

    std::fs::write(dir.path().join("bad.toml"), "[retrieval]\nkay = 3\n").unwrap();
    assert!(!bin(&["--config", s(&dir.path().join("bad.toml")), "build-graph"]).status.success());
}

#[test]
fn sequential_and_parallel_produce_identical_files() {
    let run = |seq: bool| {
        let dir = tempfile::tempdir().unwrap();
        let g = dir.path().join("g.json");
        let i = dir.path().join("i.bin");
        let r = dir.path().join("r.jsonl");
        let flag: &[&str] = if seq { &["--sequential"] } else { &[] };
        let with = |mut a: Vec<&str>| {
            a.extend_from_slice(flag);
            ok(&a)
        };
        with(vec!["build-graph", "--bundle", s(&fixture("peter_rabbit_amr.jsonl")), "-o", s(&g)]);
        with(vec!["--scheme", "neighbor_attn", "index", "--graph", s(&g), "-o", s(&i)]);
        let qs = fixture("peter_rabbit_questions.jsonl");
        with(vec!["query", "--graph", s(&g), "--index", s(&i), "--questions", s(&qs), "--results", s(&r)]);
        [g, i, r].map(|p| std::fs::read(p).unwrap())
    };
    assert_eq!(run(true), run(false));
}

#[test]
fn eval_rejects_empty_results() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.jsonl");
    std::fs::write(&r, "\n").unwrap();
    let out = bin(&["eval", "--results", s(&r)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no results"));
}

#[test]
fn eval_table_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.jsonl");
    std::fs::write(
        &r,
        concat!(
            "{\"question\":\"a\",\"references\":[\"camomile tea\"],\"prediction\":\"Camomile tea.\"}\n",
            "{\"question\":\"b\",\"references\":[\"his shoes and jacket\"],\"prediction\":\"his shoes and his jacket\"}\n",
        ),
    )
    .unwrap();
    let rep = dir.path().join("rep.json");
    let out = ok(&["eval", "--results", s(&r), "--report", s(&rep), "--model-name", "run"]);
    let row = out.lines().nth(1).unwrap();
    let nums: Vec<&str> = row.split_whitespace().skip(1).collect();
    assert_eq!(nums, ["50", "100", "94"]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    assert_eq!(v["count"], 2);
}

#[test]
fn query_needs_exactly_one_input() {
    assert!(!bin(&["query", "--no-llm"]).status.success());
}
