use std::collections::BTreeSet;

use groundedkg::exec::Execution;
use groundedkg::ingest::{
    load_parse_bundle, DocumentParse, ParseKind, SentenceParses, SentenceRecord, SrlFrame, TextId,
};
use groundedkg::kg::{
    build_from_amr, build_from_amr_with, build_from_srl, build_query_graph, export_graph, import_graph,
    query_parse_from_text, BuildError, EdgeType, GroundedKg, NodeType, NEXT_ROLE,
};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn edge_set(kg: &GroundedKg) -> BTreeSet<(String, String, String)> {
    kg.edges.iter().map(|e| (e.edge_role.clone(), e.source_node.clone(), e.target_node.clone())).collect()
}

fn labels(kg: &GroundedKg, t: NodeType) -> Vec<String> {
    let mut v: Vec<String> = kg.nodes_of_type(t).map(|n| n.label.clone()).collect();
    v.sort();
    v
}

#[test]
fn bedtime_amr_structure() {
    let doc = load_parse_bundle(fixture("bedtime_amr.jsonl")).unwrap();
    let kg = build_from_amr(&doc).unwrap();
    kg.validate().unwrap();

    assert_eq!(labels(&kg, NodeType::Entity), ["Peter", "bed", "mother", "tea"]);
    let actions: BTreeSet<&str> = kg.nodes_of_type(NodeType::Action).map(|n| n.node_id.as_str()).collect();
    assert_eq!(actions, BTreeSet::from(["put-01_1", "make-01_2", "dose-01_3"]));

    let tea = kg.node("tea").unwrap();
    assert_eq!(tea.texts, ["some camomile tea", "camomile tea"]);
    assert_eq!(tea.grounded_texts, [TextId::new(0, 0)]);

    let s = |a: &str, b: &str, c: &str| (a.to_string(), b.to_string(), c.to_string());
    let expected: BTreeSet<_> = [
        s("A0", "put-01_1", "mother"),
        s("A1", "put-01_1", "Peter"),
        s("A2", "put-01_1", "bed"),
        s("A0", "make-01_2", "mother"),
        s("A1", "make-01_2", "tea"),
        s("A0", "dose-01_3", "mother"),
        s("A1", "dose-01_3", "Peter"),
        s("A2", "dose-01_3", "tea"),
        s("next", "put-01_1", "make-01_2"),
        s("next", "make-01_2", "dose-01_3"),
    ]
    .into_iter()
    .collect();
    assert_eq!(edge_set(&kg), expected);
    assert_eq!(kg.edges.len(), expected.len());
}

#[test]
fn give_sentence_edge_rendering() {
    let doc = load_parse_bundle(fixture("give_amr.jsonl")).unwrap();
    let kg = build_from_amr(&doc).unwrap();
    let edge = kg.edges.iter().find(|e| e.target_node == "tea").unwrap();
    assert_eq!(edge.to_string(), "(A1, give-01_1, tea, action-entity, [text_0-0])");
    assert_eq!(labels(&kg, NodeType::Entity), ["Peter", "mother", "tea"]);
    assert_eq!(kg.node("tea").unwrap().texts, ["dose of camomile tea", "camomile tea"]);
}

#[test]
fn bedtime_srl_duplicates_entities() {
    let doc = load_parse_bundle(fixture("bedtime_srl.jsonl")).unwrap();
    let kg = build_from_srl(&doc).unwrap();
    kg.validate().unwrap();
    let actions: Vec<&str> = kg.nodes_of_type(NodeType::Action).map(|n| n.label.as_str()).collect();
    assert_eq!(actions.len(), 3);
    let entities = labels(&kg, NodeType::Entity);
    assert!(entities.contains(&"some camomile tea".to_string()));
    assert!(entities.contains(&"a dose of some camomile tea".to_string()));
    assert!(entities.contains(&"Peter".to_string()) && entities.contains(&"to Peter".to_string()));
    let next: Vec<(String, String)> = kg
        .edges
        .iter()
        .filter(|e| e.edge_role == NEXT_ROLE)
        .map(|e| (kg.node(&e.source_node).unwrap().label.clone(), kg.node(&e.target_node).unwrap().label.clone()))
        .collect();
    assert_eq!(next, [("put".to_string(), "make".to_string()), ("make".to_string(), "give".to_string())]);
    let e = kg.edges.iter().find(|e| e.edge_role == NEXT_ROLE && e.target_node.starts_with("give")).unwrap();
    assert_eq!(e.to_string(), "(next, make_2, give_3, action-action, [text_0-0])");

    let amr = build_from_amr(&load_parse_bundle(fixture("bedtime_amr.jsonl")).unwrap()).unwrap();
    assert!(amr.nodes_of_type(NodeType::Entity).count() < kg.nodes_of_type(NodeType::Entity).count());
}

#[test]
fn parse_kind_mismatch() {
    let doc = load_parse_bundle(fixture("bedtime_srl.jsonl")).unwrap();
    assert!(matches!(
        build_from_amr(&doc),
        Err(BuildError::ParseKindMismatch { expected: ParseKind::Amr, found: ParseKind::Srl })
    ));
    let doc = load_parse_bundle(fixture("bedtime_amr.jsonl")).unwrap();
    assert!(build_from_srl(&doc).is_err());
}

#[test]
fn empty_parse_gives_empty_graph() {
    let kg = build_from_amr(&DocumentParse::empty("d")).unwrap();
    assert!(kg.nodes.is_empty() && kg.edges.is_empty());
}

#[test]
fn predicate_only_frame() {
    let mut doc = DocumentParse::empty("d");
    doc.sentences.push(SentenceRecord::new(0, 0, "Peter ran.", "Peter ran.", "Peter ran."));
    doc.parse_kind = Some(ParseKind::Srl);
    doc.parses.insert(
        TextId::new(0, 0),
        SentenceParses::Srl(vec![SrlFrame {
            predicate_lemma: "run".into(),
            predicate_char_span: (6, 9),
            args: vec![],
            sentence_ref: TextId::new(0, 0),
        }]),
    );
    let kg = build_from_srl(&doc).unwrap();
    assert_eq!(kg.nodes.len(), 1);
    assert_eq!(kg.node("run_1").unwrap().texts, ["ran", "run"]);
    assert!(kg.edges.is_empty());
}

#[test]
fn merge_idempotence_on_doubled_parses() {
    let once = load_parse_bundle(fixture("bedtime_amr.jsonl")).unwrap();
    let mut twice = once.clone();
    for parses in twice.parses.values_mut() {
        if let SentenceParses::Amr(g) = parses {
            let copy = g.clone();
            g.extend(copy);
        }
    }
    let a = build_from_amr(&once).unwrap();
    let b = build_from_amr(&twice).unwrap();
    let ents = |kg: &GroundedKg| kg.nodes_of_type(NodeType::Entity).map(|n| n.node_id.clone()).collect::<Vec<_>>();
    assert_eq!(ents(&a), ents(&b));
    for n in b.nodes_of_type(NodeType::Entity) {
        assert_eq!(n.grounded_texts.len(), 2 * a.node(&n.node_id).unwrap().grounded_texts.len());
    }
    // six actions in one sentence: five next edges
    assert_eq!(b.edges.iter().filter(|e| e.edge_type == EdgeType::ActionAction).count(), 5);
}

#[test]
fn sequential_and_parallel_builds_match() {
    let doc = load_parse_bundle(fixture("peter_rabbit_amr.jsonl")).unwrap();
    let a = build_from_amr_with(&doc, Execution::Sequential).unwrap();
    let b = build_from_amr_with(&doc, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, build_from_amr(&doc).unwrap());
}

#[test]
fn temporal_chain_is_a_path_per_sentence() {
    let doc = load_parse_bundle(fixture("peter_rabbit_amr.jsonl")).unwrap();
    let kg = build_from_amr(&doc).unwrap();
    for tid in kg.sentence_table.keys() {
        let actions: Vec<&str> = kg
            .nodes_of_type(NodeType::Action)
            .filter(|n| n.grounded_texts.contains(tid))
            .map(|n| n.node_id.as_str())
            .collect();
        let next: Vec<_> =
            kg.edges.iter().filter(|e| e.edge_role == NEXT_ROLE && e.grounded_texts.contains(tid)).collect();
        assert_eq!(next.len(), actions.len().saturating_sub(1), "{tid}");
        for pair in next.windows(2) {
            assert_eq!(pair[0].target_node, pair[1].source_node);
        }
    }
}

#[test]
fn export_import_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["bedtime_amr.jsonl", "peter_rabbit_amr.jsonl"] {
        let kg = build_from_amr(&load_parse_bundle(fixture(name)).unwrap()).unwrap();
        let path = dir.path().join("g.json");
        export_graph(&kg, &path).unwrap();
        assert_eq!(import_graph(&path).unwrap(), kg);
    }
    let empty = GroundedKg::empty("e");
    let path = dir.path().join("e.json");
    export_graph(&empty, &path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["nodes"], serde_json::json!([]));
    assert_eq!(v["edges"], serde_json::json!([]));
    assert_eq!(import_graph(&path).unwrap(), empty);
}

#[test]
fn import_rejects_ungrounded_graph() {
    let kg = build_from_amr(&load_parse_bundle(fixture("bedtime_amr.jsonl")).unwrap()).unwrap();
    let mut broken = kg.clone();
    broken.sentence_table.clear();
    let mut buf = Vec::new();
    groundedkg::kg::write_graph(&broken, &mut buf).unwrap();
    assert!(groundedkg::kg::read_graph(buf.as_slice()).is_err());
}

#[test]
fn query_graph_fallbacks() {
    let kg = build_query_graph(&query_parse_from_text("Peter")).unwrap();
    assert_eq!(kg.nodes.len(), 1);
    let n = kg.node("Peter").unwrap();
    assert_eq!((n.label.as_str(), n.node_type), ("Peter", NodeType::Entity));
    kg.validate().unwrap();

    assert!(matches!(build_query_graph(&query_parse_from_text("  ")), Err(BuildError::InvalidInput(_))));
}

#[test]
fn query_graph_from_parsed_question() {
    let doc = load_parse_bundle(fixture("queries/q2_dinner.jsonl")).unwrap();
    let kg = build_query_graph(&doc).unwrap();
    let labels: Vec<&str> = kg.nodes.values().map(|n| n.label.as_str()).collect();
    for want in ["Peter", "dinner", "home"] {
        assert!(labels.contains(&want), "{want} missing from {labels:?}");
    }
    assert!(labels.iter().any(|l| l.starts_with("have-")));
    assert!(labels.iter().any(|l| l.starts_with("get-")));
}
