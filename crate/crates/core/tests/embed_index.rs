use std::collections::{BTreeMap, BTreeSet};

use groundedkg::embed::{build_index, EmbedParams, NodeIndex, Scheme};
use groundedkg::exec::Execution;
use groundedkg::kg::GroundedKg;
use groundedkg::providers::{Embedder, StubEmbedder};
use groundedkg::synth;
use proptest::prelude::*;

const TOL: f64 = 1e-6;

// ---- straight-line reference implementation ----

fn f(e: &dyn Embedder, s: &str) -> Vec<f64> {
    unit(e.embed_one(s).unwrap().iter().map(|&x| x as f64).collect())
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn oracle_basic(kg: &GroundedKg, e: &dyn Embedder, alpha: f64) -> BTreeMap<String, Vec<f64>> {
    kg.nodes
        .values()
        .map(|n| {
            let l = f(e, &n.label);
            let v = if n.texts.is_empty() {
                l
            } else {
                let mut mean = vec![0.0; l.len()];
                for t in &n.texts {
                    for (m, x) in mean.iter_mut().zip(f(e, t)) {
                        *m += x / n.texts.len() as f64;
                    }
                }
                let mean = unit(mean);
                unit(l.iter().zip(&mean).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect())
            };
            (n.node_id.clone(), v)
        })
        .collect()
}

fn oracle_neighbors(kg: &GroundedKg) -> BTreeMap<String, BTreeSet<String>> {
    let mut adj: BTreeMap<String, BTreeSet<String>> = kg.nodes.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
    for edge in &kg.edges {
        if edge.source_node != edge.target_node {
            adj.get_mut(&edge.source_node).unwrap().insert(edge.target_node.clone());
            adj.get_mut(&edge.target_node).unwrap().insert(edge.source_node.clone());
        }
    }
    adj
}

fn oracle(kg: &GroundedKg, e: &dyn Embedder, p: EmbedParams) -> BTreeMap<String, Vec<f64>> {
    let basic = oracle_basic(kg, e, p.alpha);
    if p.scheme == Scheme::Basic {
        return basic;
    }
    let adj = oracle_neighbors(kg);
    basic
        .iter()
        .map(|(id, ev)| {
            let ns: Vec<&Vec<f64>> = adj[id].iter().map(|n| &basic[n]).collect();
            if ns.is_empty() {
                return (id.clone(), ev.clone());
            }
            let w: Vec<f64> = match p.scheme {
                Scheme::NeighborAvg => vec![1.0 / ns.len() as f64; ns.len()],
                _ => {
                    let ex: Vec<f64> = ns.iter().map(|n| dot(ev, n).exp()).collect();
                    let z: f64 = ex.iter().sum();
                    ex.iter().map(|x| x / z).collect()
                }
            };
            let mut agg = vec![0.0; ev.len()];
            for (wi, n) in w.iter().zip(&ns) {
                for (a, x) in agg.iter_mut().zip(n.iter()) {
                    *a += wi * x;
                }
            }
            let v = unit(ev.iter().zip(&agg).map(|(a, b)| p.beta * a + (1.0 - p.beta) * b).collect());
            (id.clone(), v)
        })
        .collect()
}

fn max_dev(index: &NodeIndex, expected: &BTreeMap<String, Vec<f64>>) -> f64 {
    assert_eq!(index.len(), expected.len());
    expected
        .iter()
        .map(|(id, v)| {
            let got = index.get(id).unwrap_or_else(|| panic!("missing {id}"));
            got.iter().zip(v).map(|(&g, x)| (g as f64 - x).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn brute_top_k(index: &NodeIndex, q: &[f32], k: usize) -> Vec<(String, f64)> {
    let qn = unit(q.iter().map(|&x| x as f64).collect());
    let mut all: Vec<(String, f64)> = index
        .iter()
        .map(|(id, row)| (id.to_string(), row.iter().zip(&qn).map(|(&a, b)| a as f64 * b).sum::<f64>()))
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

// ---- example-based checks ----

#[test]
fn all_schemes_match_reference_on_toy_graphs() {
    let e = StubEmbedder::new(32, 5);
    for seed in 0..50 {
        let kg = synth::random_graph(seed, 10, 14, 4);
        for scheme in [Scheme::Basic, Scheme::NeighborAvg, Scheme::NeighborAttn] {
            let p = EmbedParams::new(scheme, 0.3, 0.6);
            let idx = build_index(&kg, &e, p, Execution::default()).unwrap();
            let dev = max_dev(&idx, &oracle(&kg, &e, p));
            assert!(dev < TOL, "seed {seed} {scheme}: {dev}");
        }
    }
}

#[test]
fn beta_one_collapses_to_basic() {
    let e = StubEmbedder::new(32, 1);
    for seed in 0..20 {
        let kg = synth::random_graph(seed, 10, 20, 3);
        let basic = build_index(&kg, &e, EmbedParams::new(Scheme::Basic, 0.5, 1.0), Execution::default()).unwrap();
        for scheme in [Scheme::NeighborAvg, Scheme::NeighborAttn] {
            let n = build_index(&kg, &e, EmbedParams::new(scheme, 0.5, 1.0), Execution::default()).unwrap();
            for (id, v) in basic.iter() {
                let w = n.get(id).unwrap();
                let d = v.iter().zip(w).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
                assert!((d as f64) < TOL, "{scheme} {id}: {d}");
            }
        }
    }
}

#[test]
fn alpha_one_is_label_embedding() {
    let e = StubEmbedder::new(32, 2);
    let kg = synth::random_graph(4, 12, 0, 2);
    let idx = build_index(&kg, &e, EmbedParams::new(Scheme::Basic, 1.0, 0.8), Execution::default()).unwrap();
    for n in kg.nodes.values() {
        let l = f(&e, &n.label);
        let got = idx.get(&n.node_id).unwrap();
        assert!(got.iter().zip(&l).all(|(&a, b)| (a as f64 - b).abs() < TOL));
    }
}

#[test]
fn isolated_nodes_keep_basic_vector() {
    let e = StubEmbedder::default();
    // no edges at all
    let kg = synth::random_graph(11, 8, 0, 2);
    let b = build_index(&kg, &e, EmbedParams::new(Scheme::Basic, 0.5, 0.2), Execution::default()).unwrap();
    for scheme in [Scheme::NeighborAvg, Scheme::NeighborAttn] {
        let n = build_index(&kg, &e, EmbedParams::new(scheme, 0.5, 0.2), Execution::default()).unwrap();
        assert_eq!(n.ids(), b.ids());
        for (id, v) in b.iter() {
            assert_eq!(n.get(id).unwrap(), v);
        }
    }
}

#[test]
fn sequential_and_parallel_indices_agree() {
    let e = StubEmbedder::default();
    let kg = synth::random_graph(21, 300, 600, 40);
    for scheme in [Scheme::Basic, Scheme::NeighborAvg, Scheme::NeighborAttn] {
        let p = EmbedParams::new(scheme, 0.5, 0.8);
        let a = build_index(&kg, &e, p, Execution::Sequential).unwrap();
        let b = build_index(&kg, &e, p, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn top_k_edge_cases() {
    let idx = synth::random_index(1, 20, 8, false);
    let q = idx.row(3).to_vec();
    assert!(idx.top_k(&q, 0).is_err());
    assert_eq!(idx.top_k(&q, 100).unwrap().len(), 20);
    assert_eq!(idx.top_k(&q, 1).unwrap()[0].0, idx.ids()[3]);
    assert!(idx.top_k(&[0.0; 8], 3).is_err());
    assert!(idx.top_k(&[1.0; 7], 3).is_err());
}

#[test]
fn index_covers_graph() {
    let e = StubEmbedder::default();
    let kg = synth::random_graph(5, 30, 40, 5);
    let idx = build_index(&kg, &e, EmbedParams::default(), Execution::default()).unwrap();
    idx.check_covers(&kg).unwrap();
    let mut bigger = kg.clone();
    let extra = bigger.nodes.values().next().unwrap().clone();
    bigger.nodes.insert("zzz_extra".into(), groundedkg::kg::KgNode { node_id: "zzz_extra".into(), ..extra });
    assert!(idx.check_covers(&bigger).is_err());
}

// ---- properties ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn top_k_equals_brute_force(seed in 0u64..10_000, n in 1usize..200, k in 1usize..12, ties in any::<bool>()) {
        let idx = synth::random_index(seed, n, 16, ties);
        let mut r = synth::seeded(seed ^ 0xabc);
        let q = synth::random_unit(&mut r, 16);
        let got = idx.top_k(&q, k).unwrap();
        let want = brute_top_k(&idx, &q, k);
        prop_assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            prop_assert_eq!(&g.0, &w.0);
            prop_assert!((g.1 - w.1).abs() < 1e-9);
        }
    }

    #[test]
    fn top_k_ignores_query_scale(seed in 0u64..10_000, scale in 0.01f32..100.0) {
        let idx = synth::random_index(seed, 50, 8, true);
        let mut r = synth::seeded(seed);
        let q = synth::random_unit(&mut r, 8);
        let scaled: Vec<f32> = q.iter().map(|x| x * scale).collect();
        let a: Vec<String> = idx.top_k(&q, 10).unwrap().into_iter().map(|x| x.0).collect();
        let b: Vec<String> = idx.top_k(&scaled, 10).unwrap().into_iter().map(|x| x.0).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn schemes_match_reference(seed in 0u64..10_000, alpha in 0.0f64..=1.0, beta in 0.0f64..=1.0) {
        let e = StubEmbedder::new(16, seed);
        let kg = synth::random_graph(seed, 10, 15, 3);
        for scheme in [Scheme::Basic, Scheme::NeighborAvg, Scheme::NeighborAttn] {
            let p = EmbedParams::new(scheme, alpha, beta);
            let idx = build_index(&kg, &e, p, Execution::Sequential).unwrap();
            prop_assert!(max_dev(&idx, &oracle(&kg, &e, p)) < TOL);
        }
    }

    #[test]
    fn rows_are_unit_norm(seed in 0u64..10_000) {
        let e = StubEmbedder::default();
        let kg = synth::random_graph(seed, 25, 40, 4);
        let idx = build_index(&kg, &e, EmbedParams::new(Scheme::NeighborAttn, 0.5, 0.8), Execution::default()).unwrap();
        for (_, v) in idx.iter() {
            let n: f64 = v.iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() < 1e-5);
        }
    }
}
