use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use groundedkg::embed::{build_index, EmbedParams, Scheme};
use groundedkg::evalkit::{evaluate_with, QaExample};
use groundedkg::exec::Execution;
use groundedkg::ingest::ParseKind;
use groundedkg::kg::build_graph_with;
use groundedkg::providers::StubEmbedder;
use groundedkg::synth;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn graph_build(c: &mut Criterion) {
    let doc = synth::random_bundle(7, ParseKind::Amr, 20, 50);
    let mut g = c.benchmark_group("build_graph");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| build_graph_with(black_box(&doc), exec).unwrap()));
    }
    g.finish();
}

fn index_build(c: &mut Criterion) {
    let kg = synth::random_graph(3, 2_000, 5_000, 400);
    let e = StubEmbedder::default();
    let mut g = c.benchmark_group("build_index");
    g.sample_size(20);
    for scheme in [Scheme::Basic, Scheme::NeighborAttn] {
        let p = EmbedParams::new(scheme, 0.5, 0.8);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, scheme), &p, |b, p| {
                b.iter(|| build_index(black_box(&kg), &e, *p, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn top_k(c: &mut Criterion) {
    let idx = synth::random_index(11, 50_000, 64, false);
    let q = synth::random_unit(&mut synth::seeded(1), 64);
    let mut g = c.benchmark_group("top_k");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| idx.top_k_with(black_box(&q), 10, exec).unwrap()));
    }
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let words = ["peter", "rabbit", "ran", "into", "the", "garden", "and", "lost", "his", "shoes"];
    let phrase =
        |i: usize, n: usize| (0..n).map(|j| words[(i * 7 + j * 3) % words.len()]).collect::<Vec<_>>().join(" ");
    let examples: Vec<QaExample> = (0..5_000)
        .map(|i| QaExample {
            question: format!("q{i}"),
            references: vec![phrase(i, 6), phrase(i + 1, 12)],
            prediction: phrase(i + 2, 40),
            context_text_ids: vec![],
            bertscore: None,
            error: None,
        })
        .collect();
    let mut g = c.benchmark_group("evaluate");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| evaluate_with(black_box(&examples), exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, graph_build, index_build, top_k, metrics);
criterion_main!(benches);
