use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kernelguard::retrieval::{more_like_this, InvertedIndex, DEFAULT_CANDIDATE_LIMIT};
use kernelguard::synth::sized_history;

fn retrieval(c: &mut Criterion) {
    let mut group = c.benchmark_group("retrieval");
    group.sample_size(20);
    for n in [1_000, 10_000] {
        let history = sized_history(1, n, 8, "bench");
        group.bench_with_input(BenchmarkId::new("index", n), &history, |b, history| {
            b.iter(|| {
                let mut idx = InvertedIndex::new();
                for r in history {
                    idx.add(&r.change_id, &r.source_text).unwrap();
                }
                idx.doc_count()
            })
        });

        let mut idx = InvertedIndex::new();
        for r in &history {
            idx.add(&r.change_id, &r.source_text).unwrap();
        }
        let snapshot = idx.snapshot();
        let query = &history[n / 2].source_text;
        group.bench_with_input(BenchmarkId::new("more_like_this", n), &snapshot, |b, s| {
            b.iter(|| more_like_this(s, black_box(query), DEFAULT_CANDIDATE_LIMIT).len())
        });
    }
    group.finish();
}

criterion_group!(benches, retrieval);
criterion_main!(benches);
