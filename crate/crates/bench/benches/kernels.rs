use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kernelguard::ast::parse_method;
use kernelguard::kernels::{kernel, KernelConfig, KernelKind};
use kernelguard::synth::{method_spec, mutate_spec, rng, Naming};
use kernelguard::Tree;

/// A method of about `stmts` statements and an edited, renamed copy of it.
fn pair(stmts: usize) -> (Tree, Tree) {
    let mut r = rng(stmts as u64);
    let a = method_spec(&mut r, stmts);
    let b = mutate_spec(&mut r, &a);
    (
        parse_method(&a.render(Naming::Original)).unwrap(),
        parse_method(&b.render(Naming::Suffixed("B"))).unwrap(),
    )
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel");
    for stmts in [4, 12, 32] {
        let (a, b) = pair(stmts);
        for kind in [KernelKind::Stk, KernelKind::Sstk, KernelKind::Ptk] {
            let cfg = KernelConfig::new(kind, 0.4, 0.4, true).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("{kind:?}"), a.node_count()), &(&a, &b), |bench, (a, b)| {
                bench.iter(|| kernel(black_box(a), black_box(b), &cfg))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
