use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use toric_core::{enumerate_toric_systems, Dedup, EnumerationSpec, Execution, ModelKind};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    let cases = [
        ("F1/B=8", ModelKind::Hirzebruch { d: 1 }, 8),
        ("dP3/B=3", ModelKind::DelPezzo { r: 3 }, 3),
        ("dP4/B=2", ModelKind::DelPezzo { r: 4 }, 2),
    ];
    for (name, kind, bound) in cases {
        for execution in [Execution::Sequential, Execution::Parallel] {
            let spec = EnumerationSpec::new(kind, bound).with_dedup(Dedup::Raw).with_execution(execution);
            let label = format!("{execution:?}");
            group.bench_with_input(BenchmarkId::new(label, name), &spec, |b, spec| {
                b.iter(|| enumerate_toric_systems(black_box(spec)).unwrap().systems.len())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, enumeration);
criterion_main!(benches);
