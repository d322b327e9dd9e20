use cjrank_bench::{scrambled_order, simulated_log};
use cjrank_core::analytics::{kendall_tau, method_comparison};
use cjrank_core::rating::RatingConfig;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_kendall(c: &mut Criterion) {
    let mut group = c.benchmark_group("kendall_tau");
    // 12 is the last exact size; past it the normal approximation takes over
    for n in [10usize, 12, 13, 100, 1000] {
        let identity: Vec<usize> = (0..n).collect();
        let other = scrambled_order(n, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &other, |b, other| {
            b.iter(|| kendall_tau(black_box(&identity), black_box(other)).unwrap())
        });
    }
    group.finish();
}

fn bench_comparison(c: &mut Criterion) {
    let (index, log) = simulated_log(10, 40, 3);
    c.bench_function("method_comparison/200", |b| {
        b.iter(|| method_comparison(&index, black_box(&log), &RatingConfig::default()).unwrap())
    });
}

criterion_group!(benches, bench_kendall, bench_comparison);
criterion_main!(benches);
