//! Sequential vs data-parallel timings for the two sweep-style workloads:
//! the brute Korselt scan and the pruned-vs-exhaustive comparison sweep.
//! With `--no-default-features` only the sequential arm exists.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use carmichael_core::oracle::{brute_carmichael_with, compare_all_with};
use carmichael_core::search::run_all_with;

fn bench_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_carmichael");
    for bound in [100_000u64, 1_000_000] {
        group.bench_with_input(
            BenchmarkId::new("sequential", bound),
            &bound,
            |b, &bound| b.iter(|| brute_carmichael_with(bound, false).unwrap().count),
        );
        #[cfg(feature = "parallel")]
        group.bench_with_input(
            BenchmarkId::new("parallel", bound),
            &bound,
            |b, &bound| b.iter(|| brute_carmichael_with(bound, true).unwrap().count),
        );
    }
    group.finish();
}

fn bench_run_all(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_all");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| run_all_with(32, false).unwrap().certificates.len())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| run_all_with(32, true).unwrap().certificates.len())
    });
    group.finish();
}

fn bench_compare_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_compare_sweep");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| compare_all_with(12, 10, false).unwrap().len())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| compare_all_with(12, 10, true).unwrap().len())
    });
    group.finish();
}

criterion_group!(benches, bench_scan, bench_run_all, bench_compare_sweep);
criterion_main!(benches);
