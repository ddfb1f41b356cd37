use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cuspsum_core::coefficients::generate_delta_coefficients;
use cuspsum_core::moments::{exact_moment, exact_moment_parallel, MomentSpec};
use cuspsum_core::spacing::{spacing_count_bruteforce, spacing_count_pairsum, SpacingQuery};
use cuspsum_core::sums::{build_step_function, make_twist, ShortSumSpec};

fn step_and_moment(c: &mut Criterion) {
    let t = generate_delta_coefficients(270_000).unwrap();
    let mut g = c.benchmark_group("moment");
    g.sample_size(10);
    for m in [4096.0f64, 32768.0, 131072.0] {
        let spec = ShortSumSpec::new(m, m.powf(0.4), make_twist(1, 3).unwrap()).unwrap();
        let ms = MomentSpec::new(4.0, spec).unwrap();
        g.bench_with_input(BenchmarkId::new("step_function", m), &spec, |b, s| {
            b.iter(|| build_step_function(s, &t).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sequential", m), &ms, |b, ms| {
            b.iter(|| exact_moment(ms, &t).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("parallel4", m), &ms, |b, ms| {
            b.iter(|| exact_moment_parallel(ms, &t, 4).unwrap())
        });
    }
    g.finish();
}

fn spacing(c: &mut Criterion) {
    let mut g = c.benchmark_group("spacing");
    g.sample_size(10);
    for l in [32.0f64, 128.0] {
        let q = SpacingQuery::new(l, 1e-3, 2.0).unwrap();
        g.bench_with_input(BenchmarkId::new("pairsum", l), &q, |b, q| {
            b.iter(|| spacing_count_pairsum(q).unwrap())
        });
    }
    let q = SpacingQuery::new(32.0, 1e-3, 2.0).unwrap();
    g.bench_function("bruteforce/32", |b| b.iter(|| spacing_count_bruteforce(&q).unwrap()));
    g.finish();
}

criterion_group!(benches, step_and_moment, spacing);
criterion_main!(benches);
