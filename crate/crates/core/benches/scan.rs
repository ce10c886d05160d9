//! Sign-change scan and a small g sweep, sequential against rayon.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use expwell::rootfind::{scan_sign_changes, sweep_g, MethodChoice, SolveOptions, SweepTemplate};
use expwell::secular::{Parity, SecularSpec};
use expwell::{BigReal, Execution, PrecisionPolicy};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn scan(c: &mut Criterion) {
    let policy = PrecisionPolicy::default();
    let spec =
        SecularSpec::asymptotic(Parity::Odd, BigReal::from_f64(2f64.sqrt(), 128), policy).unwrap();
    let mut group = c.benchmark_group("scan_odd_g_sqrt2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 120), |b| {
            b.iter(|| scan_sign_changes(&spec, 1.5, 7.5, 120, exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let policy = PrecisionPolicy::default();
    let template = SweepTemplate {
        method: MethodChoice::Asymptotic,
        parity: Some(Parity::Odd),
        n_max: 5,
    };
    let gs = [0.5, 1.0, 1.5, 2.0];
    let mut group = c.benchmark_group("sweep_odd_n5");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = SolveOptions {
            k_tol: 1e-8,
            exec,
            ..SolveOptions::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| sweep_g(&template, &gs, &policy, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scan, sweep);
criterion_main!(benches);
