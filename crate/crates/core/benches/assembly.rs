//! Per-node assembly with rayon against the sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use slag_core::checks::{certify, CheckOptions};
use slag_core::domain::DomainDescriptor;
use slag_core::exec::Execution;
use slag_core::solver::{linearize, residual, solve_direct, SolverOptions};

const MODES: [(&str, Execution); 2] = [
    ("parallel", Execution::Parallel),
    ("sequential", Execution::Sequential),
];

fn assembly(c: &mut Criterion) {
    let a = DomainDescriptor::disk(1.0).build().unwrap();
    let b = DomainDescriptor::ellipse(1.5, 0.4)
        .rotated(0.5)
        .build()
        .unwrap();
    for n in [32usize, 64, 128] {
        let (p, s) = solve_direct(
            a.defining_function(),
            b.defining_function(),
            a.anchor(),
            n,
            n,
            &SolverOptions::default(),
        )
        .unwrap();
        let mut g = c.benchmark_group(format!("assembly_{n}x{n}"));
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new("residual", name), &exec, |bch, &e| {
                bch.iter(|| residual(black_box(&p), &s.u, s.c, e).unwrap())
            });
            g.bench_with_input(BenchmarkId::new("linearize", name), &exec, |bch, &e| {
                bch.iter(|| linearize(black_box(&p), &s.u, e).unwrap())
            });
        }
        g.finish();
    }
}

fn certification(c: &mut Criterion) {
    let a = DomainDescriptor::disk(1.0).build().unwrap();
    let b = DomainDescriptor::ellipse(1.5, 0.4)
        .rotated(0.5)
        .build()
        .unwrap();
    let (p, s) = solve_direct(
        a.defining_function(),
        b.defining_function(),
        a.anchor(),
        64,
        64,
        &SolverOptions::default(),
    )
    .unwrap();
    let mut g = c.benchmark_group("certify_64x64");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |bch| {
            bch.iter(|| {
                certify(
                    black_box(&p),
                    &s,
                    CheckOptions {
                        exec,
                        ..Default::default()
                    },
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, assembly, certification);
criterion_main!(benches);
