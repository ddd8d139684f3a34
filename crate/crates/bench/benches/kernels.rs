use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use isacjam_bench::{as_vec, chirp, pprj, LENGTHS};
use isacjam_core::dmm::{apply_q_sym, bisect_delta, DmmSolver, SolverConfig};
use isacjam_core::signal::{xcorr_direct, xcorr_fft};

fn correlation(c: &mut Criterion) {
    let mut g = c.benchmark_group("xcorr");
    for &n in &LENGTHS {
        let x = chirp(n);
        let w = chirp(n).scaled(isacjam_core::Complex64::new(0.0, 1.0));
        g.bench_with_input(BenchmarkId::new("fft", n), &n, |b, _| {
            b.iter(|| xcorr_fft(black_box(&x), black_box(&w)).unwrap())
        });
        if n <= 256 {
            g.bench_with_input(BenchmarkId::new("direct", n), &n, |b, _| {
                b.iter(|| xcorr_direct(black_box(&x), black_box(&w)).unwrap())
            });
        }
    }
    g.finish();
}

fn solver_kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("dmm");
    for &n in &LENGTHS {
        let s = as_vec(&chirp(n));
        let j = pprj(n);
        let w = as_vec(&chirp(n).scaled(isacjam_core::Complex64::new(0.6, 0.8)));
        g.bench_with_input(BenchmarkId::new("q_sym", n), &n, |b, _| {
            b.iter(|| apply_q_sym(black_box(&s), black_box(&w), 0.4, &j).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bisect_delta", n), &n, |b, _| {
            b.iter(|| bisect_delta(black_box(&w), 1.5).unwrap())
        });
        let mut solver = DmmSolver::new(&s, &j, SolverConfig::reference(n)).unwrap();
        g.bench_with_input(BenchmarkId::new("step", n), &n, |b, _| {
            b.iter(|| solver.step(black_box(&s), black_box(&w)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, correlation, solver_kernels);
criterion_main!(benches);
