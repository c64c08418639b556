//! Sequential against rayon-parallel execution of the two parallel loops:
//! x-range enumeration in the oracle and the per-l kernel pipelines.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rmpc::algebra::{Field, PrimeField};
use rmpc::endo::{build_dickson_curve, DicksonCurve};
use rmpc::oracle::naive_counts;
use rmpc::par::Parallelism;
use rmpc::schoof::{count, CountConfig, Mode};

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn curve(n: u64, t: i64, p: u64) -> DicksonCurve<PrimeField> {
    let f = PrimeField::new(p).unwrap();
    build_dickson_curve(n, f.from_i64(t), f).unwrap()
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("naive_counts");
    group.sample_size(10);
    for (label, n, t, p) in [("g2_q109", 5, 1, 109), ("g3_q29", 7, 10, 29)] {
        let dc = curve(n, t, p);
        for (name, par) in MODES {
            group.bench_with_input(BenchmarkId::new(name, label), &dc, |b, dc| {
                b.iter(|| naive_counts(black_box(&dc.curve), dc.genus(), u64::MAX, par).unwrap())
            });
        }
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("count");
    group.sample_size(10);
    for (label, mode, n, t, p) in [
        ("oracle_kernels_g2_q29", Mode::RmWithOracleKernels, 5, 1, 29),
        ("rm_g2_q11", Mode::Rm, 5, 3, 11),
    ] {
        let dc = curve(n, t, p);
        for (name, par) in MODES {
            let cfg = CountConfig { seed: 1, par, ..CountConfig::default() };
            group.bench_with_input(BenchmarkId::new(name, label), &dc, |b, dc| {
                b.iter(|| count(black_box(dc), mode, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, oracle, pipeline);
criterion_main!(benches);
