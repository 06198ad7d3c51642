// SPDX-License-Identifier: Apache-2.0
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use systolic_core::eigen::{run_sweeps, EigenOptions, Mode};
use systolic_core::gen;
use systolic_core::gfield::Field;
use systolic_core::intgcd::systolic_int_gcd;
use systolic_core::polygcd::{systolic_poly_gcd, Variant};
use systolic_core::toeplitz::{bareiss_solve, systolic_toeplitz_solve};

fn polygcd(c: &mut Criterion) {
    let mut g = c.benchmark_group("polygcd");
    let f = Field::new(257).unwrap();
    let mut rng = gen::rng(1);
    for deg in [4usize, 8, 16] {
        let a = gen::poly_of_degree(&mut rng, f, deg);
        let b = gen::poly_of_degree(&mut rng, f, deg);
        for v in [Variant::Fig4, Variant::AppA] {
            g.bench_with_input(BenchmarkId::new(format!("{v:?}"), deg), &(a.clone(), b.clone()), |bch, (a, b)| {
                bch.iter(|| systolic_poly_gcd(black_box(a), black_box(b), v).unwrap())
            });
        }
    }
    g.finish();
}

fn intgcd(c: &mut Criterion) {
    let mut g = c.benchmark_group("intgcd");
    let mut rng = gen::rng(2);
    for n in [16u32, 32, 64] {
        let (a, b) = gen::int_pair(&mut rng, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &(a, b), |bch, &(a, b)| {
            bch.iter(|| systolic_int_gcd(black_box(a), black_box(b), n).unwrap())
        });
    }
    g.finish();
}

fn toeplitz(c: &mut Criterion) {
    let mut g = c.benchmark_group("toeplitz");
    let mut rng = gen::rng(3);
    for n in [8usize, 16, 32, 64] {
        let t = gen::toeplitz_dominant(&mut rng, n);
        g.bench_with_input(BenchmarkId::new("serial", n), &t, |bch, t| bch.iter(|| bareiss_solve(black_box(t)).unwrap()));
        g.bench_with_input(BenchmarkId::new("systolic", n), &t, |bch, t| {
            bch.iter(|| systolic_toeplitz_solve(black_box(t)).unwrap())
        });
    }
    g.finish();
}

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigen");
    g.sample_size(10);
    let mut rng = gen::rng(4);
    for n in [8usize, 16, 32] {
        let (a, _) = gen::symmetric(&mut rng, n, 1.0);
        for mode in [Mode::Broadcast, Mode::Delayed] {
            let opts = EigenOptions { mode, ..Default::default() };
            g.bench_with_input(BenchmarkId::new(format!("{mode:?}"), n), &a, |bch, a| {
                bch.iter(|| run_sweeps(black_box(a), &opts).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, polygcd, intgcd, toeplitz, eigen);
criterion_main!(benches);
