// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use proptest::prelude::*;

use systolic_core::eigen::{
    delay, grid_step, jacobi_rotation, permutation_source, permute, run_sweeps, BlockGrid, EigenOptions, Mode,
    Threshold,
};
use systolic_core::gen;
use systolic_core::oracle::{serial_cyclic_jacobi, DenseMatrix};
use systolic_core::TraceMode;

fn matrix(seed: u64, n: usize) -> DenseMatrix {
    gen::symmetric(&mut gen::rng(seed), n, 1.0).0
}

fn frob(m: &DenseMatrix) -> f64 {
    m.frobenius()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rotation_is_small_and_orthonormal(a in -1e3f64..1e3, b in -1e3f64..1e3, d in -1e3f64..1e3) {
        let r = jacobi_rotation(a, b, d);
        prop_assert!((r.c * r.c + r.s * r.s - 1.0).abs() <= 1e-14);
        prop_assert!(r.s.abs() <= r.c);
    }

    #[test]
    fn steps_conserve_and_shrink(seed in any::<u64>(), n in 1usize..=20, zero in any::<bool>()) {
        let a = matrix(seed, n);
        let threshold = if zero { Threshold::Zero } else { Threshold::Default };
        let run = run_sweeps(&a, &EigenOptions { record_steps: true, threshold, ..Default::default() }).unwrap();
        let (tr, fro) = ((0..n).map(|i| a.get(i, i)).sum::<f64>(), frob(&a));
        let scale = fro * fro;
        let offs = &run.report.off_norms;
        prop_assert_eq!(offs.len(), run.steps.len() + 1);
        for (k, g) in run.steps.iter().enumerate() {
            prop_assert!((g.trace() - tr).abs() <= 1e-12 * fro.max(1.0));
            prop_assert!((g.frobenius() - fro).abs() <= 1e-12 * fro);
            prop_assert!(g.symmetry_error() <= 1e-14 * fro.max(1.0), "asymmetry {}", g.symmetry_error());
            let drop = offs[k] * offs[k] - offs[k + 1] * offs[k + 1];
            prop_assert!(drop >= -1e-10 * scale, "off^2 grew by {}", -drop);
            prop_assert!((drop - 2.0 * run.rotations[k].annihilated()).abs() <= 1e-10 * scale);
        }
        if zero {
            prop_assert!(run.report.skipped.iter().all(|&s| s == 0));
        }
    }

    #[test]
    fn matches_serial_oracle_with_vectors(seed in any::<u64>(), n in 1usize..=24) {
        let a = matrix(seed, n);
        let run = run_sweeps(&a, &EigenOptions { vectors: true, ..Default::default() }).unwrap();
        prop_assert!(run.report.converged && run.report.sweeps <= 10);
        let mut want = serial_cyclic_jacobi(&a, 1e-14, 50).unwrap().values;
        want.sort_by(f64::total_cmp);
        let fro = frob(&a);
        for (x, y) in run.sorted_values().iter().zip(&want) {
            prop_assert!((x - y).abs() <= 1e-8 * fro);
        }
        let v = run.vectors.unwrap();
        let lam = DenseMatrix::from_fn(n, |i, j| if i == j { run.values[i] } else { 0.0 });
        prop_assert!(frob(&a.mul(&v).sub(&v.mul(&lam))) <= 1e-8 * fro);
        prop_assert!(frob(&v.transpose().mul(&v).sub(&DenseMatrix::identity(n))) <= 1e-10);
    }

    #[test]
    fn delayed_equals_broadcast(seed in any::<u64>(), n in 1usize..=12) {
        let a = matrix(seed, n);
        let opts = EigenOptions { record_steps: true, vectors: true, ..Default::default() };
        let b = run_sweeps(&a, &opts).unwrap();
        let d = run_sweeps(&a, &EigenOptions { mode: Mode::Delayed, ..opts }).unwrap();
        prop_assert_eq!(&d.steps, &b.steps);
        prop_assert_eq!(&d.values, &b.values);
        prop_assert_eq!(&d.vectors, &b.vectors);
        prop_assert_eq!(&d.report, &b.report);
        prop_assert_eq!(&d.rotations, &b.rotations);
    }
}

#[test]
fn every_pair_meets_once_per_sweep() {
    for size in (2..=24).step_by(2) {
        let a = DenseMatrix::from_fn(size, |i, j| (i + j) as f64);
        let mut g = BlockGrid::from_matrix(&a).unwrap();
        let start = g.tracker().to_vec();
        let mut seen = BTreeSet::new();
        for _ in 0..size - 1 {
            for (p, q) in g.diagonal_pairs() {
                assert!(seen.insert((p.min(q), p.max(q))), "size {size}: ({p},{q}) twice");
            }
            g = permute(&g);
        }
        assert_eq!(seen.len(), size * (size - 1) / 2);
        // The ordering is periodic with period size - 1.
        assert_eq!(g.tracker(), &start[..], "size {size}");
    }
}

#[test]
fn permutation_is_nearest_neighbour() {
    for size in (2..=40).step_by(2) {
        let src = permutation_source(size);
        let mut sorted = src.clone();
        sorted.sort();
        assert_eq!(sorted, (0..size).collect::<Vec<_>>());
        assert!(src.iter().enumerate().all(|(q, &s)| q.abs_diff(s) <= 2));
    }
}

#[test]
fn neighbouring_delays_differ_by_at_most_two() {
    for i in 0..20 {
        for j in 0..20 {
            assert!(delay(i, j).abs_diff(delay(i + 1, j + 1)) <= 2);
            assert!(delay(i, j).abs_diff(delay(i + 1, j)) <= 2);
            assert!(delay(i, j).abs_diff(delay(i, j + 1)) <= 2);
        }
    }
}

#[test]
fn delayed_diagonal_cells_busy_a_third_of_the_time() {
    let a = matrix(99, 16);
    let run = run_sweeps(&a, &EigenOptions { mode: Mode::Delayed, trace: TraceMode::Full, ..Default::default() }).unwrap();
    let u = run.trace.utilisation();
    for i in 0..8 {
        let f = u.fraction(systolic_core::CellId::new(i, i));
        assert!((0.28..=0.38).contains(&f), "cell ({i},{i}): {f}");
    }
    assert!(run.ticks > 0);
}

#[test]
fn sweep_limit_is_reported_not_fatal() {
    let a = matrix(5, 12);
    let run = run_sweeps(&a, &EigenOptions { max_sweeps: 1, ..Default::default() }).unwrap();
    assert_eq!(run.report.sweeps, 1);
    assert!(!run.report.converged);
    assert_eq!(run.report.performed.len(), 1);
}

#[test]
fn single_step_on_a_known_matrix() {
    // Eigenvalues 1 and 3 after one rotation of the leading block.
    let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let g = BlockGrid::from_matrix(&a).unwrap();
    let (next, rots) = grid_step(&g, 0.0);
    assert_eq!(rots.performed(), 1);
    let mut ev = next.eigenvalues();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    assert_eq!(next.off_norm(), 0.0);
}
