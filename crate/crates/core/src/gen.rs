// SPDX-License-Identifier: Apache-2.0
//! Seeded random instances. The same seed always gives the same instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gfield::{Field, FieldPoly};
use crate::oracle::DenseMatrix;
use crate::toeplitz::ToeplitzBands;

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Polynomial of exact degree `deg` with nonzero constant term.
pub fn poly_of_degree(rng: &mut InstanceRng, field: Field, deg: usize) -> FieldPoly {
    let p = field.modulus() as i64;
    let mut c: Vec<i64> = (0..=deg).map(|_| rng.random_range(0..p)).collect();
    c[0] = rng.random_range(1..p);
    c[deg] = rng.random_range(1..p);
    FieldPoly::from_ints(field, &c)
}

/// Pair with degrees at most `max_deg`. Half the pairs share a random
/// factor so that the GCD is usually nontrivial.
pub fn poly_pair(rng: &mut InstanceRng, field: Field, max_deg: usize) -> (FieldPoly, FieldPoly) {
    if max_deg > 0 && rng.random_bool(0.5) {
        let g = rng.random_range(1..=max_deg);
        let common = poly_of_degree(rng, field, g);
        let da = rng.random_range(0..=max_deg - g);
        let db = rng.random_range(0..=max_deg - g);
        let a = poly_of_degree(rng, field, da).mul(&common);
        let b = poly_of_degree(rng, field, db).mul(&common);
        (a, b)
    } else {
        let da = rng.random_range(0..=max_deg);
        let db = rng.random_range(0..=max_deg);
        (poly_of_degree(rng, field, da), poly_of_degree(rng, field, db))
    }
}

/// Pair in `[1, 2^n)`. Half the pairs are built with a common factor.
pub fn int_pair(rng: &mut InstanceRng, n: u32) -> (u128, u128) {
    assert!((1..=120).contains(&n));
    let top = 1u128 << n;
    if n >= 4 && rng.random_bool(0.5) {
        let gbits = rng.random_range(1..n);
        let g = rng.random_range(1..1u128 << gbits);
        let lim = (top - 1) / g;
        (g * rng.random_range(1..=lim), g * rng.random_range(1..=lim))
    } else {
        (rng.random_range(1..top), rng.random_range(1..top))
    }
}

/// Bands uniform in `[-1, 1]`, `a_0` inflated past the sum of the others
/// so that the matrix is strictly diagonally dominant.
pub fn toeplitz_dominant(rng: &mut InstanceRng, n: usize) -> ToeplitzBands {
    let mut diag: Vec<f64> = (0..2 * n + 1).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let others: f64 = diag.iter().enumerate().filter(|&(k, _)| k != n).map(|(_, v)| v.abs()).sum();
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    diag[n] = sign * (others + 1.0 + rng.random_range(0.0..1.0));
    let rhs = (0..=n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    ToeplitzBands::new(diag, rhs).expect("generated bands are well formed")
}

/// As [`toeplitz_dominant`] but with `a_0 = 0`.
pub fn toeplitz_singular(rng: &mut InstanceRng, n: usize) -> ToeplitzBands {
    let t = toeplitz_dominant(rng, n);
    let mut diag = t.diagonals().to_vec();
    diag[n] = 0.0;
    ToeplitzBands::new(diag, t.rhs().to_vec()).expect("generated bands are well formed")
}

/// `Q diag(lambda) Q^T` with `lambda` uniform in `[-spread, spread]` and `Q`
/// a product of random plane rotations. Returns the matrix and `lambda`.
pub fn symmetric(rng: &mut InstanceRng, n: usize, spread: f64) -> (DenseMatrix, Vec<f64>) {
    let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(-spread..=spread)).collect();
    let mut q = DenseMatrix::identity(n);
    for _ in 0..2 {
        for p in 0..n {
            for r in p + 1..n {
                let th: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                let (s, c) = th.sin_cos();
                for row in 0..n {
                    let (a, b) = (q.get(row, p), q.get(row, r));
                    q.set(row, p, c * a - s * b);
                    q.set(row, r, s * a + c * b);
                }
            }
        }
    }
    let m = DenseMatrix::from_fn(n, |i, j| (0..n).map(|k| q.get(i, k) * lambda[k] * q.get(j, k)).sum());
    // Exact symmetry.
    let m = DenseMatrix::from_fn(n, |i, j| if i <= j { m.get(i, j) } else { m.get(j, i) });
    (m, lambda)
}
