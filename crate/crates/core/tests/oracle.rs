// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use systolic_core::gen;
use systolic_core::gfield::{Field, FieldPoly};
use systolic_core::oracle::{binary_int_gcd, dense_lu_solve_nopivot, euclid_int_gcd, euclid_poly_gcd, serial_cyclic_jacobi, DenseMatrix};

#[test]
fn binary_matches_euclid_on_odd_ten_bit_pairs() {
    for a in (1u128..1024).step_by(2) {
        for b in (1u128..1024).step_by(2) {
            assert_eq!(binary_int_gcd(a, b).unwrap(), euclid_int_gcd(a as i128, b as i128).unwrap(), "({a}, {b})");
        }
    }
}

proptest! {
    #[test]
    fn binary_matches_euclid(a in 0u128..(1 << 100), b in 0u128..(1 << 100)) {
        let (a, b) = (a | 1, b | 1);
        prop_assert_eq!(binary_int_gcd(a, b).unwrap(), euclid_int_gcd(a as i128, b as i128).unwrap());
    }

    #[test]
    fn lu_reconstructs_and_solves(seed in any::<u64>(), n in 1usize..20) {
        let t = gen::toeplitz_dominant(&mut gen::rng(seed), n);
        let m = t.to_dense();
        let (x, u) = dense_lu_solve_nopivot(&m, t.rhs()).unwrap();
        let r = m.mul_vec(&x);
        for (ri, bi) in r.iter().zip(t.rhs()) {
            prop_assert!((ri - bi).abs() < 1e-12 * m.norm_inf().max(1.0));
        }
        for i in 0..=n {
            for j in 0..i {
                prop_assert_eq!(u.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn jacobi_diagonalises(seed in any::<u64>(), n in 1usize..16) {
        let (a, lambda) = gen::symmetric(&mut gen::rng(seed), n, 3.0);
        let res = serial_cyclic_jacobi(&a, 1e-14, 50).unwrap();
        prop_assert!(res.converged);
        let mut got = res.values.clone();
        got.sort_by(f64::total_cmp);
        let mut want = lambda;
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-10);
        }
        let v = res.vectors;
        let d = DenseMatrix::from_fn(n, |i, j| if i == j { res.values[i] } else { 0.0 });
        prop_assert!(a.mul(&v).sub(&v.mul(&d)).frobenius() < 1e-10 * a.frobenius().max(1.0));
    }

    #[test]
    fn poly_gcd_is_monic_common_divisor(seed in any::<u64>()) {
        let f = Field::new(7).unwrap();
        let (a, b) = gen::poly_pair(&mut gen::rng(seed), f, 10);
        let g = euclid_poly_gcd(&a, &b).unwrap();
        prop_assert_eq!(g.leading().unwrap().value(), 1);
        prop_assert!(a.div_rem(&g).unwrap().1.is_zero());
        prop_assert!(b.div_rem(&g).unwrap().1.is_zero());
    }
}

#[test]
fn degenerate_inputs() {
    let f = Field::new(5).unwrap();
    assert!(euclid_poly_gcd(&FieldPoly::zero(f), &FieldPoly::zero(f)).is_err());
    assert_eq!(euclid_int_gcd(-12, 18).unwrap(), 6);
    assert!(binary_int_gcd(4, 3).is_err());
    let singular = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert!(dense_lu_solve_nopivot(&singular, &[1.0, 1.0]).is_err());
}
