// SPDX-License-Identifier: Apache-2.0
//! Serial reference algorithms.
//!
//! Nothing here shares arithmetic with the array simulators beyond the
//! field layer, so agreement between the two is real evidence.

use thiserror::Error;

use crate::gfield::{FieldElement, FieldError, FieldPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("both arguments are zero")]
    BothZero,
    #[error("argument {0} is even")]
    Even(u128),
    #[error("zero pivot at step {0}")]
    ZeroPivot(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch")]
    Dimension,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Monic GCD by repeated division with remainder.
pub fn euclid_poly_gcd(a: &FieldPoly, b: &FieldPoly) -> Result<FieldPoly, OracleError> {
    if a.field() != b.field() {
        let (p, q) = (a.field().modulus(), b.field().modulus());
        return Err(FieldError::ModulusMismatch(p, q).into());
    }
    let field = a.field();
    let mut r0: Vec<FieldElement> = a.coeffs().to_vec();
    let mut r1: Vec<FieldElement> = b.coeffs().to_vec();
    if r0.is_empty() && r1.is_empty() {
        return Err(OracleError::BothZero);
    }
    while !r1.is_empty() {
        let lead_inv = r1.last().copied().unwrap().inv()?;
        while r0.len() >= r1.len() {
            let shift = r0.len() - r1.len();
            let q = *r0.last().unwrap() * lead_inv;
            for (i, &c) in r1.iter().enumerate() {
                r0[shift + i] = r0[shift + i] - q * c;
            }
            while r0.last().is_some_and(|c| c.is_zero()) {
                r0.pop();
            }
        }
        std::mem::swap(&mut r0, &mut r1);
    }
    let lead_inv = r0.last().copied().unwrap().inv()?;
    Ok(FieldPoly::from_coeffs(field, r0.into_iter().map(|c| c * lead_inv).collect()))
}

/// gcd(|a|, |b|) by the classical Euclidean algorithm.
pub fn euclid_int_gcd(a: i128, b: i128) -> Result<u128, OracleError> {
    if a == 0 && b == 0 {
        return Err(OracleError::BothZero);
    }
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    Ok(a)
}

/// The binary GCD for odd positive arguments.
pub fn binary_int_gcd(a: u128, b: u128) -> Result<u128, OracleError> {
    for x in [a, b] {
        if x % 2 == 0 {
            return Err(OracleError::Even(x));
        }
    }
    let (mut a, mut b) = (a, b);
    let mut t = a.abs_diff(b);
    while t != 0 {
        while t % 2 == 0 {
            t /= 2;
        }
        if a > b {
            a = t;
        } else {
            b = t;
        }
        t = a.abs_diff(b);
    }
    Ok(a)
}

/// Square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, OracleError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(OracleError::Dimension);
        }
        Ok(DenseMatrix { n, data: rows.concat() })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::from_fn(self.n, |i, j| (0..self.n).map(|k| self.get(i, k) * rhs.get(k, j)).sum())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) - rhs.get(i, j))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= rel_tol * scale))
    }
}

/// Solves `m x = b` by Gaussian elimination without pivoting and returns
/// the upper triangular factor as well.
pub fn dense_lu_solve_nopivot(m: &DenseMatrix, b: &[f64]) -> Result<(Vec<f64>, DenseMatrix), OracleError> {
    let n = m.order();
    if b.len() != n {
        return Err(OracleError::Dimension);
    }
    let tol = 1e-12 * m.max_abs();
    let mut u = m.clone();
    let mut y = b.to_vec();
    for k in 0..n {
        let piv = u.get(k, k);
        if piv.abs() <= tol || piv == 0.0 {
            return Err(OracleError::ZeroPivot(k));
        }
        for i in k + 1..n {
            let l = u.get(i, k) / piv;
            u.set(i, k, 0.0);
            for j in k + 1..n {
                u.set(i, j, u.get(i, j) - l * u.get(k, j));
            }
            y[i] -= l * y[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| u.get(i, j) * x[j]).sum();
        x[i] = (y[i] - s) / u.get(i, i);
    }
    Ok((x, u))
}

#[derive(Debug, Clone)]
pub struct JacobiResult {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
    pub sweeps: usize,
    pub converged: bool,
}

/// Cyclic-by-rows Jacobi: pairs (1,2), (1,3), ..., (n-1,n) per sweep.
///
/// Stops when the off-diagonal norm falls below `tol * ||A||_F`, checked
/// before each sweep.
pub fn serial_cyclic_jacobi(a: &DenseMatrix, tol: f64, max_sweeps: usize) -> Result<JacobiResult, OracleError> {
    if !a.is_symmetric(1e-12) {
        return Err(OracleError::NotSymmetric);
    }
    let n = a.order();
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let target = tol * a.frobenius();
    let mut sweeps = 0;
    while m.off() >= target && m.off() > 0.0 {
        if sweeps == max_sweeps {
            return Ok(JacobiResult { values: diag(&m), vectors: v, sweeps, converged: false });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- J^T A J with J the identity except J[p][p]=J[q][q]=c, J[p][q]=s, J[q][p]=-s.
                for k in 0..n {
                    let (akp, akq) = (m.get(k, p), m.get(k, q));
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (m.get(p, k), m.get(q, k));
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
        sweeps += 1;
    }
    Ok(JacobiResult { values: diag(&m), vectors: v, sweeps, converged: true })
}

fn diag(m: &DenseMatrix) -> Vec<f64> {
    (0..m.order()).map(|i| m.get(i, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfield::Field;

    #[test]
    fn poly_gcd_examples() {
        let f2 = Field::new(2).unwrap();
        let a = FieldPoly::from_ints(f2, &[1, 1, 1, 1]);
        let b = FieldPoly::from_ints(f2, &[1, 0, 1]);
        assert_eq!(euclid_poly_gcd(&a, &b).unwrap(), b);
        assert_eq!(euclid_poly_gcd(&a, &FieldPoly::zero(f2)).unwrap(), a);
        let z = FieldPoly::zero(f2);
        assert_eq!(euclid_poly_gcd(&z, &z), Err(OracleError::BothZero));
    }

    #[test]
    fn int_gcd_examples() {
        assert_eq!(euclid_int_gcd(12, 18).unwrap(), 6);
        assert_eq!(euclid_int_gcd(-35, 0).unwrap(), 35);
        assert_eq!(euclid_int_gcd(1, 9876).unwrap(), 1);
        assert!(euclid_int_gcd(0, 0).is_err());
        assert_eq!(binary_int_gcd(3, 5).unwrap(), 1);
        assert_eq!(binary_int_gcd(9, 9).unwrap(), 9);
        assert_eq!(binary_int_gcd(15, 25).unwrap(), 5);
        assert_eq!(binary_int_gcd(4, 5), Err(OracleError::Even(4)));
    }

    #[test]
    fn lu_examples() {
        let i3 = DenseMatrix::identity(3);
        let (x, _) = dense_lu_solve_nopivot(&i3, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        let m = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (x, u) = dense_lu_solve_nopivot(&m, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        assert_eq!(u.get(1, 0), 0.0);
        let s = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(dense_lu_solve_nopivot(&s, &[1.0, 1.0]), Err(OracleError::ZeroPivot(0)));
    }

    #[test]
    fn jacobi_examples() {
        let d = DenseMatrix::from_fn(4, |i, j| if i == j { i as f64 + 1.0 } else { 0.0 });
        let r = serial_cyclic_jacobi(&d, 1e-12, 10).unwrap();
        assert_eq!(r.sweeps, 0);
        assert_eq!(r.values, vec![1.0, 2.0, 3.0, 4.0]);
        let x = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let mut v = serial_cyclic_jacobi(&x, 1e-12, 10).unwrap().values;
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        let ns = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(serial_cyclic_jacobi(&ns, 1e-12, 10).is_err());
    }
}
