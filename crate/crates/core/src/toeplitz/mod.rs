// SPDX-License-Identifier: Apache-2.0
//! Toeplitz systems `A x = b` with `A[i][j] = a_{j-i}`, order `n + 1`.
//!
//! The Bareiss recursions build two matrix sequences, `A^(-k)` and `A^(k)`,
//! whose Toeplitz parts are held as four bands of `n + 1` numbers each:
//!
//! * `alpha[j]`: diagonal `-(j+1)` of `A^(-k)` (strictly lower part),
//! * `beta[j]`: diagonal `j` of `A^(-k)` in rows `k..=n`,
//! * `gamma[j]`: diagonal `-j` of `A^(k)` in rows `0..=n-k`,
//! * `delta[j]`: diagonal `j+1` of `A^(k)` (strictly upper part).
//!
//! `U = A^(-n)` is never stored. Its row `k` equals row `k` of `A^(-k)`,
//! and the recursions run backwards from the final bands and the saved
//! multipliers, so back-substitution needs only O(n) words.

mod cell;
mod systolic;

use thiserror::Error;

use crate::oracle::DenseMatrix;

pub use cell::{ToeplitzCell, ToeplitzPhase, TOEPLITZ_INPUTS, TOEPLITZ_OUTPUTS};
pub use systolic::{systolic_toeplitz_solve, systolic_toeplitz_solve_traced, ToeplitzRun};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ToeplitzError {
    #[error("expected {expected} values, got {found}")]
    Shape { expected: usize, found: usize },
    #[error("non-finite value in input")]
    NotFinite,
    #[error("singular leading principal minor at step {0}")]
    Singular(usize),
    #[error("singular leading principal minor: division by zero in cell {cell} at tick {tick}")]
    Breakdown { cell: usize, tick: u64 },
    #[error("engine: {0}")]
    Engine(String),
}

impl ToeplitzError {
    /// True for a singular leading minor found by either solver.
    pub fn is_singular(&self) -> bool {
        matches!(self, ToeplitzError::Singular(_) | ToeplitzError::Breakdown { .. })
    }
}

/// Diagonals `a_{-n}..=a_n` and right-hand side `b_0..=b_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzBands {
    n: usize,
    diag: Vec<f64>,
    rhs: Vec<f64>,
}

impl ToeplitzBands {
    /// `diag` holds `a_{-n}, ..., a_n`, so it must have odd length `2n+1`.
    pub fn new(diag: Vec<f64>, rhs: Vec<f64>) -> Result<Self, ToeplitzError> {
        if diag.len() % 2 == 0 {
            return Err(ToeplitzError::Shape { expected: diag.len() + 1, found: diag.len() });
        }
        let n = diag.len() / 2;
        if rhs.len() != n + 1 {
            return Err(ToeplitzError::Shape { expected: n + 1, found: rhs.len() });
        }
        if diag.iter().chain(&rhs).any(|v| !v.is_finite()) {
            return Err(ToeplitzError::NotFinite);
        }
        Ok(ToeplitzBands { n, diag, rhs })
    }

    pub fn identity(n: usize, rhs: Vec<f64>) -> Result<Self, ToeplitzError> {
        let mut diag = vec![0.0; 2 * n + 1];
        diag[n] = 1.0;
        Self::new(diag, rhs)
    }

    /// `n`, one less than the order.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `a_d`, zero outside `-n..=n`.
    pub fn a(&self, d: isize) -> f64 {
        let i = d + self.n as isize;
        if i < 0 || i as usize >= self.diag.len() {
            0.0
        } else {
            self.diag[i as usize]
        }
    }

    /// `b_i`, zero outside `0..=n`.
    pub fn b(&self, i: isize) -> f64 {
        if i < 0 || i as usize > self.n {
            0.0
        } else {
            self.rhs[i as usize]
        }
    }

    pub fn diagonals(&self) -> &[f64] {
        &self.diag
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n + 1, |i, j| self.a(j as isize - i as isize))
    }

    /// Pivot tolerance, `1e-12 * max |a_d|`.
    pub fn tolerance(&self) -> f64 {
        1e-12 * self.diag.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Generator of one matrix in the sequence: entry for diagonal `d` at index
/// `d + n`, zero outside `-n..=n`.
#[derive(Debug, Clone, PartialEq)]
struct Gen {
    n: usize,
    v: Vec<f64>,
}

impl Gen {
    fn get(&self, d: isize) -> f64 {
        let i = d + self.n as isize;
        if i < 0 || i as usize >= self.v.len() {
            0.0
        } else {
            self.v[i as usize]
        }
    }

    /// `self(d) += m * other(d + shift)` for every `d`.
    fn axpy_shifted(&mut self, m: f64, other: &Gen, shift: isize) {
        let n = self.n as isize;
        for d in -n..=n {
            self.v[(d + n) as usize] += m * other.get(d + shift);
        }
    }
}

/// Everything the forward pass keeps: the four bands, the multipliers
/// `m_{-k}`, `m_{+k}` (index `k - 1`), and the transformed right-hand side
/// `b^(-n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BareissBandState {
    pub n: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub m_minus: Vec<f64>,
    pub m_plus: Vec<f64>,
    pub rhs: Vec<f64>,
    tol: f64,
}

impl BareissBandState {
    fn from_gens(n: usize, u: &Gen, v: &Gen, m_minus: Vec<f64>, m_plus: Vec<f64>, rhs: Vec<f64>, tol: f64) -> Self {
        let j = 0..=n as isize;
        BareissBandState {
            n,
            alpha: j.clone().map(|j| u.get(-(j + 1))).collect(),
            beta: j.clone().map(|j| u.get(j)).collect(),
            gamma: j.clone().map(|j| v.get(-j)).collect(),
            delta: j.map(|j| v.get(j + 1)).collect(),
            m_minus,
            m_plus,
            rhs,
            tol,
        }
    }

    fn gens(&self) -> (Gen, Gen) {
        let n = self.n as isize;
        let u = (-n..=n).map(|d| if d >= 0 { self.beta[d as usize] } else { self.alpha[(-d - 1) as usize] });
        let v = (-n..=n).map(|d| if d <= 0 { self.gamma[(-d) as usize] } else { self.delta[(d - 1) as usize] });
        (Gen { n: self.n, v: u.collect() }, Gen { n: self.n, v: v.collect() })
    }

    /// Rows of `U = A^(-n)`, regenerated backwards, as `(k, [U[k][k..=n]])`
    /// in order `k = n, n-1, ..., 0`. Only one row is live at a time.
    pub fn regenerate_rows(&self, mut visit: impl FnMut(usize, &[f64])) {
        let n = self.n;
        let (mut u, mut v) = self.gens();
        let mut row = Vec::with_capacity(n + 1);
        for k in (0..=n).rev() {
            row.clear();
            row.extend((0..=(n - k) as isize).map(|d| u.get(d)));
            visit(k, &row);
            if k > 0 {
                let ki = k as isize;
                v.axpy_shifted(self.m_plus[k - 1], &u, -ki);
                u.axpy_shifted(self.m_minus[k - 1], &v, ki);
            }
        }
    }

    /// `U` as a dense matrix, for checks.
    pub fn upper(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n + 1);
        self.regenerate_rows(|k, row| {
            for (d, &x) in row.iter().enumerate() {
                m.set(k, k + d, x);
            }
        });
        m
    }
}

fn check_pivot(p: f64, tol: f64, step: usize) -> Result<(), ToeplitzError> {
    if p.abs() <= tol {
        Err(ToeplitzError::Singular(step))
    } else {
        Ok(())
    }
}

pub fn bareiss_forward(t: &ToeplitzBands) -> Result<BareissBandState, ToeplitzError> {
    bareiss_forward_with(t, |_, _| {})
}

/// As [`bareiss_forward`], calling `observe(k, state)` after each step
/// `k = 0..=n` with the bands of `A^(-k)` and `A^(k)` and the current
/// `b^(-k)`.
pub fn bareiss_forward_with(
    t: &ToeplitzBands,
    mut observe: impl FnMut(usize, &BareissBandState),
) -> Result<BareissBandState, ToeplitzError> {
    let n = t.n;
    let tol = t.tolerance();
    let a0 = t.a(0);
    check_pivot(a0, tol, 0)?;
    let mut u = Gen { n, v: t.diag.clone() };
    let mut v = u.clone();
    let mut bm = t.rhs.clone();
    let mut bp = t.rhs.clone();
    let mut m_minus = Vec::with_capacity(n);
    let mut m_plus = Vec::with_capacity(n);
    observe(0, &BareissBandState::from_gens(n, &u, &v, m_minus.clone(), m_plus.clone(), bm.clone(), tol));
    for k in 1..=n {
        let ki = k as isize;
        let mm = u.get(-ki) / a0;
        u.axpy_shifted(-mm, &v, ki);
        for i in (k..=n).rev() {
            bm[i] -= mm * bp[i - k];
        }
        let pivot = u.get(0);
        check_pivot(pivot, tol, k)?;
        let mp = v.get(ki) / pivot;
        v.axpy_shifted(-mp, &u, -ki);
        for i in 0..=n - k {
            bp[i] -= mp * bm[i + k];
        }
        m_minus.push(mm);
        m_plus.push(mp);
        observe(k, &BareissBandState::from_gens(n, &u, &v, m_minus.clone(), m_plus.clone(), bm.clone(), tol));
    }
    Ok(BareissBandState::from_gens(n, &u, &v, m_minus, m_plus, bm, tol))
}

/// Solves `U x = b^(-n)` from the bottom row up, regenerating each row of
/// `U` just before it is used.
pub fn bareiss_back_substitute(s: &BareissBandState) -> Result<Vec<f64>, ToeplitzError> {
    let n = s.n;
    let mut x = vec![0.0; n + 1];
    let mut err = None;
    s.regenerate_rows(|k, row| {
        if err.is_some() {
            return;
        }
        if row[0].abs() <= s.tol {
            err = Some(ToeplitzError::Singular(k));
            return;
        }
        let acc: f64 = row[1..].iter().zip(&x[k + 1..]).map(|(u, x)| u * x).sum();
        x[k] = (s.rhs[k] - acc) / row[0];
    });
    match err {
        Some(e) => Err(e),
        None => Ok(x),
    }
}

pub fn bareiss_solve(t: &ToeplitzBands) -> Result<Vec<f64>, ToeplitzError> {
    bareiss_back_substitute(&bareiss_forward(t)?)
}

/// `||Tx - b||_inf / (||T||_inf ||x||_inf + ||b||_inf)`.
pub fn relative_residual(t: &ToeplitzBands, x: &[f64]) -> f64 {
    let m = t.to_dense();
    let r = m.mul_vec(x);
    let num = r.iter().zip(&t.rhs).fold(0.0f64, |acc, (r, b)| acc.max((r - b).abs()));
    let xn = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let bn = t.rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let den = m.norm_inf() * xn + bn;
    if den == 0.0 {
        num
    } else {
        num / den
    }
}
