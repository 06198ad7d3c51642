// SPDX-License-Identifier: Apache-2.0
//! Symmetric eigenvalues by parallel Jacobi on an `h x h` grid of 2x2
//! blocks, `h = ceil(n/2)`.
//!
//! Each step, every diagonal block computes a rotation that annihilates its
//! off-diagonal pair, every block applies its row and column rotations, and
//! rows and columns are then shuffled by a fixed permutation that only moves
//! an index to a neighbouring block. After `2h - 1` steps every pair of
//! indices has met in a diagonal block once, which is one sweep.
//!
//! [`Mode::Broadcast`] applies a whole step at once. [`Mode::Delayed`] runs
//! the same arithmetic on the engine, where cell `(i, j)` does step `s` at
//! tick `3s + |i - j|` and rotation parameters travel one cell per tick.

mod delayed;
mod grid;

use thiserror::Error;

use crate::engine::{Trace, TraceMode};
use crate::oracle::DenseMatrix;

pub use delayed::{delay, JacobiCell};
pub use grid::{apply_diagonal, grid_step, jacobi_rotation, permute, permutation_source, rotate_block, BlockGrid, RotationPair, StepRotations};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("non-finite entry")]
    NotFinite,
    #[error("max_sweeps must be at least 1")]
    NoSweeps,
    #[error("engine: {0}")]
    Engine(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Broadcast,
    Delayed,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "broadcast" => Ok(Mode::Broadcast),
            "delayed" => Ok(Mode::Delayed),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Per-sweep rotation thresholds.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    /// `off(A_0) / (n^2 4^r)` for sweep `r < 6`, zero afterwards.
    Default,
    /// Rotate whenever the target is nonzero.
    Zero,
    Custom(Vec<f64>),
}

impl Threshold {
    fn value(&self, sweep: usize, off0: f64, n: usize) -> f64 {
        match self {
            Threshold::Default if sweep < 6 => off0 / ((n * n) as f64 * 4f64.powi(sweep as i32)),
            Threshold::Default | Threshold::Zero => 0.0,
            Threshold::Custom(v) => v.get(sweep).copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    pub mode: Mode,
    pub max_sweeps: usize,
    pub threshold: Threshold,
    pub vectors: bool,
    /// Keep the grid after every step in [`EigenRun::steps`].
    pub record_steps: bool,
    /// Engine trace mode (delayed mode only).
    pub trace: TraceMode,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            mode: Mode::Broadcast,
            max_sweeps: 10,
            threshold: Threshold::Default,
            vectors: false,
            record_steps: false,
            trace: TraceMode::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub sweeps: usize,
    pub converged: bool,
    /// Off-diagonal Frobenius norm before the first step and after each
    /// step.
    pub off_norms: Vec<f64>,
    /// Rotations skipped by the threshold, per sweep.
    pub skipped: Vec<usize>,
    /// Rotations performed, per sweep.
    pub performed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenRun {
    /// Eigenvalue paired with original index `i`.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: Option<DenseMatrix>,
    pub report: SweepReport,
    pub steps: Vec<BlockGrid>,
    pub rotations: Vec<StepRotations>,
    /// Ticks simulated (delayed mode) or zero.
    pub ticks: u64,
    pub trace: Trace,
}

impl EigenRun {
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Convergence is declared when `off(A) < CONVERGENCE * ||A||_F`.
pub const CONVERGENCE: f64 = 1e-10;

pub(crate) struct Plan {
    pub n: usize,
    pub norm: f64,
    pub thresholds: Vec<f64>,
}

impl Plan {
    fn new(a: &DenseMatrix, opts: &EigenOptions) -> Result<Self, EigenError> {
        let n = a.order();
        if n == 0 {
            return Err(EigenError::Empty);
        }
        if opts.max_sweeps == 0 {
            return Err(EigenError::NoSweeps);
        }
        if (0..n).any(|i| (0..n).any(|j| !a.get(i, j).is_finite())) {
            return Err(EigenError::NotFinite);
        }
        if !a.is_symmetric(1e-12) {
            return Err(EigenError::NotSymmetric);
        }
        let off0 = a.off();
        let thresholds = (0..opts.max_sweeps).map(|r| opts.threshold.value(r, off0, n)).collect();
        Ok(Plan { n, norm: a.frobenius(), thresholds })
    }

    pub fn converged(&self, off: f64) -> bool {
        off < CONVERGENCE * self.norm || off == 0.0
    }
}

/// Runs sweeps until convergence or `opts.max_sweeps`.
pub fn run_sweeps(a: &DenseMatrix, opts: &EigenOptions) -> Result<EigenRun, EigenError> {
    let plan = Plan::new(a, opts)?;
    let grid = BlockGrid::from_matrix(a)?;
    let (grid, report, steps, rotations, ticks, trace) = match opts.mode {
        Mode::Broadcast => {
            let (g, r, s, rot) = broadcast(grid, &plan, opts);
            (g, r, s, rot, 0, Trace::default())
        }
        Mode::Delayed => delayed::run(grid, &plan, opts)?,
    };
    let values = grid.eigenvalues();
    let vectors = opts.vectors.then(|| accumulate_vectors(&plan, &grid, &rotations));
    let steps = if opts.record_steps { steps } else { Vec::new() };
    Ok(EigenRun { values, vectors, report, steps, rotations, ticks, trace })
}

fn broadcast(
    mut grid: BlockGrid,
    plan: &Plan,
    opts: &EigenOptions,
) -> (BlockGrid, SweepReport, Vec<BlockGrid>, Vec<StepRotations>) {
    let per_sweep = grid.steps_per_sweep();
    let mut report = SweepReport { off_norms: vec![grid.off_norm()], ..Default::default() };
    let mut steps = Vec::new();
    let mut rotations = Vec::new();
    for r in 0..opts.max_sweeps {
        if plan.converged(grid.off_norm()) {
            report.converged = true;
            break;
        }
        let (mut performed, mut skipped) = (0, 0);
        for _ in 0..per_sweep {
            let (next, rots) = grid_step(&grid, plan.thresholds[r]);
            performed += rots.performed();
            skipped += rots.skipped();
            grid = next;
            report.off_norms.push(grid.off_norm());
            if opts.record_steps {
                steps.push(grid.clone());
            }
            rotations.push(rots);
        }
        report.sweeps += 1;
        report.performed.push(performed);
        report.skipped.push(skipped);
    }
    if !report.converged {
        report.converged = plan.converged(grid.off_norm());
    }
    (grid, report, steps, rotations)
}

/// `V` with `A V = V diag(values)`, built on the host from the rotations of
/// every step followed by that step's permutation.
fn accumulate_vectors(plan: &Plan, grid: &BlockGrid, rotations: &[StepRotations]) -> DenseMatrix {
    let big = grid.size();
    let src = permutation_source(big);
    let mut v = DenseMatrix::identity(big);
    for step in rotations {
        for (i, r) in step.rotations.iter().enumerate() {
            if !r.performed {
                continue;
            }
            let (p, q) = (2 * i, 2 * i + 1);
            for row in 0..big {
                let (vp, vq) = (v.get(row, p), v.get(row, q));
                v.set(row, p, r.c * vp - r.s * vq);
                v.set(row, q, r.s * vp + r.c * vq);
            }
        }
        let prev = v.clone();
        for (q, &s) in src.iter().enumerate() {
            for row in 0..big {
                v.set(row, q, prev.get(row, s));
            }
        }
    }
    let n = plan.n;
    let pos = grid.positions();
    DenseMatrix::from_fn(n, |row, col| v.get(row, pos[col]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let a = DenseMatrix::from_fn(4, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let run = run_sweeps(&a, &EigenOptions::default()).unwrap();
        assert_eq!(run.values, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(run.report.sweeps, 0);
        assert!(run.report.converged);
    }

    #[test]
    fn two_by_two() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        for mode in [Mode::Broadcast, Mode::Delayed] {
            let run = run_sweeps(&a, &EigenOptions { mode, vectors: true, ..Default::default() }).unwrap();
            let v = run.sorted_values();
            assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15, "{v:?}");
        }
    }

    #[test]
    fn odd_order_padding() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]]).unwrap();
        let run = run_sweeps(&a, &EigenOptions { vectors: true, ..Default::default() }).unwrap();
        let v = run.sorted_values();
        let r2 = 2f64.sqrt();
        for (got, want) in v.iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((got - want).abs() < 1e-12, "{v:?}");
        }
        assert_eq!(run.vectors.unwrap().order(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(run_sweeps(&a, &EigenOptions::default()).unwrap_err(), EigenError::NotSymmetric);
        let z = DenseMatrix::zeros(0);
        assert_eq!(run_sweeps(&z, &EigenOptions::default()).unwrap_err(), EigenError::Empty);
    }
}
