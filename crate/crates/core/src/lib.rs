// SPDX-License-Identifier: Apache-2.0
//! Cycle-accurate simulators for linear-time systolic algorithms.
//!
//! Four families are covered, each checked against a serial reference in
//! [`oracle`]:
//!
//! * [`polygcd`]: polynomial GCD over GF(p) on a linear array of m+n+1 cells.
//! * [`intgcd`]: integer GCD by the plus-minus algorithm, serially and on a
//!   bit-serial pipeline.
//! * [`toeplitz`]: Toeplitz systems by the Bareiss recursions, serially with
//!   O(n) storage and on a linear array of n+1 cells.
//! * [`eigen`]: symmetric eigenproblems by parallel Jacobi on a square array
//!   of 2x2 blocks.
//!
//! All arrays run on the clocked kernel in [`engine`].

pub mod eigen;
pub mod engine;
pub mod gen;
pub mod gfield;
pub mod intgcd;
pub mod oracle;
pub mod polygcd;
pub mod toeplitz;

pub use engine::{Array, ArraySpec, Cell, CellId, PortValue, Trace, TraceMode};
pub use gfield::{Field, FieldElement, FieldPoly};
