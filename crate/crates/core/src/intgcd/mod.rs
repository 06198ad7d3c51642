// SPDX-License-Identifier: Apache-2.0
//! Integer GCD by the plus-minus algorithm.
//!
//! Each iteration halves `b` until it is odd, swaps so that the operand with
//! the larger bit bound is replaced, and sets `b` to `(a+b)/2` or `(a-b)/2`,
//! whichever is even. Only the two low bits decide each step, which is what
//! lets the bit-serial pipeline in [`systolic`] make its choices before the
//! high bits arrive.

mod cell;
mod systolic;

use thiserror::Error;

use crate::engine::EngineError;

pub use cell::{GcdCell, GcdLines, GcdNode, GCD_INPUTS, GCD_OUTPUTS};
pub use systolic::{
    decode_word, encode_frame, pipeline_cells, systolic_int_gcd, systolic_int_gcd_with, BitFrame, CellBudget,
    IntGcdRun,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntGcdError {
    #[error("a = {0} is even")]
    EvenA(i128),
    #[error("b is zero")]
    ZeroB,
    #[error("{0} is outside the stated bit bound")]
    OutOfRange(i128),
    #[error("inputs must be positive")]
    NotPositive,
    #[error("bit bound {0} is unsupported")]
    BadBitBound(u32),
    #[error("no termination after {0} iterations")]
    NoTermination(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot decode array output: {0}")]
    Decode(String),
}

/// Values after one iteration of the outer loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmState {
    pub a: i128,
    pub b: i128,
    pub delta: i64,
    /// Bit bounds, tracked only by the precursor.
    pub alpha: Option<i64>,
    pub beta: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmOutcome {
    pub gcd: u128,
    pub iterations: usize,
    pub states: Vec<PmState>,
}

fn check(a: i128, b: i128) -> Result<(), IntGcdError> {
    if a % 2 == 0 {
        return Err(IntGcdError::EvenA(a));
    }
    if b == 0 {
        return Err(IntGcdError::ZeroB);
    }
    Ok(())
}

/// `b := (a+b)/2` if that is even, else `(a-b)/2`.
fn plus_minus(a: i128, b: i128) -> i128 {
    if (a + b).rem_euclid(4) == 0 {
        (a + b) / 2
    } else {
        (a - b) / 2
    }
}

const MAX_ITERATIONS: usize = 1024;

/// The version that keeps explicit bounds `|a| <= 2^alpha`, `|b| <= 2^beta`.
pub fn pm_precursor(a: i128, b: i128, n: u32) -> Result<PmOutcome, IntGcdError> {
    check(a, b)?;
    if n > 125 {
        return Err(IntGcdError::BadBitBound(n));
    }
    for x in [a, b] {
        if x.unsigned_abs() > 1u128 << n {
            return Err(IntGcdError::OutOfRange(x));
        }
    }
    let (mut a, mut b) = (a, b);
    let (mut alpha, mut beta) = (n as i64, n as i64);
    let mut states = Vec::new();
    loop {
        while b % 2 == 0 {
            b /= 2;
            beta -= 1;
        }
        if alpha >= beta {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut alpha, &mut beta);
        }
        b = plus_minus(a, b);
        states.push(PmState { a, b, delta: alpha - beta, alpha: Some(alpha), beta: Some(beta) });
        if b == 0 {
            break;
        }
        if states.len() > MAX_ITERATIONS {
            return Err(IntGcdError::NoTermination(states.len()));
        }
    }
    Ok(PmOutcome { gcd: a.unsigned_abs(), iterations: states.len(), states })
}

/// Algorithm PM, tracking only `delta = alpha - beta`. Swaps when
/// `delta >= 0`.
pub fn pm_serial_steps(a: i128, b: i128) -> Result<PmOutcome, IntGcdError> {
    check(a, b)?;
    let (mut a, mut b) = (a, b);
    let mut delta: i64 = 0;
    let mut states = Vec::new();
    loop {
        while b % 2 == 0 {
            b /= 2;
            delta += 1;
        }
        if delta >= 0 {
            std::mem::swap(&mut a, &mut b);
            delta = -delta;
        }
        b = plus_minus(a, b);
        states.push(PmState { a, b, delta, alpha: None, beta: None });
        if b == 0 {
            break;
        }
        if states.len() > MAX_ITERATIONS {
            return Err(IntGcdError::NoTermination(states.len()));
        }
    }
    Ok(PmOutcome { gcd: a.unsigned_abs(), iterations: states.len(), states })
}

pub fn pm_serial(a: i128, b: i128) -> Result<u128, IntGcdError> {
    Ok(pm_serial_steps(a, b)?.gcd)
}
