// SPDX-License-Identifier: Apache-2.0
//! Linear array `P_0..=P_n` driven through the engine.

use super::cell::{ToeplitzCell, ToeplitzPhase};
use super::{ToeplitzBands, ToeplitzError};
use crate::engine::{Array, ArraySpec, EngineError, PortValue, Trace, TraceMode};

#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzRun {
    pub x: Vec<f64>,
    /// Last tick on which any cell was active.
    pub final_tick: u64,
    /// Ticks simulated (`4n + 1`).
    pub ticks: u64,
    /// Multiplications summed over all cells.
    pub multiplications: u64,
    /// Registers each cell reports as its state.
    pub registers_per_cell: usize,
}

pub fn systolic_toeplitz_solve(t: &ToeplitzBands) -> Result<ToeplitzRun, ToeplitzError> {
    Ok(systolic_toeplitz_solve_traced(t, TraceMode::Off)?.0)
}

pub fn systolic_toeplitz_solve_traced(
    t: &ToeplitzBands,
    mode: TraceMode,
) -> Result<(ToeplitzRun, Trace), ToeplitzError> {
    let n = t.n();
    let nu = n as u64;
    let tol = t.tolerance();
    let spec = ArraySpec::linear(n + 1)
        .chain("outR1", "inL1")
        .chain("outR2", "inL2")
        .chain_back("outL1", "inR1")
        .chain_back("outL2", "inR2")
        .chain_back("outL3", "inR3")
        .activation(move |id, tick| ToeplitzPhase::at(id.col as u64, nu, tick).is_some());
    let engine_err = |e: EngineError| match e {
        EngineError::Cell { cell, tick, .. } => ToeplitzError::Breakdown { cell: cell.col, tick },
        other => ToeplitzError::Engine(other.to_string()),
    };
    let mut arr = Array::build(spec, |id| ToeplitzCell::init(id.col, n, |d| t.a(d), |i| t.b(i), tol)).map_err(engine_err)?;
    arr.set_trace_mode(mode);

    // End conditions: every unwired input reads zero.
    let feed = vec![PortValue::Real(0.0); arr.boundary_inputs().len()];
    let ticks = 4 * nu + 1;
    let mut final_tick = 0;
    let mut active_before: u64 = 0;
    for tick in 0..ticks {
        arr.tick_with(&feed, |_, _| {}).map_err(engine_err)?;
        let active: u64 = arr.activity().iter().sum();
        if active > active_before {
            final_tick = tick;
        }
        active_before = active;
    }
    let x = arr.cells().iter().map(|c| c.xi).collect();
    let multiplications = arr.cells().iter().map(|c| c.mults).sum();
    let registers_per_cell = arr.cells()[0].registers().len();
    let run = ToeplitzRun { x, final_tick, ticks, multiplications, registers_per_cell };
    Ok((run, arr.take_trace()))
}
