// SPDX-License-Identifier: Apache-2.0
//! Synchronous simulation kernel for linear and two-dimensional cell arrays.
//!
//! A cell is a small state machine with named input and output ports.
//! Wires connect an output of one cell to an input of a neighbour, and a
//! value written at tick `T` is readable at tick `T + 1`. Inputs with no
//! wire form the array boundary and are fed by the caller each tick.
//!
//! ```
//! use systolic_core::engine::{Array, ArraySpec, Cell, CellFault, Ports, PortValue, StepCtx};
//!
//! struct Delay;
//! impl Cell for Delay {
//!     fn ports(&self) -> Ports { Ports::new(&["x"], &["y"]) }
//!     fn step(&mut self, _: StepCtx, i: &[PortValue], o: &mut [PortValue]) -> Result<(), CellFault> {
//!         o[0] = i[0];
//!         Ok(())
//!     }
//!     fn state(&self, _: &mut Vec<(&'static str, PortValue)>) {}
//! }
//!
//! let mut a = Array::build(ArraySpec::linear(3).chain("y", "x"), |_| Delay).unwrap();
//! let mut seen = None;
//! for t in 0..4 {
//!     let feed = [PortValue::Word(if t == 0 { 7 } else { 0 })];
//!     a.tick_with(&feed, |_, v| if v == PortValue::Word(7) && seen.is_none() { seen = Some(t + 1) }).unwrap();
//! }
//! assert_eq!(seen, Some(3));
//! ```

mod array;
mod trace;
mod value;

pub use array::{
    Activation, Array, ArraySpec, Cell, CellFault, CellId, EngineError, PortMap, PortRef, Ports,
    StepCtx, Topology, Wire,
};
pub use trace::{Trace, TraceMode, TraceParseError, TraceRecord, Utilisation};
pub use value::{PortKind, PortValue};
