// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::trace::{Trace, TraceMode, TraceRecord};
use super::value::{PortKind, PortValue};

/// Position of a cell. Linear arrays use row 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub row: usize,
    pub col: usize,
}

impl CellId {
    pub const fn new(row: usize, col: usize) -> Self {
        CellId { row, col }
    }

    pub const fn linear(k: usize) -> Self {
        CellId { row: 0, col: k }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Linear(usize),
    Grid { rows: usize, cols: usize },
}

impl Topology {
    pub fn len(self) -> usize {
        match self {
            Topology::Linear(n) => n,
            Topology::Grid { rows, cols } => rows * cols,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    fn contains(self, c: CellId) -> bool {
        match self {
            Topology::Linear(n) => c.row == 0 && c.col < n,
            Topology::Grid { rows, cols } => c.row < rows && c.col < cols,
        }
    }

    fn index(self, c: CellId) -> usize {
        match self {
            Topology::Linear(_) => c.col,
            Topology::Grid { cols, .. } => c.row * cols + c.col,
        }
    }

    fn id(self, i: usize) -> CellId {
        match self {
            Topology::Linear(_) => CellId::linear(i),
            Topology::Grid { cols, .. } => CellId::new(i / cols, i % cols),
        }
    }

    fn adjacent(self, a: CellId, b: CellId) -> bool {
        let dr = a.row.abs_diff(b.row);
        let dc = a.col.abs_diff(b.col);
        match self {
            Topology::Linear(_) => dr + dc <= 1,
            Topology::Grid { .. } => dr <= 1 && dc <= 1,
        }
    }
}

/// A named port on a particular cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortRef {
    pub cell: CellId,
    pub port: String,
}

impl PortRef {
    pub fn new(cell: CellId, port: impl Into<String>) -> Self {
        PortRef { cell, port: port.into() }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.cell, self.port)
    }
}

pub type PortMap = BTreeMap<PortRef, PortValue>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub from: PortRef,
    pub to: PortRef,
}

pub type Activation = Box<dyn Fn(CellId, u64) -> bool + Send + Sync>;

/// Topology, wiring and activation predicate of an array.
pub struct ArraySpec {
    pub topology: Topology,
    pub wires: Vec<Wire>,
    pub activation: Option<Activation>,
}

impl ArraySpec {
    pub fn linear(n: usize) -> Self {
        ArraySpec { topology: Topology::Linear(n), wires: Vec::new(), activation: None }
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        ArraySpec { topology: Topology::Grid { rows, cols }, wires: Vec::new(), activation: None }
    }

    pub fn wire(mut self, from: CellId, out: &str, to: CellId, inp: &str) -> Self {
        self.wires.push(Wire { from: PortRef::new(from, out), to: PortRef::new(to, inp) });
        self
    }

    /// Wires `out` of cell k to `inp` of cell k+1 along a linear array.
    pub fn chain(mut self, out: &str, inp: &str) -> Self {
        let n = self.topology.len();
        for k in 1..n {
            self = self.wire(CellId::linear(k - 1), out, CellId::linear(k), inp);
        }
        self
    }

    /// Wires `out` of cell k+1 to `inp` of cell k along a linear array.
    pub fn chain_back(mut self, out: &str, inp: &str) -> Self {
        let n = self.topology.len();
        for k in 1..n {
            self = self.wire(CellId::linear(k), out, CellId::linear(k - 1), inp);
        }
        self
    }

    pub fn activation(mut self, f: impl Fn(CellId, u64) -> bool + Send + Sync + 'static) -> Self {
        self.activation = Some(Box::new(f));
        self
    }
}

/// Read-only context handed to each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepCtx {
    pub cell: CellId,
    pub tick: u64,
}

/// Port names of a cell, in the order used by `Cell::step`.
#[derive(Debug, Clone, Default)]
pub struct Ports {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Ports {
    pub fn new(inputs: &[&str], outputs: &[&str]) -> Self {
        Ports {
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct CellFault(pub String);

/// A cell program.
///
/// `outputs` holds the output registers as they stood after the previous
/// activation; a step overwrites only what it drives, the rest keep their
/// value.
pub trait Cell {
    fn ports(&self) -> Ports;
    fn step(
        &mut self,
        ctx: StepCtx,
        inputs: &[PortValue],
        outputs: &mut [PortValue],
    ) -> Result<(), CellFault>;
    /// Internal registers for the trace.
    fn state(&self, out: &mut Vec<(&'static str, PortValue)>);
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("cell {0} is outside the array")]
    OutOfBounds(CellId),
    #[error("cell {cell} has no port named {port:?}")]
    UnknownPort { cell: CellId, port: String },
    #[error("wire {from} -> {to} is not nearest-neighbour")]
    NotNeighbour { from: PortRef, to: PortRef },
    #[error("input {0} has more than one source")]
    DuplicateDestination(PortRef),
    #[error("{0} is not an unwired input")]
    NotBoundaryInput(PortRef),
    #[error("no boundary value for {port} at tick {tick}")]
    MissingBoundaryInput { port: PortRef, tick: u64 },
    #[error("port {port} carries {expected} but received {found:?}")]
    KindMismatch { port: PortRef, expected: PortKind, found: PortValue },
    #[error("cell {cell} failed at tick {tick}: {fault}")]
    Cell { cell: CellId, tick: u64, fault: CellFault },
    #[error("evaluation order is not a permutation of the cells")]
    BadOrder,
}

#[derive(Debug, Clone, Copy)]
enum Source {
    Reg(usize),
    Boundary(usize),
}

/// A clocked array of cells.
///
/// Each tick every active cell reads the values its neighbours wrote on the
/// previous tick, then all writes are committed at once.
pub struct Array<C> {
    topology: Topology,
    cells: Vec<C>,
    in_names: Vec<Vec<Arc<str>>>,
    out_names: Vec<Vec<Arc<str>>>,
    in_src: Vec<Vec<Source>>,
    out_base: Vec<usize>,
    regs: Vec<PortValue>,
    next: Vec<PortValue>,
    reg_kind: Vec<Option<PortKind>>,
    reg_boundary: Vec<Option<usize>>,
    boundary_in: Vec<(usize, usize)>,
    boundary_in_kind: Vec<Option<PortKind>>,
    boundary_out: Vec<(usize, usize)>,
    activation: Option<Activation>,
    order: Vec<usize>,
    tick: u64,
    trace_mode: TraceMode,
    trace: Trace,
    activity: Vec<u64>,
    ran: Vec<bool>,
    scratch: Vec<PortValue>,
    state_buf: Vec<(&'static str, PortValue)>,
}

impl<C: Cell> Array<C> {
    /// Builds an array in reset state: all ports empty, tick 0.
    pub fn build(spec: ArraySpec, mut program: impl FnMut(CellId) -> C) -> Result<Self, EngineError> {
        let topo = spec.topology;
        let n = topo.len();
        let cells: Vec<C> = (0..n).map(|i| program(topo.id(i))).collect();
        let mut in_names = Vec::with_capacity(n);
        let mut out_names = Vec::with_capacity(n);
        let mut out_base = Vec::with_capacity(n);
        let mut nregs = 0;
        for c in &cells {
            let p = c.ports();
            out_base.push(nregs);
            nregs += p.outputs.len();
            in_names.push(p.inputs.iter().map(|s| Arc::from(s.as_str())).collect::<Vec<Arc<str>>>());
            out_names.push(p.outputs.iter().map(|s| Arc::from(s.as_str())).collect::<Vec<Arc<str>>>());
        }

        let find = |names: &[Vec<Arc<str>>], r: &PortRef| -> Result<(usize, usize), EngineError> {
            if !topo.contains(r.cell) {
                return Err(EngineError::OutOfBounds(r.cell));
            }
            let ci = topo.index(r.cell);
            let pi = names[ci]
                .iter()
                .position(|s| **s == *r.port)
                .ok_or_else(|| EngineError::UnknownPort { cell: r.cell, port: r.port.clone() })?;
            Ok((ci, pi))
        };

        let mut wired: Vec<Vec<Option<usize>>> =
            in_names.iter().map(|v| vec![None; v.len()]).collect();
        let mut out_used = vec![false; nregs];
        for w in &spec.wires {
            let (sc, sp) = find(&out_names, &w.from)?;
            let (dc, dp) = find(&in_names, &w.to)?;
            if !topo.adjacent(w.from.cell, w.to.cell) {
                return Err(EngineError::NotNeighbour { from: w.from.clone(), to: w.to.clone() });
            }
            if wired[dc][dp].is_some() {
                return Err(EngineError::DuplicateDestination(w.to.clone()));
            }
            let reg = out_base[sc] + sp;
            wired[dc][dp] = Some(reg);
            out_used[reg] = true;
        }

        let mut boundary_in = Vec::new();
        let in_src = wired
            .iter()
            .enumerate()
            .map(|(ci, ports)| {
                ports
                    .iter()
                    .enumerate()
                    .map(|(pi, w)| match w {
                        Some(r) => Source::Reg(*r),
                        None => {
                            boundary_in.push((ci, pi));
                            Source::Boundary(boundary_in.len() - 1)
                        }
                    })
                    .collect()
            })
            .collect();

        let mut boundary_out = Vec::new();
        let mut reg_boundary = vec![None; nregs];
        for (ci, names) in out_names.iter().enumerate() {
            for pi in 0..names.len() {
                let r = out_base[ci] + pi;
                if !out_used[r] {
                    reg_boundary[r] = Some(boundary_out.len());
                    boundary_out.push((ci, pi));
                }
            }
        }

        let nb = boundary_in.len();
        Ok(Array {
            topology: topo,
            cells,
            in_names,
            out_names,
            in_src,
            out_base,
            regs: vec![PortValue::Empty; nregs],
            next: vec![PortValue::Empty; nregs],
            reg_kind: vec![None; nregs],
            reg_boundary,
            boundary_in,
            boundary_in_kind: vec![None; nb],
            boundary_out,
            activation: spec.activation,
            order: (0..n).collect(),
            tick: 0,
            trace_mode: TraceMode::Full,
            trace: Trace::default(),
            activity: vec![0; n],
            ran: vec![false; n],
            scratch: Vec::new(),
            state_buf: Vec::new(),
        })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn current_tick(&self) -> u64 {
        self.tick
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, id: CellId) -> &C {
        &self.cells[self.topology.index(id)]
    }

    pub fn cells(&self) -> &[C] {
        &self.cells
    }

    pub fn set_trace_mode(&mut self, mode: TraceMode) {
        self.trace_mode = mode;
    }

    /// Evaluates cells in the given order within each tick. The result must
    /// not depend on it; this exists to check that.
    pub fn set_eval_order(&mut self, order: Vec<usize>) -> Result<(), EngineError> {
        let mut seen = vec![false; self.cells.len()];
        if order.len() != seen.len() {
            return Err(EngineError::BadOrder);
        }
        for &i in &order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(EngineError::BadOrder);
            }
        }
        self.order = order;
        Ok(())
    }

    /// Number of ticks each cell (in index order) has been active.
    pub fn activity(&self) -> &[u64] {
        &self.activity
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn take_trace(&mut self) -> Trace {
        std::mem::take(&mut self.trace)
    }

    /// Unwired input ports, in the order used by [`Array::tick_with`].
    pub fn boundary_inputs(&self) -> Vec<PortRef> {
        self.boundary_in.iter().map(|&(c, p)| self.port_ref(&self.in_names, c, p)).collect()
    }

    /// Unwired output ports, in the order reported by [`Array::tick_with`].
    pub fn boundary_outputs(&self) -> Vec<PortRef> {
        self.boundary_out.iter().map(|&(c, p)| self.port_ref(&self.out_names, c, p)).collect()
    }

    pub fn boundary_input_index(&self, cell: CellId, port: &str) -> Option<usize> {
        let ci = self.topology.contains(cell).then(|| self.topology.index(cell))?;
        self.boundary_in.iter().position(|&(c, p)| c == ci && *self.in_names[c][p] == *port)
    }

    pub fn boundary_output_index(&self, cell: CellId, port: &str) -> Option<usize> {
        let ci = self.topology.contains(cell).then(|| self.topology.index(cell))?;
        self.boundary_out.iter().position(|&(c, p)| c == ci && *self.out_names[c][p] == *port)
    }

    /// Current value of an output register.
    pub fn output(&self, cell: CellId, port: &str) -> Option<PortValue> {
        let ci = self.topology.index(cell);
        let pi = self.out_names.get(ci)?.iter().position(|s| **s == *port)?;
        Some(self.regs[self.out_base[ci] + pi])
    }

    fn port_ref(&self, names: &[Vec<Arc<str>>], c: usize, p: usize) -> PortRef {
        PortRef::new(self.topology.id(c), &*names[c][p])
    }

    fn is_active(&self, ci: usize) -> bool {
        match &self.activation {
            None => true,
            Some(f) => f(self.topology.id(ci), self.tick),
        }
    }

    /// Advances one tick. `inputs[i]` feeds boundary input `i`; `Empty`
    /// means "not supplied". Unwired outputs of the cells that ran are
    /// passed to `sink` as (boundary output index, value).
    pub fn tick_with(
        &mut self,
        inputs: &[PortValue],
        mut sink: impl FnMut(usize, PortValue),
    ) -> Result<(), EngineError> {
        let tick = self.tick;
        self.next.copy_from_slice(&self.regs);
        let tracing = self.trace_mode.records(tick);
        self.ran.iter_mut().for_each(|r| *r = false);
        let mut records: Vec<(usize, TraceRecord)> = Vec::new();
        for oi in 0..self.order.len() {
            let ci = self.order[oi];
            if !self.is_active(ci) {
                continue;
            }
            self.ran[ci] = true;
            self.scratch.clear();
            for (pi, src) in self.in_src[ci].iter().enumerate() {
                let v = match *src {
                    Source::Reg(r) => self.regs[r],
                    Source::Boundary(b) => {
                        let v = inputs.get(b).copied().unwrap_or_default();
                        let port = || PortRef::new(self.topology.id(ci), &*self.in_names[ci][pi]);
                        let Some(kind) = v.kind() else {
                            return Err(EngineError::MissingBoundaryInput { port: port(), tick });
                        };
                        match self.boundary_in_kind[b] {
                            None => self.boundary_in_kind[b] = Some(kind),
                            Some(k) if k != kind => {
                                return Err(EngineError::KindMismatch { port: port(), expected: k, found: v })
                            }
                            _ => {}
                        }
                        v
                    }
                };
                self.scratch.push(v);
            }
            let id = self.topology.id(ci);
            let base = self.out_base[ci];
            let nout = self.out_names[ci].len();
            let outs = &mut self.next[base..base + nout];
            self.cells[ci]
                .step(StepCtx { cell: id, tick }, &self.scratch, outs)
                .map_err(|fault| EngineError::Cell { cell: id, tick, fault })?;
            self.activity[ci] += 1;
            for pi in 0..nout {
                let r = base + pi;
                let v = self.next[r];
                let bad = match (self.reg_kind[r], v.kind()) {
                    (None, None) => false,
                    (None, Some(k)) => {
                        self.reg_kind[r] = Some(k);
                        false
                    }
                    (Some(k), Some(f)) => k != f,
                    (Some(_), None) => true,
                };
                if bad {
                    return Err(EngineError::KindMismatch {
                        port: PortRef::new(id, &*self.out_names[ci][pi]),
                        expected: self.reg_kind[r].unwrap_or(PortKind::Bit),
                        found: v,
                    });
                }
            }
            if tracing {
                self.state_buf.clear();
                self.cells[ci].state(&mut self.state_buf);
                let rec = TraceRecord {
                    tick,
                    cell: id,
                    state: self.state_buf.clone(),
                    inputs: self.in_names[ci].iter().cloned().zip(self.scratch.iter().copied()).collect(),
                    outputs: self.out_names[ci]
                        .iter()
                        .cloned()
                        .zip(self.next[base..base + nout].iter().copied())
                        .collect(),
                };
                records.push((ci, rec));
            }
        }
        for (ci, (&base, names)) in self.out_base.iter().zip(&self.out_names).enumerate() {
            // Outputs are reported only for cells that ran this tick.
            if !self.ran[ci] {
                continue;
            }
            for pi in 0..names.len() {
                if let Some(b) = self.reg_boundary[base + pi] {
                    sink(b, self.next[base + pi]);
                }
            }
        }
        if tracing {
            records.sort_by_key(|(ci, _)| *ci);
            self.trace.records.extend(records.into_iter().map(|(_, r)| r));
        }
        std::mem::swap(&mut self.regs, &mut self.next);
        self.tick += 1;
        Ok(())
    }

    /// Map-based form of [`Array::tick_with`].
    pub fn tick(&mut self, inputs: &PortMap) -> Result<PortMap, EngineError> {
        let mut feed = vec![PortValue::Empty; self.boundary_in.len()];
        for (r, v) in inputs {
            let i = self
                .boundary_input_index(r.cell, &r.port)
                .ok_or_else(|| EngineError::NotBoundaryInput(r.clone()))?;
            feed[i] = *v;
        }
        let names = self.boundary_outputs();
        let mut out = PortMap::new();
        self.tick_with(&feed, |b, v| {
            out.insert(names[b].clone(), v);
        })?;
        Ok(out)
    }

    /// Runs `n_ticks` ticks. Outputs are keyed by the tick at which a
    /// neighbour would first see them, one after they were written.
    pub fn run(
        &mut self,
        mut schedule: impl FnMut(u64) -> PortMap,
        n_ticks: u64,
    ) -> Result<(BTreeMap<u64, PortMap>, Trace), EngineError> {
        let mut outputs = BTreeMap::new();
        let before = std::mem::take(&mut self.trace);
        for _ in 0..n_ticks {
            let t = self.tick;
            let out = self.tick(&schedule(t))?;
            if !out.is_empty() {
                outputs.insert(t + 1, out);
            }
        }
        let trace = std::mem::replace(&mut self.trace, before);
        Ok((outputs, trace))
    }
}
