// SPDX-License-Identifier: Apache-2.0
//! Jacobi grid without broadcast.
//!
//! Cell `(i, j)` runs step `s` of a sweep at tick `3s + |i - j|`. Rotation
//! parameters leave the diagonal cell and move one cell per tick along the
//! row and column. The permutation is done by each cell fetching its new
//! block, entry by entry, from the blocks its neighbours published at the
//! end of the previous step. A neighbour two places nearer the diagonal
//! runs its next step before the fetch, so published blocks alternate
//! between two port sets by step parity.
//!
//! The host checks convergence between sweeps. It waits for the last cell
//! to finish before releasing the next sweep, which costs
//! `max(0, h - 3)` idle ticks per sweep boundary.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::grid::{apply_diagonal, diagonal_rotation, permutation_source, permute, rotate_block};
use super::{BlockGrid, EigenError, EigenOptions, Plan, RotationPair, StepRotations, SweepReport};
use crate::engine::{Array, ArraySpec, Cell, CellFault, CellId, PortValue, Ports, StepCtx, Trace};

/// Delay of cell `(i, j)` behind the diagonal.
pub fn delay(i: usize, j: usize) -> u64 {
    i.abs_diff(j) as u64
}

#[derive(Debug)]
struct Schedule {
    per_sweep: u64,
    sweep_len: u64,
    released: AtomicUsize,
}

impl Schedule {
    fn new(h: usize) -> Self {
        let per_sweep = 2 * h as u64 - 1;
        let max_delay = h as u64 - 1;
        Schedule { per_sweep, sweep_len: 3 * (per_sweep - 1) + 3.max(max_delay + 1), released: AtomicUsize::new(0) }
    }

    /// `(sweep, global step)` run by cell `(i, j)` at `tick`.
    fn step_at(&self, i: usize, j: usize, tick: u64) -> Option<(usize, u64)> {
        let r = tick / self.sweep_len;
        if r as usize >= self.released.load(Ordering::Relaxed) {
            return None;
        }
        let rem = (tick % self.sweep_len).checked_sub(delay(i, j))?;
        if rem % 3 != 0 || rem / 3 >= self.per_sweep {
            return None;
        }
        Some((r as usize, r * self.per_sweep + rem / 3))
    }

    /// Tick on which the last cell finishes sweep `r`.
    fn sweep_end(&self, r: usize, h: usize) -> u64 {
        r as u64 * self.sweep_len + 3 * (self.per_sweep - 1) + h as u64 - 1
    }
}

/// Where entry `(a, b)` of block `(i, j)` comes from after a step:
/// `(block row, block col, entry row, entry col)`.
fn source(src: &[usize], i: usize, j: usize, a: usize, b: usize) -> (usize, usize, usize, usize) {
    let (p, q) = (src[2 * i + a], src[2 * j + b]);
    (p / 2, q / 2, p % 2, q % 2)
}

const OUT_ROT: usize = 8;

fn exchange_out(k: usize, parity: u64) -> String {
    format!("e{}{}p{parity}", k / 2, k % 2)
}

fn exchange_in(k: usize, parity: u64) -> String {
    format!("x{}{}p{parity}", k / 2, k % 2)
}

/// One 2x2 block of the grid.
#[derive(Debug, Clone)]
pub struct JacobiCell {
    pub i: usize,
    pub j: usize,
    pub x: [f64; 4],
    /// Block assembled at the start of each step after the first.
    pub history: Vec<[f64; 4]>,
    /// Rotations computed here (diagonal cells only).
    pub rotations: Vec<RotationPair>,
    sched: Arc<Schedule>,
    thresholds: Arc<Vec<f64>>,
    /// Per entry: `None` when the entry comes from this cell, else the input
    /// index of the parity-0 port (parity 1 follows it).
    fetch: [Option<usize>; 4],
    own: [usize; 4],
    rot_in: Option<usize>,
    inputs: Vec<String>,
}

impl JacobiCell {
    fn new(i: usize, j: usize, h: usize, x: [f64; 4], sched: Arc<Schedule>, thresholds: Arc<Vec<f64>>) -> Self {
        let src = permutation_source(2 * h);
        let mut inputs = Vec::new();
        let mut fetch = [None; 4];
        let mut own = [0; 4];
        for k in 0..4 {
            let (si, sj, ea, eb) = source(&src, i, j, k / 2, k % 2);
            if (si, sj) == (i, j) {
                own[k] = 2 * ea + eb;
            } else {
                fetch[k] = Some(inputs.len());
                inputs.push(exchange_in(k, 0));
                inputs.push(exchange_in(k, 1));
            }
        }
        let rot_in = (i != j).then(|| {
            let at = inputs.len();
            inputs.extend(["rcin", "rsin", "ccin", "csin"].map(String::from));
            at
        });
        JacobiCell { i, j, x, history: Vec::new(), rotations: Vec::new(), sched, thresholds, fetch, own, rot_in, inputs }
    }
}

impl Cell for JacobiCell {
    fn ports(&self) -> Ports {
        let mut outputs: Vec<String> = (0..8).map(|k| exchange_out(k % 4, k as u64 / 4)).collect();
        outputs.extend(["rc", "rs", "cc", "cs"].map(String::from));
        Ports { inputs: self.inputs.clone(), outputs }
    }

    fn step(&mut self, ctx: StepCtx, inp: &[PortValue], out: &mut [PortValue]) -> Result<(), CellFault> {
        let (sweep, s) = self
            .sched
            .step_at(self.i, self.j, ctx.tick)
            .ok_or_else(|| CellFault(format!("no step scheduled at tick {}", ctx.tick)))?;
        if s > 0 {
            let parity = ((s - 1) % 2) as usize;
            let old = self.x;
            for k in 0..4 {
                self.x[k] = match self.fetch[k] {
                    None => old[self.own[k]],
                    Some(base) => inp[base + parity].real(),
                };
            }
            self.history.push(self.x);
        }
        let (row, col) = match self.rot_in {
            None => {
                let thr = self.thresholds.get(sweep).copied().unwrap_or(0.0);
                let r = diagonal_rotation(self.x, thr);
                self.x = apply_diagonal(self.x, &r);
                self.rotations.push(r);
                (r, r)
            }
            Some(b) => {
                let rot = |c: f64, s: f64| RotationPair { c, s, t: 0.0, beta: 0.0, performed: true };
                let row = rot(inp[b].real(), inp[b + 1].real());
                let col = rot(inp[b + 2].real(), inp[b + 3].real());
                self.x = rotate_block(self.x, &row, &col);
                (row, col)
            }
        };
        let parity = (s % 2) as usize;
        for k in 0..4 {
            out[parity * 4 + k] = self.x[k].into();
        }
        out[OUT_ROT] = row.c.into();
        out[OUT_ROT + 1] = row.s.into();
        out[OUT_ROT + 2] = col.c.into();
        out[OUT_ROT + 3] = col.s.into();
        Ok(())
    }

    fn state(&self, out: &mut Vec<(&'static str, PortValue)>) {
        out.extend([
            ("alpha", self.x[0].into()),
            ("beta", self.x[1].into()),
            ("gamma", self.x[2].into()),
            ("delta", self.x[3].into()),
        ]);
    }
}

fn build_spec(h: usize, sched: Arc<Schedule>) -> ArraySpec {
    let src = permutation_source(2 * h);
    let mut spec = ArraySpec::grid(h, h);
    for i in 0..h {
        for j in 0..h {
            let to = CellId::new(i, j);
            for k in 0..4 {
                let (si, sj, ea, eb) = source(&src, i, j, k / 2, k % 2);
                if (si, sj) == (i, j) {
                    continue;
                }
                let from = CellId::new(si, sj);
                for p in 0..2 {
                    spec = spec.wire(from, &exchange_out(2 * ea + eb, p), to, &exchange_in(k, p));
                }
            }
            if i != j {
                // Row rotation i arrives from the side nearer (i, i), column
                // rotation j from the side nearer (j, j).
                let row_from = CellId::new(i, if j > i { j - 1 } else { j + 1 });
                let col_from = CellId::new(if i < j { i + 1 } else { i - 1 }, j);
                spec = spec
                    .wire(row_from, "rc", to, "rcin")
                    .wire(row_from, "rs", to, "rsin")
                    .wire(col_from, "cc", to, "ccin")
                    .wire(col_from, "cs", to, "csin");
            }
        }
    }
    spec.activation(move |id, tick| sched.step_at(id.row, id.col, tick).is_some())
}

type DelayedOutcome = (BlockGrid, SweepReport, Vec<BlockGrid>, Vec<StepRotations>, u64, Trace);

pub(super) fn run(grid: BlockGrid, plan: &Plan, opts: &EigenOptions) -> Result<DelayedOutcome, EigenError> {
    let h = grid.half();
    let n = grid.order();
    let big = grid.size();
    let src = permutation_source(big);
    let sched = Arc::new(Schedule::new(h));
    let thresholds = Arc::new(plan.thresholds.clone());
    let spec = build_spec(h, sched.clone());
    let mut arr = Array::build(spec, |id| {
        JacobiCell::new(id.row, id.col, h, grid.block(id.row, id.col), sched.clone(), thresholds.clone())
    })
    .map_err(|e| EigenError::Engine(e.to_string()))?;
    arr.set_trace_mode(opts.trace);

    let shuffle = |t: &[usize]| -> Vec<usize> { src.iter().map(|&s| t[s]).collect() };
    // Post-rotation blocks of the last finished step, permuted on the host.
    let unload = |arr: &Array<JacobiCell>, tracker: &[usize]| {
        let blocks = (0..h * h).map(|k| arr.cell(CellId::new(k / h, k % h)).x).collect();
        permute(&BlockGrid::from_parts(n, h, blocks, tracker.to_vec()))
    };

    let per_sweep = sched.per_sweep as usize;
    let mut current = grid.clone();
    let mut tracker = grid.tracker().to_vec();
    let mut report = SweepReport::default();
    for r in 0..opts.max_sweeps {
        if plan.converged(current.off_norm()) {
            report.converged = true;
            break;
        }
        sched.released.store(r + 1, Ordering::Relaxed);
        let end = sched.sweep_end(r, h);
        while arr.current_tick() <= end {
            arr.tick_with(&[], |_, _| {}).map_err(|e| EigenError::Engine(e.to_string()))?;
        }
        report.sweeps += 1;
        // The tracker before the last permutation of this sweep.
        for _ in 0..per_sweep - 1 {
            tracker = shuffle(&tracker);
        }
        current = unload(&arr, &tracker);
        tracker = current.tracker().to_vec();
    }
    if !report.converged {
        report.converged = plan.converged(current.off_norm());
    }

    let total = report.sweeps * per_sweep;
    let mut steps = Vec::with_capacity(total);
    let mut t = grid.tracker().to_vec();
    for s in 0..total {
        t = shuffle(&t);
        if s + 1 == total {
            steps.push(current.clone());
        } else {
            let blocks = (0..h * h).map(|k| arr.cell(CellId::new(k / h, k % h)).history[s]).collect();
            steps.push(BlockGrid::from_parts(n, h, blocks, t.clone()));
        }
    }
    let rotations: Vec<StepRotations> = (0..total)
        .map(|s| StepRotations { rotations: (0..h).map(|i| arr.cell(CellId::new(i, i)).rotations[s]).collect() })
        .collect();

    report.off_norms = std::iter::once(grid.off_norm()).chain(steps.iter().map(BlockGrid::off_norm)).collect();
    for chunk in rotations.chunks(per_sweep) {
        report.performed.push(chunk.iter().map(StepRotations::performed).sum());
        report.skipped.push(chunk.iter().map(StepRotations::skipped).sum());
    }
    let ticks = arr.current_tick();
    let trace = arr.take_trace();
    Ok((current, report, steps, rotations, ticks, trace))
}
