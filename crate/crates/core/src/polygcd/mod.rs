// SPDX-License-Identifier: Apache-2.0
//! Polynomial GCD over GF(p) on a linear array.
//!
//! Two cell designs are provided. [`Variant::Fig4`] carries the degree
//! difference `d` as an integer beside the leading b coefficient;
//! [`Variant::AppA`] keeps it in unary between two control bits and swaps
//! roles so the result always leaves on the a-line. Both need
//! `deg A + deg B + 1` cells and deliver the first GCD coefficient exactly
//! two ticks per cell after the leading terms enter.
//!
//! ```
//! use systolic_core::gfield::{Field, FieldPoly};
//! use systolic_core::polygcd::{systolic_poly_gcd, Variant};
//!
//! let f = Field::new(7).unwrap();
//! let a = FieldPoly::from_ints(f, &[6, 5, 1]); // (x+2)(x+3)
//! let b = FieldPoly::from_ints(f, &[3, 0, 1]); // (x+2)(x+5)
//! let run = systolic_poly_gcd(&a, &b, Variant::Fig4).unwrap();
//! assert_eq!(run.gcd, FieldPoly::from_ints(f, &[2, 1]));
//! assert_eq!(run.latency, 2 * run.cells as u64);
//! ```

mod cells;
mod frame;
mod sequence;

use thiserror::Error;

use crate::engine::{Array, ArraySpec, EngineError, PortValue, Trace, TraceMode};
use crate::gfield::{Field, FieldError, FieldPoly};

pub use cells::{AppACell, AppAIo, AppANode, AppAState, Fig4Cell, Fig4In, Fig4Node, Fig4Out, Fig4State};
pub use frame::{encode_frame, PolyStreamFrame, Slot};
pub use sequence::{apply_ra, apply_rb, transformation_sequence, TransformKind, Transformation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Fig4,
    AppA,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fig4" => Ok(Variant::Fig4),
            "appa" => Ok(Variant::AppA),
            _ => Err(format!("unknown variant {s:?} (expected fig4 or appA)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyGcdError {
    #[error("both polynomials are zero")]
    BothZero,
    #[error("constant terms are both zero; strip the common power of x first")]
    CommonXFactor,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot decode array output: {0}")]
    Decode(String),
}

/// Result of one GCD computation on the array.
#[derive(Debug, Clone, PartialEq)]
pub struct GcdRun {
    /// Monic GCD.
    pub gcd: FieldPoly,
    /// Ticks from the leading terms entering cell 0 to the first GCD
    /// coefficient leaving the last cell.
    pub latency: u64,
    pub cells: usize,
    pub ticks: u64,
}

struct Prepared {
    frame: PolyStreamFrame,
    shift: usize,
    field: Field,
}

fn prepare(a: &FieldPoly, b: &FieldPoly, variant: Variant) -> Result<Prepared, PolyGcdError> {
    if a.field() != b.field() {
        return Err(FieldError::ModulusMismatch(a.field().modulus(), b.field().modulus()).into());
    }
    if a.is_zero() && b.is_zero() {
        return Err(PolyGcdError::BothZero);
    }
    let shift = match (a.x_order(), b.x_order()) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => unreachable!(),
    };
    let frame = encode_frame(&a.shift_down(shift), &b.shift_down(shift), variant)?;
    Ok(Prepared { frame, shift, field: a.field() })
}

/// Number of cells for a pair after the common power of x is removed.
pub fn cells_needed(frame: &PolyStreamFrame) -> usize {
    (frame.deg_a + frame.deg_b + 1).max(1) as usize
}

/// GCD of one pair on an array of `deg A + deg B + 1` cells.
pub fn systolic_poly_gcd(a: &FieldPoly, b: &FieldPoly, variant: Variant) -> Result<GcdRun, PolyGcdError> {
    Ok(systolic_poly_gcd_traced(a, b, variant, TraceMode::Off)?.0)
}

pub fn systolic_poly_gcd_traced(
    a: &FieldPoly,
    b: &FieldPoly,
    variant: Variant,
    mode: TraceMode,
) -> Result<(GcdRun, Trace), PolyGcdError> {
    let p = prepare(a, b, variant)?;
    let cells = cells_needed(&p.frame);
    let (mut runs, trace) = run_frames(&[p], cells, mode)?;
    Ok((runs.remove(0), trace))
}

/// Several pairs pushed back to back through one array sized for the
/// largest pair.
pub fn pipeline_batch(pairs: &[(FieldPoly, FieldPoly)], variant: Variant) -> Result<Vec<FieldPoly>, PolyGcdError> {
    Ok(pipeline_batch_runs(pairs, variant, TraceMode::Off)?.0.into_iter().map(|r| r.gcd).collect())
}

pub fn pipeline_batch_runs(
    pairs: &[(FieldPoly, FieldPoly)],
    variant: Variant,
    mode: TraceMode,
) -> Result<(Vec<GcdRun>, Trace), PolyGcdError> {
    if pairs.is_empty() {
        return Ok((Vec::new(), Trace::default()));
    }
    let prepared = pairs.iter().map(|(a, b)| prepare(a, b, variant)).collect::<Result<Vec<_>, _>>()?;
    let field = prepared[0].field;
    if let Some(q) = prepared.iter().find(|q| q.field != field) {
        return Err(FieldError::ModulusMismatch(field.modulus(), q.field.modulus()).into());
    }
    let cells = prepared.iter().map(|q| cells_needed(&q.frame)).max().unwrap_or(1);
    run_frames(&prepared, cells, mode)
}

/// One input tick: the values on each input line of cell 0.
#[derive(Clone, Copy)]
struct Beat {
    a: PortValue,
    b: PortValue,
    start: bool,
    stop: bool,
    sig: bool,
    d: i64,
}

impl Beat {
    /// Values for the cell-0 input ports, in port order.
    fn values(&self, variant: Variant) -> [PortValue; 5] {
        match variant {
            Variant::Fig4 => [self.a, self.b, self.start.into(), PortValue::Word(self.d), PortValue::Empty],
            Variant::AppA => [self.a, self.b, self.start.into(), self.stop.into(), self.sig.into()],
        }
    }
}

fn run_frames(frames: &[Prepared], cells: usize, mode: TraceMode) -> Result<(Vec<GcdRun>, Trace), PolyGcdError> {
    let variant = frames[0].frame.variant;
    let field = frames[0].field;
    let zero: PortValue = field.zero().into();
    let idle = Beat { a: zero, b: zero, start: false, stop: false, sig: false, d: 0 };

    // Lay the frames end to end. The degree-difference cell registers its start bit,
    // so that bit travels one tick ahead of the leading slot.
    let mut stream: Vec<Beat> = Vec::new();
    let mut entry = Vec::with_capacity(frames.len());
    let lead = usize::from(variant == Variant::Fig4);
    if lead == 1 {
        stream.push(idle);
    }
    for (fi, f) in frames.iter().enumerate() {
        let s0 = stream.len();
        entry.push(s0 as u64);
        if lead == 1 {
            stream[s0 - 1].start = true;
        }
        for s in &f.frame.slots {
            stream.push(Beat {
                a: s.a.into(),
                b: s.b.into(),
                start: s.start && lead == 0,
                stop: s.stop,
                sig: s.sig,
                d: s.d,
            });
        }
        // A one-slot frame would put the next start bit on its only slot.
        if lead == 1 && f.frame.slots.len() == 1 && fi + 1 < frames.len() {
            stream.push(idle);
        }
    }
    let n_ticks = stream.len() as u64 + 2 * cells as u64 + 2;

    let out = match variant {
        Variant::Fig4 => {
            let spec = ["aout:ain", "bout:bin", "startout:startin", "dout:din"]
                .iter()
                .fold(ArraySpec::linear(cells), |s, w| {
                    let (o, i) = w.split_once(':').unwrap();
                    s.chain(o, i)
                });
            let arr = Array::build(spec, |_| Fig4Node::new(field))?;
            drive(arr, Variant::Fig4, &stream, idle, n_ticks, mode, &["ain", "bin", "startin", "din"], &["aout", "bout", "startout", "dout"])?
        }
        Variant::AppA => {
            let spec = ["aout:ain", "bout:bin", "startout:startin", "stopout:stopin", "sigout:sigin"]
                .iter()
                .fold(ArraySpec::linear(cells), |s, w| {
                    let (o, i) = w.split_once(':').unwrap();
                    s.chain(o, i)
                });
            let arr = Array::build(spec, |_| AppANode::new(field))?;
            drive(
                arr,
                Variant::AppA,
                &stream,
                idle,
                n_ticks,
                mode,
                &["ain", "bin", "startin", "stopin", "sigin"],
                &["aout", "bout", "startout", "stopout", "sigout"],
            )?
        }
    };
    let (seen, trace) = out;
    let decoded = match variant {
        Variant::Fig4 => decode_fig4(&seen, frames)?,
        Variant::AppA => decode_appa(&seen, frames)?,
    };
    let runs = decoded
        .into_iter()
        .zip(frames)
        .zip(entry)
        .map(|(((g, first), f), e)| GcdRun {
            gcd: g.shift_up(f.shift).monic(),
            latency: first - e,
            cells,
            ticks: n_ticks,
        })
        .collect();
    Ok((runs, trace))
}

/// Output of the last cell, indexed by arrival tick.
#[derive(Clone, Copy, Default)]
struct Seen {
    a: u32,
    b: u32,
    start: bool,
    stop: bool,
}

#[allow(clippy::too_many_arguments)]
fn drive<C: crate::engine::Cell>(
    mut arr: Array<C>,
    variant: Variant,
    stream: &[Beat],
    idle: Beat,
    n_ticks: u64,
    mode: TraceMode,
    ins: &[&str],
    outs: &[&str],
) -> Result<(Vec<Seen>, Trace), EngineError> {
    use crate::engine::CellId;
    arr.set_trace_mode(mode);
    let first = CellId::linear(0);
    let last = CellId::linear(arr.len() - 1);
    let slot = |name: &str| arr.boundary_input_index(first, name).expect("cell 0 input is unwired");
    let in_idx: Vec<usize> = ins.iter().map(|n| slot(n)).collect();
    let out_idx: Vec<usize> = outs
        .iter()
        .map(|n| arr.boundary_output_index(last, n).expect("last cell output is unwired"))
        .collect();
    let mut feed = vec![PortValue::Empty; arr.boundary_inputs().len()];
    let mut seen = vec![Seen::default(); n_ticks as usize + 1];
    for t in 0..n_ticks {
        let beat = stream.get(t as usize).copied().unwrap_or(idle);
        let vals = beat.values(variant);
        for (k, &i) in in_idx.iter().enumerate() {
            feed[i] = vals[k];
        }
        let s = &mut seen[t as usize + 1];
        arr.tick_with(&feed, |b, v| {
            let Some(k) = out_idx.iter().position(|&o| o == b) else { return };
            match (k, v) {
                (0, PortValue::Field(e)) => s.a = e.value(),
                (1, PortValue::Field(e)) => s.b = e.value(),
                (2, PortValue::Bit(x)) => s.start = x,
                (3, PortValue::Bit(x)) if variant == Variant::AppA => s.stop = x,
                _ => {}
            }
        })?;
    }
    Ok((seen, arr.take_trace()))
}

fn from_slots(field: Field, high_first: &[u32]) -> FieldPoly {
    let low_first: Vec<i64> = high_first.iter().rev().map(|&c| c as i64).collect();
    FieldPoly::from_ints(field, &low_first)
}

/// Returns, per frame, the surviving polynomial and the arrival tick of
/// its first nonzero coefficient.
fn decode_fig4(seen: &[Seen], frames: &[Prepared]) -> Result<Vec<(FieldPoly, u64)>, PolyGcdError> {
    let marks: Vec<usize> = (0..seen.len()).filter(|&u| seen[u].start).collect();
    if marks.len() != frames.len() {
        return Err(PolyGcdError::Decode(format!("expected {} frames, saw {}", frames.len(), marks.len())));
    }
    let mut res = Vec::with_capacity(frames.len());
    for (&u, f) in marks.iter().zip(frames) {
        let span = u + 1..u + 1 + f.frame.slots.len();
        let window = seen.get(span.clone()).ok_or_else(|| PolyGcdError::Decode("output truncated".into()))?;
        let a: Vec<u32> = window.iter().map(|s| s.a).collect();
        let b: Vec<u32> = window.iter().map(|s| s.b).collect();
        let line = match (a.iter().any(|&x| x != 0), b.iter().any(|&x| x != 0)) {
            (true, false) => a,
            (false, true) => b,
            (true, true) => return Err(PolyGcdError::Decode("both lines nonzero".into())),
            (false, false) => return Err(PolyGcdError::Decode("both lines zero".into())),
        };
        let first = line.iter().position(|&x| x != 0).unwrap();
        // The survivor has a nonzero constant term, so its last nonzero
        // slot is degree 0 and anything after it is padding.
        let last = line.iter().rposition(|&x| x != 0).unwrap();
        res.push((from_slots(f.field, &line[..=last]), (span.start + first) as u64));
    }
    Ok(res)
}

fn decode_appa(seen: &[Seen], frames: &[Prepared]) -> Result<Vec<(FieldPoly, u64)>, PolyGcdError> {
    let mut res = Vec::with_capacity(frames.len());
    let mut u = 0;
    for f in frames {
        while u < seen.len() && !seen[u].start {
            u += 1;
        }
        let end = (u..seen.len())
            .find(|&v| seen[v].stop)
            .ok_or_else(|| PolyGcdError::Decode("missing start/stop pair".into()))?;
        let window = &seen[u..=end];
        if window.iter().any(|s| s.b != 0) {
            return Err(PolyGcdError::Decode("b-line not cleared".into()));
        }
        let a: Vec<u32> = window.iter().map(|s| s.a).collect();
        let first = a
            .iter()
            .position(|&x| x != 0)
            .ok_or_else(|| PolyGcdError::Decode("a-line is zero".into()))?;
        // The trailing pad slot shifts everything up by a power of x.
        let g = from_slots(f.field, &a);
        let g = g.shift_down(g.x_order().unwrap_or(0));
        res.push((g, (u + first) as u64));
        u = end + 1;
    }
    Ok(res)
}
