// SPDX-License-Identifier: Apache-2.0
//! Linear pipeline of [`GcdNode`] cells.

use super::cell::{GcdNode, GCD_INPUTS, GCD_OUTPUTS};
use super::IntGcdError;
use crate::engine::{Array, ArraySpec, CellId, PortValue, Trace, TraceMode};

/// How many cells to allocate for `n`-bit inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellBudget {
    /// `ceil(3.1106 n) + 1`.
    #[default]
    Tight,
    /// `4n`.
    Conservative,
}

pub fn pipeline_cells(n: u32, budget: CellBudget) -> usize {
    let n = n as usize;
    match budget {
        CellBudget::Tight => (31106 * n).div_ceil(10000) + 1,
        CellBudget::Conservative => 4 * n,
    }
}

/// Two operands as `n + 2` bits each, least significant first. The start
/// mark goes with bit 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitFrame {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
}

impl BitFrame {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

pub fn encode_frame(a: u128, b: u128, n: u32) -> BitFrame {
    let l = n as usize + 2;
    let bits = |x: u128| (0..l).map(|i| i < 128 && (x >> i) & 1 == 1).collect();
    BitFrame { a: bits(a), b: bits(b) }
}

/// Reads least-significant-first bits as a two's complement integer.
pub fn decode_word(bits: &[bool]) -> i128 {
    assert!(!bits.is_empty() && bits.len() <= 127, "word length {} out of range", bits.len());
    let mut v: i128 = 0;
    for (i, &bit) in bits.iter().enumerate() {
        if bit {
            v |= 1 << i;
        }
    }
    if bits[bits.len() - 1] {
        v -= 1 << bits.len();
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntGcdRun {
    pub gcd: u128,
    pub cells: usize,
    /// Ticks until the last result bit left the array.
    pub ticks: u64,
    /// Common power of two removed by the host.
    pub shift: u32,
    /// Signed word read from the a-line, before the host takes `|.|`.
    pub raw: i128,
}

pub fn systolic_int_gcd(a: u128, b: u128, n: u32) -> Result<IntGcdRun, IntGcdError> {
    Ok(systolic_int_gcd_with(a, b, n, CellBudget::Tight, TraceMode::Off)?.0)
}

/// GCD of `0 < a, b < 2^n` on a pipeline sized by `budget`.
///
/// The host removes the common power of two and puts an odd operand on
/// the a-line; the array sees one frame followed by zeros.
pub fn systolic_int_gcd_with(
    a: u128,
    b: u128,
    n: u32,
    budget: CellBudget,
    mode: TraceMode,
) -> Result<(IntGcdRun, Trace), IntGcdError> {
    if n == 0 || n > 120 {
        return Err(IntGcdError::BadBitBound(n));
    }
    if a == 0 || b == 0 {
        return Err(IntGcdError::NotPositive);
    }
    for x in [a, b] {
        if x >> n != 0 {
            return Err(IntGcdError::OutOfRange(x as i128));
        }
    }
    let shift = a.trailing_zeros().min(b.trailing_zeros());
    let (mut a, mut b) = (a >> shift, b >> shift);
    if a % 2 == 0 {
        std::mem::swap(&mut a, &mut b);
    }
    let frame = encode_frame(a, b, n);
    let l = frame.len();
    let cells = pipeline_cells(n, budget);

    let spec = GCD_INPUTS
        .iter()
        .zip(GCD_OUTPUTS.iter())
        .fold(ArraySpec::linear(cells), |s, (i, o)| s.chain(o, i));
    let mut arr = Array::build(spec, |_| GcdNode::default())?;
    arr.set_trace_mode(mode);
    let first = CellId::linear(0);
    let last = CellId::linear(cells - 1);
    let in_idx: Vec<usize> = GCD_INPUTS
        .iter()
        .map(|p| arr.boundary_input_index(first, p).expect("cell 0 input is unwired"))
        .collect();
    let a_out = arr.boundary_output_index(last, "aout").expect("aout is unwired");
    let start_out = arr.boundary_output_index(last, "startout").expect("startout is unwired");

    let n_ticks = 2 * cells + 2 * l + 4;
    let mut feed = vec![PortValue::Empty; arr.boundary_inputs().len()];
    let mut a_line = Vec::with_capacity(n_ticks);
    let mut marks = Vec::new();
    for t in 0..n_ticks {
        let inside = t < l;
        let vals = [
            inside && frame.a[t],
            inside && frame.b[t],
            t == 0,
            false,
            false,
            false,
        ];
        for (k, &i) in in_idx.iter().enumerate() {
            feed[i] = vals[k].into();
        }
        let mut a_bit = false;
        arr.tick_with(&feed, |idx, v| {
            if idx == a_out {
                a_bit = v.bit();
            } else if idx == start_out && v.bit() {
                marks.push(t);
            }
        })?;
        a_line.push(a_bit);
    }
    let u = match marks.as_slice() {
        [u] => *u,
        other => return Err(IntGcdError::Decode(format!("expected one start mark, saw {}", other.len()))),
    };
    if u + l > n_ticks {
        return Err(IntGcdError::Decode("result still inside the array".into()));
    }
    let raw = decode_word(&a_line[u..u + l]);
    let run = IntGcdRun {
        gcd: raw.unsigned_abs() << shift,
        cells,
        ticks: (u + l) as u64,
        shift,
        raw,
    };
    Ok((run, arr.take_trace()))
}
