// SPDX-License-Identifier: Apache-2.0
//! The two polynomial GCD cell programs.

use crate::engine::{Cell, CellFault, PortValue, Ports, StepCtx};
use crate::gfield::{Field, FieldElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fig4State {
    Initial,
    ReduceA,
    ReduceB,
}

/// Cell that tracks the degree difference `d` explicitly.
///
/// In `ReduceA` the a-stream passes in one tick while b spends two, so the
/// reduced A slides one slot forward per cell; `ReduceB` is the mirror.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fig4Cell {
    pub a: FieldElement,
    pub b: FieldElement,
    pub q: FieldElement,
    pub d: i64,
    pub start: bool,
    pub state: Fig4State,
}

pub struct Fig4In {
    pub ain: FieldElement,
    pub bin: FieldElement,
    pub startin: bool,
    pub din: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fig4Out {
    pub aout: FieldElement,
    pub bout: FieldElement,
    pub startout: bool,
    pub dout: i64,
}

fn div(a: FieldElement, b: FieldElement) -> Result<FieldElement, CellFault> {
    a.checked_div(b).map_err(|e| CellFault(e.to_string()))
}

impl Fig4Cell {
    pub fn new(field: Field) -> Self {
        Fig4Cell {
            a: field.zero(),
            b: field.zero(),
            q: field.zero(),
            d: 0,
            start: false,
            state: Fig4State::Initial,
        }
    }

    /// One cycle of the cell program. `prev` holds the outputs of the
    /// previous cycle, which persist unless driven.
    pub fn cycle(&mut self, i: Fig4In, prev: Fig4Out) -> Result<Fig4Out, CellFault> {
        let zero = self.a.field().zero();
        let mut o = prev;
        o.dout = self.d;
        o.startout = self.start;
        match self.state {
            Fig4State::Initial => {
                o.aout = self.a;
                o.bout = self.b;
                if self.start {
                    if i.ain.is_zero() || (!i.bin.is_zero() && i.din >= 0) {
                        self.state = Fig4State::ReduceA;
                        self.q = if i.bin.is_zero() { zero } else { div(i.ain, i.bin)? };
                        self.a = zero;
                        self.b = i.bin;
                        self.d = i.din - 1;
                    } else {
                        self.state = Fig4State::ReduceB;
                        self.q = div(i.bin, i.ain)?;
                        self.b = zero;
                        self.a = i.ain;
                        self.d = i.din + 1;
                    }
                }
            }
            Fig4State::ReduceA => {
                if i.startin {
                    self.state = Fig4State::Initial;
                }
                o.aout = i.ain - self.q * i.bin;
                o.bout = self.b;
                self.b = i.bin;
                self.d = i.din;
            }
            Fig4State::ReduceB => {
                if i.startin {
                    self.state = Fig4State::Initial;
                }
                o.aout = self.a;
                self.a = i.ain;
                o.bout = i.bin - self.q * i.ain;
                self.d = i.din;
            }
        }
        self.start = i.startin;
        Ok(o)
    }
}

/// Port-level wrapper that runs a [`Fig4Cell`] on the engine.
pub struct Fig4Node {
    pub cell: Fig4Cell,
    field: Field,
}

impl Fig4Node {
    pub fn new(field: Field) -> Self {
        Fig4Node { cell: Fig4Cell::new(field), field }
    }
}

impl Cell for Fig4Node {
    fn ports(&self) -> Ports {
        Ports::new(&["ain", "bin", "startin", "din"], &["aout", "bout", "startout", "dout"])
    }

    fn step(&mut self, _: StepCtx, i: &[PortValue], o: &mut [PortValue]) -> Result<(), CellFault> {
        let f = self.field;
        let input = Fig4In { ain: i[0].field(f), bin: i[1].field(f), startin: i[2].bit(), din: i[3].word() };
        let prev = Fig4Out { aout: o[0].field(f), bout: o[1].field(f), startout: o[2].bit(), dout: o[3].word() };
        let out = self.cell.cycle(input, prev)?;
        o[0] = out.aout.into();
        o[1] = out.bout.into();
        o[2] = out.startout.into();
        o[3] = out.dout.into();
        Ok(())
    }

    fn state(&self, out: &mut Vec<(&'static str, PortValue)>) {
        let c = &self.cell;
        out.extend([
            ("a", c.a.into()),
            ("b", c.b.into()),
            ("q", c.q.into()),
            ("d", c.d.into()),
            ("start", c.start.into()),
            ("state", PortValue::Word(c.state as i64)),
        ]);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppAState {
    Initial,
    Shift,
    Swap,
    Trans,
}

/// Cell that keeps the degree difference in unary, as the distance between
/// the `start` and `sig` marks, and interchanges A and B so that the GCD
/// always leaves on the a-line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppACell {
    pub a: FieldElement,
    pub b: FieldElement,
    pub q: FieldElement,
    pub start: bool,
    pub stop: bool,
    pub sig: bool,
    pub state: AppAState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppAIo {
    pub a: FieldElement,
    pub b: FieldElement,
    pub start: bool,
    pub stop: bool,
    pub sig: bool,
}

impl AppACell {
    pub fn new(field: Field) -> Self {
        AppACell {
            a: field.zero(),
            b: field.zero(),
            q: field.zero(),
            start: false,
            stop: false,
            sig: false,
            state: AppAState::Initial,
        }
    }

    pub fn cycle(&mut self, i: AppAIo) -> Result<AppAIo, CellFault> {
        let zero = self.a.field().zero();
        let mut o = AppAIo { a: self.a, b: self.b, start: self.start, stop: self.stop, sig: self.sig };
        self.a = i.a;
        self.b = i.b;
        self.start = i.start;
        self.stop = i.stop;
        self.sig = i.sig;
        match self.state {
            AppAState::Initial => {
                if self.start && !self.stop {
                    if self.b.is_zero() {
                        self.state = AppAState::Shift;
                    } else {
                        self.q = div(self.a, self.b)?;
                        if self.sig {
                            self.state = AppAState::Swap;
                            self.a = self.b;
                            self.sig = false;
                        } else {
                            self.state = AppAState::Trans;
                        }
                    }
                }
            }
            AppAState::Shift => {
                o.b = self.b;
                self.b = zero;
                if self.stop {
                    self.state = AppAState::Initial;
                }
            }
            AppAState::Swap => {
                o.b = self.a - self.q * self.b;
                self.a = self.b;
                self.b = zero;
                self.sig = !o.b.is_zero();
                if self.stop {
                    self.state = AppAState::Initial;
                }
            }
            AppAState::Trans => {
                o.a = self.a - self.q * self.b;
                self.a = zero;
                if self.stop {
                    self.state = AppAState::Initial;
                }
                o.stop = self.stop;
                self.stop = false;
                o.sig = self.sig;
                self.sig = false;
            }
        }
        Ok(o)
    }
}

pub struct AppANode {
    pub cell: AppACell,
    field: Field,
}

impl AppANode {
    pub fn new(field: Field) -> Self {
        AppANode { cell: AppACell::new(field), field }
    }
}

impl Cell for AppANode {
    fn ports(&self) -> Ports {
        Ports::new(
            &["ain", "bin", "startin", "stopin", "sigin"],
            &["aout", "bout", "startout", "stopout", "sigout"],
        )
    }

    fn step(&mut self, _: StepCtx, i: &[PortValue], o: &mut [PortValue]) -> Result<(), CellFault> {
        let f = self.field;
        let input = AppAIo { a: i[0].field(f), b: i[1].field(f), start: i[2].bit(), stop: i[3].bit(), sig: i[4].bit() };
        let out = self.cell.cycle(input)?;
        o[0] = out.a.into();
        o[1] = out.b.into();
        o[2] = out.start.into();
        o[3] = out.stop.into();
        o[4] = out.sig.into();
        Ok(())
    }

    fn state(&self, out: &mut Vec<(&'static str, PortValue)>) {
        let c = &self.cell;
        out.extend([
            ("a", c.a.into()),
            ("b", c.b.into()),
            ("q", c.q.into()),
            ("start", c.start.into()),
            ("stop", c.stop.into()),
            ("sig", c.sig.into()),
            ("state", PortValue::Word(c.state as i64)),
        ]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    #[test]
    fn fig4_initial_chooses_reduce_a() {
        let f = gf(2);
        let mut c = Fig4Cell::new(f);
        c.start = true;
        let prev = Fig4Out { aout: f.zero(), bout: f.zero(), startout: false, dout: 0 };
        c.cycle(Fig4In { ain: f.one(), bin: f.one(), startin: false, din: 0 }, prev).unwrap();
        assert_eq!(c.state, Fig4State::ReduceA);
        assert_eq!(c.q, f.one());
        assert_eq!(c.a, f.zero());
        assert_eq!(c.d, -1);
    }

    #[test]
    fn fig4_zero_a_gives_zero_multiplier() {
        let f = gf(7);
        let mut c = Fig4Cell::new(f);
        c.start = true;
        let prev = Fig4Out { aout: f.zero(), bout: f.zero(), startout: false, dout: 0 };
        c.cycle(Fig4In { ain: f.zero(), bin: f.one(), startin: false, din: -1 }, prev).unwrap();
        assert_eq!(c.state, Fig4State::ReduceA);
        assert_eq!(c.q, f.zero());
    }

    #[test]
    fn fig4_reduce_a_cancels() {
        let f = gf(2);
        let mut c = Fig4Cell::new(f);
        c.state = Fig4State::ReduceA;
        c.q = f.one();
        let prev = Fig4Out { aout: f.one(), bout: f.zero(), startout: false, dout: 0 };
        let o = c.cycle(Fig4In { ain: f.one(), bin: f.one(), startin: false, din: 0 }, prev).unwrap();
        assert_eq!(o.aout, f.zero());
    }

    #[test]
    fn appa_zero_b_shifts() {
        let f = gf(7);
        let mut c = AppACell::new(f);
        let i = AppAIo { a: f.elem(3), b: f.zero(), start: true, stop: false, sig: false };
        c.cycle(i).unwrap();
        assert_eq!(c.state, AppAState::Shift);
    }

    #[test]
    fn appa_swap_cancels_and_clears_sig() {
        let f = gf(2);
        let mut c = AppACell::new(f);
        c.state = AppAState::Swap;
        c.q = f.one();
        let i = AppAIo { a: f.one(), b: f.one(), start: false, stop: false, sig: true };
        let o = c.cycle(i).unwrap();
        assert_eq!(o.b, f.zero());
        assert!(!c.sig);
    }

    #[test]
    fn appa_trans_returns_on_stop() {
        let f = gf(7);
        let mut c = AppACell::new(f);
        c.state = AppAState::Trans;
        let i = AppAIo { a: f.zero(), b: f.zero(), start: false, stop: true, sig: false };
        let o = c.cycle(i).unwrap();
        assert_eq!(c.state, AppAState::Initial);
        // In trans the stop mark overtakes the a-stream by one cycle.
        assert!(o.stop);
    }
}
