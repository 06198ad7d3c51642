// SPDX-License-Identifier: Apache-2.0
//! Bit-level cell for the plus-minus pipeline.
//!
//! Each cell performs one iteration of the outer loop on a pair streamed
//! least significant bit first. The `a` and `b` lines move at normal speed
//! (two ticks per cell) unless a shift is in progress, in which case one of
//! them moves one tick faster, halving it. `startodd` marks the first odd bit
//! of `b`; `eps` and `neg` carry the sign and magnitude of the bit bound
//! difference in unary.

use crate::engine::{Cell, CellFault, PortValue, Ports, StepCtx};

pub const GCD_INPUTS: [&str; 6] = ["ain", "bin", "startin", "startoddin", "epsin", "negin"];
pub const GCD_OUTPUTS: [&str; 6] = ["aout", "bout", "startout", "startoddout", "epsout", "negout"];

/// Values on the six lines, in port order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GcdLines {
    pub a: bool,
    pub b: bool,
    pub start: bool,
    pub startodd: bool,
    pub eps: bool,
    pub neg: bool,
}

impl GcdLines {
    fn from_ports(v: &[PortValue]) -> Self {
        GcdLines {
            a: v[0].bit(),
            b: v[1].bit(),
            start: v[2].bit(),
            startodd: v[3].bit(),
            eps: v[4].bit(),
            neg: v[5].bit(),
        }
    }

    fn to_ports(self, v: &mut [PortValue]) {
        for (slot, x) in v.iter_mut().zip([self.a, self.b, self.start, self.startodd, self.eps, self.neg]) {
            *slot = x.into();
        }
    }
}

/// The twelve state bits. All start at zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GcdCell {
    pub a: bool,
    pub b: bool,
    pub start: bool,
    pub startodd: bool,
    pub eps: bool,
    pub eps2: bool,
    pub neg: bool,
    pub wait: bool,
    pub shift: bool,
    pub carry: bool,
    pub swap: bool,
    pub minus: bool,
}

impl GcdCell {
    pub fn new() -> Self {
        Self::default()
    }

    /// One cycle of the cell program.
    pub fn cycle(&mut self, i: GcdLines) -> GcdLines {
        let mut aout = self.a;
        self.a = i.a;
        let mut bout = self.b;
        self.b = i.b;
        let startout = self.start;
        self.start = i.start;
        let startoddout = self.startodd;
        self.startodd = i.startodd;
        let mut epsout = self.eps2;
        self.eps2 = self.eps;
        self.eps = i.eps;
        let mut negout = self.neg;

        self.wait = (self.wait || self.start) && !self.startodd;
        let (a, b) = (self.a, self.b);

        if self.startodd || (self.wait && (a || b)) {
            self.eps = self.eps || self.wait;
            self.eps2 = false;
            self.neg = i.neg && !self.wait;
            self.startodd = true;
            self.wait = false;
            self.swap = !a;
            self.shift = !(a && b);
        } else if self.wait {
            epsout = self.eps2;
        } else if self.shift {
            aout = (bout && self.swap) || (aout && !self.swap);
            bout = (a && self.swap) || (b && !self.swap);
            epsout = (self.eps && self.neg) || (epsout && !self.neg);
            self.neg = self.neg && !(self.eps && startoddout);
            negout = self.neg;
        } else if startoddout {
            epsout = self.eps2;
            self.swap = !self.neg;
            self.neg = self.neg || !self.eps2;
            negout = self.neg;
            aout = aout || self.swap;
            bout = false;
            self.carry = a ^ b;
            self.minus = !self.carry;
        } else {
            epsout = self.eps2;
            aout = (bout && self.swap) || (aout && !self.swap);
            bout = a ^ b ^ self.carry;
            let m = a ^ self.minus;
            self.carry = (b && self.carry) || (b && m) || (self.carry && m);
        }

        GcdLines { a: aout, b: bout, start: startout, startodd: startoddout, eps: epsout, neg: negout }
    }
}

/// [`GcdCell`] wrapped for the engine. Drives all six outputs every tick.
#[derive(Debug, Clone, Default)]
pub struct GcdNode {
    pub cell: GcdCell,
}

impl Cell for GcdNode {
    fn ports(&self) -> Ports {
        Ports::new(&GCD_INPUTS, &GCD_OUTPUTS)
    }

    fn step(&mut self, _: StepCtx, i: &[PortValue], o: &mut [PortValue]) -> Result<(), CellFault> {
        self.cell.cycle(GcdLines::from_ports(i)).to_ports(o);
        Ok(())
    }

    fn state(&self, out: &mut Vec<(&'static str, PortValue)>) {
        let c = &self.cell;
        out.extend([
            ("a", c.a.into()),
            ("b", c.b.into()),
            ("start", c.start.into()),
            ("startodd", c.startodd.into()),
            ("eps", c.eps.into()),
            ("eps2", c.eps2.into()),
            ("neg", c.neg.into()),
            ("wait", c.wait.into()),
            ("shift", c.shift.into()),
            ("carry", c.carry.into()),
            ("swap", c.swap.into()),
            ("minus", c.minus.into()),
        ]);
    }
}
