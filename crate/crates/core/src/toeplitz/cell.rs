// SPDX-License-Identifier: Apache-2.0
//! Cell `P_k` of the Toeplitz array.

use crate::engine::{Cell, CellFault, PortValue, Ports, StepCtx};

pub const TOEPLITZ_INPUTS: [&str; 5] = ["inL1", "inL2", "inR1", "inR2", "inR3"];
pub const TOEPLITZ_OUTPUTS: [&str; 5] = ["outL1", "outL2", "outL3", "outR1", "outR2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToeplitzPhase {
    /// LU factorisation: `k <= T < 2n - k`.
    Factor,
    /// Back substitution: `2n + k <= T <= 4n - k`.
    Substitute,
}

impl ToeplitzPhase {
    /// Phase of cell `k` at tick `t`, or `None` when the cell is idle.
    pub fn at(k: u64, n: u64, t: u64) -> Option<Self> {
        if (t + k) % 2 != 0 {
            return None;
        }
        if t >= k && t + k < 2 * n {
            Some(ToeplitzPhase::Factor)
        } else if t >= 2 * n + k && t + k <= 4 * n {
            Some(ToeplitzPhase::Substitute)
        } else {
            None
        }
    }
}

/// Eight registers and a multiplication counter that is not part of the
/// cell state.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCell {
    pub k: u64,
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub xi: f64,
    pub eta: f64,
    pub mults: u64,
    tol: f64,
}

/// Values on the five input lines.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToeplitzIn {
    pub l1: f64,
    pub l2: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

/// Values on the five output lines.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToeplitzOut {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub r1: f64,
    pub r2: f64,
}

impl ToeplitzCell {
    /// Registers loaded from the diagonals `a` and right-hand side `b`
    /// (both returning zero out of range).
    pub fn init(k: usize, n: usize, a: impl Fn(isize) -> f64, b: impl Fn(isize) -> f64, tol: f64) -> Self {
        let ki = k as isize;
        let ni = n as isize;
        ToeplitzCell {
            k: k as u64,
            n: n as u64,
            alpha: a(-(ki + 1)),
            beta: a(ki),
            gamma: a(-ki),
            delta: a(ki + 1),
            lambda: 0.0,
            mu: 0.0,
            xi: b(ni - ki - 1),
            eta: b(ni - ki),
            mults: 0,
            tol,
        }
    }

    fn divide(&self, num: f64, den: f64) -> Result<f64, CellFault> {
        if den.abs() <= self.tol {
            Err(CellFault(format!("singular minor: divisor {den:e} at cell {}", self.k)))
        } else {
            Ok(num / den)
        }
    }

    /// One step at tick `t`. Idle ticks leave everything unchanged and
    /// return `None`.
    pub fn cycle(&mut self, t: u64, i: ToeplitzIn) -> Result<Option<ToeplitzOut>, CellFault> {
        let (k, n) = (self.k, self.n);
        match ToeplitzPhase::at(k, n, t) {
            None => Ok(None),
            Some(ToeplitzPhase::Factor) => {
                if t > k {
                    self.alpha = i.r1;
                    self.delta = i.r2;
                    self.xi = i.r3;
                }
                if k == 0 {
                    self.lambda = self.divide(self.alpha, self.gamma)?;
                } else {
                    self.lambda = i.l1;
                    self.mu = i.l2;
                    self.alpha -= self.lambda * self.gamma;
                    self.mults += 1;
                }
                self.beta -= self.lambda * self.delta;
                self.eta -= self.lambda * self.xi;
                self.mults += 2;
                if k == 0 {
                    self.mu = self.divide(self.delta, self.beta)?;
                } else {
                    self.gamma -= self.mu * self.alpha;
                    self.delta -= self.mu * self.beta;
                    self.xi -= self.mu * self.eta;
                    self.mults += 3;
                }
                Ok(Some(ToeplitzOut { l1: self.alpha, l2: self.delta, l3: self.xi, r1: self.lambda, r2: self.mu }))
            }
            Some(ToeplitzPhase::Substitute) => {
                if t > 2 * n + k {
                    self.lambda = i.r1;
                    self.mu = i.r2;
                    self.eta = i.r3;
                }
                if k == 0 {
                    self.xi = self.divide(self.eta, self.beta)?;
                    self.delta = self.mu * self.beta;
                    self.mults += 1;
                } else {
                    self.xi = i.l1;
                    self.delta = i.l2;
                    self.eta -= self.beta * self.xi;
                    self.delta += self.mu * self.beta;
                    self.mults += 2;
                }
                self.beta += self.lambda * self.delta;
                self.mults += 1;
                Ok(Some(ToeplitzOut { l1: self.lambda, l2: self.mu, l3: self.eta, r1: self.xi, r2: self.delta }))
            }
        }
    }

    pub fn registers(&self) -> [(&'static str, f64); 8] {
        [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("xi", self.xi),
            ("eta", self.eta),
        ]
    }
}

impl Cell for ToeplitzCell {
    fn ports(&self) -> Ports {
        Ports::new(&TOEPLITZ_INPUTS, &TOEPLITZ_OUTPUTS)
    }

    fn step(&mut self, ctx: StepCtx, i: &[PortValue], o: &mut [PortValue]) -> Result<(), CellFault> {
        let input = ToeplitzIn { l1: i[0].real(), l2: i[1].real(), r1: i[2].real(), r2: i[3].real(), r3: i[4].real() };
        if let Some(out) = self.cycle(ctx.tick, input)? {
            for (slot, v) in o.iter_mut().zip([out.l1, out.l2, out.l3, out.r1, out.r2]) {
                *slot = v.into();
            }
        }
        Ok(())
    }

    fn state(&self, out: &mut Vec<(&'static str, PortValue)>) {
        out.extend(self.registers().map(|(name, v)| (name, PortValue::Real(v))));
    }
}
