// SPDX-License-Identifier: Apache-2.0
//! Seeded random instances run on the arrays and checked against the
//! serial oracles.

use clap::ValueEnum;
use serde_json::Value;

use systolic_core::eigen::{run_sweeps, EigenOptions, Mode, CONVERGENCE};
use systolic_core::gen::{self, InstanceRng};
use systolic_core::gfield::Field;
use systolic_core::intgcd::{pipeline_cells, systolic_int_gcd_with, CellBudget};
use systolic_core::oracle::{dense_lu_solve_nopivot, euclid_int_gcd, euclid_poly_gcd, serial_cyclic_jacobi};
use systolic_core::polygcd::{systolic_poly_gcd_traced, Variant};
use systolic_core::toeplitz::systolic_toeplitz_solve_traced;
use systolic_core::{Trace, TraceMode};

use crate::report::{big, row, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Polygcd,
    Intgcd,
    Toeplitz,
    Eigen,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Polygcd => "polygcd",
            Family::Intgcd => "intgcd",
            Family::Toeplitz => "toeplitz",
            Family::Eigen => "eigen",
        }
    }
}

pub const POLY_PRIMES: [u64; 3] = [2, 7, 257];
pub const POLY_MAX_DEGREE: usize = 16;
pub const INT_MAX_BITS: u32 = 64;
pub const TOEPLITZ_ORDERS: [usize; 5] = [4, 8, 16, 32, 64];
pub const EIGEN_ORDERS: [usize; 4] = [4, 8, 16, 32];
/// Largest order also run in delayed mode and compared step by step.
pub const EIGEN_DELAYED_MAX: usize = 16;
pub const TOEPLITZ_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-8;
pub const OFF_DROP_TOL: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 10;

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub report: Report,
    pub trace: Trace,
    pub total: usize,
    pub failed: usize,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

/// Runs `count` instances of `family` drawn from `seed`.
///
/// Instance `i` uses size parameter `i mod k` from the family's list, so
/// every size is covered once `count` reaches the list length. The
/// Toeplitz family appends one instance with `a_0 = 0` that must be
/// reported as singular.
pub fn verify(family: Family, count: usize, seed: u64, traced: bool) -> VerifyOutcome {
    let mut rng = gen::rng(seed);
    let mode = if traced { TraceMode::Full } else { TraceMode::Off };
    let mut ctx = Ctx { report: Report::new(), trace: Trace::default(), failed: 0, total: 0 };
    ctx.report.set("family", family.name()).set("seed", seed).set("count", count);
    match family {
        Family::Polygcd => polygcd(&mut ctx, &mut rng, count, mode),
        Family::Intgcd => intgcd(&mut ctx, &mut rng, count, mode),
        Family::Toeplitz => toeplitz(&mut ctx, &mut rng, count, mode),
        Family::Eigen => eigen(&mut ctx, &mut rng, count, mode),
    }
    ctx.report.set("passed", ctx.total - ctx.failed).set("failed", ctx.failed);
    VerifyOutcome { report: ctx.report, trace: ctx.trace, total: ctx.total, failed: ctx.failed }
}

struct Ctx {
    report: Report,
    trace: Trace,
    failed: usize,
    total: usize,
}

impl Ctx {
    fn record(&mut self, pass: bool) {
        self.total += 1;
        if !pass {
            self.failed += 1;
        }
    }
}

fn polygcd(ctx: &mut Ctx, rng: &mut InstanceRng, count: usize, mode: TraceMode) {
    let mut max_latency = 0u64;
    let mut max_ratio = 0f64;
    for i in 0..count {
        let p = POLY_PRIMES[i % POLY_PRIMES.len()];
        let field = Field::new(p).expect("listed moduli are prime");
        let (a, b) = gen::poly_pair(rng, field, POLY_MAX_DEGREE);
        let (m, n) = (a.degree() as u64, b.degree() as u64);
        let bound = 2 * (m + n + 1);
        let want = euclid_poly_gcd(&a, &b).expect("generated pairs are nonzero");
        let mut pass = true;
        let mut latency = 0;
        let mut cells = 0;
        for variant in [Variant::Fig4, Variant::AppA] {
            match systolic_poly_gcd_traced(&a, &b, variant, mode) {
                Ok((run, t)) => {
                    pass &= run.gcd == want && run.latency <= bound && run.cells as u64 == m + n + 1;
                    latency = latency.max(run.latency);
                    cells = run.cells;
                    ctx.trace.append(t);
                }
                Err(_) => pass = false,
            }
        }
        max_latency = max_latency.max(latency);
        max_ratio = max_ratio.max(latency as f64 / bound as f64);
        ctx.record(pass);
        ctx.report.push_row(row([
            ("i", i.into()),
            ("p", p.into()),
            ("deg_a", m.into()),
            ("deg_b", n.into()),
            ("deg_gcd", want.degree().into()),
            ("cells", cells.into()),
            ("latency", latency.into()),
            ("bound", bound.into()),
            ("pass", pass.into()),
        ]));
    }
    ctx.report.set("max_latency", max_latency).set("max_latency_ratio", max_ratio);
}

fn intgcd(ctx: &mut Ctx, rng: &mut InstanceRng, count: usize, mode: TraceMode) {
    use rand::Rng;
    let mut max_ticks = 0u64;
    for i in 0..count {
        let n = rng.random_range(1..=INT_MAX_BITS);
        let (a, b) = gen::int_pair(rng, n);
        let want = euclid_int_gcd(a as i128, b as i128).expect("operands are nonzero");
        let (pass, cells, ticks, got) = match systolic_int_gcd_with(a, b, n, CellBudget::Tight, mode) {
            Ok((run, t)) => {
                ctx.trace.append(t);
                (run.gcd == want && run.cells == pipeline_cells(n, CellBudget::Tight), run.cells, run.ticks, run.gcd)
            }
            Err(_) => (false, 0, 0, 0),
        };
        max_ticks = max_ticks.max(ticks);
        ctx.record(pass);
        ctx.report.push_row(row([
            ("i", i.into()),
            ("bits", n.into()),
            ("a", big(a)),
            ("b", big(b)),
            ("gcd", big(got)),
            ("expected", big(want)),
            ("cells", cells.into()),
            ("ticks", ticks.into()),
            ("pass", pass.into()),
        ]));
    }
    ctx.report.set("max_ticks", max_ticks);
}

/// Relative error in the max norm.
fn rel_error(x: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    x.iter().zip(want).fold(0f64, |m, (a, b)| m.max((a - b).abs())) / scale
}

pub fn toeplitz_mult_bound(n: usize) -> f64 {
    4.5 * (n * n) as f64 + 20.0 * n as f64
}

fn toeplitz(ctx: &mut Ctx, rng: &mut InstanceRng, count: usize, mode: TraceMode) {
    let mut max_err = 0f64;
    for i in 0..count {
        let n = TOEPLITZ_ORDERS[i % TOEPLITZ_ORDERS.len()];
        let t = gen::toeplitz_dominant(rng, n);
        let (want, _) = dense_lu_solve_nopivot(&t.to_dense(), t.rhs()).expect("dominant matrices are regular");
        let (pass, err, final_tick, mults, regs) = match systolic_toeplitz_solve_traced(&t, mode) {
            Ok((run, tr)) => {
                ctx.trace.append(tr);
                let err = rel_error(&run.x, &want);
                let pass = err < TOEPLITZ_TOL
                    && run.final_tick == 4 * n as u64
                    && run.registers_per_cell == 8
                    && run.multiplications as f64 <= toeplitz_mult_bound(n);
                (pass, err, run.final_tick, run.multiplications, run.registers_per_cell)
            }
            Err(_) => (false, f64::INFINITY, 0, 0, 0),
        };
        max_err = max_err.max(err);
        ctx.record(pass);
        ctx.report.push_row(row([
            ("i", i.into()),
            ("n", n.into()),
            ("status", if pass { "solved" } else { "mismatch" }.into()),
            ("rel_error", finite(err)),
            ("final_tick", final_tick.into()),
            ("multiplications", mults.into()),
            ("registers", regs.into()),
            ("pass", pass.into()),
        ]));
    }
    // Singular leading minor: the array must refuse, not answer.
    let n = 8;
    let t = gen::toeplitz_singular(rng, n);
    let (pass, status) = match systolic_toeplitz_solve_traced(&t, mode) {
        Err(e) if e.is_singular() => (true, "expected-singular"),
        Err(_) => (false, "error"),
        Ok(_) => (false, "unexpected-solution"),
    };
    ctx.record(pass);
    ctx.report.push_row(row([
        ("i", count.into()),
        ("n", n.into()),
        ("status", status.into()),
        ("pass", pass.into()),
    ]));
    ctx.report.set("max_rel_error", finite(max_err));
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        v.into()
    } else {
        Value::String("inf".into())
    }
}

/// Largest violation of `off_k^2 - off_{k+1}^2 = 2 sum beta^2` over the
/// steps of a run, relative to `||A||_F^2`.
pub fn off_drop_error(off_norms: &[f64], annihilated: &[f64], norm: f64) -> f64 {
    let scale = (norm * norm).max(f64::MIN_POSITIVE);
    off_norms
        .windows(2)
        .zip(annihilated)
        .map(|(w, s)| ((w[0] * w[0] - w[1] * w[1]) - 2.0 * s).abs() / scale)
        .fold(0.0, f64::max)
}

fn eigen(ctx: &mut Ctx, rng: &mut InstanceRng, count: usize, mode: TraceMode) {
    let mut max_err = 0f64;
    let mut max_sweeps = 0usize;
    for i in 0..count {
        let n = EIGEN_ORDERS[i % EIGEN_ORDERS.len()];
        let (a, _) = gen::symmetric(rng, n, 1.0);
        let norm = a.frobenius();
        let mut want = serial_cyclic_jacobi(&a, 1e-14, 50).expect("generated matrices are symmetric").values;
        want.sort_by(f64::total_cmp);
        let delayed = n <= EIGEN_DELAYED_MAX;
        let opts = EigenOptions { max_sweeps: MAX_SWEEPS, record_steps: delayed, ..Default::default() };
        let Ok(run) = run_sweeps(&a, &opts) else {
            ctx.record(false);
            ctx.report.push_row(row([("i", i.into()), ("n", n.into()), ("pass", false.into())]));
            continue;
        };
        let got = run.sorted_values();
        let err = got.iter().zip(&want).fold(0f64, |m, (x, y)| m.max((x - y).abs())) / norm.max(f64::MIN_POSITIVE);
        let drops: Vec<f64> = run.rotations.iter().map(|r| r.annihilated()).collect();
        let drop_err = off_drop_error(&run.report.off_norms, &drops, norm);
        let mut pass = err < EIGEN_TOL && run.report.converged && run.report.sweeps <= MAX_SWEEPS && drop_err < OFF_DROP_TOL;
        let mut same = Value::Null;
        if delayed {
            let d = run_sweeps(&a, &EigenOptions { mode: Mode::Delayed, trace: mode, ..opts.clone() });
            let eq = match d {
                Ok(d) => {
                    let eq = d.steps == run.steps && d.values == run.values && d.report == run.report;
                    ctx.trace.append(d.trace);
                    eq
                }
                Err(_) => false,
            };
            pass &= eq;
            same = eq.into();
        }
        max_err = max_err.max(err);
        max_sweeps = max_sweeps.max(run.report.sweeps);
        ctx.record(pass);
        ctx.report.push_row(row([
            ("i", i.into()),
            ("n", n.into()),
            ("sweeps", run.report.sweeps.into()),
            ("converged", run.report.converged.into()),
            ("error", err.into()),
            ("off_drop_error", drop_err.into()),
            ("delayed_equal", same),
            ("pass", pass.into()),
        ]));
    }
    ctx.report
        .set("max_error", max_err)
        .set("max_sweeps", max_sweeps)
        .set("convergence", CONVERGENCE);
}
