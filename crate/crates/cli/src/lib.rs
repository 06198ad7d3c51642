// SPDX-License-Identifier: Apache-2.0
//! Command-line front end for the systolic array simulators.
//!
//! [`Cli`] is the argument grammar and [`run`] executes one parsed command,
//! writing its report to the given sink. The binary only maps
//! [`CliError`] to an exit status.

pub mod input;
pub mod report;
pub mod verify;

use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use thiserror::Error;

use systolic_core::eigen::{run_sweeps, EigenError, EigenOptions, Mode};
use systolic_core::gfield::{parse_coeffs, Field, FieldPoly};
use systolic_core::intgcd::{pm_precursor, pm_serial_steps, systolic_int_gcd_with, CellBudget, IntGcdError};
use systolic_core::polygcd::{systolic_poly_gcd_traced, PolyGcdError, Variant};
use systolic_core::toeplitz::{bareiss_solve, relative_residual, systolic_toeplitz_solve_traced, ToeplitzBands, ToeplitzError};
use systolic_core::{Trace, TraceMode};

pub use report::{Format, Report};
pub use verify::{verify, Family, VerifyOutcome};

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("numerical breakdown: {0}")]
    Breakdown(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Breakdown(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "systolic", version, about = "Cycle-accurate systolic array simulators")]
pub struct Cli {
    /// Seed for generated instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the engine trace as NDJSON to this file.
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntMode {
    Serial,
    Precursor,
    Systolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Serial,
    Systolic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polynomial GCD over GF(p) on the linear array.
    Polygcd {
        #[arg(long)]
        p: u64,
        /// Coefficients, constant term first, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// fig4 or appA.
        #[arg(long, default_value = "fig4")]
        variant: Variant,
    },
    /// Integer GCD by the plus-minus algorithm.
    Intgcd {
        #[arg(long, allow_hyphen_values = true)]
        a: i128,
        #[arg(long, allow_hyphen_values = true)]
        b: i128,
        /// Bit bound n; defaults to the smallest that fits both operands.
        #[arg(long)]
        bits: Option<u32>,
        #[arg(long, value_enum, default_value_t = IntMode::Systolic)]
        mode: IntMode,
        /// Size the pipeline with 4n cells instead of the tight bound.
        #[arg(long)]
        conservative: bool,
    },
    /// Toeplitz system of order n+1 by the Bareiss recursions.
    Toeplitz {
        /// Band half-width n; the system has n+1 unknowns.
        #[arg(long)]
        n: usize,
        /// 2n+1 reals a_-n..a_n.
        #[arg(long)]
        bands: PathBuf,
        /// n+1 reals b_0..b_n.
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMode::Systolic)]
        mode: SolveMode,
    },
    /// Symmetric eigenvalues by parallel Jacobi.
    Eigen {
        /// Order n, then the lower triangle row by row.
        #[arg(long)]
        matrix: PathBuf,
        /// broadcast or delayed.
        #[arg(long, default_value = "broadcast")]
        mode: Mode,
        #[arg(long, default_value_t = 10)]
        max_sweeps: usize,
        #[arg(long)]
        vectors: bool,
    },
    /// Random instances against the serial oracles.
    Verify {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Per-cell utilisation of an NDJSON trace.
    TraceStats { file: PathBuf },
}

/// Executes `cli`, writing the report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let mode = if cli.trace.is_some() { TraceMode::Full } else { TraceMode::Off };
    let (report, trace, failure) = match &cli.command {
        Command::Polygcd { p, a, b, variant } => {
            let (r, t) = polygcd(*p, a, b, *variant, mode)?;
            (r, t, None)
        }
        Command::Intgcd { a, b, bits, mode: m, conservative } => {
            let budget = if *conservative { CellBudget::Conservative } else { CellBudget::Tight };
            let (r, t) = intgcd(*a, *b, *bits, *m, budget, mode)?;
            (r, t, None)
        }
        Command::Toeplitz { n, bands, rhs, mode: m } => {
            let (r, t) = toeplitz(*n, bands, rhs, *m, mode)?;
            (r, t, None)
        }
        Command::Eigen { matrix, mode: m, max_sweeps, vectors } => {
            let (r, t) = eigen(matrix, *m, *max_sweeps, *vectors, mode)?;
            (r, t, None)
        }
        Command::Verify { family, count } => {
            let o = verify(*family, *count, cli.seed, cli.trace.is_some());
            let failed = o.failed;
            (o.report, o.trace, (failed > 0).then(|| format!("{failed} of {} instances failed", o.total)))
        }
        Command::TraceStats { file } => (trace_stats(file)?, Trace::default(), None),
    };
    if let Some(path) = &cli.trace {
        let f = std::fs::File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        trace
            .write_ndjson(std::io::BufWriter::new(f))
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    out.write_all(report.render(cli.format).as_bytes()).map_err(|e| CliError::Usage(e.to_string()))?;
    match failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn poly_error(e: PolyGcdError) -> CliError {
    match e {
        PolyGcdError::Engine(_) | PolyGcdError::Decode(_) => CliError::Breakdown(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

fn polygcd(p: u64, a: &str, b: &str, variant: Variant, mode: TraceMode) -> Result<(Report, Trace), CliError> {
    let field = Field::new(p).map_err(|e| CliError::Usage(e.to_string()))?;
    let parse = |s: &str| {
        parse_coeffs(s)
            .map(|c| FieldPoly::from_ints(field, &c))
            .ok_or_else(|| CliError::Usage(format!("bad coefficient list {s:?}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    // The array needs a nonzero constant term; a common x^e is restored here.
    let e = match (a.x_order(), b.x_order()) {
        (Some(x), Some(y)) => x.min(y),
        _ => 0,
    };
    let (run, trace) = systolic_poly_gcd_traced(&a.shift_down(e), &b.shift_down(e), variant, mode).map_err(poly_error)?;
    let gcd = run.gcd.shift_up(e);
    let coeffs: Vec<u32> = gcd.coeffs().iter().map(|c| c.value()).collect();
    let mut r = Report::new();
    r.set("gcd", gcd.to_string())
        .set("coefficients", coeffs)
        .set("degree", gcd.degree())
        .set("latency", run.latency)
        .set("cells", run.cells)
        .set("ticks", run.ticks);
    Ok((r, trace))
}

fn int_error(e: IntGcdError) -> CliError {
    match e {
        IntGcdError::NoTermination(_) | IntGcdError::Engine(_) | IntGcdError::Decode(_) => CliError::Breakdown(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

fn bit_length(x: u128) -> u32 {
    128 - x.leading_zeros()
}

fn intgcd(
    a: i128,
    b: i128,
    bits: Option<u32>,
    mode: IntMode,
    budget: CellBudget,
    trace: TraceMode,
) -> Result<(Report, Trace), CliError> {
    let mut r = Report::new();
    match mode {
        IntMode::Serial => {
            let o = pm_serial_steps(a, b).map_err(int_error)?;
            r.set("gcd", report::big(o.gcd)).set("iterations", o.iterations);
            Ok((r, Trace::default()))
        }
        IntMode::Precursor => {
            // Smallest n with |a|, |b| <= 2^n.
            let n = bits.unwrap_or_else(|| bit_length(a.unsigned_abs().max(b.unsigned_abs()).saturating_sub(1)).max(1));
            let o = pm_precursor(a, b, n).map_err(int_error)?;
            r.set("gcd", report::big(o.gcd)).set("bits", n).set("iterations", o.iterations).set("bound", 2 * n + 1);
            Ok((r, Trace::default()))
        }
        IntMode::Systolic => {
            if a <= 0 || b <= 0 {
                return Err(CliError::Usage("the systolic pipeline takes positive operands".into()));
            }
            let (ua, ub) = (a as u128, b as u128);
            let n = bits.unwrap_or_else(|| bit_length(ua.max(ub)));
            let (run, t) = systolic_int_gcd_with(ua, ub, n, budget, trace).map_err(int_error)?;
            r.set("gcd", report::big(run.gcd))
                .set("bits", n)
                .set("cells", run.cells)
                .set("ticks", run.ticks)
                .set("shift", run.shift)
                .set("raw", report::big_signed(run.raw));
            Ok((r, t))
        }
    }
}

fn toeplitz_error(e: ToeplitzError) -> CliError {
    match e {
        ToeplitzError::Shape { .. } | ToeplitzError::NotFinite => CliError::Usage(e.to_string()),
        _ => CliError::Breakdown(e.to_string()),
    }
}

fn toeplitz(n: usize, bands: &Path, rhs: &Path, mode: SolveMode, trace: TraceMode) -> Result<(Report, Trace), CliError> {
    let diag = input::read_reals(bands, 2 * n + 1)?;
    let b = input::read_reals(rhs, n + 1)?;
    let t = ToeplitzBands::new(diag, b).map_err(toeplitz_error)?;
    let mut r = Report::new();
    let tr = match mode {
        SolveMode::Serial => {
            let x = bareiss_solve(&t).map_err(toeplitz_error)?;
            r.set("x", x.clone()).set("residual", relative_residual(&t, &x));
            Trace::default()
        }
        SolveMode::Systolic => {
            let (run, tr) = systolic_toeplitz_solve_traced(&t, trace).map_err(toeplitz_error)?;
            r.set("x", run.x.clone())
                .set("residual", relative_residual(&t, &run.x))
                .set("cells", n + 1)
                .set("final_tick", run.final_tick)
                .set("ticks", run.ticks)
                .set("multiplications", run.multiplications)
                .set("registers_per_cell", run.registers_per_cell);
            tr
        }
    };
    Ok((r, tr))
}

fn eigen(path: &Path, mode: Mode, max_sweeps: usize, vectors: bool, trace: TraceMode) -> Result<(Report, Trace), CliError> {
    let a = input::read_matrix(path)?;
    let opts = EigenOptions { mode, max_sweeps, vectors, trace, ..Default::default() };
    let run = run_sweeps(&a, &opts).map_err(|e| match e {
        EigenError::Engine(_) => CliError::Breakdown(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let mut r = Report::new();
    r.set("eigenvalues", run.values.clone())
        .set("sweeps", run.report.sweeps)
        .set("converged", run.report.converged)
        .set("off", run.report.off_norms.last().copied().unwrap_or(0.0))
        .set("rotations", run.report.performed.iter().sum::<usize>())
        .set("skipped", run.report.skipped.iter().sum::<usize>());
    if mode == Mode::Delayed {
        r.set("ticks", run.ticks);
    }
    if let Some(v) = &run.vectors {
        let cols: Vec<Value> = (0..v.order()).map(|j| (0..v.order()).map(|i| v.get(i, j)).collect::<Vec<f64>>().into()).collect();
        for (j, c) in cols.into_iter().enumerate() {
            r.set(&format!("vector{j}"), c);
        }
    }
    Ok((r, run.trace))
}

fn trace_stats(path: &Path) -> Result<Report, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let u = systolic_core::engine::Utilisation::from_ndjson(BufReader::new(f))
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut r = Report::new();
    for &c in u.active.keys() {
        r.push_row(report::row([
            ("row", c.row.into()),
            ("col", c.col.into()),
            ("active", u.active[&c].into()),
            ("fraction", u.fraction(c).into()),
        ]));
    }
    let diag: Vec<f64> = u.active.keys().filter(|c| c.row == c.col).map(|&c| u.fraction(c)).collect();
    let diag_mean = if diag.is_empty() { 0.0 } else { diag.iter().sum::<f64>() / diag.len() as f64 };
    r.set("cells", u.active.len()).set("span", u.span()).set("mean", u.mean()).set("diagonal_mean", diag_mean);
    Ok(r)
}
