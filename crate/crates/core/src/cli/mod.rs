//! Command-line front end and the scan/fit/check helpers behind it.
//!
//! Each subcommand prints one JSON document to standard output. Exit codes:
//! `0` on success, `1` when a computation fails, `2` for bad arguments.

mod checks;
mod scan;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use checks::{
    expsum_check, psi_check, psi_grid, ExpSumCheckReport, PsiCheckReport, PsiCheckRow, PSI_BOUND_CONSTANT,
};
pub use scan::{
    density_for, fit_error_exponent, geometric_grid, read_samples, resolve_threads, round_sig15, run_scan,
    write_samples, FitResult, OutputFormat, ScanConfig, ScanOutcome,
};

use crate::constants::sigma_euler_product;
use crate::counting::{count, decompose, SplitPoint, SumKind};
use crate::error::{Error, Result};
use crate::exactpow::Exponent;
use crate::expsum::{InstanceSampler, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "psfree", version, about = "Squarefree values of floor(n^c): counts, decompositions and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact value of one counting sum.
    Count {
        #[arg(long, value_parser = parse_kind)]
        kind: SumKind,
        #[arg(long)]
        x: u64,
        /// Exponent as `a/b` or a decimal; required except for carlitz.
        #[arg(long)]
        c: Option<String>,
        /// Treat a decimal `c` as a real number (interval arithmetic).
        #[arg(long)]
        real: bool,
    },
    /// Split the pair count into s1 + s2 (+ boundary).
    Decompose {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        c: String,
        /// Split point: a number, `balanced` (the default) or `inf`.
        #[arg(long)]
        z: Option<String>,
    },
    /// Rigorous Euler product for sigma.
    Sigma {
        #[arg(long, default_value_t = crate::constants::SIGMA_CUTOFF)]
        cutoff: u64,
    },
    /// Random exponential sums against the second derivative bound.
    ExpsumCheck {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value = "11/10")]
        c: String,
        #[arg(long, default_value_t = 100_000)]
        x_max: u64,
        /// Print only the summary, not every instance.
        #[arg(long)]
        summary: bool,
    },
    /// Error samples on a geometric grid of X, plus a log-log fit.
    Scan {
        #[arg(long, value_parser = parse_kind)]
        kind: SumKind,
        #[arg(long, default_value = "11/10")]
        c: String,
        #[arg(long)]
        real: bool,
        #[arg(long)]
        x_start: u64,
        #[arg(long)]
        x_stop: u64,
        #[arg(long, default_value_t = 2.0)]
        grid_factor: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Keep rows already in the output file.
        #[arg(long)]
        append: bool,
        /// Worker threads (default: PSFREE_THREADS or all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Truncated Fourier series of psi against its error envelope.
    PsiCheck {
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        m_values: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        grid_points: usize,
        #[arg(long, default_value_t = 1e-3)]
        exclusion: f64,
    },
}

fn parse_kind(s: &str) -> std::result::Result<SumKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_split(s: Option<&str>) -> Result<SplitPoint> {
    match s.map(str::trim) {
        None | Some("balanced") => Ok(SplitPoint::Balanced),
        Some("inf" | "infinity") => Ok(SplitPoint::Infinite),
        Some(v) => match v.parse::<f64>() {
            Ok(z) if z > 0.0 => Ok(SplitPoint::At(z)),
            _ => Err(Error::InvalidArgument(format!("split point `{v}`"))),
        },
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ScanSummary<'a> {
    out: &'a PathBuf,
    rows: usize,
    resumed: usize,
    failures: &'a [(u64, String)],
    fit: Option<FitResult>,
    fit_error: Option<String>,
}

fn print_json(out: &mut impl Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: "<stdout>".into(),
        source: e,
    })?;
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

/// Runs one parsed command, writing its JSON report to `out` and warnings
/// to `err`.
pub fn execute(cmd: Command, out: &mut impl Write, err: &mut impl Write) -> Result<()> {
    match cmd {
        Command::Count { kind, x, c, real } => {
            let c = match (kind, c) {
                (_, Some(c)) => Exponent::parse(&c, real)?,
                (SumKind::Carlitz, None) => Exponent::rational(1, 1)?,
                (_, None) => return Err(Error::InvalidArgument(format!("--c is required for {}", kind.name()))),
            };
            print_json(out, &count(kind, x, &c)?)
        }
        Command::Decompose { x, c, z } => {
            let c = Exponent::parse(&c, false)?;
            print_json(out, &decompose(x, &c, Some(parse_split(z.as_deref())?))?)
        }
        Command::Sigma { cutoff } => print_json(out, &sigma_euler_product(cutoff)?),
        Command::ExpsumCheck {
            seed,
            instances,
            c,
            x_max,
            summary,
        } => {
            let c = Exponent::parse(&c, false)?;
            let sampler = InstanceSampler {
                seed,
                x_max,
                x_min: InstanceSampler::default().x_min.min(x_max),
                ..InstanceSampler::default()
            };
            let mut report = expsum_check(&sampler, instances, &c)?;
            if summary {
                report.checks.clear();
            }
            print_json(out, &report)
        }
        Command::Scan {
            kind,
            c,
            real,
            x_start,
            x_stop,
            grid_factor,
            out: path,
            format,
            append,
            threads,
        } => {
            let cfg = ScanConfig {
                grid_factor,
                output_path: Some(path.clone()),
                format,
                append,
                threads,
                ..ScanConfig::new(kind, Exponent::parse(&c, real)?, x_start, x_stop)
            };
            let outcome = run_scan(&cfg)?;
            for w in &outcome.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let (fit, fit_error) = match fit_error_exponent(&outcome.samples, kind) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            print_json(
                out,
                &ScanSummary {
                    out: &path,
                    rows: outcome.samples.len(),
                    resumed: outcome.resumed.len(),
                    failures: &outcome.failures,
                    fit,
                    fit_error,
                },
            )?;
            match outcome.failures.first() {
                None => Ok(()),
                Some((x, reason)) => Err(Error::ScanRowsFailed {
                    count: outcome.failures.len(),
                    first: format!("X={x}: {reason}"),
                }),
            }
        }
        Command::PsiCheck {
            m_values,
            grid_points,
            exclusion,
        } => print_json(out, &psi_check(&m_values, grid_points, exclusion)?),
    }
}

/// Exit code for an error: `2` for bad input, `1` otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::InvalidExponent(_) => 2,
        _ => 1,
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    match execute(cli.command, &mut out, &mut err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
