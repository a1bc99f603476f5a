use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use crate::constants::{reciprocal_zeta2, sigma, RigorousValue};
use crate::counting::{count, error_sample_from, main_term_uncertainty, ErrorSample, SumKind};
use crate::error::{Error, Result};
use crate::exactpow::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub c: Exponent,
    pub x_start: u64,
    pub x_stop: u64,
    pub grid_factor: f64,
    pub sum_kind: SumKind,
    /// Rows are written here as they complete, if set.
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
    /// Keep rows already in `output_path` and skip their `X` values.
    pub append: bool,
    /// Worker count; `None` uses [`resolve_threads`].
    pub threads: Option<usize>,
}

impl ScanConfig {
    pub fn new(sum_kind: SumKind, c: Exponent, x_start: u64, x_stop: u64) -> Self {
        ScanConfig {
            c,
            x_start,
            x_stop,
            grid_factor: 2.0,
            sum_kind,
            output_path: None,
            format: OutputFormat::Csv,
            append: false,
            threads: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let min_x = if self.sum_kind == SumKind::ScPair { 2 } else { 1 };
        if self.x_start < min_x || self.x_stop < self.x_start {
            return Err(Error::InvalidArgument(format!(
                "scan range {}..{}",
                self.x_start, self.x_stop
            )));
        }
        if self.grid_factor.is_nan() || self.grid_factor <= 1.0 {
            return Err(Error::InvalidArgument(format!("grid factor {}", self.grid_factor)));
        }
        if self.sum_kind != SumKind::Carlitz && self.c.is_identity() {
            return Err(Error::InvalidExponent(format!("{} (scans need c > 1)", self.c)));
        }
        Ok(())
    }
}

/// `round(start * factor^i)` for `i = 0, 1, ...`, capped at `stop` (which
/// is always included) and deduplicated.
pub fn geometric_grid(start: u64, stop: u64, factor: f64) -> Result<Vec<u64>> {
    if start == 0 || stop < start || factor.is_nan() || factor <= 1.0 {
        return Err(Error::InvalidArgument(format!("grid {start}..{stop} x{factor}")));
    }
    let mut grid = BTreeSet::new();
    for i in 0.. {
        let x = (start as f64 * factor.powi(i)).round();
        if x >= stop as f64 {
            grid.insert(stop);
            break;
        }
        grid.insert(x as u64);
    }
    Ok(grid.into_iter().collect())
}

/// Worker count: the explicit value, else `PSFREE_THREADS`, else the
/// available parallelism.
pub fn resolve_threads(explicit: Option<usize>) -> usize {
    explicit
        .filter(|&n| n > 0)
        .or_else(|| std::env::var("PSFREE_THREADS").ok()?.trim().parse().ok().filter(|&n: &usize| n > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Density whose multiple is the main term of each sum.
pub fn density_for(kind: SumKind) -> RigorousValue {
    match kind {
        SumKind::CaoZhai => reciprocal_zeta2(),
        SumKind::Carlitz | SumKind::ScPair => sigma().clone(),
    }
}

/// Rounds to 15 significant digits, the precision written to CSV.
pub fn round_sig15(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.14e}").parse().expect("formatted float")
}

fn rounded(mut s: ErrorSample) -> ErrorSample {
    s.main_term = round_sig15(s.main_term);
    s.error = round_sig15(s.error);
    s.normalized_error = round_sig15(s.normalized_error);
    s.elapsed_seconds = round_sig15(s.elapsed_seconds);
    s
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanOutcome {
    /// All rows in `X` order, including rows kept from an appended file.
    pub samples: Vec<ErrorSample>,
    /// `X` values skipped because the output already had them.
    pub resumed: Vec<u64>,
    /// Rows that could not be computed, with the reason.
    pub failures: Vec<(u64, String)>,
    pub warnings: Vec<String>,
}

/// Computes one row per grid point on a pool of worker threads. Rows are
/// written in `X` order as soon as every smaller `X` is done.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanOutcome> {
    cfg.validate()?;
    let grid = geometric_grid(cfg.x_start, cfg.x_stop, cfg.grid_factor)?;
    let density = density_for(cfg.sum_kind);

    let mut sink = match &cfg.output_path {
        Some(path) => Some(RowSink::open(path, cfg.format, cfg.append)?),
        None => None,
    };
    let done: BTreeMap<u64, ErrorSample> = sink
        .as_ref()
        .map(|s| s.existing.iter().map(|r| (r.x, r.clone())).collect())
        .unwrap_or_default();
    let todo: Vec<u64> = grid.iter().copied().filter(|x| !done.contains_key(x)).collect();

    let mut outcome = ScanOutcome {
        resumed: grid.iter().copied().filter(|x| done.contains_key(x)).collect(),
        ..ScanOutcome::default()
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(cfg.threads))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let (tx, rx) = mpsc::channel();
    let mut rows: BTreeMap<u64, Result<ErrorSample>> = BTreeMap::new();
    let mut write_error = None;
    pool.in_place_scope(|scope| {
        for &x in &todo {
            let tx = tx.clone();
            let (kind, c, density) = (cfg.sum_kind, &cfg.c, &density);
            scope.spawn(move |_| {
                let row = count(kind, x, c).map(|r| rounded(error_sample_from(&r, density)));
                let _ = tx.send((x, row));
            });
        }
        drop(tx);
        let mut next = 0;
        for (x, row) in rx {
            rows.insert(x, row);
            while next < todo.len() {
                let Some(row) = rows.get(&todo[next]) else { break };
                if let (Ok(sample), Some(sink), None) = (row, sink.as_mut(), &write_error) {
                    if let Err(e) = sink.push(sample) {
                        write_error = Some(e);
                    }
                }
                next += 1;
            }
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }

    let mut all = done;
    for (x, row) in rows {
        match row {
            Ok(sample) => {
                let spread = main_term_uncertainty(cfg.sum_kind, x, &density);
                if spread >= sample.error.abs() {
                    outcome.warnings.push(format!(
                        "X={x}: main-term uncertainty {spread:.3e} is not below |error| {:.3e}",
                        sample.error.abs()
                    ));
                }
                all.insert(x, sample);
            }
            Err(e) => outcome.failures.push((x, e.to_string())),
        }
    }
    outcome.samples = all.into_values().collect();
    Ok(outcome)
}

/// Streams rows to a CSV or JSON file.
struct RowSink {
    path: PathBuf,
    format: OutputFormat,
    existing: Vec<ErrorSample>,
    csv: Option<csv::Writer<File>>,
}

impl RowSink {
    fn open(path: &Path, format: OutputFormat, append: bool) -> Result<Self> {
        let existing = if append && path.exists() {
            read_samples(path, format)?
        } else {
            Vec::new()
        };
        let csv = match format {
            OutputFormat::Csv => {
                let file = if append && path.exists() {
                    OpenOptions::new().append(true).open(path)
                } else {
                    File::create(path)
                }
                .map_err(|e| Error::io(path, e))?;
                let write_header = existing.is_empty() && !(append && has_content(path));
                Some(
                    csv::WriterBuilder::new()
                        .has_headers(write_header)
                        .from_writer(file),
                )
            }
            OutputFormat::Json => None,
        };
        let sink = RowSink {
            path: path.to_path_buf(),
            format,
            existing,
            csv,
        };
        if format == OutputFormat::Json {
            let rows = sink.existing.clone();
            sink.write_json(&rows)?;
        }
        Ok(sink)
    }

    fn push(&mut self, sample: &ErrorSample) -> Result<()> {
        match self.format {
            OutputFormat::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                let err = |e| Error::Csv {
                    path: self.path.clone(),
                    source: e,
                };
                w.serialize(sample).map_err(err)?;
                w.flush().map_err(|e| Error::io(&self.path, e))
            }
            OutputFormat::Json => {
                self.existing.push(sample.clone());
                self.existing.sort_by_key(|s| s.x);
                let rows = self.existing.clone();
                self.write_json(&rows)
            }
        }
    }

    fn write_json(&self, rows: &[ErrorSample]) -> Result<()> {
        write_samples(&self.path, OutputFormat::Json, rows)
    }
}

fn has_content(path: &Path) -> bool {
    std::fs::metadata(path).is_ok_and(|m| m.len() > 0)
}

/// Writes a complete file of rows.
pub fn write_samples(path: &Path, format: OutputFormat, rows: &[ErrorSample]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for row in rows {
                w.serialize(row).map_err(|e| Error::Csv {
                    path: path.to_path_buf(),
                    source: e,
                })?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        }
        OutputFormat::Json => {
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, rows).map_err(|e| Error::Json {
                path: path.to_path_buf(),
                source: e,
            })?;
            w.write_all(b"\n").and_then(|()| w.flush()).map_err(|e| Error::io(path, e))
        }
    }
}

pub fn read_samples(path: &Path, format: OutputFormat) -> Result<Vec<ErrorSample>> {
    match format {
        OutputFormat::Csv => {
            let mut r = csv::Reader::from_path(path).map_err(|e| Error::Csv {
                path: path.to_path_buf(),
                source: e,
            })?;
            r.deserialize()
                .collect::<std::result::Result<Vec<ErrorSample>, _>>()
                .map_err(|e| Error::Csv {
                    path: path.to_path_buf(),
                    source: e,
                })
        }
        OutputFormat::Json => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            if text.trim().is_empty() {
                return Ok(Vec::new());
            }
            serde_json::from_str(&text).map_err(|e| Error::Json {
                path: path.to_path_buf(),
                source: e,
            })
        }
    }
}

/// Least-squares line through `(log X, log |error|)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
    pub reference_exponent: f64,
    /// Samples left out because `|error| < 1`.
    pub excluded: usize,
}

/// Fits `log |error| = slope log X + intercept`, ignoring samples with
/// `|error| < 1`. The reference exponent is taken from `kind` and the `c`
/// recorded in the samples.
pub fn fit_error_exponent(samples: &[ErrorSample], kind: SumKind) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.error.abs() >= 1.0)
        .map(|s| ((s.x as f64).ln(), s.error.abs().ln()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData { usable: usable.len() });
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData { usable: 1 });
    }
    let slope = sxy / sxx;
    let c = samples
        .first()
        .and_then(|s| Exponent::parse(&s.c, false).or_else(|_| Exponent::parse(&s.c, true)).ok());
    Ok(FitResult {
        slope,
        intercept: my - slope * mx,
        points_used: usable.len(),
        reference_exponent: kind.reference_exponent(c.as_ref()),
        excluded: samples.len() - usable.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(x: u64, error: f64) -> ErrorSample {
        ErrorSample {
            x,
            c: "11/10".into(),
            count: 0,
            main_term: 0.0,
            error,
            normalized_error: 0.0,
            elapsed_seconds: 0.0,
        }
    }

    #[test]
    fn grid_rules() {
        assert_eq!(geometric_grid(1000, 1000, 2.0).unwrap(), vec![1000]);
        assert_eq!(geometric_grid(1000, 1_000_000, 10.0).unwrap(), vec![1000, 10_000, 100_000, 1_000_000]);
        assert_eq!(geometric_grid(10, 11, 2.0).unwrap(), vec![10, 11]);
        assert_eq!(geometric_grid(2, 5, 1.1).unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(geometric_grid(10, 100, 2.0).unwrap(), vec![10, 20, 40, 80, 100]);
        assert!(geometric_grid(10, 9, 2.0).is_err());
        assert!(geometric_grid(10, 90, 1.0).is_err());
    }

    #[test]
    fn sig15_rounding() {
        assert_eq!(round_sig15(0.1 + 0.2), 0.3);
        assert_eq!(round_sig15(-1234.567890123457), -1234.56789012346);
        assert_eq!(round_sig15(0.0), 0.0);
    }

    #[test]
    fn fit_recovers_planted_exponents() {
        let xs = [1_000u64, 4_000, 16_000, 64_000, 256_000, 1_024_000];
        let half: Vec<_> = xs.iter().map(|&x| planted(x, (x as f64).powf(0.5))).collect();
        let fit = fit_error_exponent(&half, SumKind::ScPair).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-9);
        assert!((fit.reference_exponent - 0.95).abs() < 1e-12);
        let seven: Vec<_> = xs.iter().map(|&x| planted(x, -7.0 * (x as f64).powf(0.8))).collect();
        let fit = fit_error_exponent(&seven, SumKind::ScPair).unwrap();
        assert!((fit.slope - 0.8).abs() < 1e-9);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn fit_excludes_small_errors() {
        let mut rows: Vec<_> = [10u64, 100, 1000].iter().map(|&x| planted(x, x as f64)).collect();
        rows.push(planted(5000, 0.25));
        let fit = fit_error_exponent(&rows, SumKind::Carlitz).unwrap();
        assert_eq!(fit.points_used, 3);
        assert_eq!(fit.excluded, 1);
        assert_eq!(fit.reference_exponent, 2.0 / 3.0);
        rows.truncate(2);
        assert!(matches!(
            fit_error_exponent(&rows, SumKind::Carlitz),
            Err(Error::InsufficientData { usable: 2 })
        ));
    }

    #[test]
    fn thread_resolution() {
        assert_eq!(resolve_threads(Some(3)), 3);
        assert!(resolve_threads(None) >= 1);
    }
}
