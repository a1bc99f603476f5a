//! Exact evaluation of the squarefree counting sums
//!
//! * Carlitz: `sum_{n <= X} mu^2(n) mu^2(n+1)`
//! * Cao-Zhai: `sum_{n <= X} mu^2([n^c])`
//! * pairs: `S_c(X) = sum_{X/2 < n <= X} mu^2([n^c]) mu^2([n^c] + 1)`
//!
//! and of the Möbius decomposition of `S_c(X)` (see [`decompose`]).
//!
//! All counts are exact integers. The `n`-range is split into chunks that
//! are counted independently (in parallel) and summed, so serial and
//! parallel runs agree exactly.

mod decompose;
mod progression;

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use decompose::{
    decompose, balanced_z, s1_term, s2_term, split_terms, DecompositionReport, DecompositionTerms, KRange, PreAdjustment,
    SplitPoint,
};
pub use progression::{count_k_in_progression, mod_inverse, ProgressionRange};

use crate::constants::RigorousValue;
use crate::error::{Error, Result};
use crate::exactpow::{floor_pow_u64, Exponent, PrecisionPolicy};
use crate::sieve::{WindowSieve, DEFAULT_WINDOW};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SumKind {
    Carlitz,
    CaoZhai,
    ScPair,
}

impl SumKind {
    /// Exponent of the error term the measured error is compared against:
    /// `(6c+1)/8` for pairs, `2/3` for Carlitz, `1` for Cao-Zhai.
    pub fn reference_exponent(self, c: Option<&Exponent>) -> f64 {
        match self {
            SumKind::ScPair => (6.0 * c.map_or(1.0, Exponent::to_f64) + 1.0) / 8.0,
            SumKind::Carlitz => 2.0 / 3.0,
            SumKind::CaoZhai => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SumKind::Carlitz => "carlitz",
            SumKind::CaoZhai => "caozhai",
            SumKind::ScPair => "scpair",
        }
    }
}

impl FromStr for SumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "carlitz" => Ok(SumKind::Carlitz),
            "caozhai" => Ok(SumKind::CaoZhai),
            "scpair" | "pair" => Ok(SumKind::ScPair),
            _ => Err(Error::InvalidArgument(format!("unknown sum kind `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CountReport {
    pub sum_kind: SumKind,
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Exponent>,
    pub count: u64,
    /// Wall-clock seconds.
    pub elapsed: f64,
    /// Set when `c` lies outside `(1, 7/6)`.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub outside_theorem_range: bool,
}

impl CountReport {
    fn new(sum_kind: SumKind, x: u64, c: Option<&Exponent>, count: u64, started: Instant) -> Self {
        CountReport {
            sum_kind,
            x,
            c: c.cloned(),
            count,
            elapsed: started.elapsed().as_secs_f64(),
            outside_theorem_range: c.is_some_and(|c| !c.in_theorem_range()),
        }
    }
}

fn require_c_above_one(c: &Exponent) -> Result<()> {
    if c.is_identity() {
        return Err(Error::InvalidExponent(format!("{c} (counting sums need c > 1)")));
    }
    Ok(())
}

/// `sum_{n <= X} mu^2(n) mu^2(n+1)`; consecutive windows overlap by one.
pub fn carlitz_count(x: u64) -> Result<CountReport> {
    if x == 0 {
        return Err(Error::InvalidArgument("X must be positive".into()));
    }
    let started = Instant::now();
    let sieve = WindowSieve::new(x + 2);
    let starts: Vec<u64> = (1..=x).step_by(DEFAULT_WINDOW as usize).collect();
    let count: u64 = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + DEFAULT_WINDOW).min(x + 1);
            let flags = sieve.squarefree_flags(lo, hi + 1);
            flags.windows(2).filter(|w| w[0] && w[1]).count() as u64
        })
        .sum();
    Ok(CountReport::new(SumKind::Carlitz, x, None, count, started))
}

/// Counts `n` in `(n_lo, n_hi]` with `[n^c]` squarefree (and, if `pair`,
/// `[n^c] + 1` squarefree too). The values `[n^c]` increase with `n`, so each
/// chunk of `n` is served by one sieve window spanning its `[n^c]` range.
fn count_floor_values(n_lo: u64, n_hi: u64, c: &Exponent, pair: bool, policy: &PrecisionPolicy) -> Result<u64> {
    if n_hi <= n_lo {
        return Ok(0);
    }
    let top = floor_pow_u64(n_hi, c, policy)?;
    let sieve = WindowSieve::new(top + 2);
    // n-chunk whose [n^c]-span is about one window: span ~ c n^(c-1) len
    let slope = c.to_f64() * (n_hi as f64).powf(c.to_f64() - 1.0);
    let chunk = ((DEFAULT_WINDOW as f64 / slope) as u64).clamp(1, DEFAULT_WINDOW);
    let starts: Vec<u64> = (n_lo + 1..=n_hi).step_by(chunk as usize).collect();
    starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk - 1).min(n_hi);
            let values = (start..=end)
                .map(|n| floor_pow_u64(n, c, policy))
                .collect::<Result<Vec<u64>>>()?;
            let lo = values[0];
            let hi = values[values.len() - 1] + 2;
            let flags = sieve.squarefree_flags(lo, hi);
            let hits = values
                .iter()
                .filter(|&&m| {
                    let i = (m - lo) as usize;
                    flags[i] && (!pair || flags[i + 1])
                })
                .count();
            Ok(hits as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// `sum_{n <= X} mu^2([n^c])`.
pub fn cao_zhai_count(x: u64, c: &Exponent) -> Result<CountReport> {
    cao_zhai_count_with(x, c, &PrecisionPolicy::default())
}

pub fn cao_zhai_count_with(x: u64, c: &Exponent, policy: &PrecisionPolicy) -> Result<CountReport> {
    if x == 0 {
        return Err(Error::InvalidArgument("X must be positive".into()));
    }
    require_c_above_one(c)?;
    let started = Instant::now();
    let count = count_floor_values(0, x, c, false, policy)?;
    Ok(CountReport::new(SumKind::CaoZhai, x, Some(c), count, started))
}

/// `S_c(X) = sum_{X/2 < n <= X} mu^2([n^c]) mu^2([n^c] + 1)`.
pub fn sc_count(x: u64, c: &Exponent) -> Result<CountReport> {
    sc_count_with(x, c, &PrecisionPolicy::default())
}

pub fn sc_count_with(x: u64, c: &Exponent, policy: &PrecisionPolicy) -> Result<CountReport> {
    if x < 2 {
        return Err(Error::InvalidArgument("X must be at least 2".into()));
    }
    require_c_above_one(c)?;
    let started = Instant::now();
    // n > X/2 means n >= floor(X/2) + 1
    let count = count_floor_values(x / 2, x, c, true, policy)?;
    Ok(CountReport::new(SumKind::ScPair, x, Some(c), count, started))
}

/// Runs the counting sum of the given kind (`c` is ignored for Carlitz).
pub fn count(kind: SumKind, x: u64, c: &Exponent) -> Result<CountReport> {
    match kind {
        SumKind::Carlitz => carlitz_count(x),
        SumKind::CaoZhai => cao_zhai_count(x, c),
        SumKind::ScPair => sc_count(x, c),
    }
}

/// A measured count against its asymptotic main term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorSample {
    #[serde(rename = "X")]
    pub x: u64,
    pub c: String,
    pub count: u64,
    pub main_term: f64,
    pub error: f64,
    pub normalized_error: f64,
    pub elapsed_seconds: f64,
}

/// Density constant and main-term multiplier for each sum.
fn main_term(kind: SumKind, x: u64, density: f64) -> f64 {
    match kind {
        SumKind::ScPair => density * (x as f64 / 2.0),
        SumKind::Carlitz | SumKind::CaoZhai => density * x as f64,
    }
}

/// `error = count - main term`, `normalizedError = error / X^e` with `e`
/// the reference exponent of the sum. `density` is `sigma` for the Carlitz
/// and pair sums and `6/pi^2` for Cao-Zhai.
pub fn error_sample_from(report: &CountReport, density: &RigorousValue) -> ErrorSample {
    let kind = report.sum_kind;
    let main = main_term(kind, report.x, density.value_f64());
    let error = report.count as f64 - main;
    let scale = (report.x as f64).powf(kind.reference_exponent(report.c.as_ref()));
    ErrorSample {
        x: report.x,
        c: report.c.as_ref().map_or_else(|| "-".to_string(), ToString::to_string),
        count: report.count,
        main_term: main,
        error,
        normalized_error: error / scale,
        elapsed_seconds: report.elapsed,
    }
}

/// Measures `S_c(X) - sigma X / 2`.
pub fn error_sample(x: u64, c: &Exponent, sigma: &RigorousValue) -> Result<ErrorSample> {
    Ok(error_sample_from(&sc_count(x, c)?, sigma))
}

/// Uncertainty of the main term inherited from the density's error bound.
pub fn main_term_uncertainty(kind: SumKind, x: u64, density: &RigorousValue) -> f64 {
    main_term(kind, x, density.error_bound)
}
