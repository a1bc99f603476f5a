//! Certified `floor(n^c)`, exact comparisons `n^c <=> m`, and counts of
//! integers in windows `m <= n^c < m + 1`.
//!
//! In exact-rational mode `c = a/b` and every decision is an integer
//! comparison of `n^a` against `m^b`. In real-interval mode `c` is a decimal
//! and decisions come from interval enclosures (see [`interval`]). Both
//! modes may short-circuit through a double-precision pre-screen when the
//! estimate is provably far from an integer.

mod exponent;
pub(crate) mod interval;
mod root;

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

pub use exponent::{Exponent, ExponentMode};
pub use root::floor_root;

use crate::error::{Error, Result};

/// Precision schedule for real-interval evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionPolicy {
    pub start_bits: usize,
    pub max_bits: usize,
    pub escalation_factor: f64,
    /// Allow the double-precision shortcut when `n^c` is at least `1e-4`
    /// (and well beyond the rounding error) away from every integer.
    pub float_prescreen: bool,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start_bits: 128,
            max_bits: 4096,
            escalation_factor: 2.0,
            float_prescreen: true,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start_bits: usize, max_bits: usize, escalation_factor: f64) -> Result<Self> {
        if start_bits < 64 || max_bits < start_bits || escalation_factor.is_nan() || escalation_factor <= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "precision policy start={start_bits} max={max_bits} factor={escalation_factor}"
            )));
        }
        Ok(PrecisionPolicy {
            start_bits,
            max_bits,
            escalation_factor,
            float_prescreen: true,
        })
    }

    /// The same schedule with the floating-point shortcut disabled, so every
    /// answer comes from the certified path.
    pub fn certified_only(&self) -> Self {
        PrecisionPolicy {
            float_prescreen: false,
            ..self.clone()
        }
    }

    pub(crate) fn next_bits(&self, bits: usize) -> usize {
        let next = (bits as f64 * self.escalation_factor).ceil() as usize;
        next.max(bits + 1).min(self.max_bits)
    }
}

const PRESCREEN_MARGIN: f64 = 1e-4;

/// Double-precision estimate of `(num/den)^c` with an upper bound on its
/// absolute error, or `None` when the estimate is too coarse to use.
fn float_estimate(num: u64, den: u64, c: &Exponent) -> Option<(f64, f64)> {
    let base = num as f64 / den as f64;
    let cf = c.to_f64();
    let est = base.powf(cf);
    if !est.is_finite() || est >= (1u64 << 52) as f64 {
        return None;
    }
    // exponent rounding (c |ln base| ulp/2), base rounding (c ulp) and powf (1 ulp)
    let err = est * (cf * base.ln().abs() + cf + 4.0) * f64::EPSILON * 2.0;
    Some((est, err.max(PRESCREEN_MARGIN)))
}

fn prescreen_floor(num: u64, den: u64, c: &Exponent) -> Option<u64> {
    let (est, tol) = float_estimate(num, den, c)?;
    let fl = est.floor();
    let frac = est - fl;
    (frac > tol && 1.0 - frac > tol).then_some(fl as u64)
}

/// `floor((num/den)^c)`.
pub fn floor_pow_ratio(num: u64, den: u64, c: &Exponent, policy: &PrecisionPolicy) -> Result<BigUint> {
    if den == 0 {
        return Err(Error::InvalidArgument("zero denominator".into()));
    }
    if policy.float_prescreen {
        if let Some(v) = prescreen_floor(num, den, c) {
            return Ok(BigUint::from(v));
        }
    }
    match (c.as_rational(), c.real_repr()) {
        (Some((a, b)), _) => {
            let scaled = BigUint::from(num).pow(a) / BigUint::from(den).pow(a);
            Ok(floor_root(&scaled, b))
        }
        (None, Some(real)) => interval::floor_pow_real(num, den, real, policy),
        _ => unreachable!(),
    }
}

/// `floor(n^c)`, never wrong: exact integer root in rational mode, escalating
/// interval enclosures in real mode.
pub fn floor_pow(n: u64, c: &Exponent, policy: &PrecisionPolicy) -> Result<BigUint> {
    floor_pow_ratio(n, 1, c, policy)
}

/// [`floor_pow`] for results that fit in a `u64`.
pub fn floor_pow_u64(n: u64, c: &Exponent, policy: &PrecisionPolicy) -> Result<u64> {
    floor_pow_ratio_u64(n, 1, c, policy)
}

pub fn floor_pow_ratio_u64(num: u64, den: u64, c: &Exponent, policy: &PrecisionPolicy) -> Result<u64> {
    if policy.float_prescreen && den != 0 {
        if let Some(v) = prescreen_floor(num, den, c) {
            return Ok(v);
        }
    }
    let v = floor_pow_ratio(num, den, c, policy)?;
    v.to_u64()
        .ok_or_else(|| Error::Overflow(format!("floor(({num}/{den})^{c})")))
}

/// Orders `n^c` against `m`.
pub fn cmp_pow(n: u64, c: &Exponent, m: u64, policy: &PrecisionPolicy) -> Result<Ordering> {
    if policy.float_prescreen {
        if let Some((est, tol)) = float_estimate(n, 1, c) {
            let d = est - m as f64;
            if d > tol {
                return Ok(Ordering::Greater);
            }
            if d < -tol {
                return Ok(Ordering::Less);
            }
        }
    }
    match (c.as_rational(), c.real_repr()) {
        (Some((a, b)), _) => Ok(BigUint::from(n).pow(a).cmp(&BigUint::from(m).pow(b))),
        (None, Some(real)) => interval::cmp_pow_real(n, 1, real, m, policy),
        _ => unreachable!(),
    }
}

/// Smallest `n >= 1` with `n^c >= m`.
fn first_n_reaching(m: u64, c: &Exponent, policy: &PrecisionPolicy) -> Result<u64> {
    if m <= 1 {
        return Ok(1);
    }
    let mut n = ((m as f64).powf(c.gamma_f64()).ceil() as u64).max(1);
    while n > 1 && cmp_pow(n - 1, c, m, policy)? != Ordering::Less {
        n -= 1;
    }
    while cmp_pow(n, c, m, policy)? == Ordering::Less {
        n += 1;
    }
    Ok(n)
}

/// `#{n : n_lo < n <= n_hi, m <= n^c < m + 1}`, i.e. the number of `n` in the
/// window whose `floor(n^c)` equals `m`.
pub fn count_n_in_pow_window(
    m: u64,
    c: &Exponent,
    n_lo: u64,
    n_hi: u64,
    policy: &PrecisionPolicy,
) -> Result<u64> {
    if m == 0 || n_hi <= n_lo {
        return Ok(0);
    }
    let first = first_n_reaching(m, c, policy)?.max(n_lo + 1);
    let past = first_n_reaching(m + 1, c, policy)?;
    let last = (past - 1).min(n_hi);
    Ok(if last >= first { last - first + 1 } else { 0 })
}

/// `{h y^(1/c)}`, the fractional part in `[0, 1)`.
///
/// In exact-rational mode `c = a/b` the top 64 fraction bits are exact:
/// `floor(|h| y^(b/a) 2^64)` is the integer `a`-th root of `|h|^a y^b 2^(64a)`.
/// In real-interval mode the power is evaluated at 128 bits and reduced
/// before conversion to `f64`.
pub fn frac_gamma_power(h: i64, y: u64, c: &Exponent) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    if h == 0 || y == 0 {
        return 0.0;
    }
    let Some((a, b)) = c.as_rational() else {
        let real = c.real_repr().expect("real exponent");
        return interval::frac_scaled_root_real(h, y, real, 128);
    };
    let shift = 64 * a as usize;
    let m = (BigUint::from(h.unsigned_abs()).pow(a) * BigUint::from(y).pow(b)) << shift;
    let r = floor_root(&m, a);
    let low = r.iter_u64_digits().next().unwrap_or(0);
    if h > 0 {
        return (low >> 11) as f64 * SCALE;
    }
    // an exact power is an integer, so its low word is zero
    if low == 0 && r.pow(a) == m {
        return 0.0;
    }
    ((!low) >> 11) as f64 * SCALE
}
