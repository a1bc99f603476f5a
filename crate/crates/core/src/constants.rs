//! Rigorous enclosures of the densities `sigma = prod_p (1 - 2/p^2)` and
//! `6/pi^2`, and the truncated coprime double sum that converges to `sigma`.
//!
//! Finite products are accumulated twice with directed rounding (once
//! rounding every step down, once up), so the exact finite product lies
//! between the two results. The omitted factors over `p > P` satisfy
//!
//! ```text
//! 0 <= -log prod_{p>P} (1 - k/p^2) <= sum_{n>P} (k/n^2 + k^2/n^4)
//!                                  <= k/P + k^2/(3 P^3)
//! ```
//!
//! using `-log(1 - x) <= x + x^2` for `0 <= x <= 1/2`, so the infinite
//! product lies in `[lower * (1 - tail), upper]`.

use std::sync::OnceLock;

use astro_float::{BigFloat, Radix, RoundingMode, Sign};
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactpow::interval::with_consts;
use crate::sieve::{mobius_window, primes_up_to};

/// Prime cutoff used for the default `sigma`.
pub const SIGMA_CUTOFF: u64 = 10_000_000;

const PRODUCT_BITS: usize = 192;
const DECIMAL_DIGITS: usize = 40;

/// A value with a proven absolute error bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RigorousValue {
    /// Decimal digits of the reported value.
    pub value: String,
    pub error_bound: f64,
    pub derivation: String,
}

impl RigorousValue {
    pub fn value_f64(&self) -> f64 {
        self.value.parse().expect("decimal produced by this module")
    }

    pub fn lower(&self) -> f64 {
        self.value_f64() - self.error_bound
    }

    pub fn upper(&self) -> f64 {
        self.value_f64() + self.error_bound
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }

    pub fn overlaps(&self, other: &RigorousValue) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

/// Enclosure `[lo, hi]` of `prod_{p <= cutoff} (1 - k/p^2)`.
fn finite_product(cutoff: u64, k: u64) -> (BigFloat, BigFloat) {
    let p = PRODUCT_BITS;
    let one = BigFloat::from_u64(1, p);
    let kk = BigFloat::from_u64(k, p);
    let (mut lo, mut hi) = (one.clone(), one.clone());
    for q in primes_up_to(cutoff) {
        let sq = BigFloat::from_u64(q * q, p);
        let f_lo = one.sub(&kk.div(&sq, p, RoundingMode::Up), p, RoundingMode::Down);
        let f_hi = one.sub(&kk.div(&sq, p, RoundingMode::Down), p, RoundingMode::Up);
        lo = lo.mul(&f_lo, p, RoundingMode::Down);
        hi = hi.mul(&f_hi, p, RoundingMode::Up);
    }
    (lo, hi)
}

/// `k/P + k^2/(3P^3)`, rounded up.
fn tail_bound(cutoff: u64, k: u64) -> BigFloat {
    let p = PRODUCT_BITS;
    let up = RoundingMode::Up;
    let big_p = BigFloat::from_u64(cutoff, p);
    let first = BigFloat::from_u64(k, p).div(&big_p, p, up);
    let cube = big_p.mul(&big_p, p, up).mul(&big_p, p, up).mul(&BigFloat::from_u64(3, p), p, RoundingMode::Down);
    let second = BigFloat::from_u64(k * k, p).div(&cube, p, up);
    first.add(&second, p, up)
}

fn euler_product(cutoff: u64, k: u64, name: &str) -> Result<RigorousValue> {
    if cutoff < 3 {
        return Err(Error::InvalidArgument(format!("prime cutoff {cutoff} < 3")));
    }
    let p = PRODUCT_BITS;
    let (lo, hi) = finite_product(cutoff, k);
    let tail = tail_bound(cutoff, k);
    let one = BigFloat::from_u64(1, p);
    let true_lo = lo.mul(&one.sub(&tail, p, RoundingMode::Down), p, RoundingMode::Down);
    let mid = lo.add(&hi, p, RoundingMode::ToEven).div(&BigFloat::from_u64(2, p), p, RoundingMode::ToEven);
    Ok(enclosure_to_value(
        &mid,
        &true_lo,
        &hi,
        format!("{name}: prime product to P={cutoff} with directed rounding, tail factor in [1 - ({k}/P + {}/(3P^3)), 1]", k * k),
    ))
}

/// Reports `center` with an error bound covering `[lo, hi]` plus the
/// decimal truncation.
fn enclosure_to_value(center: &BigFloat, lo: &BigFloat, hi: &BigFloat, derivation: String) -> RigorousValue {
    let p = PRODUCT_BITS;
    let (digits, exp10) = decimal_digits(center);
    let value = plain_decimal(&digits, exp10);
    let shown = with_consts(|cc| BigFloat::parse(&value, Radix::Dec, p, RoundingMode::ToEven, cc));
    let below = shown.sub(lo, p, RoundingMode::Up);
    let above = hi.sub(&shown, p, RoundingMode::Up);
    let radius = if below.cmp(&above).is_some_and(|o| o > 0) { below } else { above };
    // the parse of `value` is itself rounded; 2^-180 relative covers it
    let err = f64_up(&radius) + value.parse::<f64>().unwrap().abs() * 2f64.powi(-180);
    RigorousValue {
        value,
        error_bound: err,
        derivation,
    }
}

/// Upper bound on `v` as an `f64` (`v >= 0`).
fn f64_up(v: &BigFloat) -> f64 {
    match v.as_raw_parts() {
        Some((words, n, sign, e, _)) if n > 0 && sign == Sign::Pos => {
            let top = *words.last().unwrap() as f64 / 2f64.powi(64);
            top * 2f64.powi(e) * (1.0 + 4.0 * f64::EPSILON)
        }
        _ => 0.0,
    }
}

/// Up to `DECIMAL_DIGITS` significant digits of `v` and the decimal
/// exponent of the first one (`v = 0.d1d2... * 10^exp10`).
fn decimal_digits(v: &BigFloat) -> (String, i32) {
    let s = with_consts(|cc| v.format(Radix::Dec, RoundingMode::ToEven, cc)).expect("finite value");
    let (mantissa, exp) = s.split_once('e').unwrap_or((&s, "0"));
    let exp: i32 = exp.trim_start_matches('+').parse().expect("decimal exponent");
    let mantissa = mantissa.trim_start_matches('-');
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut digits = format!("{int_part}{frac_part}");
    let lead = digits.len() - digits.trim_start_matches('0').len();
    digits.drain(..lead);
    digits.truncate(DECIMAL_DIGITS);
    (digits, exp + int_part.len() as i32 - lead as i32)
}

fn plain_decimal(digits: &str, exp10: i32) -> String {
    if digits.is_empty() {
        return "0".into();
    }
    if exp10 <= 0 {
        format!("0.{}{digits}", "0".repeat((-exp10) as usize))
    } else if exp10 as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(exp10 as usize - digits.len()))
    } else {
        let (i, f) = digits.split_at(exp10 as usize);
        format!("{i}.{f}")
    }
}

/// `sigma = prod_p (1 - 2/p^2)`, the density of `n` with `n` and `n + 1`
/// both squarefree, from the primes up to `cutoff`.
pub fn sigma_euler_product(cutoff: u64) -> Result<RigorousValue> {
    euler_product(cutoff, 2, "sigma")
}

/// `prod_{p <= cutoff} (1 - 1/p^2)` with its tail bound; encloses `6/pi^2`.
pub fn reciprocal_zeta2_product(cutoff: u64) -> Result<RigorousValue> {
    euler_product(cutoff, 1, "1/zeta(2)")
}

/// `6/pi^2` from the library's correctly rounded `pi`.
pub fn reciprocal_zeta2() -> RigorousValue {
    let p = 256;
    let (pi_lo, pi_hi) = with_consts(|cc| (cc.pi(p, RoundingMode::Down), cc.pi(p, RoundingMode::Up)));
    let six = BigFloat::from_u64(6, p);
    let lo = six.div(&pi_hi.mul(&pi_hi, p, RoundingMode::Up), p, RoundingMode::Down);
    let hi = six.div(&pi_lo.mul(&pi_lo, p, RoundingMode::Down), p, RoundingMode::Up);
    let mid = lo.add(&hi, p, RoundingMode::ToEven).div(&BigFloat::from_u64(2, p), p, RoundingMode::ToEven);
    enclosure_to_value(&mid, &lo, &hi, "6/pi^2 from a 256-bit enclosure of pi".into())
}

/// `sigma` at the default cutoff, computed once per process.
pub fn sigma() -> &'static RigorousValue {
    static SIGMA: OnceLock<RigorousValue> = OnceLock::new();
    SIGMA.get_or_init(|| sigma_euler_product(SIGMA_CUTOFF).expect("cutoff >= 3"))
}

/// `sum_{dt <= z, gcd(d,t) = 1} mu(d) mu(t) / (d^2 t^2)`, accumulated at
/// 128 bits.
pub fn coprime_double_sum(z: u64) -> f64 {
    let p = 128;
    let mu = mobius_window(1, z + 1);
    let mut acc = BigFloat::from_u64(0, p);
    for t in 1..=z {
        let mt = mu.values[(t - 1) as usize];
        if mt == 0 {
            continue;
        }
        let mut inner = BigFloat::from_u64(0, p);
        for d in 1..=z / t {
            let md = mu.values[(d - 1) as usize];
            if md == 0 || d.gcd(&t) != 1 {
                continue;
            }
            let term = BigFloat::from_u64(d * d, p).reciprocal(p, RoundingMode::ToEven);
            inner = if md > 0 {
                inner.add(&term, p, RoundingMode::ToEven)
            } else {
                inner.sub(&term, p, RoundingMode::ToEven)
            };
        }
        let scaled = inner.div(&BigFloat::from_u64(t * t, p), p, RoundingMode::ToEven);
        acc = if mt > 0 {
            acc.add(&scaled, p, RoundingMode::ToEven)
        } else {
            acc.sub(&scaled, p, RoundingMode::ToEven)
        };
    }
    let (digits, exp10) = decimal_digits(&acc);
    let negative = acc.is_negative();
    let v: f64 = plain_decimal(&digits, exp10).parse().unwrap();
    if negative {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_factor_product() {
        let s = sigma_euler_product(3).unwrap();
        let exact = 7.0 / 18.0;
        assert!((s.value_f64() - exact).abs() < 1e-15, "{}", s.value);
        // the true sigma is below 7/18 by far more than rounding
        let true_sigma = 0.322_634_098_939_244_67;
        assert!(s.error_bound >= exact - true_sigma);
        assert!(s.contains(true_sigma));
    }

    #[test]
    fn small_cutoffs_rejected() {
        assert!(sigma_euler_product(2).is_err());
    }

    #[test]
    fn coprime_sum_small_z() {
        assert_eq!(coprime_double_sum(1), 1.0);
        assert_eq!(coprime_double_sum(2), 0.5);
        // z = 3 adds (1,3), (3,1)
        assert!((coprime_double_sum(3) - (0.5 - 2.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn six_over_pi_squared() {
        let r = reciprocal_zeta2();
        assert!(r.error_bound <= 1e-30, "{}", r.error_bound);
        assert!(r.value.starts_with("0.607927101854026628663276779258"), "{}", r.value);
        assert!(r.value_f64() > 0.5 && r.value_f64() < 1.0);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(plain_decimal("12345", 0), "0.12345");
        assert_eq!(plain_decimal("12345", -2), "0.0012345");
        assert_eq!(plain_decimal("12345", 2), "12.345");
        assert_eq!(plain_decimal("12", 4), "1200");
    }
}
