//! Real-interval evaluation of `(num/den)^c` for a decimal exponent.
//!
//! Every astro-float operation is correctly rounded, so a value computed
//! with round-to-nearest at `p` bits is within a known multiple of `2^-p`
//! of the true power. The enclosure widens the computed value by that
//! bound; floors and comparisons are decided only when the widened interval
//! does not contain an integer, otherwise the precision escalates.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::exponent::RealExponent;
use super::root::floor_root;
use super::PrecisionPolicy;
use crate::error::{Error, Result};

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
    static PARSED: RefCell<Vec<(String, usize, BigFloat)>> = const { RefCell::new(Vec::new()) };
}

pub(crate) fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

struct Enclosure {
    lo: BigFloat,
    hi: BigFloat,
}

fn exponent_at(c: &RealExponent, p: usize) -> BigFloat {
    PARSED.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some((_, _, v)) = cache.iter().find(|(d, q, _)| *q == p && *d == c.decimal) {
            return v.clone();
        }
        let v = with_consts(|cc| BigFloat::parse(&c.decimal, Radix::Dec, p, RoundingMode::ToEven, cc));
        if cache.len() >= 32 {
            cache.remove(0);
        }
        cache.push((c.decimal.clone(), p, v.clone()));
        v
    })
}

fn enclose(num: u64, den: u64, c: &RealExponent, p: usize) -> Enclosure {
    let rm = RoundingMode::ToEven;
    let mut base = BigFloat::from_u64(num, p);
    if den != 1 {
        base = base.div(&BigFloat::from_u64(den, p), p, rm);
    }
    let cp = exponent_at(c, p);
    let v = with_consts(|cc| base.ln(p, rm, cc).mul(&cp, p, rm).exp(p, rm, cc));

    // |x| = |c ln(base)|; the relative error of v is below (3|x| + 4) 2^-p
    let x = (num as f64 / den as f64).ln().abs() * cp.to_f64_lossy() + 1.0;
    let mut radius = v.mul(&BigFloat::from_f64(8.0 * x + 16.0, 64), p, RoundingMode::Up);
    if let Some(e) = radius.exponent() {
        radius.set_exponent(e - p as i32);
    }
    Enclosure {
        lo: v.sub(&radius, p, RoundingMode::Down),
        hi: v.add(&radius, p, RoundingMode::Up),
    }
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for BigFloat {
    fn to_f64_lossy(&self) -> f64 {
        match self.as_raw_parts() {
            Some((words, n, sign, e, _)) if n > 0 => {
                let top = *words.last().unwrap() as f64 / 2f64.powi(64);
                let v = top * 2f64.powi(e);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            _ => 0.0,
        }
    }
}

/// `floor(v)` for `v >= 0`.
fn floor_to_biguint(v: &BigFloat) -> BigUint {
    let Some((words, n, sign, e, _)) = v.as_raw_parts() else {
        return BigUint::default();
    };
    if n == 0 || e <= 0 || sign == Sign::Neg {
        return BigUint::default();
    }
    let digits: Vec<u32> = words
        .iter()
        .flat_map(|w| [*w as u32, (*w >> 32) as u32])
        .collect();
    let mantissa = BigUint::new(digits);
    let e = e as usize;
    if e < n {
        mantissa >> (n - e)
    } else {
        mantissa << (e - n)
    }
}

/// The exact value of `(num/den)^c` when it is an integer, else `None`.
///
/// With `c = P/Q` reduced and `num/den` reduced, the power is rational only
/// when `den = 1` and `num` is a perfect `Q`-th power.
fn exact_integer_power(num: u64, den: u64, c: &RealExponent) -> Option<BigUint> {
    let g = num.gcd(&den);
    let (num, den) = (num / g, den / g);
    if den != 1 {
        return None;
    }
    if num == 1 {
        return Some(BigUint::one());
    }
    let q = c.den.to_u32()?;
    let p = c.num.to_u32()?;
    if u64::from(q) >= 64 {
        return None;
    }
    let n = BigUint::from(num);
    let r = floor_root(&n, q);
    (r.pow(q) == n).then(|| r.pow(p))
}

fn ambiguous(num: u64, den: u64, c: &RealExponent, bits: usize) -> Error {
    let base = if den == 1 {
        num.to_string()
    } else {
        format!("({num}/{den})")
    };
    Error::AmbiguousAtMaxPrecision {
        what: format!("{base}^{}", c.decimal),
        bits,
    }
}

pub(crate) fn floor_pow_real(
    num: u64,
    den: u64,
    c: &RealExponent,
    policy: &PrecisionPolicy,
) -> Result<BigUint> {
    let mut bits = policy.start_bits;
    let mut tie_checked = false;
    loop {
        let enc = enclose(num, den, c, bits);
        let lo = floor_to_biguint(&enc.lo);
        if lo == floor_to_biguint(&enc.hi) {
            return Ok(lo);
        }
        if !tie_checked {
            if let Some(v) = exact_integer_power(num, den, c) {
                return Ok(v);
            }
            tie_checked = true;
        }
        if bits >= policy.max_bits {
            return Err(ambiguous(num, den, c, bits));
        }
        bits = policy.next_bits(bits);
    }
}

pub(crate) fn cmp_pow_real(
    num: u64,
    den: u64,
    c: &RealExponent,
    m: u64,
    policy: &PrecisionPolicy,
) -> Result<Ordering> {
    let mut bits = policy.start_bits;
    let mut tie_checked = false;
    loop {
        let enc = enclose(num, den, c, bits);
        let target = BigFloat::from_u64(m, bits);
        if enc.hi.cmp(&target).is_some_and(|o| o < 0) {
            return Ok(Ordering::Less);
        }
        if enc.lo.cmp(&target).is_some_and(|o| o > 0) {
            return Ok(Ordering::Greater);
        }
        if !tie_checked {
            if let Some(v) = exact_integer_power(num, den, c) {
                return Ok(v.cmp(&BigUint::from(m)));
            }
            tie_checked = true;
        }
        if bits >= policy.max_bits {
            return Err(ambiguous(num, den, c, bits));
        }
        bits = policy.next_bits(bits);
    }
}

/// `(y^c mod 1)` for real `c`, evaluated at `p` bits; used for phases.
pub(crate) fn frac_scaled_root_real(h: i64, y: u64, gamma_of: &RealExponent, p: usize) -> f64 {
    let rm = RoundingMode::ToEven;
    let cp = exponent_at(gamma_of, p);
    let v = with_consts(|cc| {
        let g = BigFloat::from_u64(1, p).div(&cp, p, rm);
        BigFloat::from_u64(y, p).ln(p, rm, cc).mul(&g, p, rm).exp(p, rm, cc)
    });
    let hv = v.mul(&BigFloat::from_i64(h, p), p, rm);
    let fl = hv.floor();
    let f = hv.sub(&fl, p, rm);
    f.to_f64_lossy().clamp(0.0, 1.0 - f64::EPSILON / 2.0)
}
