use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// How floors and comparisons involving `n^c` are decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMode {
    /// `c = a/b`; every decision reduces to comparing `n^a` with `m^b`.
    ExactRational,
    /// `c` is a decimal number; decisions use interval enclosures whose
    /// precision escalates until they separate from the integers.
    RealInterval,
}

/// The exponent `c >= 1` of the sequence `[n^c]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Rational { num: u32, den: u32 },
    Real(RealExponent),
}

/// A decimal exponent together with its exact value as a reduced fraction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct RealExponent {
    pub(crate) decimal: String,
    pub(crate) num: BigUint,
    pub(crate) den: BigUint,
}

impl Exponent {
    /// Exact rational exponent `num/den`, reduced to lowest terms.
    pub fn rational(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidExponent(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        if num < den {
            return Err(Error::InvalidExponent(format!(
                "{num}/{den} (exponent must be at least 1)"
            )));
        }
        Ok(Exponent {
            repr: Repr::Rational { num, den },
        })
    }

    /// Real-interval exponent given by a decimal string such as `1.1666...67`.
    pub fn real(decimal: &str) -> Result<Self> {
        let (num, den) = parse_decimal(decimal)?;
        if num < den {
            return Err(Error::InvalidExponent(format!(
                "{decimal} (exponent must be at least 1)"
            )));
        }
        Ok(Exponent {
            repr: Repr::Real(RealExponent {
                decimal: normalize_decimal(decimal),
                num,
                den,
            }),
        })
    }

    /// Parses `"a/b"` or a decimal. Decimals become exact rationals
    /// (`"1.1"` is `11/10`) unless `real` is set.
    pub fn parse(s: &str, real: bool) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            if real {
                return Err(Error::InvalidExponent(format!(
                    "{s} (real-interval mode takes a decimal)"
                )));
            }
            let parse = |t: &str| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidExponent(s.to_string()))
            };
            return Exponent::rational(parse(a)?, parse(b)?);
        }
        if real {
            return Exponent::real(s);
        }
        let (num, den) = parse_decimal(s)?;
        match (num.to_u32(), den.to_u32()) {
            (Some(a), Some(b)) => Exponent::rational(a, b),
            _ => Err(Error::InvalidExponent(format!(
                "{s} (too many digits for an exact rational; use real-interval mode)"
            ))),
        }
    }

    pub fn mode(&self) -> ExponentMode {
        match self.repr {
            Repr::Rational { .. } => ExponentMode::ExactRational,
            Repr::Real(_) => ExponentMode::RealInterval,
        }
    }

    /// `(a, b)` with `c = a/b`, in exact-rational mode.
    pub fn as_rational(&self) -> Option<(u32, u32)> {
        match self.repr {
            Repr::Rational { num, den } => Some((num, den)),
            Repr::Real(_) => None,
        }
    }

    /// `1/c = b/a`, exact in rational mode.
    pub fn gamma(&self) -> Option<(u32, u32)> {
        self.as_rational().map(|(a, b)| (b, a))
    }

    /// The decimal digits of `c` in real-interval mode.
    pub fn real_approx(&self) -> Option<&str> {
        match &self.repr {
            Repr::Real(r) => Some(&r.decimal),
            Repr::Rational { .. } => None,
        }
    }

    pub(crate) fn real_repr(&self) -> Option<&RealExponent> {
        match &self.repr {
            Repr::Real(r) => Some(r),
            Repr::Rational { .. } => None,
        }
    }

    /// The exact value of `c` as a reduced fraction, in either mode.
    pub fn exact_ratio(&self) -> (BigUint, BigUint) {
        match &self.repr {
            Repr::Rational { num, den } => (BigUint::from(*num), BigUint::from(*den)),
            Repr::Real(r) => (r.num.clone(), r.den.clone()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.repr {
            Repr::Rational { num, den } => *num as f64 / *den as f64,
            Repr::Real(r) => r.decimal.parse().expect("validated decimal"),
        }
    }

    pub fn gamma_f64(&self) -> f64 {
        match &self.repr {
            Repr::Rational { num, den } => *den as f64 / *num as f64,
            Repr::Real(_) => 1.0 / self.to_f64(),
        }
    }

    /// True iff `1 < c < 7/6`, the range where the pair asymptotic is proven.
    pub fn in_theorem_range(&self) -> bool {
        let (num, den) = self.exact_ratio();
        num > den && (&num * 6u32).cmp(&(&den * 7u32)) == Ordering::Less
    }

    pub fn is_identity(&self) -> bool {
        let (num, den) = self.exact_ratio();
        num == den
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rational { num, den } => write!(f, "{num}/{den}"),
            Repr::Real(r) => f.write_str(&r.decimal),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Exponent::parse(s, false)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn parse_decimal(s: &str) -> Result<(BigUint, BigUint)> {
    let bad = || Error::InvalidExponent(s.to_string());
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
    if num.is_zero() {
        return Err(bad());
    }
    let den = BigUint::from(10u32).pow(frac_part.len() as u32);
    let g = num.gcd(&den);
    if g.is_one() {
        Ok((num, den))
    } else {
        Ok((num / &g, den / g))
    }
}

fn normalize_decimal(s: &str) -> String {
    let s = s.trim();
    match s.split_once('.') {
        Some((i, f)) => {
            let f = f.trim_end_matches('0');
            let i = if i.is_empty() { "0" } else { i };
            if f.is_empty() {
                i.to_string()
            } else {
                format!("{i}.{f}")
            }
        }
        None => s.to_string(),
    }
}
