//! Möbius decomposition of the pair count.
//!
//! Writing `m = [n^c]`, `mu^2(m) = sum_{d^2 | m} mu(d)` and likewise for
//! `m + 1`, so
//!
//! ```text
//! S_c(X) = sum_{d, t} mu(d) mu(t) #{ X/2 < n <= X : [n^c] = k d^2, k d^2 + 1 = 0 (mod t^2) }.
//! ```
//!
//! The pairs are split at `dt <= z` (the `s1` part) and `dt > z` (`s2`).
//! Two ranges for `k` are supported: the one that keeps the identity exact
//! (`k d^2 >= [(X/2)^c]`) and the narrower one `k d^2 > (X/2)^c`, whose
//! shortfall is a single boundary value of `m`, reported separately.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::progression::{count_k_in_progression, mod_inverse};
use super::sc_count_with;
use crate::error::{Error, Result};
use crate::exactpow::{count_n_in_pow_window, floor_pow_ratio_u64, floor_pow_u64, Exponent, PrecisionPolicy};
use crate::sieve::mobius_window;

/// Where the `(d, t)` pairs are split between `s1` and `s2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitPoint {
    /// `z = X^{(2c-1)/4}`, compared exactly for rational `c`.
    Balanced,
    At(f64),
    /// Every pair goes into `s1`.
    Infinite,
}

/// Lower end of the `k` range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum KRange {
    /// `((X/2)^c - 1) / d^2 < k`: the decomposition is exact.
    PreAdjustment,
    /// `(X/2)^c / d^2 < k`: misses `m = [(X/2)^c]`.
    Displayed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecompositionTerms {
    pub s1: i64,
    pub s2: i64,
}

impl DecompositionTerms {
    pub fn total(&self) -> i64 {
        self.s1 + self.s2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PreAdjustment {
    pub s1: i64,
    pub s2: i64,
    pub boundary: i64,
    pub identity_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionReport {
    #[serde(rename = "X")]
    pub x: u64,
    pub c: Exponent,
    /// Split point; `null` in JSON when infinite.
    pub z: f64,
    pub s1: i64,
    pub s2: i64,
    /// Contribution of `m = [(X/2)^c]`, evaluated on its own.
    pub boundary: i64,
    pub direct: u64,
    pub identity_holds: bool,
    pub pre_adjustment: PreAdjustment,
}

struct Plan<'a> {
    x: u64,
    c: &'a Exponent,
    policy: &'a PrecisionPolicy,
    /// `[(X/2)^c]`
    f: u64,
    /// `[X^c]`
    g: u64,
}

impl<'a> Plan<'a> {
    fn new(x: u64, c: &'a Exponent, policy: &'a PrecisionPolicy) -> Result<Self> {
        if x < 2 {
            return Err(Error::InvalidArgument("X must be at least 2".into()));
        }
        if c.is_identity() {
            return Err(Error::InvalidExponent(format!("{c} (decomposition needs c > 1)")));
        }
        Ok(Plan {
            x,
            c,
            policy,
            f: floor_pow_ratio_u64(x, 2, c, policy)?,
            g: floor_pow_u64(x, c, policy)?,
        })
    }

    /// Number of `n` in `(X/2, X]` with `[n^c] = m`.
    fn hits(&self, m: u64) -> Result<u64> {
        count_n_in_pow_window(m, self.c, self.x / 2, self.x, self.policy)
    }

    /// Exclusive lower bound for `k` given `d^2`.
    fn k_lo(&self, d2: u64, range: KRange) -> u64 {
        let m_min = match range {
            KRange::PreAdjustment => self.f,
            KRange::Displayed => self.f + 1,
        };
        m_min.div_ceil(d2).saturating_sub(1)
    }
}

/// Decides `dt <= z` for each pair.
enum Splitter {
    /// `(dt)^{4b} <= X^{2a-b}`
    Exact { rhs: BigUint, pow: u32 },
    Float(f64),
    All,
}

impl Splitter {
    fn new(split: SplitPoint, x: u64, c: &Exponent) -> Self {
        match split {
            SplitPoint::Infinite => Splitter::All,
            SplitPoint::At(z) => Splitter::Float(z),
            SplitPoint::Balanced => match c.as_rational() {
                Some((a, b)) => Splitter::Exact {
                    rhs: BigUint::from(x).pow(2 * a - b),
                    pow: 4 * b,
                },
                None => Splitter::Float(balanced_z(x, c)),
            },
        }
    }

    fn in_s1(&self, dt: u64) -> bool {
        match self {
            Splitter::All => true,
            Splitter::Float(z) => (dt as f64) <= *z,
            Splitter::Exact { rhs, pow } => BigUint::from(dt).pow(*pow).cmp(rhs) != Ordering::Greater,
        }
    }
}

/// `X^{(2c-1)/4}`.
pub fn balanced_z(x: u64, c: &Exponent) -> f64 {
    (x as f64).powf((2.0 * c.to_f64() - 1.0) / 4.0)
}

fn split_value(split: SplitPoint, x: u64, c: &Exponent) -> f64 {
    match split {
        SplitPoint::Balanced => balanced_z(x, c),
        SplitPoint::At(z) => z,
        SplitPoint::Infinite => f64::INFINITY,
    }
}

/// `s1` and `s2` in one pass over the `(d, t)` pairs.
pub fn split_terms(
    x: u64,
    c: &Exponent,
    split: SplitPoint,
    range: KRange,
    policy: &PrecisionPolicy,
) -> Result<DecompositionTerms> {
    let plan = Plan::new(x, c, policy)?;
    let splitter = Splitter::new(split, x, c);
    let d_max = plan.g.isqrt();
    let t_max = (plan.g + 1).isqrt();
    let mu = mobius_window(0, d_max.max(t_max) + 1);
    let ts: Vec<(u64, i64)> = (1..=t_max)
        .filter_map(|t| match mu.values[t as usize] {
            0 => None,
            v => Some((t, i64::from(v))),
        })
        .collect();

    (1..=d_max)
        .into_par_iter()
        .filter(|&d| mu.values[d as usize] != 0)
        .map(|d| {
            let mu_d = i64::from(mu.values[d as usize]);
            let d2 = d * d;
            let k_lo = plan.k_lo(d2, range);
            let k_hi = plan.g / d2;
            let mut terms = DecompositionTerms::default();
            for &(t, mu_t) in &ts {
                if d.gcd(&t) != 1 {
                    continue;
                }
                let t2 = t * t;
                let residue = if t2 == 1 {
                    0
                } else {
                    t2 - mod_inverse((d2 % t2) as i64, t2)?
                };
                let mut hits = 0i64;
                for k in count_k_in_progression(k_lo, k_hi, t2, residue).iter() {
                    hits += plan.hits(k * d2)? as i64;
                }
                let v = mu_d * mu_t * hits;
                if splitter.in_s1(d * t) {
                    terms.s1 += v;
                } else {
                    terms.s2 += v;
                }
            }
            Ok(terms)
        })
        .try_reduce(DecompositionTerms::default, |a, b| {
            Ok(DecompositionTerms {
                s1: a.s1 + b.s1,
                s2: a.s2 + b.s2,
            })
        })
}

/// `s1` over the exact (pre-adjustment) `k` range; `z` defaults to
/// `X^{(2c-1)/4}`.
pub fn s1_term(x: u64, c: &Exponent, z: Option<SplitPoint>) -> Result<i64> {
    let split = z.unwrap_or(SplitPoint::Balanced);
    Ok(split_terms(x, c, split, KRange::PreAdjustment, &PrecisionPolicy::default())?.s1)
}

pub fn s2_term(x: u64, c: &Exponent, z: Option<SplitPoint>) -> Result<i64> {
    let split = z.unwrap_or(SplitPoint::Balanced);
    Ok(split_terms(x, c, split, KRange::PreAdjustment, &PrecisionPolicy::default())?.s2)
}

/// Both `k` range conventions against the direct count.
pub fn decompose(x: u64, c: &Exponent, z: Option<SplitPoint>) -> Result<DecompositionReport> {
    let policy = PrecisionPolicy::default();
    let split = z.unwrap_or(SplitPoint::Balanced);
    let plan = Plan::new(x, c, &policy)?;
    let direct = sc_count_with(x, c, &policy)?.count;

    let shown = split_terms(x, c, split, KRange::Displayed, &policy)?;
    // every divisor pair of m = F is missed, so the sliver contributes
    // mu^2(F) mu^2(F+1) per n
    let sf = |m: u64| mobius_window(m, m + 1).values[0] != 0;
    let boundary = if plan.f >= 1 && sf(plan.f) && sf(plan.f + 1) {
        plan.hits(plan.f)? as i64
    } else {
        0
    };
    let pre = split_terms(x, c, split, KRange::PreAdjustment, &policy)?;

    Ok(DecompositionReport {
        x,
        c: c.clone(),
        z: split_value(split, x, c),
        s1: shown.s1,
        s2: shown.s2,
        boundary,
        direct,
        identity_holds: shown.total() + boundary == direct as i64,
        pre_adjustment: PreAdjustment {
            s1: pre.s1,
            s2: pre.s2,
            boundary: 0,
            identity_holds: pre.total() == direct as i64,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: u32, b: u32) -> Exponent {
        Exponent::rational(a, b).unwrap()
    }

    fn mu(mut m: u64) -> i64 {
        let mut v = 1;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                m /= p;
                if m % p == 0 {
                    return 0;
                }
                v = -v;
            }
            p += 1;
        }
        if m > 1 {
            -v
        } else {
            v
        }
    }

    /// Expands each n's term over the divisors d^2 | m, t^2 | m + 1.
    fn oracle(x: u64, c: &Exponent, z: f64, range: KRange) -> (i64, i64) {
        let p = PrecisionPolicy::default();
        let f = floor_pow_ratio_u64(x, 2, c, &p).unwrap();
        let m_min = if range == KRange::PreAdjustment { f } else { f + 1 };
        let (mut s1, mut s2) = (0, 0);
        for n in x / 2 + 1..=x {
            let m = floor_pow_u64(n, c, &p).unwrap();
            if m < m_min {
                continue;
            }
            for d in (1..).take_while(|d| d * d <= m).filter(|d| m % (d * d) == 0) {
                for t in (1..).take_while(|t| t * t <= m + 1).filter(|t| (m + 1) % (t * t) == 0) {
                    let v = mu(d) * mu(t);
                    if (d * t) as f64 <= z {
                        s1 += v;
                    } else {
                        s2 += v;
                    }
                }
            }
        }
        (s1, s2)
    }

    #[test]
    fn matches_divisor_expansion() {
        let p = PrecisionPolicy::default();
        for (x, c) in [(200, q(3, 2)), (1000, q(11, 10)), (777, q(21, 20)), (301, q(7, 6))] {
            for z in [1.0, 3.5, balanced_z(x, &c), 40.0] {
                for range in [KRange::PreAdjustment, KRange::Displayed] {
                    let got = split_terms(x, &c, SplitPoint::At(z), range, &p).unwrap();
                    let (s1, s2) = oracle(x, &c, z, range);
                    assert_eq!((got.s1, got.s2), (s1, s2), "X={x} c={c} z={z} {range:?}");
                }
            }
        }
    }

    #[test]
    fn hand_example() {
        // n = 3, 4 give m = 5, 8; only (5, 6) is a squarefree pair
        let c = q(3, 2);
        let r = decompose(4, &c, None).unwrap();
        assert_eq!(r.direct, 1);
        assert_eq!(r.s1 + r.s2, 1);
        assert_eq!(r.boundary, 0);
        assert!(r.identity_holds && r.pre_adjustment.identity_holds);
        assert_eq!(s1_term(4, &c, Some(SplitPoint::Infinite)).unwrap(), 1);
        assert_eq!(s2_term(4, &c, Some(SplitPoint::Infinite)).unwrap(), 0);
    }

    #[test]
    fn everything_in_s1_reproduces_count() {
        let c = q(3, 2);
        // dt <= X^c + 1 for every contributing pair
        let z = SplitPoint::At(10f64.powf(1.5) + 1.0);
        assert_eq!(s1_term(10, &c, Some(z)).unwrap(), 2);
        assert_eq!(s2_term(10, &c, Some(z)).unwrap(), 0);
    }

    #[test]
    fn split_invariance() {
        for c in [q(11, 10), q(21, 20)] {
            let direct = super::super::sc_count(1000, &c).unwrap().count as i64;
            let z_bal = balanced_z(1000, &c);
            for z in [SplitPoint::At(1.0), SplitPoint::Balanced, SplitPoint::At(10.0 * z_bal), SplitPoint::Infinite] {
                let s1 = s1_term(1000, &c, Some(z)).unwrap();
                let s2 = s2_term(1000, &c, Some(z)).unwrap();
                assert_eq!(s1 + s2, direct, "c={c} {z:?}");
            }
        }
    }

    #[test]
    fn exact_split_agrees_with_float_split() {
        let c = q(11, 10);
        let p = PrecisionPolicy::default();
        let exact = split_terms(3000, &c, SplitPoint::Balanced, KRange::PreAdjustment, &p).unwrap();
        let float = split_terms(3000, &c, SplitPoint::At(balanced_z(3000, &c)), KRange::PreAdjustment, &p).unwrap();
        assert_eq!(exact, float);
    }

    #[test]
    fn displayed_range_boundary() {
        let c = q(21, 20);
        let r = decompose(2000, &c, None).unwrap();
        assert!(r.identity_holds);
        assert!(r.pre_adjustment.identity_holds);
        assert_eq!(r.pre_adjustment.s1 + r.pre_adjustment.s2, r.direct as i64);
        assert_eq!(r.s1 + r.s2 + r.boundary, r.direct as i64);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["identityHolds"].as_bool().unwrap());
        assert!(json["preAdjustment"]["identityHolds"].as_bool().unwrap());
    }

    #[test]
    fn boundary_only_for_odd_x() {
        // for even X, n = X/2 + 1 already lands above [(X/2)^c]; for odd X
        // and c near 1, n = (X+1)/2 can share it
        let c = q(21, 20);
        let mut odd_hits = 0;
        for x in 2..300u64 {
            let r = decompose(x, &c, None).unwrap();
            assert!(r.identity_holds, "X={x}");
            assert!(r.pre_adjustment.identity_holds, "X={x}");
            if x % 2 == 0 {
                assert_eq!(r.boundary, 0, "X={x}");
            } else if r.boundary != 0 {
                odd_hits += 1;
            }
        }
        assert!(odd_hits > 0);
    }
}
