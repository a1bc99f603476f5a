//! Segmented sieves for `mu^2`, `mu` and `tau` over half-open windows.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default number of integers per sieve window.
pub const DEFAULT_WINDOW: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum WindowKind {
    Squarefree,
    Mobius,
    Divisor,
}

/// Arithmetic function values on `[lo, hi)`, indexed by `m - lo`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveWindow {
    pub lo: u64,
    pub hi: u64,
    pub kind: WindowKind,
    pub values: Vec<i32>,
}

impl SieveWindow {
    pub fn get(&self, m: u64) -> Option<i32> {
        (self.lo..self.hi)
            .contains(&m)
            .then(|| self.values[(m - self.lo) as usize])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i32)> + '_ {
        (self.lo..).zip(self.values.iter().copied())
    }
}

/// Primes `<= n` in ascending order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::with_capacity(estimate_prime_count(n));
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

fn estimate_prime_count(n: usize) -> usize {
    let x = n as f64;
    (1.3 * x / x.ln().max(1.0)) as usize + 16
}

/// A prime table large enough to sieve any window with `hi <= max_hi`.
///
/// Windows are pure functions of the table, so one table can be shared by
/// threads sieving disjoint windows.
#[derive(Clone, Debug)]
pub struct WindowSieve {
    primes: Vec<u64>,
    max_hi: u64,
}

impl WindowSieve {
    pub fn new(max_hi: u64) -> Self {
        WindowSieve {
            primes: primes_up_to(max_hi.saturating_sub(1).isqrt()),
            max_hi,
        }
    }

    pub fn max_hi(&self) -> u64 {
        self.max_hi
    }

    fn check(&self, lo: u64, hi: u64) {
        assert!(lo <= hi, "window [{lo}, {hi}) is reversed");
        assert!(hi <= self.max_hi, "window end {hi} beyond sieve limit {}", self.max_hi);
    }

    /// `flags[m - lo]` is true iff `m` is squarefree; `0` is not.
    pub fn squarefree_flags(&self, lo: u64, hi: u64) -> Vec<bool> {
        self.check(lo, hi);
        let mut flags = vec![true; (hi - lo) as usize];
        for &p in &self.primes {
            let sq = p * p;
            if sq >= hi {
                break;
            }
            let mut m = lo.div_ceil(sq) * sq;
            while m < hi {
                flags[(m - lo) as usize] = false;
                m += sq;
            }
        }
        if lo == 0 && hi > 0 {
            flags[0] = false;
        }
        flags
    }

    pub fn squarefree(&self, lo: u64, hi: u64) -> SieveWindow {
        let values = self
            .squarefree_flags(lo, hi)
            .into_iter()
            .map(i32::from)
            .collect();
        SieveWindow {
            lo,
            hi,
            kind: WindowKind::Squarefree,
            values,
        }
    }

    pub fn mobius(&self, lo: u64, hi: u64) -> SieveWindow {
        self.check(lo, hi);
        let len = (hi - lo) as usize;
        let mut mu = vec![1i32; len];
        // product of the small prime factors found so far
        let mut part = vec![1u64; len];
        for &p in &self.primes {
            if p * p >= hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let i = (m - lo) as usize;
                mu[i] = -mu[i];
                part[i] *= p;
                m += p;
            }
            let sq = p * p;
            let mut m = lo.div_ceil(sq) * sq;
            while m < hi {
                mu[(m - lo) as usize] = 0;
                m += sq;
            }
        }
        for (i, (v, q)) in mu.iter_mut().zip(&part).enumerate() {
            let m = lo + i as u64;
            if m == 0 {
                *v = 0;
            } else if *v != 0 && *q != m {
                // exactly one prime factor above the table remains
                *v = -*v;
            }
        }
        SieveWindow {
            lo,
            hi,
            kind: WindowKind::Mobius,
            values: mu,
        }
    }

    /// `tau(m)` on the window; fails if the window contains `0`.
    pub fn divisor(&self, lo: u64, hi: u64) -> Result<SieveWindow> {
        self.check(lo, hi);
        if lo == 0 && hi > 0 {
            return Err(Error::DivisorOfZero);
        }
        let mut tau = vec![0i32; (hi - lo) as usize];
        let top = hi.saturating_sub(1).isqrt();
        for d in 1..=top {
            let sq = d * d;
            let mut m = lo.div_ceil(d).max(d) * d;
            while m < hi {
                tau[(m - lo) as usize] += if m == sq { 1 } else { 2 };
                m += d;
            }
        }
        Ok(SieveWindow {
            lo,
            hi,
            kind: WindowKind::Divisor,
            values: tau,
        })
    }
}

pub fn squarefree_window(lo: u64, hi: u64) -> SieveWindow {
    WindowSieve::new(hi).squarefree(lo, hi)
}

pub fn mobius_window(lo: u64, hi: u64) -> SieveWindow {
    WindowSieve::new(hi).mobius(lo, hi)
}

pub fn divisor_window(lo: u64, hi: u64) -> Result<SieveWindow> {
    WindowSieve::new(hi).divisor(lo, hi)
}

/// Number of squarefree integers in `[1, x]`, sieved window by window.
pub fn count_squarefree(x: u64) -> u64 {
    let sieve = WindowSieve::new(x + 1);
    let mut total = 0;
    let mut lo = 1;
    while lo <= x {
        let hi = (lo + DEFAULT_WINDOW).min(x + 1);
        total += sieve.squarefree_flags(lo, hi).iter().filter(|&&f| f).count() as u64;
        lo = hi;
    }
    total
}

/// `sum_{n <= z} tau(n)`, sieved window by window.
pub fn divisor_summatory(z: u64) -> u64 {
    let sieve = WindowSieve::new(z + 1);
    let mut total = 0;
    let mut lo = 1;
    while lo <= z {
        let hi = (lo + DEFAULT_WINDOW).min(z + 1);
        let w = sieve.divisor(lo, hi).expect("window starts at 1 or later");
        total += w.values.iter().map(|&v| v as u64).sum::<u64>();
        lo = hi;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trial-division factorization: (mu, tau).
    fn factor_oracle(mut m: u64) -> (i32, i32) {
        let mut mu = 1;
        let mut tau = 1;
        let mut p = 2;
        while p * p <= m {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e > 1 {
                mu = 0;
            } else if e == 1 {
                mu = -mu;
            }
            tau *= e + 1;
            p += 1;
        }
        if m > 1 {
            mu = -mu;
            tau *= 2;
        }
        (mu, tau)
    }

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_window(8, 9).values, vec![0]);
        assert_eq!(squarefree_window(10, 11).values, vec![1]);
        assert_eq!(squarefree_window(0, 3).values, vec![0, 1, 1]);
        assert!(squarefree_window(5, 5).is_empty());
    }

    #[test]
    fn mobius_examples() {
        let w = mobius_window(0, 31);
        assert_eq!(w.get(0), Some(0));
        assert_eq!(w.get(1), Some(1));
        assert_eq!(w.get(6), Some(1));
        assert_eq!(w.get(30), Some(-1));
        assert_eq!(w.get(12), Some(0));
        assert_eq!(w.get(31), None);
    }

    #[test]
    fn divisor_examples() {
        let w = divisor_window(1, 13).unwrap();
        assert_eq!(w.get(1), Some(1));
        assert_eq!(w.get(12), Some(6));
        assert!(matches!(divisor_window(0, 5), Err(Error::DivisorOfZero)));
    }

    #[test]
    fn windows_match_factorization() {
        for (lo, hi) in [(1, 3000), (999_000, 1_001_000), (1 << 34, (1 << 34) + 500)] {
            let mu = mobius_window(lo, hi);
            let sq = squarefree_window(lo, hi);
            let tau = divisor_window(lo, hi).unwrap();
            for m in lo..hi {
                let (oracle_mu, oracle_tau) = factor_oracle(m);
                assert_eq!(mu.get(m), Some(oracle_mu), "mu({m})");
                assert_eq!(sq.get(m), Some(oracle_mu * oracle_mu), "mu^2({m})");
                assert_eq!(tau.get(m), Some(oracle_tau), "tau({m})");
            }
        }
    }

    #[test]
    fn mertens_10k() {
        let oracle: i64 = (1..=10_000).map(|m| i64::from(factor_oracle(m).0)).sum();
        let sieved: i64 = mobius_window(1, 10_001).values.iter().map(|&v| i64::from(v)).sum();
        assert_eq!(sieved, oracle);
    }

    #[test]
    fn divisor_summatory_small() {
        // 1 + 2 + 2 + 3 + 2 + 4
        assert_eq!(divisor_summatory(6), 14);
        assert_eq!(divisor_summatory(0), 0);
    }

    #[test]
    #[should_panic]
    fn window_beyond_table_panics() {
        WindowSieve::new(100).squarefree_flags(50, 200);
    }
}
