use crate::error::{Error, Result};

/// `a^{-1} mod m` in `[1, m - 1]` by the extended Euclidean algorithm.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("modulus {m} < 2")));
    }
    let m_i = i128::from(m);
    let (mut old_r, mut r) = (i128::from(a).rem_euclid(m_i), m_i);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(old_s.rem_euclid(m_i) as u64)
}

/// The integers `k` in `(k_lo, k_hi]` with `k = residue (mod modulus)`.
///
/// A real bound `x` is passed as `floor(x)`: for integer `k`, `k > x` iff
/// `k > floor(x)`, and `k <= x` iff `k <= floor(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProgressionRange {
    pub first: u64,
    pub step: u64,
    pub len: u64,
}

impl ProgressionRange {
    pub fn iter(&self) -> impl Iterator<Item = u64> {
        let (first, step) = (self.first, self.step);
        (0..self.len).map(move |i| first + i * step)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

pub fn count_k_in_progression(k_lo: u64, k_hi: u64, modulus: u64, residue: u64) -> ProgressionRange {
    assert!(modulus >= 1 && residue < modulus, "residue {residue} mod {modulus}");
    let empty = ProgressionRange {
        first: k_lo + 1,
        step: modulus,
        len: 0,
    };
    if k_hi <= k_lo {
        return empty;
    }
    let start = k_lo + 1;
    let first = start + (residue + modulus - start % modulus) % modulus;
    if first > k_hi {
        return ProgressionRange { first, ..empty };
    }
    ProgressionRange {
        first,
        step: modulus,
        len: (k_hi - first) / modulus + 1,
    }
}
