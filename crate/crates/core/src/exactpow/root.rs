use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `r` with `r^b <= m < (r+1)^b`.
///
/// Integer Newton iteration seeded from a floating-point estimate of
/// `log2(m) / b`. From any positive start a single step lands at or above
/// the floor root, and from there the iterates decrease strictly until they
/// reach it. The result is certified by a final pair of exact comparisons.
///
/// Panics if `b == 0`.
pub fn floor_root(m: &BigUint, b: u32) -> BigUint {
    assert!(b >= 1, "root index must be positive");
    if b == 1 || m.is_zero() {
        return m.clone();
    }
    if m.bits() <= u64::from(b) {
        // 1 <= m < 2^b
        return BigUint::one();
    }

    let mut x = newton_step(m, &initial_guess(m, b), b);
    loop {
        let y = newton_step(m, &x, b);
        if y >= x {
            break;
        }
        x = y;
    }

    while x.pow(b) > *m {
        x -= 1u32;
    }
    loop {
        let next = &x + 1u32;
        if next.pow(b) > *m {
            break;
        }
        x = next;
    }
    x
}

/// `floor((b-1)x + m / x^(b-1)) / b)`; never below the floor root.
fn newton_step(m: &BigUint, x: &BigUint, b: u32) -> BigUint {
    let xb1 = x.pow(b - 1);
    (x * (b - 1) + m / xb1) / b
}

fn initial_guess(m: &BigUint, b: u32) -> BigUint {
    let bits = m.bits();
    let (top, shift) = if bits > 64 {
        ((m >> (bits - 64)).to_u64().unwrap(), bits - 64)
    } else {
        (m.to_u64().unwrap(), 0)
    };
    let log2_root = ((top as f64).log2() + shift as f64) / f64::from(b);
    if log2_root < 62.0 {
        return BigUint::from(log2_root.exp2().max(1.0) as u64);
    }
    let e = log2_root.floor() as u64 - 52;
    let mantissa = (log2_root - log2_root.floor() + 52.0).exp2() as u64;
    BigUint::from(mantissa) << e
}
