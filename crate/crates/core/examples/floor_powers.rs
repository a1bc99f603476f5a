//! Certified floors of n^c in both exponent modes.
//!
//! Run with `cargo run --example floor_powers -- 7/6 64`.

use psfree::exactpow::{cmp_pow, count_n_in_pow_window, floor_pow, Exponent, PrecisionPolicy};

fn main() -> psfree::Result<()> {
    let mut args = std::env::args().skip(1);
    let c: Exponent = args.next().as_deref().unwrap_or("7/6").parse()?;
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(64);
    let policy = PrecisionPolicy::default();

    let exact = floor_pow(n, &c, &policy)?;
    println!("[{n}^{c}] = {exact}  (mode {:?})", c.mode());

    // the same exponent written as a long decimal goes through interval arithmetic
    let decimal = format!("{:.40}", c.to_f64());
    let real = Exponent::real(&decimal)?;
    let certified = floor_pow(n, &real, &policy.certified_only())?;
    println!("[{n}^{decimal}] = {certified}  (mode {:?})", real.mode());

    let m = exact.try_into().unwrap_or(u64::MAX);
    println!("{n}^{c} vs {m}: {:?}", cmp_pow(n, &c, m, &policy)?);
    let hits = count_n_in_pow_window(m, &c, 0, 10 * n, &policy)?;
    println!("n <= {} with [n^{c}] = {m}: {hits}", 10 * n);
    Ok(())
}
