//! Rigorous enclosures of sigma and 6/pi^2, and the coprime double sum.

use psfree::constants::{coprime_double_sum, reciprocal_zeta2, sigma_euler_product};

fn main() -> psfree::Result<()> {
    for cutoff in [1_000, 100_000, 10_000_000] {
        let s = sigma_euler_product(cutoff)?;
        println!("P = {cutoff:>8}: sigma = {} +- {:.2e}", s.value, s.error_bound);
    }
    let z = reciprocal_zeta2();
    println!("6/pi^2 = {} +- {:.1e}", z.value, z.error_bound);
    for cut in [100, 1_000, 10_000] {
        println!("double sum up to dt <= {cut}: {:.8}", coprime_double_sum(cut));
    }
    Ok(())
}
