//! Exponential sums H(t, h) against the second derivative bound, and the
//! truncated Fourier series of psi.

use psfree::cli::{expsum_check, psi_check};
use psfree::exactpow::Exponent;
use psfree::expsum::{eval_h, second_derivative_range, ExpSumInstance, InstanceSampler};

fn main() -> psfree::Result<()> {
    let c = Exponent::rational(11, 10)?;
    let inst = ExpSumInstance::new(3, -7, 50_000, c.clone())?;
    let h = eval_h(&inst)?;
    let (lo, hi) = second_derivative_range(&inst);
    println!("H(3, -7) at X=50000: {h:.4} over {} terms, |f''| in [{lo:.3e}, {hi:.3e}]", inst.terms());

    let report = expsum_check(&InstanceSampler::default(), 20, &c)?;
    println!(
        "20 random instances: max |H| / bound = {:.3}, specialized {:.3}",
        report.max_ratio, report.max_specialized_ratio
    );

    for row in psi_check(&[10, 100, 1000], 10_000, 1e-3)?.rows {
        println!("M={:>4}: worst ratio {:.3} at x={:.4}, violations {}", row.m, row.max_ratio, row.worst_x, row.violations);
    }
    Ok(())
}
