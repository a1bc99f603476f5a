//! The three counting sums and their errors against the main terms.
//!
//! `cargo run --release --example pair_counts -- 1000000 11/10`

use psfree::cli::density_for;
use psfree::counting::{carlitz_count, cao_zhai_count, error_sample_from, sc_count, SumKind};
use psfree::exactpow::Exponent;

fn main() -> psfree::Result<()> {
    let mut args = std::env::args().skip(1);
    let x: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let c: Exponent = args.next().as_deref().unwrap_or("11/10").parse()?;

    let reports = [carlitz_count(x)?, cao_zhai_count(x, &c)?, sc_count(x, &c)?];
    for r in &reports {
        let sample = error_sample_from(r, &density_for(r.sum_kind));
        println!(
            "{:<8} X={x} count={} main={:.1} error={:+.1} normalized={:+.4} ({:.2}s)",
            r.sum_kind.name(),
            r.count,
            sample.main_term,
            sample.error,
            sample.normalized_error,
            r.elapsed
        );
    }
    let pairs = &reports[2];
    assert_eq!(pairs.sum_kind, SumKind::ScPair);
    println!("2 S/X = {:.5}", 2.0 * pairs.count as f64 / x as f64);
    Ok(())
}
