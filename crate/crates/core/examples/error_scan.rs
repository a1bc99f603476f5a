//! Scan X geometrically, write CSV rows, and fit the error exponent.
//!
//! `cargo run --release --example error_scan -- scan.csv`

use std::path::PathBuf;

use psfree::cli::{fit_error_exponent, run_scan, OutputFormat, ScanConfig};
use psfree::counting::SumKind;
use psfree::exactpow::Exponent;

fn main() -> psfree::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("psfree_scan.csv"));
    let cfg = ScanConfig {
        output_path: Some(out.clone()),
        format: OutputFormat::Csv,
        ..ScanConfig::new(SumKind::ScPair, Exponent::rational(11, 10)?, 10_000, 2_000_000)
    };
    let outcome = run_scan(&cfg)?;
    for s in &outcome.samples {
        println!("X={:>8} count={:>7} error={:+9.1} normalized={:+.4}", s.x, s.count, s.error, s.normalized_error);
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let fit = fit_error_exponent(&outcome.samples, SumKind::ScPair)?;
    println!(
        "slope {:.3} (reference {:.3}) from {} points; rows in {}",
        fit.slope,
        fit.reference_exponent,
        fit.points_used,
        out.display()
    );
    Ok(())
}
