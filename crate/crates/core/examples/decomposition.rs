//! Split S_c(X) into the dt <= z and dt > z parts and compare both k ranges.

use psfree::counting::{decompose, SplitPoint};
use psfree::exactpow::Exponent;

fn main() -> psfree::Result<()> {
    let c = Exponent::rational(21, 20)?;
    for x in [1_000, 10_000] {
        for split in [SplitPoint::At(1.0), SplitPoint::Balanced, SplitPoint::Infinite] {
            let r = decompose(x, &c, Some(split))?;
            println!(
                "X={x} z={:>8.3}: s1={:>5} s2={:>5} boundary={} direct={} | exact range s1+s2={} ({})",
                r.z,
                r.s1,
                r.s2,
                r.boundary,
                r.direct,
                r.pre_adjustment.s1 + r.pre_adjustment.s2,
                if r.pre_adjustment.identity_holds { "ok" } else { "MISMATCH" }
            );
        }
    }
    Ok(())
}
