//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every tolerance used below is a named constant.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psfree::cli::{fit_error_exponent, run_scan, ScanConfig};
use psfree::constants::{coprime_double_sum, reciprocal_zeta2, sigma_euler_product};
use psfree::counting::{
    cao_zhai_count, carlitz_count, error_sample_from, s1_term, s2_term, sc_count, ErrorSample, SplitPoint, SumKind,
};
use psfree::exactpow::{count_n_in_pow_window, floor_pow, Exponent, PrecisionPolicy};
use psfree::expsum::{
    check_vdc, nearest_int_dist, psi, psi_truncated, random_instances, vdc_bound, InstanceSampler,
};
use psfree::sieve::divisor_summatory;

const CARLITZ_X: u64 = 10_000_000;
const CARLITZ_TOL: f64 = 0.01;
const CAO_ZHAI_X: u64 = 1_000_000;
const CAO_ZHAI_TOL: f64 = 0.01;
const PAIR_XS: [u64; 3] = [100_000, 1_000_000, 10_000_000];
const PAIR_DENSITY_TOL: f64 = 0.02;
const PAIR_ERROR_CONSTANT: f64 = 10.0;
const SIGMA_REFERENCE: f64 = 0.322_634_098_9;
const SIGMA_TOL: f64 = 1e-8;
const DOUBLE_SUM_Z: u64 = 10_000;
const DOUBLE_SUM_TOL: f64 = 5e-3;
const DECOMPOSITION_XS: [u64; 2] = [1_000, 10_000];
const TAU_ZS: [u64; 3] = [100, 1_000, 10_000];
const ORACLE_N_MAX: u64 = 100_000;
const RANDOM_WINDOWS: usize = 100;
const VDC_INSTANCES: usize = 100;
const VDC_CONSTANT: f64 = 10.0;
const PSI_GRID: usize = 10_000;
const PSI_EXCLUSION: f64 = 1e-3;
const PSI_CONSTANT: f64 = 4.0;
const PSI_MS: [u32; 3] = [10, 100, 1000];
const FIT_TOL: f64 = 1e-9;
const SCAN_SLOPE_MAX: f64 = 0.95;
const SCAN_X: (u64, u64) = (10_000, 10_000_000);

/// `7/6` rounded to 60 decimal places.
const SEVEN_SIXTHS_60: &str = "1.166666666666666666666666666666666666666666666666666666666667";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(a: u32, b: u32) -> Exponent {
    Exponent::rational(a, b).expect("valid exponent")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sigma_f64() -> f64 {
    psfree::constants::sigma().value_f64()
}

fn carlitz_density() -> Outcome {
    let small = carlitz_count(10).map_err(|e| e.to_string())?.count;
    let big = carlitz_count(CARLITZ_X).map_err(|e| e.to_string())?.count;
    let density = big as f64 / CARLITZ_X as f64;
    check(
        small == 5 && (density - sigma_f64()).abs() <= CARLITZ_TOL,
        format!("carlitz(10) = {small}, carlitz(1e7)/1e7 = {density:.6}, sigma = {:.6}", sigma_f64()),
    )
}

fn cao_zhai_density() -> Outcome {
    let small = cao_zhai_count(10, &q(3, 2)).map_err(|e| e.to_string())?.count;
    let big = cao_zhai_count(CAO_ZHAI_X, &q(11, 10)).map_err(|e| e.to_string())?.count;
    let density = big as f64 / CAO_ZHAI_X as f64;
    let target = reciprocal_zeta2().value_f64();
    check(
        small == 7 && (density - target).abs() <= CAO_ZHAI_TOL,
        format!("cao_zhai(10, 3/2) = {small}, density at 1e6 = {density:.6}, 6/pi^2 = {target:.6}"),
    )
}

fn main_theorem() -> Outcome {
    let sigma = psfree::constants::sigma();
    let mut worst_density = 0f64;
    let mut worst_ratio = 0f64;
    for c in [q(21, 20), q(11, 10)] {
        for x in PAIR_XS {
            let report = sc_count(x, &c).map_err(|e| e.to_string())?;
            let sample = error_sample_from(&report, sigma);
            let density_gap = (2.0 * report.count as f64 / x as f64 - sigma.value_f64()).abs();
            let ratio = sample.error.abs() / (x as f64).powf((6.0 * c.to_f64() + 1.0) / 8.0);
            worst_density = worst_density.max(density_gap);
            worst_ratio = worst_ratio.max(ratio);
        }
    }
    check(
        worst_density <= PAIR_DENSITY_TOL && worst_ratio <= PAIR_ERROR_CONSTANT,
        format!("max |2S/X - sigma| = {worst_density:.2e}, max |error| / X^((6c+1)/8) = {worst_ratio:.2e}"),
    )
}

fn sigma_constant() -> Outcome {
    let coarse = sigma_euler_product(1_000_000).map_err(|e| e.to_string())?;
    let fine = sigma_euler_product(10_000_000).map_err(|e| e.to_string())?;
    let gap = (fine.value_f64() - SIGMA_REFERENCE).abs();
    check(
        coarse.overlaps(&fine) && gap <= SIGMA_TOL,
        format!(
            "P=1e6: {:.12} +- {:.1e}; P=1e7: {:.12} +- {:.1e}; |value - {SIGMA_REFERENCE}| = {gap:.1e}",
            coarse.value_f64(),
            coarse.error_bound,
            fine.value_f64(),
            fine.error_bound
        ),
    )
}

fn double_sum() -> Outcome {
    let v = coprime_double_sum(DOUBLE_SUM_Z);
    let gap = (v - sigma_f64()).abs();
    check(gap <= DOUBLE_SUM_TOL, format!("sum up to dt <= 1e4 = {v:.8}, gap {gap:.2e}"))
}

fn decomposition() -> Outcome {
    let mut lines = Vec::new();
    for c in [q(21, 20), q(11, 10)] {
        for x in DECOMPOSITION_XS {
            let direct = sc_count(x, &c).map_err(|e| e.to_string())?.count as i64;
            for z in [SplitPoint::At(1.0), SplitPoint::Balanced, SplitPoint::Infinite] {
                let s1 = s1_term(x, &c, Some(z)).map_err(|e| e.to_string())?;
                let s2 = s2_term(x, &c, Some(z)).map_err(|e| e.to_string())?;
                if s1 + s2 != direct {
                    return Err(format!("X={x} c={c} {z:?}: {s1} + {s2} != {direct}"));
                }
            }
            lines.push(format!("X={x} c={c} S={direct}"));
        }
    }
    Ok(format!("s1 + s2 = S for z in {{1, balanced, inf}}: {}", lines.join(", ")))
}

fn tau_identity() -> Outcome {
    for z in TAU_ZS {
        let mut pairs = 0u64;
        for d in 1..=z {
            for t in 1..=z {
                if d * t > z {
                    break;
                }
                pairs += 1;
            }
        }
        let tau = divisor_summatory(z);
        if tau != pairs {
            return Err(format!("z={z}: sum tau = {tau}, pairs = {pairs}"));
        }
    }
    Ok("sum_{n<=z} tau(n) = #{dt <= z} for z = 1e2, 1e3, 1e4".into())
}

fn oracle_floor(n: u64, a: u32, b: u32) -> u64 {
    BigUint::from(n).pow(a).nth_root(b).to_u64().expect("fits")
}

fn exactpow_oracle() -> Outcome {
    let cases = [
        (q(21, 20), "1.05"),
        (q(11, 10), "1.1"),
        (q(7, 6), SEVEN_SIXTHS_60),
        (q(3, 2), "1.5"),
    ];
    let exact_policy = PrecisionPolicy::default();
    let certified = PrecisionPolicy::default().certified_only();
    for (c, decimal) in &cases {
        let (a, b) = c.as_rational().expect("rational");
        let real = Exponent::real(decimal).map_err(|e| e.to_string())?;
        for n in 1..=ORACLE_N_MAX {
            let oracle = oracle_floor(n, a, b);
            let exact = floor_pow(n, c, &exact_policy).map_err(|e| e.to_string())?;
            let exact_certified = floor_pow(n, c, &certified).map_err(|e| e.to_string())?;
            let interval = floor_pow(n, &real, &certified).map_err(|e| e.to_string())?;
            let oracle = BigUint::from(oracle);
            if exact != oracle || exact_certified != oracle || interval != oracle {
                return Err(format!(
                    "n={n} c={c}: exact {exact}, certified {exact_certified}, real {interval}, oracle {oracle}"
                ));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..RANDOM_WINDOWS {
        let (c, _) = &cases[rng.gen_range(0..cases.len())];
        let (a, b) = c.as_rational().expect("rational");
        let lo = rng.gen_range(0..50_000u64);
        let hi = lo + rng.gen_range(0..5_000u64);
        let mid = rng.gen_range(lo..=hi);
        let m = oracle_floor(rng.gen_range(lo.max(1)..=hi.max(1)), a, b);
        let whole = count_n_in_pow_window(m, c, lo, hi, &exact_policy).map_err(|e| e.to_string())?;
        let left = count_n_in_pow_window(m, c, lo, mid, &exact_policy).map_err(|e| e.to_string())?;
        let right = count_n_in_pow_window(m, c, mid, hi, &exact_policy).map_err(|e| e.to_string())?;
        let brute = (lo + 1..=hi).filter(|&n| oracle_floor(n, a, b) == m).count() as u64;
        if whole != left + right || whole != brute {
            return Err(format!(
                "window ({lo}, {hi}] split at {mid}, m={m}, c={c}: {whole} vs {left}+{right}, brute {brute}"
            ));
        }
    }
    Ok(format!(
        "exact, certified, real-interval and nth_root agree for n <= 1e5 (4 exponents); {RANDOM_WINDOWS} windows partition exactly"
    ))
}

fn van_der_corput() -> Outcome {
    let c = q(11, 10);
    let sampler = InstanceSampler::default();
    let instances = random_instances(&sampler, VDC_INSTANCES, &c).map_err(|e| e.to_string())?;
    let mut worst = 0f64;
    for inst in &instances {
        let v = check_vdc(inst).map_err(|e| e.to_string())?;
        let bound = vdc_bound(v.terms as f64, v.lambda_min);
        if v.abs_h > VDC_CONSTANT * bound || v.abs_h > v.terms as f64 + 1e-9 {
            return Err(format!("t={} h={} X={}: |H| = {} bound {bound}", inst.t, inst.h, inst.x, v.abs_h));
        }
        worst = worst.max(v.ratio);
    }
    Ok(format!("seed {}: max |H| / vdc_bound = {worst:.3} over {VDC_INSTANCES} instances", sampler.seed))
}

fn psi_truncation() -> Outcome {
    let mut worst = 0f64;
    for m in PSI_MS {
        if psi_truncated(0.5, m) != 0.0 {
            return Err(format!("psi_truncated(0.5, {m}) = {}", psi_truncated(0.5, m)));
        }
        for i in 0..PSI_GRID {
            let x = i as f64 / PSI_GRID as f64;
            let dist = nearest_int_dist(x);
            if dist <= PSI_EXCLUSION {
                continue;
            }
            let ratio = (psi(x) - psi_truncated(x, m)).abs() * f64::from(m) * dist / PSI_CONSTANT;
            worst = worst.max(ratio);
        }
    }
    check(worst <= 1.0, format!("max |psi - psi_M| M ||x|| / 4 = {worst:.4}"))
}

fn planted(x: u64, error: f64) -> ErrorSample {
    ErrorSample {
        x,
        c: "11/10".into(),
        count: 0,
        main_term: 0.0,
        error,
        normalized_error: 0.0,
        elapsed_seconds: 0.0,
    }
}

fn exponent_fit() -> Outcome {
    let xs: Vec<u64> = (0..10).map(|i| 1_000 << i).collect();
    let half: Vec<_> = xs.iter().map(|&x| planted(x, (x as f64).sqrt())).collect();
    let eight: Vec<_> = xs.iter().map(|&x| planted(x, 7.0 * (x as f64).powf(0.8))).collect();
    let s_half = fit_error_exponent(&half, SumKind::ScPair).map_err(|e| e.to_string())?.slope;
    let s_eight = fit_error_exponent(&eight, SumKind::ScPair).map_err(|e| e.to_string())?.slope;

    let cfg = ScanConfig::new(SumKind::ScPair, q(11, 10), SCAN_X.0, SCAN_X.1);
    let outcome = run_scan(&cfg).map_err(|e| e.to_string())?;
    if !outcome.failures.is_empty() {
        return Err(format!("scan rows failed: {:?}", outcome.failures));
    }
    let fit = fit_error_exponent(&outcome.samples, SumKind::ScPair).map_err(|e| e.to_string())?;
    check(
        (s_half - 0.5).abs() <= FIT_TOL
            && (s_eight - 0.8).abs() <= FIT_TOL
            && fit.slope <= SCAN_SLOPE_MAX,
        format!(
            "planted 0.5 -> {s_half:.12}, 0.8 -> {s_eight:.12}; scan slope {:.3} <= {SCAN_SLOPE_MAX} over {} points (reference {:.3})",
            fit.slope, fit.points_used, fit.reference_exponent
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("carlitz density", carlitz_density),
        ("cao-zhai density", cao_zhai_density),
        ("pair count main term and error bound", main_theorem),
        ("sigma enclosures", sigma_constant),
        ("coprime double sum", double_sum),
        ("exact decomposition", decomposition),
        ("divisor sum identity", tau_identity),
        ("floor power oracle equivalence", exactpow_oracle),
        ("second derivative test", van_der_corput),
        ("psi truncation", psi_truncation),
        ("exponent fitting", exponent_fit),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
