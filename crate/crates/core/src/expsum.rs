//! The sawtooth `psi`, its truncated Fourier series, the difference
//! `Phi(k, d)`, and the exponential sum
//!
//! ```text
//! H(t, h) = sum_l e(h (l t^2 - 1)^gamma),   ((X/2)^c + 1)/t^2 < l <= (X^c + 2)/t^2,
//! ```
//!
//! with `gamma = 1/c`, together with an empirical check of the second
//! derivative test `|sum e(f(l))| <= C ((b - a) sqrt(lambda) + 1/sqrt(lambda))`.
//!
//! Phases are reduced mod 1 from an exact or 128-bit value before the
//! trigonometric functions are applied, so large arguments lose no accuracy.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactpow::{floor_pow_ratio_u64, floor_pow_u64, frac_gamma_power, Exponent, PrecisionPolicy};

/// Largest number of terms [`eval_h`] will sum.
pub const MAX_TERMS: u64 = 1_000_000_000;

/// Seed used by [`random_instances`] when none is given.
pub const DEFAULT_SEED: u64 = 20_240_611;

const CHUNK: u64 = 1 << 14;

/// `{x} - 1/2`.
pub fn psi(x: f64) -> f64 {
    let f = x - x.floor();
    // x.floor() can round x - floor(x) up to 1 for tiny negative x
    if f >= 1.0 {
        -0.5
    } else {
        f - 0.5
    }
}

/// Distance from `x` to the nearest integer.
pub fn nearest_int_dist(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

/// `sin(2 pi r)`, exactly zero at `r = 0` and `r = 1/2`.
fn sin_turns(r: f64) -> f64 {
    let r = r - r.floor();
    let (quad, within) = ((r * 4.0).floor(), (r * 4.0).fract());
    let s = (within * PI / 2.0).sin();
    let c = (within * PI / 2.0).cos();
    match quad as u8 {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    }
}

fn cos_turns(r: f64) -> f64 {
    sin_turns(r + 0.25)
}

/// `e(r) = exp(2 pi i r)`.
pub fn e_turns(r: f64) -> Complex64 {
    Complex64::new(cos_turns(r), sin_turns(r))
}

/// `-sum_{h=1}^{M} sin(2 pi h x) / (pi h)`, the symmetric partial Fourier sum
/// of [`psi`].
pub fn psi_truncated(x: f64, m: u32) -> f64 {
    let frac = x - x.floor();
    let mut sum = Neumaier::default();
    for h in 1..=m {
        // h * frac is reduced again inside sin_turns
        sum.add(sin_turns((f64::from(h) * frac).fract()) / (PI * f64::from(h)));
    }
    -sum.total()
}

/// `Phi(k, d) = psi(-(k d^2 + 1)^gamma) - psi(-(k d^2)^gamma)`.
pub fn phi_kd(k: u64, d: u64, c: &Exponent) -> Result<f64> {
    let m = d
        .checked_mul(d)
        .and_then(|d2| d2.checked_mul(k))
        .filter(|m| (1..u64::MAX).contains(m))
        .ok_or_else(|| Error::InvalidArgument(format!("k d^2 out of range for k={k}, d={d}")))?;
    let upper = frac_gamma_power(-1, m + 1, c) - 0.5;
    let lower = frac_gamma_power(-1, m, c) - 0.5;
    Ok(upper - lower)
}

/// Compensated summation.
#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// One exponential sum `H(t, h)` at scale `X`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpSumInstance {
    pub t: u64,
    pub h: i64,
    #[serde(rename = "X")]
    pub x: u64,
    pub c: Exponent,
    /// Integer `l` range, inclusive; empty when `first > last`.
    pub l_range: (u64, u64),
}

impl ExpSumInstance {
    pub fn new(t: u64, h: i64, x: u64, c: Exponent) -> Result<Self> {
        if t == 0 || h == 0 || x < 2 {
            return Err(Error::InvalidArgument(format!("instance t={t} h={h} X={x}")));
        }
        if c.is_identity() {
            return Err(Error::InvalidExponent(format!("{c} (exponential sums need c > 1)")));
        }
        let policy = PrecisionPolicy::default();
        let f = floor_pow_ratio_u64(x, 2, &c, &policy)?;
        let g = floor_pow_u64(x, &c, &policy)?;
        let t2 = t
            .checked_mul(t)
            .ok_or_else(|| Error::Overflow(format!("t^2 for t={t}")))?;
        // l t^2 > (X/2)^c + 1 and l t^2 <= X^c + 2, for integer l t^2
        let first = (f + 2).div_ceil(t2);
        let last = (g + 2) / t2;
        Ok(ExpSumInstance {
            t,
            h,
            x,
            c,
            l_range: (first, last),
        })
    }

    pub fn terms(&self) -> u64 {
        let (first, last) = self.l_range;
        (last + 1).saturating_sub(first)
    }

    pub fn is_empty(&self) -> bool {
        self.terms() == 0
    }

    /// `{h (l t^2 - 1)^gamma}`.
    pub fn phase(&self, l: u64) -> f64 {
        frac_gamma_power(self.h, l * self.t * self.t - 1, &self.c)
    }
}

/// The finite sum `H(t, h)`.
///
/// The range is cut into fixed chunks summed in parallel; chunk totals are
/// combined in order, so the result does not depend on the thread count.
pub fn eval_h(inst: &ExpSumInstance) -> Result<Complex64> {
    let terms = inst.terms();
    if terms > MAX_TERMS {
        return Err(Error::RangeTooLarge {
            terms,
            limit: MAX_TERMS,
        });
    }
    if terms == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (first, last) = inst.l_range;
    let starts: Vec<u64> = (first..=last).step_by(CHUNK as usize).collect();
    let parts: Vec<(Neumaier, Neumaier)> = starts
        .par_iter()
        .map(|&lo| {
            let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
            for l in lo..=(lo + CHUNK - 1).min(last) {
                let z = e_turns(inst.phase(l));
                re.add(z.re);
                im.add(z.im);
            }
            (re, im)
        })
        .collect();
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for (r, i) in parts {
        re.add(r.sum);
        re.add(r.comp);
        im.add(i.sum);
        im.add(i.comp);
    }
    Ok(Complex64::new(re.total(), im.total()))
}

/// `(min, max)` of `|f''(y)| = |h| gamma (1 - gamma) t^4 (y t^2 - 1)^(gamma - 2)`
/// over the real `l` interval; `y t^2 - 1` runs from `(X/2)^c` to `X^c + 1`.
pub fn second_derivative_range(inst: &ExpSumInstance) -> (f64, f64) {
    let g = inst.c.gamma_f64();
    let cf = inst.c.to_f64();
    let scale = inst.h.unsigned_abs() as f64 * g * (1.0 - g) * (inst.t as f64).powi(4);
    let lo_arg = (inst.x as f64 / 2.0).powf(cf);
    let hi_arg = (inst.x as f64).powf(cf) + 1.0;
    // gamma - 2 < 0, so |f''| decreases in y
    (scale * hi_arg.powf(g - 2.0), scale * lo_arg.powf(g - 2.0))
}

/// `length sqrt(lam) + 1 / sqrt(lam)`.
pub fn vdc_bound(length: f64, lam: f64) -> f64 {
    let s = lam.sqrt();
    length * s + 1.0 / s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VdcCheck {
    pub instance: ExpSumInstance,
    pub terms: u64,
    pub abs_h: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `|H| / vdc_bound(terms, lambda_min)`.
    pub ratio: f64,
    /// `|H| / (|h|^(1/2) X^(1/2) + |h|^(-1/2) t^(-2) X^(c - 1/2))`.
    pub specialized_ratio: f64,
}

pub fn check_vdc(inst: &ExpSumInstance) -> Result<VdcCheck> {
    if inst.is_empty() {
        return Err(Error::InvalidArgument("empty l range".into()));
    }
    let value = eval_h(inst)?.norm();
    let (lambda_min, lambda_max) = second_derivative_range(inst);
    let terms = inst.terms();
    let h = inst.h.unsigned_abs() as f64;
    let x = inst.x as f64;
    let t = inst.t as f64;
    let specialized = h.sqrt() * x.sqrt() + x.powf(inst.c.to_f64() - 0.5) / (h.sqrt() * t * t);
    Ok(VdcCheck {
        instance: inst.clone(),
        terms,
        abs_h: value,
        lambda_min,
        lambda_max,
        ratio: value / vdc_bound(terms as f64, lambda_min),
        specialized_ratio: value / specialized,
    })
}

/// `X^{(2c-1)/4}`.
pub fn z_choice(x: f64, c: &Exponent) -> f64 {
    x.powf((2.0 * c.to_f64() - 1.0) / 4.0)
}

/// `X^{(2c-1)/4} log X / (d t)`.
pub fn m_choice(x: f64, d: u64, t: u64, c: &Exponent) -> f64 {
    z_choice(x, c) * x.ln() / (d as f64 * t as f64)
}

/// `min(log M / M, M / h^2)`, or `log M / M` for `h = 0`.
pub fn bm_envelope(h: i64, m: f64) -> f64 {
    let flat = m.ln() / m;
    if h == 0 {
        return flat;
    }
    let h = h as f64;
    flat.min(m / (h * h))
}

/// Ranges sampled by [`random_instances`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceSampler {
    pub seed: u64,
    pub t_max: u64,
    pub h_max: i64,
    #[serde(rename = "xMin")]
    pub x_min: u64,
    #[serde(rename = "xMax")]
    pub x_max: u64,
}

impl Default for InstanceSampler {
    fn default() -> Self {
        InstanceSampler {
            seed: DEFAULT_SEED,
            t_max: 10,
            h_max: 50,
            x_min: 1_000,
            x_max: 100_000,
        }
    }
}

/// `count` instances with `t` uniform in `[1, t_max]`, `h` uniform in
/// `+-[1, h_max]` and `X` log-uniform in `[x_min, x_max]`. Instances whose
/// `l` range is empty are redrawn.
pub fn random_instances(sampler: &InstanceSampler, count: usize, c: &Exponent) -> Result<Vec<ExpSumInstance>> {
    if sampler.t_max == 0 || sampler.h_max <= 0 || sampler.x_min < 2 || sampler.x_max < sampler.x_min {
        return Err(Error::InvalidArgument(format!("sampler {sampler:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let (ln_lo, ln_hi) = ((sampler.x_min as f64).ln(), (sampler.x_max as f64).ln());
    let mut out = Vec::with_capacity(count);
    let mut draws = 0usize;
    while out.len() < count {
        draws += 1;
        if draws > 100 * count + 100 {
            return Err(Error::InvalidArgument("sampler keeps producing empty ranges".into()));
        }
        let t = rng.gen_range(1..=sampler.t_max);
        let h = rng.gen_range(1..=sampler.h_max) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let x = rng.gen_range(ln_lo..=ln_hi).exp().round() as u64;
        let inst = ExpSumInstance::new(t, h, x.clamp(sampler.x_min, sampler.x_max), c.clone())?;
        if !inst.is_empty() {
            out.push(inst);
        }
    }
    Ok(out)
}
