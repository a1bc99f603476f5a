use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactpow::Exponent;
use crate::expsum::{check_vdc, nearest_int_dist, psi, psi_truncated, random_instances, InstanceSampler, VdcCheck};

/// Constant in the truncation bound `|psi - psi_M| <= C / (M ||x||)`.
pub const PSI_BOUND_CONSTANT: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PsiCheckRow {
    pub m: u32,
    pub points: usize,
    /// Largest `|psi - psi_M| * M ||x|| / C` over the grid.
    pub max_ratio: f64,
    pub worst_x: f64,
    pub violations: usize,
    pub half_is_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PsiCheckReport {
    pub grid_points: usize,
    pub exclusion: f64,
    pub constant: f64,
    pub rows: Vec<PsiCheckRow>,
}

impl PsiCheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.violations == 0 && r.half_is_zero)
    }
}

/// Uniform grid `x_i = i / grid_points` on `[0, 1)` minus points within
/// `exclusion` of an integer.
pub fn psi_grid(grid_points: usize, exclusion: f64) -> Vec<f64> {
    (0..grid_points)
        .map(|i| i as f64 / grid_points as f64)
        .filter(|&x| nearest_int_dist(x) > exclusion)
        .collect()
}

pub fn psi_check(m_values: &[u32], grid_points: usize, exclusion: f64) -> Result<PsiCheckReport> {
    if m_values.is_empty() || m_values.contains(&0) || grid_points == 0 {
        return Err(Error::InvalidArgument("psi-check needs positive M values and grid size".into()));
    }
    let grid = psi_grid(grid_points, exclusion);
    let rows = m_values
        .iter()
        .map(|&m| {
            let mut row = PsiCheckRow {
                m,
                points: grid.len(),
                max_ratio: 0.0,
                worst_x: f64::NAN,
                violations: 0,
                half_is_zero: psi_truncated(0.5, m) == 0.0,
            };
            for &x in &grid {
                let bound = PSI_BOUND_CONSTANT / (f64::from(m) * nearest_int_dist(x));
                let ratio = (psi(x) - psi_truncated(x, m)).abs() / bound;
                if ratio > row.max_ratio {
                    row.max_ratio = ratio;
                    row.worst_x = x;
                }
                if ratio > 1.0 {
                    row.violations += 1;
                }
            }
            row
        })
        .collect();
    Ok(PsiCheckReport {
        grid_points,
        exclusion,
        constant: PSI_BOUND_CONSTANT,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpSumCheckReport {
    pub sampler: InstanceSampler,
    pub c: Exponent,
    pub instances: usize,
    pub max_ratio: f64,
    pub max_specialized_ratio: f64,
    /// `|H| <= #terms` held for every instance.
    pub trivial_bound_holds: bool,
    pub checks: Vec<VdcCheck>,
}

pub fn expsum_check(sampler: &InstanceSampler, instances: usize, c: &Exponent) -> Result<ExpSumCheckReport> {
    let checks = random_instances(sampler, instances, c)?
        .iter()
        .map(check_vdc)
        .collect::<Result<Vec<_>>>()?;
    let max = |f: fn(&VdcCheck) -> f64| checks.iter().map(f).fold(0.0, f64::max);
    Ok(ExpSumCheckReport {
        sampler: sampler.clone(),
        c: c.clone(),
        instances,
        max_ratio: max(|v| v.ratio),
        max_specialized_ratio: max(|v| v.specialized_ratio),
        trivial_bound_holds: checks.iter().all(|v| v.abs_h <= v.terms as f64 + 1e-9),
        checks,
    })
}
