use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::glv::{gradients, GlvFit};
use super::{solve_normal, Design, SglvFit};
use crate::error::{Error, Result};
use crate::model::ObservationSeries;
use crate::numerics::{DenseMatrix, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiStatus {
    Available,
    InformationSingular,
}

/// Intervals for one species over `(r_k, a_k1, ..., a_kN)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesCi {
    pub status: CiStatus,
    pub estimate: Vec<f64>,
    /// Empty unless `status` is `Available`.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Interval excludes zero.
    pub significant: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceIntervals {
    pub level: f64,
    pub species: Vec<SpeciesCi>,
}

impl ConfidenceIntervals {
    /// Interval for `a_kl` (0-based), if available.
    pub fn interaction(&self, k: usize, l: usize) -> Option<(f64, f64)> {
        let s = &self.species[k];
        (s.status == CiStatus::Available).then(|| (s.lower[l + 1], s.upper[l + 1]))
    }

    pub fn growth(&self, k: usize) -> Option<(f64, f64)> {
        let s = &self.species[k];
        (s.status == CiStatus::Available).then(|| (s.lower[0], s.upper[0]))
    }

    pub fn interaction_significant(&self, k: usize, l: usize) -> bool {
        let s = &self.species[k];
        s.status == CiStatus::Available && s.significant[l + 1]
    }
}

fn check_level(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("level {level} is not in (0, 1)")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + level / 2.0))
}

fn species_ci(estimate: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> SpeciesCi {
    let significant = lower
        .iter()
        .zip(&upper)
        .map(|(&lo, &hi)| lo > 0.0 || hi < 0.0)
        .collect();
    SpeciesCi {
        status: CiStatus::Available,
        estimate,
        lower,
        upper,
        significant,
    }
}

/// Wald intervals `θ̂ ± z σ̂_k √(diag(Î_k⁻¹)/T)`.
///
/// `Î_k` is the time-averaged information, so the asymptotic covariance of
/// the drift row is `σ_k² Î_k⁻¹ / T`. The growth-rate interval is centred on
/// `r̂_k` with the half-width of `R̂_k`.
pub fn confidence_intervals(fit: &SglvFit, level: f64) -> Result<ConfidenceIntervals> {
    let z = check_level(level)?;
    let n = fit.n_species();
    let mut species = Vec::with_capacity(n);
    for k in 0..n {
        let mut estimate = vec![fit.r_hat[k]];
        estimate.extend_from_slice(fit.a_hat.row(k));
        let info = &fit.fisher[k];
        let p = info.rows();
        let inverse = match solve_normal(info, &DenseMatrix::identity(p), &[]) {
            Ok(inv) => inv,
            Err(_) => {
                species.push(SpeciesCi {
                    status: CiStatus::InformationSingular,
                    estimate,
                    lower: Vec::new(),
                    upper: Vec::new(),
                    significant: Vec::new(),
                });
                continue;
            }
        };
        let sd = fit.sigma2_hat[k].sqrt();
        let half: Vec<f64> = (0..p)
            .map(|j| z * sd * (inverse[(j, j)].max(0.0) / fit.total_time).sqrt())
            .collect();
        let lower = estimate.iter().zip(&half).map(|(e, h)| e - h).collect();
        let upper = estimate.iter().zip(&half).map(|(e, h)| e + h).collect();
        species.push(species_ci(estimate, lower, upper));
    }
    Ok(ConfidenceIntervals { level, species })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub intervals: ConfidenceIntervals,
    pub replicates_used: usize,
    pub dropped: usize,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Residual bootstrap of the gradient-matching regression with percentile
/// intervals. Each species' residuals are resampled independently.
pub fn bootstrap_ci_glv(
    series: &ObservationSeries,
    fit: &GlvFit,
    replicates: usize,
    level: f64,
    rng: &mut RngStream,
) -> Result<BootstrapCi> {
    check_level(level)?;
    if replicates < 100 {
        return Err(Error::InvalidInput(format!(
            "bootstrap needs at least 100 replicates, got {replicates}"
        )));
    }
    let design = Design::new(series)?;
    let n = series.n_species();
    if fit.n_species() != n {
        return Err(Error::Dimension("fit and series disagree on species count".into()));
    }
    let m = design.n_pairs();
    let y = gradients(&design);
    let mut fitted = DenseMatrix::zeros(m, n);
    let mut resid = DenseMatrix::zeros(m, n);
    for i in 0..m {
        let g = design.regressors.row(i);
        for k in 0..n {
            let row = fit.drift_row(k);
            let pred: f64 = g.iter().zip(&row).map(|(a, b)| a * b).sum();
            fitted[(i, k)] = pred;
            resid[(i, k)] = y[(i, k)] - pred;
        }
    }
    let ones = vec![1.0; m];
    let gram = design.gram(&ones);

    // draws[k][j] holds replicate values of parameter j of species k.
    let mut draws = vec![vec![Vec::with_capacity(replicates); n + 1]; n];
    let mut dropped = 0;
    let mut y_star = DenseMatrix::zeros(m, n);
    for _ in 0..replicates {
        for k in 0..n {
            for i in 0..m {
                let j = rng.below(m as u64) as usize;
                y_star[(i, k)] = fitted[(i, k)] + resid[(j, k)];
            }
        }
        match solve_normal(&gram, &design.cross(&ones, &y_star), series.labels()) {
            Ok(theta) if theta.is_finite() => {
                for k in 0..n {
                    for j in 0..=n {
                        draws[k][j].push(theta[(j, k)]);
                    }
                }
            }
            _ => dropped += 1,
        }
    }
    let used = replicates - dropped;
    if used == 0 {
        return Err(Error::Solver("every bootstrap refit failed".into()));
    }
    let alpha = 1.0 - level;
    let mut species = Vec::with_capacity(n);
    for (k, per_param) in draws.iter_mut().enumerate() {
        let mut lower = Vec::with_capacity(n + 1);
        let mut upper = Vec::with_capacity(n + 1);
        for values in per_param.iter_mut() {
            values.sort_by(f64::total_cmp);
            lower.push(quantile(values, alpha / 2.0));
            upper.push(quantile(values, 1.0 - alpha / 2.0));
        }
        species.push(species_ci(fit.drift_row(k), lower, upper));
    }
    Ok(BootstrapCi {
        intervals: ConfidenceIntervals { level, species },
        replicates_used: used,
        dropped,
    })
}
