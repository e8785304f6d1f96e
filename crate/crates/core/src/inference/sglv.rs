use serde::{Deserialize, Serialize};

use super::{solve_normal, Design, DriftModel};
use crate::error::{Error, Result};
use crate::model::{Drift, ObservationSeries};
use crate::numerics::DenseMatrix;

/// Approximate maximum likelihood fit of the stochastic GLV model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SglvFit {
    pub r_hat: Vec<f64>,
    pub a_hat: DenseMatrix,
    pub sigma2_hat: Vec<f64>,
    /// Itô-corrected growth `R̂_k = r̂_k − σ̂_k²/2`.
    #[serde(rename = "R_hat")]
    pub growth_hat: Vec<f64>,
    pub loglik: f64,
    /// Per-species information matrices `Î_k` over `(R_k, a_k1, ..., a_kN)`.
    pub fisher: Vec<DenseMatrix>,
    pub n_obs: usize,
    pub total_time: f64,
}

impl SglvFit {
    pub fn n_species(&self) -> usize {
        self.r_hat.len()
    }

    /// Row `k` of the drift estimate as `(R̂_k, â_k1, ..., â_kN)`.
    pub fn drift_row(&self, k: usize) -> Vec<f64> {
        let mut row = vec![self.growth_hat[k]];
        row.extend_from_slice(self.a_hat.row(k));
        row
    }
}

impl DriftModel for SglvFit {
    fn drift(&self) -> Drift {
        Drift {
            growth: self.growth_hat.clone(),
            interactions: self.a_hat.clone(),
        }
    }
}

/// Closed-form approximate MLE.
///
/// For each species the drift row maximizes the Euler log-likelihood,
/// i.e. solves `Σ_i Δ_i g_i g_iᵀ θ_k = Σ_i g_i Δ_i u_k`; the diffusion is the
/// mean gap-normalized squared residual.
pub fn fit_sglv_amle(series: &ObservationSeries) -> Result<SglvFit> {
    let design = Design::new(series)?;
    let n = series.n_species();
    let m = design.n_pairs();
    let gram = design.gram(&design.gaps);
    let ones = vec![1.0; m];
    let cross = design.cross(&ones, &design.increments);
    let theta = solve_normal(&gram, &cross, series.labels())?;

    let mut sigma2 = vec![0.0; n];
    for i in 0..m {
        let g = design.regressors.row(i);
        let dt = design.gaps[i];
        for k in 0..n {
            let pred: f64 = (0..=n).map(|a| g[a] * theta[(a, k)]).sum();
            let resid = design.increments[(i, k)] - pred * dt;
            sigma2[k] += resid * resid / dt;
        }
    }
    sigma2.iter_mut().for_each(|s| *s /= m as f64);

    let growth: Vec<f64> = (0..n).map(|k| theta[(0, k)]).collect();
    let mut a_hat = DenseMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            a_hat[(k, l)] = theta[(l + 1, k)];
        }
    }
    let r_hat = growth.iter().zip(&sigma2).map(|(g, s)| g + s / 2.0).collect();
    let info = gram.scaled(1.0 / design.total_time);
    let drift = Drift {
        growth: growth.clone(),
        interactions: a_hat.clone(),
    };
    let loglik = approx_loglik(&drift, &sigma2, series);
    Ok(SglvFit {
        r_hat,
        a_hat,
        sigma2_hat: sigma2,
        growth_hat: growth,
        loglik,
        fisher: vec![info; n],
        n_obs: series.n_obs(),
        total_time: design.total_time,
    })
}

/// The `L` (N×N) and `M` (N×N) matrices of the printed closed form:
///
/// `L_ls = T Σ_i x_l x_s Δ_i − (Σ_i x_l Δ_i)(Σ_i x_s Δ_i)`
/// `M_kp = (u_k(t_n) − u_k(t_1)) Σ_i x_p Δ_i − T Σ_i Δ_i u_k x_p`
///
/// with `T = Σ_i Δ_i`. The likelihood maximizer satisfies `L â_kᵀ = −M_k`.
pub fn closed_form_lm(series: &ObservationSeries) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = series.n_species();
    if series.n_obs() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: series.n_obs(),
        });
    }
    let gaps = series.gaps();
    let total: f64 = gaps.iter().sum();
    let mut s1 = vec![0.0; n];
    let mut s2 = DenseMatrix::zeros(n, n);
    let mut v = DenseMatrix::zeros(n, n);
    for (i, &dt) in gaps.iter().enumerate() {
        let x = series.x(i);
        let (u0, u1) = (series.u(i), series.u(i + 1));
        for l in 0..n {
            s1[l] += x[l] * dt;
            for s in 0..n {
                s2[(l, s)] += x[l] * x[s] * dt;
            }
        }
        for k in 0..n {
            let du = u1[k] - u0[k];
            for p in 0..n {
                v[(k, p)] += du * x[p];
            }
        }
    }
    let first = series.u(0);
    let last = series.u(series.n_obs() - 1);
    let mut l_mat = DenseMatrix::zeros(n, n);
    let mut m_mat = DenseMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            l_mat[(a, b)] = total * s2[(a, b)] - s1[a] * s1[b];
            m_mat[(a, b)] = (last[a] - first[a]) * s1[b] - total * v[(a, b)];
        }
    }
    Ok((l_mat, m_mat))
}

/// Per-species information `Î_k = T⁻¹ Σ_i Δ_i g_i g_iᵀ` (identical across k).
pub fn fisher_information(series: &ObservationSeries) -> Result<Vec<DenseMatrix>> {
    let design = Design::new(series)?;
    let info = design.gram(&design.gaps).scaled(1.0 / design.total_time);
    Ok(vec![info; series.n_species()])
}

/// Euler log-likelihood with constants dropped:
/// `−Σ_k [(n−1) log σ_k² + Σ_i (Δ_i u_k − drift_k(x_i) Δ_i)² / (σ_k² Δ_i)]`.
pub fn approx_loglik(drift: &Drift, sigma2: &[f64], series: &ObservationSeries) -> f64 {
    let n = series.n_species();
    let m = series.n_obs().saturating_sub(1);
    let mut ss = vec![0.0; n];
    for i in 0..m {
        let dt = series.times()[i + 1] - series.times()[i];
        let mu = drift.eval(series.x(i));
        let (u0, u1) = (series.u(i), series.u(i + 1));
        for k in 0..n {
            let r = u1[k] - u0[k] - mu[k] * dt;
            ss[k] += r * r / dt;
        }
    }
    -(0..n)
        .map(|k| m as f64 * sigma2[k].ln() + ss[k] / sigma2[k])
        .sum::<f64>()
}
