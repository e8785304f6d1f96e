//! Estimators for the stochastic GLV model and the deterministic baseline.
//!
//! Both estimators regress log-increments on the design row
//! `g_i = (1, x_1(t_i), ..., x_N(t_i))`. The stochastic fit weights each
//! increment by its gap (the Euler transition density has variance
//! `σ_k² Δ_i`); the deterministic baseline is unweighted gradient matching.

mod ci;
mod glv;
mod sglv;

pub use ci::{bootstrap_ci_glv, confidence_intervals, BootstrapCi, CiStatus, ConfidenceIntervals, SpeciesCi};
pub use glv::{fit_glv_ls, GlvFit};
pub use sglv::{approx_loglik, closed_form_lm, fisher_information, fit_sglv_amle, SglvFit};

use crate::error::{Error, Result};
use crate::model::{Drift, ObservationSeries};
use crate::numerics::{solve_linear, DenseMatrix};

/// Anything that provides a log-space drift for one-step prediction.
pub trait DriftModel {
    fn drift(&self) -> Drift;
}

/// Euler conditional mean `u_prev + (growth + A e^{u_prev}) dt`.
pub fn predict_one_step(model: &impl DriftModel, u_prev: &[f64], dt: f64) -> Vec<f64> {
    let drift = model.drift();
    let x: Vec<f64> = u_prev.iter().map(|u| u.exp()).collect();
    u_prev.iter().zip(drift.eval(&x)).map(|(u, d)| u + d * dt).collect()
}

impl DriftModel for Drift {
    fn drift(&self) -> Drift {
        self.clone()
    }
}

/// Increments and regressors of consecutive observation pairs.
pub(crate) struct Design {
    /// `(n−1) × (N+1)` rows `g_i`.
    pub regressors: DenseMatrix,
    /// `(n−1) × N` increments `Δ_i u_k`.
    pub increments: DenseMatrix,
    pub gaps: Vec<f64>,
    pub total_time: f64,
}

impl Design {
    pub fn new(series: &ObservationSeries) -> Result<Self> {
        let n_obs = series.n_obs();
        let n = series.n_species();
        let required = n + 3;
        if n_obs < required {
            return Err(Error::InsufficientData {
                required,
                actual: n_obs,
            });
        }
        let m = n_obs - 1;
        let mut regressors = DenseMatrix::zeros(m, n + 1);
        let mut increments = DenseMatrix::zeros(m, n);
        for i in 0..m {
            let row = regressors.row_mut(i);
            row[0] = 1.0;
            row[1..].copy_from_slice(series.x(i));
            let (now, next) = (series.u(i), series.u(i + 1));
            for k in 0..n {
                increments[(i, k)] = next[k] - now[k];
            }
        }
        Ok(Self {
            regressors,
            increments,
            gaps: series.gaps(),
            total_time: series.total_time(),
        })
    }

    pub fn n_pairs(&self) -> usize {
        self.gaps.len()
    }

    pub fn n_params(&self) -> usize {
        self.regressors.cols()
    }

    /// `Σ_i w_i g_i g_iᵀ`.
    pub fn gram(&self, weights: &[f64]) -> DenseMatrix {
        let p = self.n_params();
        let mut g = DenseMatrix::zeros(p, p);
        for (i, &w) in weights.iter().enumerate() {
            let row = self.regressors.row(i);
            for a in 0..p {
                let wa = w * row[a];
                for b in a..p {
                    g[(a, b)] += wa * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    /// `Σ_i w_i g_i y_iᵀ` for a `(n−1) × N` response.
    pub fn cross(&self, weights: &[f64], response: &DenseMatrix) -> DenseMatrix {
        let p = self.n_params();
        let n = response.cols();
        let mut c = DenseMatrix::zeros(p, n);
        for (i, &w) in weights.iter().enumerate() {
            let g = self.regressors.row(i);
            let y = response.row(i);
            for a in 0..p {
                let wa = w * g[a];
                for k in 0..n {
                    c[(a, k)] += wa * y[k];
                }
            }
        }
        c
    }
}

fn column_label(j: usize, labels: &[String]) -> String {
    match (j, labels.get(j.wrapping_sub(1))) {
        (0, _) => "intercept".to_owned(),
        (_, Some(name)) => format!("species {j} ({name})"),
        (_, None) => format!("species {j}"),
    }
}

/// Solves the normal equations `gram · θ = rhs` after scaling `gram` to unit
/// diagonal. A failed pivot is reported as collinearity of that column,
/// named from `labels` when given.
pub(crate) fn solve_normal(gram: &DenseMatrix, rhs: &DenseMatrix, labels: &[String]) -> Result<DenseMatrix> {
    let p = gram.rows();
    let mut scale = vec![0.0; p];
    for j in 0..p {
        let d = gram[(j, j)];
        if !(d > 0.0 && d.is_finite()) {
            return Err(collinear(j, labels));
        }
        scale[j] = 1.0 / d.sqrt();
    }
    let mut scaled = gram.clone();
    for a in 0..p {
        for b in 0..p {
            scaled[(a, b)] *= scale[a] * scale[b];
        }
    }
    let mut scaled_rhs = rhs.clone();
    for a in 0..p {
        for v in scaled_rhs.row_mut(a) {
            *v *= scale[a];
        }
    }
    let mut theta = match solve_linear(&scaled, &scaled_rhs) {
        Ok(t) => t,
        Err(Error::Singular { pivot }) => return Err(collinear(pivot, labels)),
        Err(e) => return Err(e),
    };
    for a in 0..p {
        for v in theta.row_mut(a) {
            *v *= scale[a];
        }
    }
    Ok(theta)
}

fn collinear(pivot: usize, labels: &[String]) -> Error {
    let earlier = if pivot == 0 {
        "nothing (column is identically zero)".to_owned()
    } else {
        (0..pivot)
            .map(|j| column_label(j, labels))
            .collect::<Vec<_>>()
            .join(", ")
    };
    Error::Collinear {
        column: column_label(pivot, labels),
        earlier,
    }
}
