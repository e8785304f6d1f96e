use serde::{Deserialize, Serialize};

use super::{solve_normal, Design, DriftModel};
use crate::error::Result;
use crate::model::{Drift, ObservationSeries};
use crate::numerics::DenseMatrix;

/// Least-squares fit of the deterministic GLV model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlvFit {
    pub r_hat: Vec<f64>,
    pub a_hat: DenseMatrix,
    /// Sum over species and pairs of squared gradient residuals.
    pub residual_ss: f64,
}

impl GlvFit {
    pub fn n_species(&self) -> usize {
        self.r_hat.len()
    }

    pub fn drift_row(&self, k: usize) -> Vec<f64> {
        let mut row = vec![self.r_hat[k]];
        row.extend_from_slice(self.a_hat.row(k));
        row
    }

    pub(crate) fn from_theta(theta: &DenseMatrix, residual_ss: f64) -> Self {
        let n = theta.cols();
        let mut a_hat = DenseMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                a_hat[(k, l)] = theta[(l + 1, k)];
            }
        }
        Self {
            r_hat: (0..n).map(|k| theta[(0, k)]).collect(),
            a_hat,
            residual_ss,
        }
    }
}

impl DriftModel for GlvFit {
    fn drift(&self) -> Drift {
        Drift {
            growth: self.r_hat.clone(),
            interactions: self.a_hat.clone(),
        }
    }
}

/// Finite-difference gradients `y_i = Δ_i u / Δ_i`.
pub(crate) fn gradients(design: &Design) -> DenseMatrix {
    let mut y = design.increments.clone();
    for (i, &dt) in design.gaps.iter().enumerate() {
        y.row_mut(i).iter_mut().for_each(|v| *v /= dt);
    }
    y
}

pub(crate) fn residual_ss(design: &Design, y: &DenseMatrix, theta: &DenseMatrix) -> f64 {
    let mut ss = 0.0;
    for i in 0..design.n_pairs() {
        let g = design.regressors.row(i);
        for k in 0..y.cols() {
            let pred: f64 = g.iter().enumerate().map(|(a, ga)| ga * theta[(a, k)]).sum();
            let r = y[(i, k)] - pred;
            ss += r * r;
        }
    }
    ss
}

/// Gradient matching: ordinary least squares of `Δ_i u_k / Δ_i` on `g_i`.
pub fn fit_glv_ls(series: &ObservationSeries) -> Result<GlvFit> {
    let design = Design::new(series)?;
    let ones = vec![1.0; design.n_pairs()];
    let y = gradients(&design);
    let theta = solve_normal(&design.gram(&ones), &design.cross(&ones, &y), series.labels())?;
    let ss = residual_ss(&design, &y, &theta);
    Ok(GlvFit::from_theta(&theta, ss))
}
