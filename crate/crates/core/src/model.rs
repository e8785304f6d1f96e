//! Parameter and observation types.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Growth rates `r`, interaction matrix `A` and per-species diffusion
/// scales `σ` of the stochastic GLV model
/// `dx_k = x_k (r_k + Σ_l a_kl x_l) dt + σ_k x_k dB_k`.
///
/// JSON form: `{"r": [...], "A": [[...], ...], "sigma": [...]}` with an
/// optional `"x0"` initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsFile", into = "ParamsFile")]
pub struct ModelParams {
    r: Vec<f64>,
    a: DenseMatrix,
    sigma: Vec<f64>,
    x0: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    r: Vec<f64>,
    #[serde(rename = "A")]
    a: DenseMatrix,
    sigma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x0: Option<Vec<f64>>,
}

impl TryFrom<ParamsFile> for ModelParams {
    type Error = Error;

    fn try_from(f: ParamsFile) -> Result<Self> {
        let p = ModelParams::new(f.r, f.a, f.sigma)?;
        match f.x0 {
            Some(x0) => p.with_x0(x0),
            None => Ok(p),
        }
    }
}

impl From<ModelParams> for ParamsFile {
    fn from(p: ModelParams) -> Self {
        ParamsFile {
            r: p.r,
            a: p.a,
            sigma: p.sigma,
            x0: p.x0,
        }
    }
}

impl ModelParams {
    pub fn new(r: Vec<f64>, a: DenseMatrix, sigma: Vec<f64>) -> Result<Self> {
        let n = r.len();
        if n == 0 {
            return Err(Error::Dimension("model needs at least one species".into()));
        }
        if a.rows() != n || a.cols() != n {
            return Err(Error::Dimension(format!(
                "A is {}x{} but r has {n} entries",
                a.rows(),
                a.cols()
            )));
        }
        if sigma.len() != n {
            return Err(Error::Dimension(format!(
                "sigma has {} entries but r has {n}",
                sigma.len()
            )));
        }
        if !r.iter().chain(&sigma).all(|v| v.is_finite()) || !a.is_finite() {
            return Err(Error::InvalidInput("parameters must be finite".into()));
        }
        if sigma.iter().any(|&s| s < 0.0) {
            return Err(Error::InvalidInput("sigma entries must be >= 0".into()));
        }
        Ok(Self { r, a, sigma, x0: None })
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self> {
        if x0.len() != self.n_species() {
            return Err(Error::Dimension(format!(
                "x0 has {} entries, model has {} species",
                x0.len(),
                self.n_species()
            )));
        }
        self.x0 = Some(x0);
        Ok(self)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            message: e.to_string(),
        })
    }

    pub fn n_species(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn x0(&self) -> Option<&[f64]> {
        self.x0.as_deref()
    }

    pub fn sigma2(&self) -> Vec<f64> {
        self.sigma.iter().map(|s| s * s).collect()
    }

    /// Itô-corrected growth rates `R_k = r_k − σ_k²/2`.
    pub fn corrected_growth(&self) -> Vec<f64> {
        self.r.iter().zip(&self.sigma).map(|(r, s)| r - 0.5 * s * s).collect()
    }

    /// Log-space drift `(R, A)`.
    pub fn drift(&self) -> Drift {
        Drift {
            growth: self.corrected_growth(),
            interactions: self.a.clone(),
        }
    }

    /// Same model with every `σ_k` multiplied by `factor`.
    pub fn with_sigma_scale(&self, factor: f64) -> Result<Self> {
        let mut p = ModelParams::new(
            self.r.clone(),
            self.a.clone(),
            self.sigma.iter().map(|s| s * factor).collect(),
        )?;
        p.x0 = self.x0.clone();
        Ok(p)
    }
}

/// Drift of the log-abundance SDE: `du_k = (growth_k + Σ_l a_kl e^{u_l}) dt + ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub growth: Vec<f64>,
    pub interactions: DenseMatrix,
}

impl Drift {
    pub fn n_species(&self) -> usize {
        self.growth.len()
    }

    /// Drift of `u` evaluated at abundance `x`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.interactions.mat_vec(x);
        self.growth.iter().zip(ax).map(|(g, v)| g + v).collect()
    }
}

/// Strictly positive abundances observed at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    times: Vec<f64>,
    values: DenseMatrix,
    log_values: DenseMatrix,
    labels: Vec<String>,
}

impl ObservationSeries {
    pub fn new(times: Vec<f64>, values: DenseMatrix) -> Result<Self> {
        let labels = (1..=values.cols()).map(|k| format!("x_{k}")).collect();
        Self::with_labels(times, values, labels)
    }

    pub fn with_labels(times: Vec<f64>, values: DenseMatrix, labels: Vec<String>) -> Result<Self> {
        if times.len() != values.rows() {
            return Err(Error::Dimension(format!(
                "{} times for {} observation rows",
                times.len(),
                values.rows()
            )));
        }
        if labels.len() != values.cols() {
            return Err(Error::Dimension("one label per species required".into()));
        }
        if values.cols() == 0 {
            return Err(Error::Dimension("series has no species".into()));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidInput(format!("time {i} is not finite")));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(format!(
                "times must be strictly increasing (t[{}] = {} >= t[{}] = {})",
                i,
                times[i],
                i + 1,
                times[i + 1]
            )));
        }
        if let Some(pos) = values.as_slice().iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "abundance at row {}, species {} is not strictly positive",
                pos / values.cols(),
                pos % values.cols() + 1
            )));
        }
        let logs = values.as_slice().iter().map(|v| v.ln()).collect();
        let log_values = DenseMatrix::from_row_major(values.rows(), values.cols(), logs)?;
        Ok(Self {
            times,
            values,
            log_values,
            labels,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.times.len()
    }

    pub fn n_species(&self) -> usize {
        self.values.cols()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }

    pub fn log_values(&self) -> &DenseMatrix {
        &self.log_values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Abundances at observation `i`.
    pub fn x(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    /// Log-abundances at observation `i`.
    pub fn u(&self, i: usize) -> &[f64] {
        self.log_values.row(i)
    }

    /// Time gaps `t_{i+1} − t_i`.
    pub fn gaps(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Observation span `t_n − t_1`.
    pub fn total_time(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Sub-series at the given (sorted, distinct) row indices.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        let n = self.n_species();
        let mut data = Vec::with_capacity(rows.len() * n);
        for &i in rows {
            data.extend_from_slice(self.values.row(i));
        }
        Self::with_labels(
            rows.iter().map(|&i| self.times[i]).collect(),
            DenseMatrix::from_row_major(rows.len(), n, data)?,
            self.labels.clone(),
        )
    }

    /// Same series with all times shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Self::with_labels(
            self.times.iter().map(|t| t + offset).collect(),
            self.values.clone(),
            self.labels.clone(),
        )
    }
}
