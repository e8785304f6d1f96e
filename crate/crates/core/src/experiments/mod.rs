//! Monte Carlo estimator comparison and cross-validated prediction.

mod crossval;
mod mc;

pub use crossval::{run_crossval, split_indices, MspeResult, MspeRow};
pub use mc::{run_mc_study, McCell, McConfig, McEntry, McResult, MseStat};

use crate::model::ModelParams;
use crate::numerics::DenseMatrix;

/// Five-species benchmark with mixed-sign interactions, `σ = 0.1`.
pub fn case1_params() -> ModelParams {
    let a = DenseMatrix::from_rows(vec![
        vec![-2.0, -2.5, -2.0, 1.0, 1.0],
        vec![1.0, -6.0, -2.0, 3.0, -1.0],
        vec![-1.0, -2.0, -5.0, 1.0, -1.0],
        vec![-1.0, 0.5, 0.1, -10.0, 1.0],
        vec![-1.5, -2.0, -2.0, 2.0, -9.0],
    ])
    .expect("static matrix");
    ModelParams::new(vec![1.0, 1.5, 2.0, 1.5, 2.0], a, vec![0.1; 5])
        .and_then(|p| p.with_x0(case_x0()))
        .expect("static parameters")
}

/// Same drift as [`case1_params`] with `σ = 1`.
pub fn case2_params() -> ModelParams {
    case1_params().with_sigma_scale(10.0).expect("static parameters")
}

/// Initial state shared by both benchmark cases.
pub fn case_x0() -> Vec<f64> {
    vec![0.5, 0.15, 0.13, 0.05, 0.04]
}

/// Runs `f(i)` for `i in 0..count` on `jobs` threads, returning results in
/// index order. `jobs <= 1` runs serially.
pub(crate) fn ordered_map<T, F>(count: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if jobs <= 1 {
        return (0..count).map(f).collect();
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| (0..count).into_par_iter().map(f).collect())
}

/// Mean and standard error (`sd / √n`) of a sample.
pub(crate) fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
