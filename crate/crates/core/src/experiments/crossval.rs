use serde::{Deserialize, Serialize};

use super::{mean_se, ordered_map, MseStat};
use crate::error::{Error, Result};
use crate::inference::{fit_glv_ls, fit_sglv_amle, predict_one_step, DriftModel};
use crate::model::ObservationSeries;
use crate::numerics::RngStream;

/// Held-out indices are drawn from `1..n` so every test point has an
/// observed predecessor. Returns `(train, test)`, both sorted.
pub fn split_indices(n_obs: usize, k: usize, rng: &mut RngStream) -> Result<(Vec<usize>, Vec<usize>)> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("fold count {k} must be at least 2")));
    }
    if n_obs < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: n_obs,
        });
    }
    let m = n_obs.div_ceil(k);
    let mut pool: Vec<usize> = (1..n_obs).collect();
    if m > pool.len() {
        return Err(Error::InvalidInput(format!(
            "cannot hold out {m} of {n_obs} observations"
        )));
    }
    // Partial Fisher-Yates.
    for i in 0..m {
        let j = i + rng.below((pool.len() - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut test = pool[..m].to_vec();
    test.sort_unstable();
    let mut held = vec![false; n_obs];
    test.iter().for_each(|&i| held[i] = true);
    let train = (0..n_obs).filter(|&i| !held[i]).collect();
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MspeRow {
    pub k: usize,
    pub splits_used: usize,
    /// Splits where either fit failed on the training set.
    pub dropped: usize,
    pub sglv: MseStat,
    pub glv: MseStat,
    /// Splits where the stochastic model had strictly lower error.
    pub sglv_wins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MspeResult {
    pub n_splits: usize,
    pub rows: Vec<MspeRow>,
}

fn split_error(model: &impl DriftModel, series: &ObservationSeries, test: &[usize]) -> f64 {
    let total: f64 = test
        .iter()
        .map(|&i| {
            let dt = series.times()[i] - series.times()[i - 1];
            let pred = predict_one_step(model, series.u(i - 1), dt);
            pred.iter().zip(series.u(i)).map(|(p, u)| (p - u).powi(2)).sum::<f64>()
        })
        .sum();
    total / test.len() as f64
}

fn run_split(series: &ObservationSeries, train: &[usize], test: &[usize]) -> Option<(f64, f64)> {
    let sub = series.select(train).ok()?;
    let sglv = fit_sglv_amle(&sub).ok()?;
    let glv = fit_glv_ls(&sub).ok()?;
    Some((split_error(&sglv, series, test), split_error(&glv, series, test)))
}

/// Random-split prediction error of both estimators for each fold count.
///
/// Each split holds out `⌈n/k⌉` observations, fits on the rest and scores
/// one-step log-abundance predictions from the observed preceding point,
/// summing over species and averaging over held-out points. Splits are
/// drawn sequentially from `rng`; fitting runs on `jobs` threads.
pub fn run_crossval(
    series: &ObservationSeries,
    ks: &[usize],
    n_splits: usize,
    jobs: usize,
    rng: &mut RngStream,
) -> Result<MspeResult> {
    if n_splits == 0 {
        return Err(Error::InvalidInput("need at least one split".into()));
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let splits = (0..n_splits)
            .map(|_| split_indices(series.n_obs(), k, rng))
            .collect::<Result<Vec<_>>>()?;
        let scores = ordered_map(n_splits, jobs, |s| run_split(series, &splits[s].0, &splits[s].1));
        let ok: Vec<(f64, f64)> = scores.into_iter().flatten().collect();
        let (sm, ss) = mean_se(&ok.iter().map(|p| p.0).collect::<Vec<_>>());
        let (gm, gs) = mean_se(&ok.iter().map(|p| p.1).collect::<Vec<_>>());
        rows.push(MspeRow {
            k,
            splits_used: ok.len(),
            dropped: n_splits - ok.len(),
            sglv: MseStat { mse: sm, se: ss },
            glv: MseStat { mse: gm, se: gs },
            sglv_wins: ok.iter().filter(|p| p.0 < p.1).count(),
        });
    }
    Ok(MspeResult { n_splits, rows })
}
