use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{case1_params, case2_params, mean_se, ordered_map};
use crate::error::{Error, Result};
use crate::inference::{fit_glv_ls, fit_sglv_amle};
use crate::model::ModelParams;
use crate::numerics::RngStream;
use crate::simulator::{simulate_observed, SamplingSchedule, SimConfig};

/// Replicates of one sample size use stream ids `cell << 20 | replicate`.
const CELL_STREAM_SHIFT: u32 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub params: ModelParams,
    pub x0: Vec<f64>,
    /// Gap distribution; `n_obs` here is ignored in favour of `n_obs` below.
    pub schedule: SamplingSchedule,
    pub n_obs: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub fine_dt: f64,
}

impl McConfig {
    pub fn new(params: ModelParams, n_obs: Vec<usize>, replicates: usize, seed: u64) -> Result<Self> {
        let x0 = params
            .x0()
            .map(<[f64]>::to_vec)
            .ok_or_else(|| Error::InvalidInput("Monte Carlo parameters need an x0".into()))?;
        Ok(Self {
            params,
            x0,
            schedule: SamplingSchedule::irregular_default(2),
            n_obs,
            replicates,
            seed,
            fine_dt: 0.01,
        })
    }

    /// Case 1 with the irregular 0.1/0.3/0.5 schedule.
    pub fn case1(n_obs: Vec<usize>, replicates: usize, seed: u64) -> Self {
        Self::new(case1_params(), n_obs, replicates, seed).expect("case 1 has x0")
    }

    pub fn case2(n_obs: Vec<usize>, replicates: usize, seed: u64) -> Self {
        Self::new(case2_params(), n_obs, replicates, seed).expect("case 2 has x0")
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidInput("need at least one replicate".into()));
        }
        if self.n_obs.is_empty() {
            return Err(Error::InvalidInput("need at least one sample size".into()));
        }
        if self.n_obs.len() >= 1 << (32 - CELL_STREAM_SHIFT) || self.replicates >= 1 << CELL_STREAM_SHIFT {
            return Err(Error::InvalidInput(
                "too many cells or replicates for the stream layout".into(),
            ));
        }
        for &n in &self.n_obs {
            SamplingSchedule::new(self.schedule.gaps.clone(), self.schedule.probs.clone(), n)?;
        }
        Ok(())
    }

    pub fn stream_id(cell: usize, replicate: usize) -> u64 {
        ((cell as u64) << CELL_STREAM_SHIFT) | replicate as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseStat {
    pub mse: f64,
    /// `sd(squared errors) / √R`.
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEntry {
    pub param: String,
    pub species: usize,
    pub truth: f64,
    pub sglv: MseStat,
    /// Not estimated by the deterministic baseline for diffusion parameters.
    pub glv: Option<MseStat>,
}

impl McEntry {
    pub fn is_interaction(&self) -> bool {
        self.param.starts_with("a_")
    }

    pub fn is_growth(&self) -> bool {
        self.param.starts_with("r_")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCell {
    pub n_obs: usize,
    pub replicates_used: usize,
    pub replicates_failed: usize,
    /// Per species: `a_k1..a_kN`, `r_k`, `sigma2_k`.
    pub entries: Vec<McEntry>,
}

impl McCell {
    pub fn entry(&self, param: &str) -> Option<&McEntry> {
        self.entries.iter().find(|e| e.param == param)
    }

    /// Interaction and growth-rate entries.
    pub fn drift_entries(&self) -> impl Iterator<Item = &McEntry> {
        self.entries.iter().filter(|e| e.is_interaction() || e.is_growth())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub cells: Vec<McCell>,
}

struct ReplicateErrors {
    sglv: Vec<f64>,
    glv: Vec<f64>,
}

fn parameter_layout(params: &ModelParams) -> Vec<(String, usize, f64)> {
    let n = params.n_species();
    let sigma2 = params.sigma2();
    let mut out = Vec::with_capacity(n * (n + 2));
    for k in 0..n {
        for l in 0..n {
            out.push((format!("a_{}_{}", k + 1, l + 1), k + 1, params.a()[(k, l)]));
        }
        out.push((format!("r_{}", k + 1), k + 1, params.r()[k]));
        out.push((format!("sigma2_{}", k + 1), k + 1, sigma2[k]));
    }
    out
}

fn run_replicate(config: &McConfig, n_obs: usize, stream: u64) -> Option<ReplicateErrors> {
    let schedule = SamplingSchedule {
        n_obs,
        ..config.schedule.clone()
    };
    let sim = SimConfig {
        fine_dt: config.fine_dt,
        x0: config.x0.clone(),
        seed: config.seed,
        stream_id: stream,
    };
    let mut rng = RngStream::new(config.seed, stream);
    let series = simulate_observed(&config.params, &sim, &schedule, &mut rng).ok()?;
    let sglv = fit_sglv_amle(&series).ok()?;
    let glv = fit_glv_ls(&series).ok()?;
    let p = &config.params;
    let n = p.n_species();
    let sigma2 = p.sigma2();
    let mut se = Vec::with_capacity(n * (n + 2));
    let mut ge = Vec::with_capacity(n * (n + 1));
    for k in 0..n {
        for l in 0..n {
            se.push((sglv.a_hat[(k, l)] - p.a()[(k, l)]).powi(2));
            ge.push((glv.a_hat[(k, l)] - p.a()[(k, l)]).powi(2));
        }
        se.push((sglv.r_hat[k] - p.r()[k]).powi(2));
        ge.push((glv.r_hat[k] - p.r()[k]).powi(2));
        se.push((sglv.sigma2_hat[k] - sigma2[k]).powi(2));
    }
    Some(ReplicateErrors { sglv: se, glv: ge })
}

/// Simulate, fit both estimators and tabulate squared errors for every
/// sample size in the config. Replicates whose simulation or either fit
/// fails are excluded and counted.
pub fn run_mc_study(config: &McConfig, jobs: usize) -> Result<McResult> {
    config.validate()?;
    let layout = parameter_layout(&config.params);
    let mut cells = Vec::with_capacity(config.n_obs.len());
    for (c, &n_obs) in config.n_obs.iter().enumerate() {
        let reps = ordered_map(config.replicates, jobs, |r| {
            run_replicate(config, n_obs, McConfig::stream_id(c, r))
        });
        let ok: Vec<ReplicateErrors> = reps.into_iter().flatten().collect();
        let failed = config.replicates - ok.len();
        let mut glv_index = 0;
        let entries = layout
            .iter()
            .enumerate()
            .map(|(j, (name, species, truth))| {
                let column: Vec<f64> = ok.iter().map(|e| e.sglv[j]).collect();
                let (mse, se) = mean_se(&column);
                let glv = if name.starts_with("sigma2_") {
                    None
                } else {
                    let column: Vec<f64> = ok.iter().map(|e| e.glv[glv_index]).collect();
                    glv_index += 1;
                    let (mse, se) = mean_se(&column);
                    Some(MseStat { mse, se })
                };
                McEntry {
                    param: name.clone(),
                    species: *species,
                    truth: *truth,
                    sglv: MseStat { mse, se },
                    glv,
                }
            })
            .collect();
        cells.push(McCell {
            n_obs,
            replicates_used: ok.len(),
            replicates_failed: failed,
            entries,
        });
    }
    Ok(McResult { cells })
}

impl McResult {
    /// One row per (sample size, parameter).
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "n_obs,param,species,truth,sglv_mse,sglv_se,glv_mse,glv_se")?;
        for cell in &self.cells {
            for e in &cell.entries {
                let (gm, gs) = e.glv.map_or((String::new(), String::new()), |g| {
                    (format!("{:.10e}", g.mse), format!("{:.10e}", g.se))
                });
                writeln!(
                    out,
                    "{},{},{},{},{:.10e},{:.10e},{},{}",
                    cell.n_obs, e.param, e.species, e.truth, e.sglv.mse, e.sglv.se, gm, gs
                )?;
            }
        }
        Ok(())
    }
}
