#![allow(clippy::needless_range_loop)]

mod common;

use common::case1_a;
use sglv::experiments::{case1_params, case_x0};
use sglv::numerics::{DenseMatrix, RngStream};
use sglv::simulator::{
    deterministic_glv_flow, sample_schedule, simulate_log_euler, simulate_observed, SamplingSchedule, SimConfig,
};
use sglv::ModelParams;

fn scalar(r: f64, a: f64, sigma: f64) -> ModelParams {
    ModelParams::new(vec![r], DenseMatrix::from_rows(vec![vec![a]]).unwrap(), vec![sigma]).unwrap()
}

#[test]
fn same_seed_same_series() {
    let params = case1_params();
    let config = SimConfig::new(case_x0(), 7, 0);
    let schedule = SamplingSchedule::irregular_default(300);
    let a = simulate_observed(&params, &config, &schedule, &mut config.rng()).unwrap();
    let b = simulate_observed(&params, &config, &schedule, &mut config.rng()).unwrap();
    assert_eq!(a, b);
    let other = SimConfig::new(case_x0(), 8, 0);
    let c = simulate_observed(&params, &other, &schedule, &mut other.rng()).unwrap();
    assert_ne!(a, c);
}

#[test]
fn observation_times_are_fine_grid_points() {
    let params = case1_params();
    let config = SimConfig::new(case_x0(), 3, 1);
    let series = simulate_observed(
        &params,
        &config,
        &SamplingSchedule::irregular_default(200),
        &mut config.rng(),
    )
    .unwrap();
    for &t in series.times() {
        let j = t / config.fine_dt;
        assert_eq!(j.round() * config.fine_dt, t, "time {t} off grid");
    }
}

#[test]
fn zero_noise_matches_independent_euler_loop() {
    let params = case1_params().with_sigma_scale(0.0).unwrap();
    let config = SimConfig::new(case_x0(), 1, 0);
    let traj = simulate_log_euler(&params, &config, 3.0, &mut config.rng()).unwrap();
    let a = case1_a();
    let r = [1.0, 1.5, 2.0, 1.5, 2.0];
    let mut u: Vec<f64> = case_x0().iter().map(|x| x.ln()).collect();
    for j in 1..traj.n_points() {
        let x: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let next: Vec<f64> = (0..5)
            .map(|k| u[k] + (r[k] + (0..5).map(|l| a[k][l] * x[l]).sum::<f64>()) * 0.01)
            .collect();
        u = next;
        for k in 0..5 {
            let got = traj.log_values[(j, k)];
            assert!(
                (got - u[k]).abs() <= 1e-12 * u[k].abs().max(1.0),
                "step {j}, species {k}"
            );
        }
    }
}

#[test]
fn geometric_brownian_terminal_moments() {
    let (r, sigma, horizon) = (0.3, 0.4, 2.0);
    let params = scalar(r, 0.0, sigma);
    let paths = 10_000;
    let ends: Vec<f64> = (0..paths)
        .map(|p| {
            let config = SimConfig::new(vec![1.0], 5, p as u64);
            let traj = simulate_log_euler(&params, &config, horizon, &mut config.rng()).unwrap();
            traj.log_values[(traj.n_points() - 1, 0)]
        })
        .collect();
    let n = paths as f64;
    let mean = ends.iter().sum::<f64>() / n;
    let var = ends.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let true_mean = (r - sigma * sigma / 2.0) * horizon;
    let true_var = sigma * sigma * horizon;
    let se_mean = (true_var / n).sqrt();
    let se_var = true_var * (2.0 / (n - 1.0)).sqrt();
    assert!((mean - true_mean).abs() < 4.0 * se_mean, "mean {mean} vs {true_mean}");
    assert!((var - true_var).abs() < 4.0 * se_var, "variance {var} vs {true_var}");
}

#[test]
fn schedule_frequencies_match_probabilities() {
    let schedule = SamplingSchedule::irregular_default(100_001);
    let times = sample_schedule(&schedule, &mut RngStream::new(77, 0)).unwrap();
    let mut counts = [0usize; 3];
    for w in times.windows(2) {
        let gap = w[1] - w[0];
        let idx = [0.1, 0.3, 0.5]
            .iter()
            .position(|g| (gap - g).abs() < 1e-9)
            .expect("gap not in the support");
        counts[idx] += 1;
    }
    for (c, p) in counts.iter().zip([0.7, 0.2, 0.1]) {
        let freq = *c as f64 / 100_000.0;
        assert!((freq - p).abs() < 0.01, "frequency {freq} vs {p}");
    }
}

#[test]
fn logistic_flow_matches_closed_form() {
    let params = scalar(1.0, -1.0, 0.0);
    let x = deterministic_glv_flow(&params, &[0.5], 5.0, 1e-3).unwrap();
    let exact = 1.0 / (1.0 + (-5.0f64).exp());
    assert!((x[0] - exact).abs() < 1e-8, "{} vs {exact}", x[0]);
    let still = deterministic_glv_flow(&params, &[1.0], 5.0, 1e-3).unwrap();
    assert_eq!(still[0], 1.0);
}

#[test]
fn runge_kutta_is_fourth_order() {
    let params = scalar(1.0, -1.0, 0.0);
    let exact = 1.0 / (1.0 + (-5.0f64).exp());
    let err = |dt: f64| (deterministic_glv_flow(&params, &[0.5], 5.0, dt).unwrap()[0] - exact).abs();
    let ratio = err(0.1) / err(0.05);
    assert!((ratio - 16.0).abs() < 2.0, "error ratio {ratio}");
}
