mod common;

use common::{amle_oracle, exact_euler, glv_oracle, random_series, rel_close, rows_of};
use sglv::experiments::{case1_params, case_x0};
use sglv::inference::{
    approx_loglik, bootstrap_ci_glv, closed_form_lm, confidence_intervals, fisher_information, fit_glv_ls,
    fit_sglv_amle, predict_one_step,
};
use sglv::numerics::{DenseMatrix, RngStream};
use sglv::simulator::{simulate_observed, SamplingSchedule, SimConfig};
use sglv::{Drift, ObservationSeries};

fn hand_series() -> ObservationSeries {
    let t = vec![0.0, 0.1, 0.2, 0.4, 0.5];
    let x: Vec<f64> = [-1.2, -0.9, -1.0, -0.6, -0.75].iter().map(|u: &f64| u.exp()).collect();
    ObservationSeries::new(t, DenseMatrix::from_row_major(5, 1, x).unwrap()).unwrap()
}

fn case1_series(n: usize, seed: u64) -> ObservationSeries {
    let config = SimConfig::new(case_x0(), seed, 0);
    simulate_observed(
        &case1_params(),
        &config,
        &SamplingSchedule::irregular_default(n),
        &mut config.rng(),
    )
    .unwrap()
}

#[test]
fn hand_dataset_matches_normal_equations() {
    let s = hand_series();
    let fit = fit_sglv_amle(&s).unwrap();
    let want = amle_oracle(&s);
    assert!(rel_close(fit.growth_hat[0], want[0][0], 1e-12));
    assert!(rel_close(fit.a_hat[(0, 0)], want[0][1], 1e-12));
}

#[test]
fn random_series_match_both_oracles() {
    let mut rng = RngStream::new(31, 0);
    for _ in 0..10 {
        let s = random_series(&mut rng, 3, 40);
        let sglv = fit_sglv_amle(&s).unwrap();
        let glv = fit_glv_ls(&s).unwrap();
        let (want_s, want_g) = (amle_oracle(&s), glv_oracle(&s));
        for k in 0..3 {
            for (got, want) in sglv.drift_row(k).iter().zip(&want_s[k]) {
                assert!(rel_close(*got, *want, 1e-9), "sglv {got} vs {want}");
            }
            for (got, want) in glv.drift_row(k).iter().zip(&want_g[k]) {
                assert!(rel_close(*got, *want, 1e-9), "glv {got} vs {want}");
            }
        }
    }
}

#[test]
fn noiseless_data_is_recovered_by_both_estimators() {
    let growth = [0.8, 1.2];
    let a = vec![vec![-1.0, 0.3], vec![-0.4, -2.0]];
    let gaps: Vec<f64> = (0..60).map(|i| [0.1, 0.3, 0.5][i % 3]).collect();
    let s = exact_euler(&growth, &a, &[0.05, 0.9], &gaps);
    let sglv = fit_sglv_amle(&s).unwrap();
    let glv = fit_glv_ls(&s).unwrap();
    for k in 0..2 {
        let truth = [growth[k], a[k][0], a[k][1]];
        for ((x, y), t) in sglv.drift_row(k).iter().zip(glv.drift_row(k)).zip(truth) {
            assert!((x - t).abs() < 1e-9 && (y - t).abs() < 1e-9);
        }
        assert!(sglv.sigma2_hat[k] < 1e-18);
    }
}

#[test]
fn uniform_gaps_make_the_estimators_coincide() {
    let mut rng = RngStream::new(4, 4);
    let base = random_series(&mut rng, 2, 30);
    let times: Vec<f64> = (0..30).map(|i| i as f64 * 0.25).collect();
    let s = ObservationSeries::new(times, base.values().clone()).unwrap();
    let (a, b) = (fit_sglv_amle(&s).unwrap(), fit_glv_ls(&s).unwrap());
    for k in 0..2 {
        for (x, y) in a.drift_row(k).iter().zip(b.drift_row(k)) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn lm_matrices_match_term_by_term_sums() {
    let s = hand_series();
    let (l, m) = closed_form_lm(&s).unwrap();
    let (mut total, mut sx, mut sxx, mut sux) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..4 {
        let dt = s.times()[i + 1] - s.times()[i];
        let x = s.x(i)[0];
        total += dt;
        sx += x * dt;
        sxx += x * x * dt;
        sux += (s.u(i + 1)[0] - s.u(i)[0]) * x;
    }
    let l_want = total * sxx - sx * sx;
    let m_want = (s.u(4)[0] - s.u(0)[0]) * sx - total * sux;
    assert!(rel_close(l[(0, 0)], l_want, 1e-12));
    assert!(rel_close(m[(0, 0)], m_want, 1e-12));
}

#[test]
fn drift_rows_solve_the_lm_system() {
    let s = case1_series(400, 2);
    let fit = fit_sglv_amle(&s).unwrap();
    let (l, m) = closed_form_lm(&s).unwrap();
    for k in 0..5 {
        let lhs = l.mat_vec(fit.a_hat.row(k));
        for p in 0..5 {
            assert!(rel_close(lhs[p], -m[(k, p)], 1e-8), "row {k}, col {p}");
        }
    }
}

#[test]
fn weighted_residuals_are_orthogonal_to_regressors() {
    let s = case1_series(300, 5);
    let fit = fit_sglv_amle(&s).unwrap();
    let drift = Drift {
        growth: fit.growth_hat.clone(),
        interactions: fit.a_hat.clone(),
    };
    let mut dots = vec![vec![0.0; 6]; 5];
    let mut scale = 0.0f64;
    for i in 0..s.n_obs() - 1 {
        let dt = s.times()[i + 1] - s.times()[i];
        let mu = drift.eval(s.x(i));
        let mut g = vec![1.0];
        g.extend_from_slice(s.x(i));
        for k in 0..5 {
            let resid = s.u(i + 1)[k] - s.u(i)[k] - mu[k] * dt;
            for (j, gj) in g.iter().enumerate() {
                dots[k][j] += resid * gj;
                scale = scale.max((resid * gj).abs());
            }
        }
    }
    for v in dots.iter().flatten() {
        assert!(v.abs() < 1e-9 * scale.max(1.0) * s.n_obs() as f64, "{v}");
    }
}

#[test]
fn time_shift_leaves_fit_unchanged() {
    let s = case1_series(200, 9);
    let a = fit_sglv_amle(&s).unwrap();
    let b = fit_sglv_amle(&s.shifted(37.5).unwrap()).unwrap();
    for (x, y) in rows_of(&a.a_hat)
        .iter()
        .flatten()
        .zip(rows_of(&b.a_hat).iter().flatten())
    {
        assert!(rel_close(*x, *y, 1e-9));
    }
    for (x, y) in a.sigma2_hat.iter().zip(&b.sigma2_hat) {
        assert!(rel_close(*x, *y, 1e-9));
    }
}

#[test]
fn estimate_maximizes_the_likelihood() {
    let s = case1_series(300, 12);
    let fit = fit_sglv_amle(&s).unwrap();
    let best = Drift {
        growth: fit.growth_hat.clone(),
        interactions: fit.a_hat.clone(),
    };
    let at_max = approx_loglik(&best, &fit.sigma2_hat, &s);
    assert!(rel_close(at_max, fit.loglik, 1e-12));
    let mut rng = RngStream::new(99, 0);
    for _ in 0..100 {
        let delta: Vec<f64> = (0..30 + 5).map(|_| rng.normal()).collect();
        let norm = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
        let step: Vec<f64> = delta.iter().map(|d| 0.01 * d / norm).collect();
        let mut moved = best.clone();
        for k in 0..5 {
            moved.growth[k] += step[k];
            for l in 0..5 {
                moved.interactions[(k, l)] += step[5 + 5 * k + l];
            }
        }
        let mut sigma2 = fit.sigma2_hat.clone();
        sigma2[rng.below(5) as usize] *= 1.0 + step[34];
        assert!(approx_loglik(&moved, &sigma2, &s) <= at_max);
    }
}

#[test]
fn loglik_scales_with_variance_at_zero_residual() {
    let gaps = vec![0.1, 0.3, 0.5, 0.1, 0.1];
    let s = exact_euler(&[1.0], &[vec![-1.0]], &[0.3], &gaps);
    let drift = Drift {
        growth: vec![1.0],
        interactions: DenseMatrix::from_rows(vec![vec![-1.0]]).unwrap(),
    };
    assert!(approx_loglik(&drift, &[1.0], &s).abs() < 1e-12);
    let lambda: f64 = 3.0;
    let shifted = approx_loglik(&drift, &[lambda], &s);
    assert!((shifted + 5.0 * lambda.ln()).abs() < 1e-12);
}

#[test]
fn information_is_shared_across_species_and_stabilizes() {
    let short = case1_series(1001, 3);
    let info = fisher_information(&short).unwrap();
    assert!(info.windows(2).all(|w| w[0] == w[1]));
    // Spans of 500 and 1000 after a burn-in; the initial transient
    // otherwise shifts the rare species' x² average by O(1/T).
    let long = case1_series(10_000, 3);
    let cut = |span: f64| {
        let rows: Vec<usize> = (0..long.n_obs())
            .filter(|&i| (50.0..=50.0 + span).contains(&long.times()[i]))
            .collect();
        fisher_information(&long.select(&rows).unwrap()).unwrap().remove(0)
    };
    let (a, b) = (cut(500.0), cut(1000.0));
    for (x, y) in rows_of(&a).iter().flatten().zip(rows_of(&b).iter().flatten()) {
        assert!((x - y).abs() <= 0.05 * y.abs(), "{x} vs {y}");
    }
}

#[test]
fn noiseless_fit_gives_zero_width_intervals() {
    let gaps: Vec<f64> = (0..30).map(|i| [0.1, 0.3, 0.5][i % 3]).collect();
    let s = exact_euler(&[0.5], &[vec![-1.0]], &[0.05], &gaps);
    let ci = confidence_intervals(&fit_sglv_amle(&s).unwrap(), 0.95).unwrap();
    let sp = &ci.species[0];
    for j in 0..2 {
        assert!((sp.upper[j] - sp.lower[j]).abs() < 1e-8);
    }
}

#[test]
fn wider_noise_gives_wider_intervals() {
    let mut widths = Vec::new();
    for sigma in [0.05, 0.1, 0.2] {
        let params = case1_params().with_sigma_scale(sigma / 0.1).unwrap();
        let config = SimConfig::new(case_x0(), 8, 0);
        let s = simulate_observed(
            &params,
            &config,
            &SamplingSchedule::uniform(0.1, 400),
            &mut config.rng(),
        )
        .unwrap();
        let glv = fit_glv_ls(&s).unwrap();
        let boot = bootstrap_ci_glv(&s, &glv, 500, 0.95, &mut RngStream::new(1, 0)).unwrap();
        let mean_width = boot
            .intervals
            .species
            .iter()
            .flat_map(|sp| sp.upper.iter().zip(&sp.lower).map(|(u, l)| u - l))
            .sum::<f64>();
        widths.push(mean_width);
    }
    assert!(widths[0] < widths[1] && widths[1] < widths[2], "{widths:?}");
}

#[test]
fn bootstrap_on_noiseless_data_collapses() {
    let gaps: Vec<f64> = (0..30).map(|i| [0.1, 0.3, 0.5][i % 3]).collect();
    let s = exact_euler(&[0.5], &[vec![-1.0]], &[0.05], &gaps);
    let glv = fit_glv_ls(&s).unwrap();
    let boot = bootstrap_ci_glv(&s, &glv, 200, 0.9, &mut RngStream::new(3, 0)).unwrap();
    let sp = &boot.intervals.species[0];
    for j in 0..2 {
        assert!((sp.upper[j] - sp.lower[j]).abs() < 1e-8);
    }
}

#[test]
fn bootstrap_endpoints_are_seed_stable() {
    let s = case1_series(1000, 21);
    let glv = fit_glv_ls(&s).unwrap();
    let a = bootstrap_ci_glv(&s, &glv, 1000, 0.95, &mut RngStream::new(1, 0)).unwrap();
    let b = bootstrap_ci_glv(&s, &glv, 1000, 0.95, &mut RngStream::new(2, 0)).unwrap();
    // A single 2.5% percentile has Monte Carlo sd ≈ 6% of the half-width at
    // B = 1000, so the bound is applied to the average shift.
    let mut shifts = Vec::new();
    for (x, y) in a.intervals.species.iter().zip(&b.intervals.species) {
        for j in 0..x.lower.len() {
            let half = 0.5 * (x.upper[j] - x.lower[j]);
            shifts.push((x.lower[j] - y.lower[j]).abs() / half);
            shifts.push((x.upper[j] - y.upper[j]).abs() / half);
        }
    }
    let mean = shifts.iter().sum::<f64>() / shifts.len() as f64;
    assert!(mean <= 0.1, "mean endpoint shift {mean}");
    assert!(shifts.iter().all(|&v| v < 0.3), "{shifts:?}");
}

#[test]
fn one_step_prediction_examples() {
    let d = |r: f64, a: f64| Drift {
        growth: vec![r],
        interactions: DenseMatrix::from_rows(vec![vec![a]]).unwrap(),
    };
    assert_eq!(predict_one_step(&d(1.0, -1.0), &[0.0], 0.1), vec![0.0]);
    let u = predict_one_step(&d(0.5, -0.25), &[2f64.ln()], 0.2)[0];
    assert!((u - 2f64.ln()).abs() < 1e-15);
    assert!((predict_one_step(&d(1.0, 0.0), &[0.0], 0.3)[0] - 0.3).abs() < 1e-15);
}
