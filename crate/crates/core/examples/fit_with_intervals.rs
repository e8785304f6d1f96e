//! Fit the stochastic model and the GLV baseline to simulated data, then
//! print estimates with 95% Wald intervals.

use sglv::experiments::case1_params;
use sglv::inference::{confidence_intervals, fit_glv_ls, fit_sglv_amle};
use sglv::simulator::{simulate_observed, SamplingSchedule, SimConfig};

fn main() -> sglv::Result<()> {
    let truth = case1_params();
    let config = SimConfig::new(truth.x0().unwrap().to_vec(), 1, 0);
    let mut rng = config.rng();
    let series = simulate_observed(&truth, &config, &SamplingSchedule::irregular_default(1000), &mut rng)?;

    let sglv = fit_sglv_amle(&series)?;
    let glv = fit_glv_ls(&series)?;
    let ci = confidence_intervals(&sglv, 0.95)?;

    let n = truth.n_species();
    for k in 0..n {
        println!("species {}", k + 1);
        let (lo, hi) = ci.growth(k).unwrap();
        println!(
            "  r     true {:7.3}  sglv {:7.3} [{:7.3}, {:7.3}]  glv {:7.3}",
            truth.r()[k],
            sglv.r_hat[k],
            lo,
            hi,
            glv.r_hat[k]
        );
        for l in 0..n {
            let (lo, hi) = ci.interaction(k, l).unwrap();
            let mark = if ci.interaction_significant(k, l) { "*" } else { " " };
            println!(
                "  a{}{}   true {:7.3}  sglv {:7.3} [{:7.3}, {:7.3}]{mark} glv {:7.3}",
                k + 1,
                l + 1,
                truth.a()[(k, l)],
                sglv.a_hat[(k, l)],
                lo,
                hi,
                glv.a_hat[(k, l)]
            );
        }
        println!("  sigma2 true {:.4}  sglv {:.4}", truth.sigma2()[k], sglv.sigma2_hat[k]);
    }
    Ok(())
}
