//! Render proportion and one-step prediction charts for a simulated series.

use sglv::cli::{render_predictions_svg, render_series_svg};
use sglv::experiments::case1_params;
use sglv::inference::{fit_sglv_amle, predict_one_step};
use sglv::simulator::{simulate_observed, SamplingSchedule, SimConfig};

fn main() -> sglv::Result<()> {
    let params = case1_params();
    let config = SimConfig::new(params.x0().unwrap().to_vec(), 11, 0);
    let mut rng = config.rng();
    let series = simulate_observed(&params, &config, &SamplingSchedule::irregular_default(200), &mut rng)?;
    let fit = fit_sglv_amle(&series)?;
    let preds: Vec<Vec<f64>> = (1..series.n_obs())
        .map(|i| predict_one_step(&fit, series.u(i - 1), series.times()[i] - series.times()[i - 1]))
        .collect();

    let dir = std::env::temp_dir();
    for (name, svg) in [
        ("sglv_proportions.svg", render_series_svg(&series)),
        ("sglv_log_predictions.svg", render_predictions_svg(&series, &preds)),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, svg).expect("write svg");
        println!("wrote {}", path.display());
    }
    Ok(())
}
