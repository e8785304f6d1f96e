//! Simulate the five-species benchmark on the irregular schedule and write
//! the observed series as CSV.

use sglv::experiments::case1_params;
use sglv::simulator::{save_series_csv, simulate_observed, SamplingSchedule, SimConfig};

fn main() -> sglv::Result<()> {
    let params = case1_params();
    let config = SimConfig::new(params.x0().unwrap().to_vec(), 7, 0);
    let schedule = SamplingSchedule::irregular_default(300);
    let mut rng = config.rng();
    let series = simulate_observed(&params, &config, &schedule, &mut rng)?;

    println!(
        "{} observations over t in [0, {:.1}]",
        series.n_obs(),
        series.total_time()
    );
    let last = series.n_obs() - 1;
    for (label, x) in series.labels().iter().zip(series.x(last)) {
        println!("  {label}: x(T) = {x:.4}");
    }

    let path = std::env::temp_dir().join("sglv_case1.csv");
    save_series_csv(&series, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
