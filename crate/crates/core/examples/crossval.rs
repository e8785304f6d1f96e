//! Cross-validated one-step prediction error of both estimators on a
//! simulated series with moderate noise.

use sglv::experiments::{case1_params, run_crossval};
use sglv::numerics::RngStream;
use sglv::simulator::{simulate_observed, SamplingSchedule, SimConfig};

fn main() -> sglv::Result<()> {
    let params = case1_params().with_sigma_scale(5.0)?;
    let config = SimConfig::new(params.x0().unwrap().to_vec(), 3, 0);
    let mut rng = config.rng();
    let series = simulate_observed(&params, &config, &SamplingSchedule::irregular_default(300), &mut rng)?;

    let mut split_rng = RngStream::new(3, 1);
    let result = run_crossval(&series, &[24, 12, 8], 100, 1, &mut split_rng)?;
    println!("   k   sglv mspe (se)       glv mspe (se)      sglv wins");
    for r in &result.rows {
        println!(
            "{:4}   {:.4} ({:.4})     {:.4} ({:.4})     {}/{}",
            r.k, r.sglv.mse, r.sglv.se, r.glv.mse, r.glv.se, r.sglv_wins, r.splits_used
        );
    }
    Ok(())
}
