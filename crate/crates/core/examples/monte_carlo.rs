//! Small Monte Carlo comparison of the two estimators on the benchmark.
//! Pass a replicate count as the first argument (default 50).

use sglv::experiments::{run_mc_study, McConfig};

fn main() -> sglv::Result<()> {
    let replicates = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let config = McConfig::case1(vec![300, 1000], replicates, 2024);
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let result = run_mc_study(&config, jobs)?;

    for cell in &result.cells {
        let wins = cell
            .drift_entries()
            .filter(|e| e.glv.is_some_and(|g| e.sglv.mse < g.mse))
            .count();
        println!(
            "n = {}: {} replicates ({} failed), SGLV lower MSE on {wins}/30 drift parameters",
            cell.n_obs, cell.replicates_used, cell.replicates_failed
        );
        for e in cell.entries.iter().filter(|e| e.species == 1) {
            match e.glv {
                Some(g) => println!(
                    "  {:9} sglv {:.4} ({:.4})  glv {:.4} ({:.4})",
                    e.param, e.sglv.mse, e.sglv.se, g.mse, g.se
                ),
                None => println!("  {:9} sglv {:.2e} ({:.2e})", e.param, e.sglv.mse, e.sglv.se),
            }
        }
    }
    result.write_csv(std::io::stdout().lock()).ok();
    Ok(())
}
