//! Run the four stability checks on the benchmark and on a small
//! competitive pair.

use sglv::assumptions::check_all;
use sglv::experiments::case1_params;
use sglv::numerics::DenseMatrix;
use sglv::ModelParams;

fn report(name: &str, params: &ModelParams, x0: &[f64]) -> sglv::Result<()> {
    let r = check_all(params, x0)?;
    println!("{name}");
    println!("  A1 {}  max eig of sym(A) = {:.4}", r.a1_pass, r.sym_max_eig);
    println!("  A2 {}  phi interval = {:?}", r.a2_pass, r.phi_interval);
    println!("  A3 {}  equilibrium = {:?}", r.a3_pass, r.x_tilde);
    println!(
        "  A4 {}  witness = {:?}  margin = {:?}",
        r.a4_pass, r.c_witness, r.a4_margin
    );
    Ok(())
}

fn main() -> sglv::Result<()> {
    let case1 = case1_params();
    report("benchmark case 1", &case1, case1.x0().unwrap())?;

    let a = DenseMatrix::from_rows(vec![vec![-2.0, -0.5], vec![-0.3, -1.5]])?;
    let pair = ModelParams::new(vec![1.0, 0.8], a, vec![0.2, 0.2])?;
    report("competitive pair", &pair, &[0.3, 0.3])
}
