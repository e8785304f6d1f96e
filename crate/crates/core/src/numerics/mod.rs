//! Dense linear algebra, a small feasibility LP and the seeded normal
//! generator shared by the rest of the crate.

mod linalg;
mod lp;
mod matrix;
mod rng;

pub use linalg::{solve_linear, solve_linear_vec, sym_max_eig, SINGULAR_RTOL};
pub use lp::{lp_feasible, LpOutcome};
pub use matrix::DenseMatrix;
pub use rng::{standard_normals, RngStream};
