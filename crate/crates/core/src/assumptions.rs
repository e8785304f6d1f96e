//! Checkers for the four sufficient conditions behind existence, moment
//! bounds and ergodicity of the stochastic GLV solution.
//!
//! 1. positive start, `σ_k > 0`, `r_k − σ_k²/2 > 0`, `A` non-positive definite;
//! 2. some `φ ≥ 4` with `a_kk + φ P_k/(φ+1) + Q_k/(φ+1) < 0` for every `k`,
//!    where `P_k = Σ_l (a_kl ∨ 0)` and `Q_k = Σ_l (a_lk ∨ 0)`;
//! 3. the interior equilibrium `x̃ = −A⁻¹(r − σ²/2)` is positive;
//! 4. positive `c` with
//!    `Σ_i c_i σ_i² x̃_i + [2 c_k a_kk + Σ_{l≠k} (c_k|a_kl| + c_l|a_lk|)] x̃_k² < 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::{lp_feasible, solve_linear_vec, sym_max_eig, DenseMatrix};

/// Largest eigenvalue of `(A+Aᵀ)/2` still accepted as non-positive.
pub const NPD_TOL: f64 = 1e-10;
/// Lower bound on each `c_i` in the normalized condition-4 LP.
pub const A4_LOWER_BOUND: f64 = 1e-8;
/// Smallest `φ` allowed by condition 2.
pub const PHI_MIN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    EquilibriumUndefined,
    NotEvaluated,
    SolverFailure,
}

impl CheckStatus {
    pub fn passed(self) -> bool {
        self == CheckStatus::Pass
    }

    fn from_bool(pass: bool) -> Self {
        if pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A1Report {
    pub status: CheckStatus,
    pub sym_max_eig: f64,
    /// Human-readable reasons for failure, empty on pass.
    pub violations: Vec<String>,
}

/// Feasible `φ` values: `lower < φ < upper`, or `φ = lower` when
/// `lower_closed` (only at `φ = 4`). `upper = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiInterval {
    pub lower: f64,
    pub lower_closed: bool,
    pub upper: Option<f64>,
}

impl PhiInterval {
    pub fn contains(&self, phi: f64) -> bool {
        let above = if self.lower_closed {
            phi >= self.lower
        } else {
            phi > self.lower
        };
        above && self.upper.is_none_or(|u| phi < u)
    }

    pub fn contains_interval(&self, other: &PhiInterval) -> bool {
        let lower_ok =
            self.lower < other.lower || (self.lower == other.lower && (self.lower_closed || !other.lower_closed));
        let upper_ok = match (self.upper, other.upper) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b <= a,
        };
        lower_ok && upper_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A2Report {
    pub status: CheckStatus,
    pub phi_interval: Option<PhiInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A3Report {
    pub status: CheckStatus,
    pub x_tilde: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A4Report {
    pub status: CheckStatus,
    pub c_witness: Option<Vec<f64>>,
    /// Largest left-minus-right slack at the optimum (negative iff feasible).
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub a1_pass: bool,
    pub a2_pass: bool,
    pub a3_pass: bool,
    pub a4_pass: bool,
    pub a1: A1Report,
    pub a2: A2Report,
    pub a3: A3Report,
    pub a4: A4Report,
    pub sym_max_eig: f64,
    pub phi_interval: Option<PhiInterval>,
    pub x_tilde: Option<Vec<f64>>,
    pub c_witness: Option<Vec<f64>>,
    pub a4_margin: Option<f64>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.a1_pass && self.a2_pass && self.a3_pass && self.a4_pass
    }
}

pub fn check_a1(params: &ModelParams, x0: &[f64]) -> Result<A1Report> {
    let n = params.n_species();
    if x0.len() != n {
        return Err(Error::Dimension(format!(
            "x0 has {} entries, model has {n} species",
            x0.len()
        )));
    }
    let mut violations = Vec::new();
    for (k, &x) in x0.iter().enumerate() {
        if !(x > 0.0) {
            violations.push(format!("x0[{}] = {x} is not positive", k + 1));
        }
    }
    for (k, &s) in params.sigma().iter().enumerate() {
        if !(s > 0.0) {
            violations.push(format!("sigma[{}] = {s} is not positive", k + 1));
        }
    }
    for (k, g) in params.corrected_growth().into_iter().enumerate() {
        if !(g > 0.0) {
            violations.push(format!("r[{0}] - sigma[{0}]^2/2 = {g} is not positive", k + 1));
        }
    }
    let eig = sym_max_eig(&params.a().symmetric_part())?;
    if eig > NPD_TOL {
        violations.push(format!(
            "A is not non-positive definite (max eigenvalue of symmetric part {eig})"
        ));
    }
    Ok(A1Report {
        status: CheckStatus::from_bool(violations.is_empty()),
        sym_max_eig: eig,
        violations,
    })
}

pub fn check_a2(a: &DenseMatrix) -> Result<A2Report> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "interaction matrix is {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut lower = PHI_MIN;
    let mut lower_closed = true;
    let mut upper: Option<f64> = None;
    let mut feasible = true;
    for k in 0..n {
        let p: f64 = (0..n).map(|l| a[(k, l)].max(0.0)).sum();
        let q: f64 = (0..n).map(|l| a[(l, k)].max(0.0)).sum();
        let akk = a[(k, k)];
        // (φ+1)·condition:  φ (a_kk + P_k) < −(a_kk + Q_k)
        let slope = akk + p;
        let rhs = -(akk + q);
        if slope > 0.0 {
            let bound = rhs / slope;
            upper = Some(upper.map_or(bound, |u| u.min(bound)));
        } else if slope < 0.0 {
            let bound = rhs / slope;
            if bound >= lower {
                lower = bound;
                lower_closed = false;
            }
        } else if !(rhs > 0.0) {
            feasible = false;
        }
    }
    if let Some(u) = upper {
        if !(lower < u) {
            feasible = false;
        }
    }
    Ok(A2Report {
        status: CheckStatus::from_bool(feasible),
        phi_interval: feasible.then_some(PhiInterval {
            lower,
            lower_closed,
            upper,
        }),
    })
}

pub fn check_a3(params: &ModelParams) -> A3Report {
    let rhs: Vec<f64> = params.corrected_growth().iter().map(|g| -g).collect();
    match solve_linear_vec(params.a(), &rhs) {
        Ok(x) => A3Report {
            status: CheckStatus::from_bool(x.iter().all(|&v| v > 0.0)),
            x_tilde: Some(x),
        },
        Err(_) => A3Report {
            status: CheckStatus::EquilibriumUndefined,
            x_tilde: None,
        },
    }
}

/// Left-hand side minus right-hand side of each condition-4 inequality,
/// evaluated directly at `c`. All entries negative means `c` is a witness.
pub fn a4_slacks(params: &ModelParams, x_tilde: &[f64], c: &[f64]) -> Vec<f64> {
    let a = params.a();
    let n = params.n_species();
    let sigma2 = params.sigma2();
    let noise: f64 = (0..n).map(|i| c[i] * sigma2[i] * x_tilde[i]).sum();
    (0..n)
        .map(|k| {
            let cross: f64 = (0..n)
                .filter(|&l| l != k)
                .map(|l| c[k] * a[(k, l)].abs() + c[l] * a[(l, k)].abs())
                .sum();
            noise + (2.0 * c[k] * a[(k, k)] + cross) * x_tilde[k] * x_tilde[k]
        })
        .collect()
}

/// Coefficients of the condition-4 inequalities as rows acting on `c`.
pub fn a4_constraint_rows(params: &ModelParams, x_tilde: &[f64]) -> DenseMatrix {
    let a = params.a();
    let n = params.n_species();
    let sigma2 = params.sigma2();
    let mut rows = DenseMatrix::zeros(n, n);
    for k in 0..n {
        let xk2 = x_tilde[k] * x_tilde[k];
        for i in 0..n {
            let own = if i == k {
                2.0 * a[(k, k)] + (0..n).filter(|&l| l != k).map(|l| a[(k, l)].abs()).sum::<f64>()
            } else {
                a[(i, k)].abs()
            };
            rows[(k, i)] = sigma2[i] * x_tilde[i] + own * xk2;
        }
    }
    rows
}

pub fn check_a4(params: &ModelParams, x_tilde: &[f64]) -> Result<A4Report> {
    let n = params.n_species();
    if x_tilde.len() != n {
        return Err(Error::Dimension(format!(
            "equilibrium has {} entries, model has {n} species",
            x_tilde.len()
        )));
    }
    if x_tilde.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput(
            "condition 4 needs a strictly positive equilibrium".into(),
        ));
    }
    let rows = a4_constraint_rows(params, x_tilde);
    let outcome = match lp_feasible(&rows, A4_LOWER_BOUND) {
        Ok(o) => o,
        Err(_) => {
            return Ok(A4Report {
                status: CheckStatus::SolverFailure,
                c_witness: None,
                margin: None,
            })
        }
    };
    let slacks = a4_slacks(params, x_tilde, &outcome.witness);
    let worst = slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let status = if outcome.feasible {
        if worst < 0.0 {
            CheckStatus::Pass
        } else {
            // Substitution disagrees with the LP: refuse to report a witness.
            CheckStatus::SolverFailure
        }
    } else {
        CheckStatus::Fail
    };
    Ok(A4Report {
        status,
        c_witness: Some(outcome.witness),
        margin: Some(worst),
    })
}

pub fn check_all(params: &ModelParams, x0: &[f64]) -> Result<AssumptionReport> {
    let a1 = check_a1(params, x0)?;
    let a2 = check_a2(params.a())?;
    let a3 = check_a3(params);
    let a4 = match (&a3.status, &a3.x_tilde) {
        (CheckStatus::Pass, Some(xt)) => check_a4(params, xt)?,
        _ => A4Report {
            status: CheckStatus::NotEvaluated,
            c_witness: None,
            margin: None,
        },
    };
    Ok(AssumptionReport {
        a1_pass: a1.status.passed(),
        a2_pass: a2.status.passed(),
        a3_pass: a3.status.passed(),
        a4_pass: a4.status.passed(),
        sym_max_eig: a1.sym_max_eig,
        phi_interval: a2.phi_interval,
        x_tilde: a3.x_tilde.clone(),
        c_witness: a4.c_witness.clone(),
        a4_margin: a4.margin,
        a1,
        a2,
        a3,
        a4,
    })
}
