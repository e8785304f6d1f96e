//! Feasibility LP for systems of strict homogeneous inequalities
//! `row_k · c < 0` over the normalized positive simplex.
//!
//! The problem `min t  s.t.  row_k·c ≤ t, Σc = 1, c ≥ ε` is solved with a
//! dense two-phase tableau simplex using Bland's rule, so it terminates on
//! degenerate vertices.

use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    /// True iff the optimal max-slack is strictly negative.
    pub feasible: bool,
    /// Minimizer `c` of the largest row value (on the normalized simplex).
    pub witness: Vec<f64>,
    /// Optimal value `t* = max_k row_k · c`.
    pub margin: f64,
}

/// Searches for `c` with `Σc = 1`, `c ≥ lower_bound` making every row of
/// `constraints` strictly negative.
pub fn lp_feasible(constraints: &DenseMatrix, lower_bound: f64) -> Result<LpOutcome> {
    let m = constraints.rows();
    let n = constraints.cols();
    if n == 0 || m == 0 {
        return Err(Error::Dimension("empty constraint system".into()));
    }
    if !constraints.is_finite() {
        return Err(Error::InvalidInput("non-finite constraint coefficient".into()));
    }
    if !(lower_bound >= 0.0) || lower_bound * n as f64 >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "lower bound {lower_bound} leaves no room on the simplex for {n} variables"
        )));
    }

    // Variables: c' (n, with c = ε + c'), t⁺, t⁻.
    let nv = n + 2;
    let mut a_ub = Vec::with_capacity(m);
    let mut b_ub = Vec::with_capacity(m);
    for k in 0..m {
        let row = constraints.row(k);
        let mut coeffs = row.to_vec();
        coeffs.push(-1.0);
        coeffs.push(1.0);
        a_ub.push(coeffs);
        b_ub.push(-lower_bound * row.iter().sum::<f64>());
    }
    let mut eq = vec![1.0; n];
    eq.extend([0.0, 0.0]);
    let mut cost = vec![0.0; nv];
    cost[n] = 1.0;
    cost[n + 1] = -1.0;

    let x = Tableau::solve(&cost, &a_ub, &b_ub, &[eq], &[1.0 - lower_bound * n as f64])?;
    let witness: Vec<f64> = x[..n].iter().map(|v| v + lower_bound).collect();
    let margin = (0..m)
        .map(|k| dot(constraints.row(k), &witness))
        .fold(f64::NEG_INFINITY, f64::max);
    // t* is recomputed from the witness so the reported margin is exactly
    // the largest substituted row value.
    let scale = constraints.max_abs().max(f64::MIN_POSITIVE);
    Ok(LpOutcome {
        feasible: margin < -1e-12 * scale,
        witness,
        margin,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense tableau for `min cᵀx  s.t.  A_ub x ≤ b_ub, A_eq x = b_eq, x ≥ 0`.
struct Tableau {
    /// Constraint rows, each `[coefficients..., rhs]`.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_cols: usize,
}

impl Tableau {
    fn solve(cost: &[f64], a_ub: &[Vec<f64>], b_ub: &[f64], a_eq: &[Vec<f64>], b_eq: &[f64]) -> Result<Vec<f64>> {
        let nv = cost.len();
        let n_ub = a_ub.len();
        let m = n_ub + a_eq.len();
        // Column layout: structural | slacks | artificials.
        let n_slack = n_ub;
        let n_art = m;
        let n_cols = nv + n_slack + n_art;
        let art0 = nv + n_slack;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (i, (coeffs, &b)) in a_ub.iter().zip(b_ub).chain(a_eq.iter().zip(b_eq)).enumerate() {
            let mut row = vec![0.0; n_cols + 1];
            row[..nv].copy_from_slice(coeffs);
            if i < n_ub {
                row[nv + i] = 1.0;
            }
            row[n_cols] = b;
            if b < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            if i < n_ub && row[nv + i] > 0.0 {
                basis.push(nv + i);
            } else {
                row[art0 + i] = 1.0;
                basis.push(art0 + i);
            }
            rows.push(row);
        }
        let mut tab = Tableau { rows, basis, n_cols };

        // Phase 1: drive artificials to zero.
        let mut phase1 = vec![0.0; n_cols];
        for j in art0..n_cols {
            phase1[j] = 1.0;
        }
        tab.optimize(&phase1, n_cols)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(&tab.rows)
            .filter(|(&b, _)| b >= art0)
            .map(|(_, r)| r[n_cols])
            .sum();
        let rhs_scale = tab.rows.iter().map(|r| r[n_cols].abs()).fold(1.0, f64::max);
        if infeasibility > 1e-9 * rhs_scale {
            return Err(Error::Solver(format!(
                "constraint polytope is empty (phase-1 residual {infeasibility:e})"
            )));
        }
        tab.evict_artificials(art0);

        // Phase 2 over structural + slack columns only.
        let mut phase2 = vec![0.0; n_cols];
        phase2[..nv].copy_from_slice(cost);
        tab.optimize(&phase2, art0)?;

        let mut x = vec![0.0; nv];
        for (r, &b) in tab.basis.iter().enumerate() {
            if b < nv {
                x[b] = tab.rows[r][n_cols];
            }
        }
        Ok(x)
    }

    /// Bland's-rule primal simplex; only columns `< allowed` may enter.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let rhs = self.n_cols;
        for _ in 0..MAX_ITERATIONS {
            let entering = (0..allowed).find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j) < -PIVOT_TOL);
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[col] > PIVOT_TOL {
                    let ratio = row[rhs] / row[col];
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Solver(format!("objective unbounded along column {col}")));
            };
            self.pivot(row, col);
        }
        Err(Error::Solver("iteration limit reached".into()))
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        cost[j]
            - self
                .basis
                .iter()
                .zip(&self.rows)
                .map(|(&b, row)| cost[b] * row[j])
                .sum::<f64>()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        self.rows[row].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = other[col];
            if f != 0.0 {
                for (v, pv) in other.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Removes zero-level artificials from the basis, dropping redundant rows.
    fn evict_artificials(&mut self, art0: usize) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= art0 {
                let col = (0..art0).find(|&j| self.rows[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => {
                        self.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }
}
