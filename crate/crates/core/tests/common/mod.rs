//! Test-side oracles, written independently of the library internals.
#![allow(dead_code, clippy::needless_range_loop)]

use sglv::numerics::{DenseMatrix, RngStream};
use sglv::ObservationSeries;

/// Gauss-Jordan elimination with full pivoting on a dense copy.
pub fn gauss_jordan(a: &[Vec<f64>], b: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let m = b[0].len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).copied().collect())
        .collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    for p in 0..n {
        let (mut bi, mut bj, mut best) = (p, p, 0.0);
        for i in p..n {
            for j in p..n {
                if aug[i][j].abs() > best {
                    best = aug[i][j].abs();
                    bi = i;
                    bj = j;
                }
            }
        }
        if best == 0.0 {
            return None;
        }
        aug.swap(p, bi);
        if bj != p {
            for row in aug.iter_mut() {
                row.swap(p, bj);
            }
            col_perm.swap(p, bj);
        }
        let piv = aug[p][p];
        for v in aug[p].iter_mut() {
            *v /= piv;
        }
        let pivot_row = aug[p].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != p && row[p] != 0.0 {
                let f = row[p];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    let mut x = vec![vec![0.0; m]; n];
    for (p, &var) in col_perm.iter().enumerate() {
        x[var] = aug[p][n..].to_vec();
    }
    Some(x)
}

/// Weighted normal equations built term by term:
/// `Σ_i Δ_i g_i g_iᵀ θ_k = Σ_i g_i Δu_ik`, solved by Gauss-Jordan.
/// Returns `theta[k] = (R_k, a_k1, ..., a_kN)`.
pub fn amle_oracle(series: &ObservationSeries) -> Vec<Vec<f64>> {
    let n = series.n_species();
    let p = n + 1;
    let mut lhs = vec![vec![0.0; p]; p];
    let mut rhs = vec![vec![0.0; n]; p];
    for i in 0..series.n_obs() - 1 {
        let dt = series.times()[i + 1] - series.times()[i];
        let mut g = vec![1.0];
        g.extend(series.u(i).iter().map(|u| u.exp()));
        for a in 0..p {
            for b in 0..p {
                lhs[a][b] += dt * g[a] * g[b];
            }
            for k in 0..n {
                rhs[a][k] += g[a] * (series.u(i + 1)[k] - series.u(i)[k]);
            }
        }
    }
    let sol = gauss_jordan(&lhs, &rhs).expect("oracle system singular");
    (0..n).map(|k| (0..p).map(|a| sol[a][k]).collect()).collect()
}

/// Unweighted least squares of `Δu/Δ` on `g`, same output layout.
pub fn glv_oracle(series: &ObservationSeries) -> Vec<Vec<f64>> {
    let n = series.n_species();
    let p = n + 1;
    let mut lhs = vec![vec![0.0; p]; p];
    let mut rhs = vec![vec![0.0; n]; p];
    for i in 0..series.n_obs() - 1 {
        let dt = series.times()[i + 1] - series.times()[i];
        let mut g = vec![1.0];
        g.extend(series.u(i).iter().map(|u| u.exp()));
        for a in 0..p {
            for b in 0..p {
                lhs[a][b] += g[a] * g[b];
            }
            for k in 0..n {
                rhs[a][k] += g[a] * (series.u(i + 1)[k] - series.u(i)[k]) / dt;
            }
        }
    }
    let sol = gauss_jordan(&lhs, &rhs).expect("oracle system singular");
    (0..n).map(|k| (0..p).map(|a| sol[a][k]).collect()).collect()
}

/// Exact Euler recursion `u ← u + (R + A e^u) Δ` at the given gaps.
pub fn exact_euler(growth: &[f64], a: &[Vec<f64>], x0: &[f64], gaps: &[f64]) -> ObservationSeries {
    let n = growth.len();
    let mut u: Vec<f64> = x0.iter().map(|x| x.ln()).collect();
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut rows = vec![x0.to_vec()];
    for &dt in gaps {
        let x: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        for k in 0..n {
            let drift = growth[k] + (0..n).map(|l| a[k][l] * x[l]).sum::<f64>();
            u[k] += drift * dt;
        }
        t += dt;
        times.push(t);
        rows.push(u.iter().map(|v| v.exp()).collect());
    }
    ObservationSeries::new(times, DenseMatrix::from_rows(rows).unwrap()).unwrap()
}

/// Random positive series with random gaps; generic enough for a full-rank design.
pub fn random_series(rng: &mut RngStream, n_species: usize, n_obs: usize) -> ObservationSeries {
    let mut times = vec![0.0];
    for _ in 1..n_obs {
        let last = *times.last().unwrap();
        times.push(last + 0.05 + 0.5 * rng.uniform());
    }
    let rows: Vec<Vec<f64>> = (0..n_obs)
        .map(|_| (0..n_species).map(|_| 0.05 + rng.uniform()).collect())
        .collect();
    ObservationSeries::new(times, DenseMatrix::from_rows(rows).unwrap()).unwrap()
}

/// Left minus right side of each condition-4 inequality at `c`, from the
/// stated formula.
pub fn a4_oracle(a: &[Vec<f64>], sigma2: &[f64], x_tilde: &[f64], c: &[f64]) -> Vec<f64> {
    let n = a.len();
    let lhs: f64 = (0..n).map(|i| c[i] * sigma2[i] * x_tilde[i]).sum();
    (0..n)
        .map(|k| {
            let mut bracket = 2.0 * c[k] * a[k][k];
            for l in 0..n {
                if l != k {
                    bracket += c[k] * a[k][l].abs() + c[l] * a[l][k].abs();
                }
            }
            lhs + bracket * x_tilde[k] * x_tilde[k]
        })
        .collect()
}

/// Condition 2 evaluated directly at a given `φ`.
pub fn a2_holds(a: &[Vec<f64>], phi: f64) -> bool {
    let n = a.len();
    (0..n).all(|k| {
        let row: f64 = (0..n).map(|l| a[k][l].max(0.0)).sum();
        let col: f64 = (0..n).map(|l| a[l][k].max(0.0)).sum();
        a[k][k] + phi / (phi + 1.0) * row + col / (phi + 1.0) < 0.0
    })
}

pub fn rows_of(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn case1_a() -> Vec<Vec<f64>> {
    vec![
        vec![-2.0, -2.5, -2.0, 1.0, 1.0],
        vec![1.0, -6.0, -2.0, 3.0, -1.0],
        vec![-1.0, -2.0, -5.0, 1.0, -1.0],
        vec![-1.0, 0.5, 0.1, -10.0, 1.0],
        vec![-1.5, -2.0, -2.0, 2.0, -9.0],
    ]
}
