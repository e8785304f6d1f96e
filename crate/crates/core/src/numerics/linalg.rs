use super::DenseMatrix;
use crate::error::{Error, Result};

/// A pivot smaller than this fraction of the largest matrix entry is
/// treated as zero.
pub const SINGULAR_RTOL: f64 = 1e-13;

const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Solves `m · X = rhs` by Gaussian elimination with partial pivoting.
///
/// Returns [`Error::Singular`] carrying the column at which no usable pivot
/// was found.
pub fn solve_linear(m: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "solve_linear needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if rhs.rows() != m.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side has {} rows, matrix has {}",
            rhs.rows(),
            m.rows()
        )));
    }
    let n = m.rows();
    let k = rhs.cols();
    let scale = m.max_abs();
    if n > 0 && (scale == 0.0 || !scale.is_finite()) {
        return Err(Error::Singular { pivot: 0 });
    }
    let tol = SINGULAR_RTOL * scale;

    let mut a = m.clone();
    let mut b = rhs.clone();
    for col in 0..n {
        let (p, best) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            return Err(Error::Singular { pivot: col });
        }
        if p != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(p, j)];
                a[(p, j)] = tmp;
            }
            for j in 0..k {
                let tmp = b[(col, j)];
                b[(col, j)] = b[(p, j)];
                b[(p, j)] = tmp;
            }
        }
        let piv = a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] / piv;
            if f == 0.0 {
                continue;
            }
            a[(r, col)] = 0.0;
            for j in col + 1..n {
                a[(r, j)] -= f * a[(col, j)];
            }
            for j in 0..k {
                b[(r, j)] -= f * b[(col, j)];
            }
        }
    }

    let mut x = DenseMatrix::zeros(n, k);
    for j in 0..k {
        for i in (0..n).rev() {
            let mut s = b[(i, j)];
            for c in i + 1..n {
                s -= a[(i, c)] * x[(c, j)];
            }
            x[(i, j)] = s / a[(i, i)];
        }
    }
    Ok(x)
}

pub fn solve_linear_vec(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    Ok(solve_linear(m, &DenseMatrix::column_vector(rhs))?.column(0))
}

/// Largest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.
pub fn sym_max_eig(m: &DenseMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension("sym_max_eig needs a square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL * m.max_abs().max(1.0) {
        return Err(Error::Asymmetric { asymmetry: asym });
    }

    let mut a = m.symmetric_part();
    let off_norm = |a: &DenseMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    Ok(a.diag().into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<f64>>) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = m(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let x = solve_linear(&DenseMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_solve() {
        let x = solve_linear_vec(&m(vec![vec![2.0, 0.0], vec![0.0, 4.0]]), &[2.0, 8.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn singular_reports_pivot() {
        let a = m(vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]]);
        match solve_linear_vec(&a, &[1.0, 2.0, 3.0]) {
            Err(Error::Singular { pivot }) => assert_eq!(pivot, 2),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            solve_linear(&DenseMatrix::zeros(2, 3), &DenseMatrix::zeros(2, 1)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            solve_linear(&DenseMatrix::identity(2), &DenseMatrix::zeros(3, 1)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn known_spectra() {
        assert!((sym_max_eig(&DenseMatrix::from_diag(&[-1.0, -2.0])).unwrap() + 1.0).abs() < 1e-12);
        let swap = m(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((sym_max_eig(&swap).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_rejected() {
        let a = m(vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(sym_max_eig(&a), Err(Error::Asymmetric { .. })));
    }
}
