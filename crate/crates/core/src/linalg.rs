//! Thin helpers over nalgebra for the row-major matrices used in configs.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) fn square(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid(format!("{what} must be a {n}x{n} matrix")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub(crate) fn min_eigenvalue_sym(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

pub(crate) fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    (m - m.transpose()).amax() <= tol
}

pub(crate) fn matvec(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Solves `a z = rhs`, or `None` when `a` is singular.
pub(crate) fn solve(a: DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let b = DVector::from_column_slice(rhs);
    a.lu().solve(&b).map(|z| z.iter().copied().collect())
}

/// Solves `(I + lambda A) z = rhs`.
pub(crate) fn solve_shifted(rows: &[Vec<f64>], lambda: f64, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let a = DMatrix::from_fn(n, n, |i, j| lambda * rows[i][j] + if i == j { 1.0 } else { 0.0 });
    solve(a, rhs)
}
