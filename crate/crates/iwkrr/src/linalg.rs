//! Dense symmetric linear algebra behind the estimators.
//!
//! Factorizations are delegated to `faer`; everything here works on `ndarray`
//! containers and converts at the boundary. The central routine is
//! [`solve_psd`]: a Cholesky solve that escalates a diagonal jitter on failure
//! and finally falls back to minimum-norm least squares (pseudo-inverse
//! semantics), which is what the Nyström normal equations require when the
//! center Gram matrix is rank-deficient.

use faer::prelude::Solve;
use faer::{Mat, Side};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Relative scale of the default jitter floor: `1e-10 * trace(A) / dim(A)`.
const JITTER_FLOOR_SCALE: f64 = 1e-10;

/// Relative eigenvalue cutoff used by the pseudo-inverse fallback.
const PINV_RCOND: f64 = 1e-12;

fn to_faer(a: ArrayView2<'_, f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn require_square_symmetric(a: ArrayView2<'_, f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid_input(format!(
            "matrix must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut scale = 0.0f64;
    let mut skew = 0.0f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            scale = scale.max(a[[i, j]].abs()).max(a[[j, i]].abs());
            skew = skew.max((a[[i, j]] - a[[j, i]]).abs());
        }
        scale = scale.max(a[[i, i]].abs());
    }
    if !scale.is_finite() || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_input("matrix has non-finite entries"));
    }
    if skew > 1e-8 * (1.0 + scale) {
        return Err(Error::invalid_input(format!(
            "matrix is not symmetric (max asymmetry {skew:.3e})"
        )));
    }
    Ok(())
}

/// `1e-10 * trace(A) / dim(A)`, the scale-invariant jitter floor.
pub fn default_jitter_floor(a: ArrayView2<'_, f64>) -> f64 {
    let n = a.nrows().max(1) as f64;
    let trace: f64 = a.diag().sum();
    JITTER_FLOOR_SCALE * trace.abs() / n
}

fn add_to_diagonal(a: &mut Mat<f64>, value: f64) {
    for i in 0..a.nrows() {
        a[(i, i)] += value;
    }
}

/// Solve `(A + jitter*I) Z = B` for symmetric positive semidefinite `A` with
/// matrix right-hand side.
///
/// Cholesky is attempted at the requested jitter; on failure the jitter is
/// escalated by factors of 10 from the default floor, at most three times,
/// before falling back to a minimum-norm least-squares solution of the
/// originally requested system.
pub fn solve_psd_multi(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>, jitter: f64) -> Result<Array2<f64>> {
    require_square_symmetric(a)?;
    if b.nrows() != a.nrows() {
        return Err(Error::invalid_input(format!(
            "right-hand side has {} rows, matrix has {}",
            b.nrows(),
            a.nrows()
        )));
    }
    if !jitter.is_finite() || jitter < 0.0 {
        return Err(Error::invalid_input(format!(
            "jitter must be nonnegative and finite, got {jitter}"
        )));
    }

    let base = to_faer(a);
    let rhs = to_faer(b);

    let floor = default_jitter_floor(a).max(f64::MIN_POSITIVE);
    let escalation_base = (jitter * 10.0).max(floor);
    let attempts = [
        jitter,
        escalation_base,
        escalation_base * 10.0,
        escalation_base * 100.0,
    ];

    let mut last_jitter = jitter;
    for &j in &attempts {
        if j < last_jitter {
            continue;
        }
        last_jitter = j;
        let mut shifted = base.clone();
        add_to_diagonal(&mut shifted, j);
        if let Ok(llt) = shifted.llt(Side::Lower) {
            let x = llt.solve(&rhs);
            return Ok(Array2::from_shape_fn((b.nrows(), b.ncols()), |(i, k)| x[(i, k)]));
        }
    }

    // Pseudo-inverse semantics on the system as requested.
    let mut shifted = base;
    add_to_diagonal(&mut shifted, jitter);
    let evd = shifted.self_adjoint_eigen(Side::Lower).map_err(|_| {
        Error::numerical_with_jitter(
            "eigendecomposition failed during pseudo-inverse fallback",
            last_jitter,
        )
    })?;
    let u = evd.U();
    let s = evd.S();
    let n = a.nrows();
    let max_eig = (0..n).map(|i| s[i].abs()).fold(0.0f64, f64::max);
    if !max_eig.is_finite() {
        return Err(Error::numerical_with_jitter(
            "matrix has non-finite spectrum",
            last_jitter,
        ));
    }
    let cutoff = PINV_RCOND * max_eig;
    // X = U * S^+ * U^T * B
    let ut_b = u.transpose() * &rhs;
    let mut scaled = ut_b;
    for i in 0..n {
        let inv = if s[i].abs() > cutoff { 1.0 / s[i] } else { 0.0 };
        for k in 0..scaled.ncols() {
            scaled[(i, k)] *= inv;
        }
    }
    let x = u * scaled;
    Ok(Array2::from_shape_fn((b.nrows(), b.ncols()), |(i, k)| x[(i, k)]))
}

/// Vector right-hand side variant of [`solve_psd_multi`].
pub fn solve_psd(a: ArrayView2<'_, f64>, b: ArrayView1<'_, f64>, jitter: f64) -> Result<Array1<f64>> {
    let rhs = b
        .to_owned()
        .into_shape_with_order((b.len(), 1))
        .expect("vector reshapes to column");
    let x = solve_psd_multi(a, rhs.view(), jitter)?;
    Ok(x.column(0).to_owned())
}

/// Eigenvalues and eigenvectors of a symmetric matrix, ascending.
pub fn sym_eigen(a: ArrayView2<'_, f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    require_square_symmetric(a)?;
    let m = to_faer(a);
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::numerical("symmetric eigendecomposition did not converge"))?;
    let n = a.nrows();
    let s = evd.S();
    let u = evd.U();
    let values = Array1::from_shape_fn(n, |i| s[i]);
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
    Ok((values, vectors))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(a: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
    require_square_symmetric(a)?;
    let m = to_faer(a);
    let values = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::numerical("symmetric eigenvalue computation did not converge"))?;
    Ok(Array1::from_vec(values))
}

/// Largest eigenvalue of a symmetric matrix.
pub fn largest_eigenvalue(a: ArrayView2<'_, f64>) -> Result<f64> {
    let values = sym_eigenvalues(a)?;
    Ok(values[values.len() - 1])
}

/// Cholesky solve of a strictly positive definite system, no escalation.
/// Fails with a numerical error if the factorization breaks down.
pub(crate) fn cholesky_solve_multi(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let m = to_faer(a);
    let rhs = to_faer(b);
    let llt = m
        .llt(Side::Lower)
        .map_err(|_| Error::numerical("Cholesky factorization failed on a matrix expected to be positive definite"))?;
    let x = llt.solve(&rhs);
    Ok(Array2::from_shape_fn((b.nrows(), b.ncols()), |(i, k)| x[(i, k)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_system_returns_rhs() {
        let a = Array2::eye(3);
        let b = array![1.0, 2.0, 3.0];
        let x = solve_psd(a.view(), b.view(), 0.0).unwrap();
        for (xi, bi) in x.iter().zip(b.iter()) {
            assert!((xi - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_system_solves_by_hand() {
        let a = array![[2.0, 0.0], [0.0, 4.0]];
        let b = array![2.0, 4.0];
        let x = solve_psd(a.view(), b.view(), 0.0).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_system_yields_minimum_norm_solution() {
        // A = [[1,1],[1,1]], b = (2,2): the minimum-norm solution is (1,1).
        // The escalated-jitter path resolves this to the condition-limited
        // accuracy of the shifted system, not to machine precision.
        let a = array![[1.0, 1.0], [1.0, 1.0]];
        let b = array![2.0, 2.0];
        let x = solve_psd(a.view(), b.view(), 0.0).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-6, "x = {x:?}");
        assert!((x[1] - 1.0).abs() < 1e-6, "x = {x:?}");
    }

    #[test]
    fn indefinite_matrix_reaches_pseudo_inverse_fallback() {
        // diag(-1, 1) defeats Cholesky at every escalated jitter level, so the
        // solver must fall back to the eigendecomposition route, which solves
        // this system exactly.
        let a = array![[-1.0, 0.0], [0.0, 1.0]];
        let b = array![2.0, 4.0];
        let x = solve_psd(a.view(), b.view(), 0.0).unwrap();
        assert!((x[0] + 2.0).abs() < 1e-12, "x = {x:?}");
        assert!((x[1] - 4.0).abs() < 1e-12, "x = {x:?}");
    }

    #[test]
    fn rejects_non_finite_entries() {
        let a = array![[1.0, f64::NAN], [f64::NAN, 1.0]];
        let b = array![1.0, 1.0];
        assert!(solve_psd(a.view(), b.view(), 0.0).is_err());
    }

    #[test]
    fn rejects_asymmetric_and_nonsquare() {
        let a = array![[1.0, 0.5], [0.0, 1.0]];
        let b = array![1.0, 1.0];
        assert!(solve_psd(a.view(), b.view(), 0.0).is_err());
        let a = Array2::<f64>::zeros((2, 3));
        assert!(solve_psd(a.view(), b.view(), 0.0).is_err());
    }

    #[test]
    fn rejects_negative_jitter() {
        let a = Array2::eye(2);
        let b = array![1.0, 1.0];
        assert!(solve_psd(a.view(), b.view(), -1.0).is_err());
    }

    #[test]
    fn multi_rhs_matches_column_solves() {
        let a = array![[4.0, 1.0], [1.0, 3.0]];
        let b = array![[1.0, 0.0], [0.0, 1.0]];
        let x = solve_psd_multi(a.view(), b.view(), 0.0).unwrap();
        for k in 0..2 {
            let xk = solve_psd(a.view(), b.column(k), 0.0).unwrap();
            for i in 0..2 {
                assert!((x[[i, k]] - xk[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn eigenvalues_of_diagonal_matrix() {
        let a = array![[3.0, 0.0], [0.0, 1.0]];
        let e = sym_eigenvalues(a.view()).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
        assert!((largest_eigenvalue(a.view()).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let a = array![[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.0]];
        let (s, u) = sym_eigen(a.view()).unwrap();
        let reconstructed = u.dot(&Array2::from_diag(&s)).dot(&u.t());
        for i in 0..3 {
            for j in 0..3 {
                assert!((reconstructed[[i, j]] - a[[i, j]]).abs() < 1e-12);
            }
        }
    }
}
