//! Dense complex matrix helpers shared by the estimators.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_modulus(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_sq(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest `|a_kl - conj(a_lk)|`; zero for an exactly Hermitian matrix.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for k in 0..n {
        for l in k..n {
            worst = worst.max((a[(k, l)] - a[(l, k)].conj()).norm());
        }
    }
    worst
}

/// `(A + A†) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

fn require_square(a: &CMatrix, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

/// Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(a: &CMatrix) -> Result<Cholesky<Complex64, Dyn>> {
    require_square(a, "matrix")?;
    let chol = Cholesky::new(hermitian_part(a))
        .ok_or_else(|| Error::Singular("Cholesky factorization failed".into()))?;
    // Complex square roots never fail, so a non-positive pivot shows up as a
    // diagonal entry of L that is not real and positive.
    let l = chol.l_dirty();
    for i in 0..a.nrows() {
        let d = l[(i, i)];
        if !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re {
            return Err(Error::Singular(format!(
                "matrix is not positive definite (pivot {i})"
            )));
        }
    }
    Ok(chol)
}

/// Inverse of a Hermitian positive definite matrix, symmetrized.
pub fn hpd_inverse(a: &CMatrix) -> Result<CMatrix> {
    Ok(hermitian_part(&cholesky(a)?.inverse()))
}

/// `log det A` for Hermitian positive definite `A`.
pub fn hpd_logdet(a: &CMatrix) -> Result<f64> {
    let chol = cholesky(a)?;
    let l = chol.l_dirty();
    Ok(2.0 * (0..a.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>())
}

/// General inverse via LU; `Singular` when the pivot vanishes.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    require_square(a, "matrix")?;
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("LU inverse failed".into()))
}

/// Ascending eigenvalues of the Hermitian part of `a`.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitian_part(a))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a)
        .first()
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// Real trace of `A B`, computed without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Embeds a real matrix as a complex one.
pub fn complexify(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Removes row and column `k`.
pub fn delete_row_col(a: &CMatrix, k: usize) -> CMatrix {
    a.clone().remove_row(k).remove_column(k)
}

/// Column `k` of `a` with entry `k` removed.
pub fn column_without(a: &CMatrix, k: usize) -> CVector {
    let col: CVector = a.column(k).into_owned();
    col.remove_row(k)
}
