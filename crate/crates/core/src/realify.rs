//! Realification of complex scalars, vectors and matrices.
//!
//! A complex number `a + ib` maps to the real 2×2 block `[[a, -b], [b, a]]`.
//! The map is a ring isomorphism onto that class of blocks and extends
//! blockwise to matrices, so every complex least-squares or likelihood problem
//! has an equivalent real problem of twice the size. The production solvers
//! never materialize it; it exists to check them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// `[[Re z, -Im z], [Im z, Re z]]`.
pub fn phi_scalar(z: Complex64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[z.re, -z.im, z.im, z.re])
}

/// Blockwise realification, `m×n` complex to `2m×2n` real.
pub fn phi_matrix(z: &CMatrix) -> DMatrix<f64> {
    let (m, n) = z.shape();
    let mut out = DMatrix::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let v = z[(i, j)];
            out[(2 * i, 2 * j)] = v.re;
            out[(2 * i, 2 * j + 1)] = -v.im;
            out[(2 * i + 1, 2 * j)] = v.im;
            out[(2 * i + 1, 2 * j + 1)] = v.re;
        }
    }
    out
}

/// The shuffle that moves odd positions ahead of even ones, as zero-based
/// indices: entry `i` is the source position of output `i`.
///
/// For `k = 2` this is `[0, 2, 1, 3]`.
pub fn permutation(k: usize) -> Vec<usize> {
    (0..k).map(|i| 2 * i).chain((0..k).map(|i| 2 * i + 1)).collect()
}

/// Real and imaginary parts of a column vector, stacked.
pub fn tilde_vec(z: &CVector) -> DVector<f64> {
    let interleaved = phi_matrix(&CMatrix::from_column_slice(z.len(), 1, z.as_slice()));
    let perm = permutation(z.len());
    DVector::from_fn(2 * z.len(), |i, _| interleaved[(perm[i], 0)])
}

/// Inverse of [`tilde_vec`].
pub fn untilde_vec(x: &DVector<f64>) -> CVector {
    let n = x.len() / 2;
    CVector::from_fn(n, |i, _| Complex64::new(x[i], x[n + i]))
}

/// `[[Re Z, -Im Z], [Im Z, Re Z]]`, the row- and column-permuted realification.
pub fn tildetilde_mat(z: &CMatrix) -> DMatrix<f64> {
    let phi = phi_matrix(z);
    let rows = permutation(z.nrows());
    let cols = permutation(z.ncols());
    DMatrix::from_fn(2 * z.nrows(), 2 * z.ncols(), |i, j| phi[(rows[i], cols[j])])
}

/// Group soft threshold in the plane: `(‖x‖ - λ)₊ x / ‖x‖`.
pub fn soft_threshold_real(x: [f64; 2], lambda: f64) -> [f64; 2] {
    let norm = x[0].hypot(x[1]);
    if norm <= lambda || norm == 0.0 {
        return [0.0, 0.0];
    }
    let scale = (norm - lambda) / norm;
    [x[0] * scale, x[1] * scale]
}

const ORACLE_TOL: f64 = 1e-10;
const ORACLE_MAX_SWEEPS: usize = 200_000;

/// Solves the complex lasso `(1/2n)‖Y - Xβ‖² + λ‖β‖₁` as a real group lasso
/// with `p` groups of two orthogonal columns, using cyclic block updates in
/// closed form. Reference solver for [`crate::classo`].
pub fn real_group_lasso_oracle(x: &CMatrix, y: &CVector, lambda: f64) -> Result<CVector> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(Error::invalid(format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    if !(lambda >= 0.0) {
        return Err(Error::invalid("lambda must be non-negative"));
    }
    let xt = tildetilde_mat(x);
    let nf = n as f64;
    // Group j owns real columns j and p + j.
    let col_sq: Vec<f64> = (0..p).map(|j| xt.column(j).norm_squared() / nf).collect();
    let mut beta = DVector::<f64>::zeros(2 * p);
    let mut resid = tilde_vec(y);

    for _ in 0..ORACLE_MAX_SWEEPS {
        let mut max_change = 0.0_f64;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                continue;
            }
            let (c0, c1) = (xt.column(j), xt.column(p + j));
            let old = [beta[j], beta[p + j]];
            let partial_dot = |c: nalgebra::DVectorView<f64>, own: f64| {
                c.dot(&resid) / nf + own * col_sq[j]
            };
            // Columns within a group are orthogonal with equal norms.
            let g = [partial_dot(c0, old[0]), partial_dot(c1, old[1])];
            let shrunk = soft_threshold_real(g, lambda);
            let new = [shrunk[0] / col_sq[j], shrunk[1] / col_sq[j]];
            let delta = [new[0] - old[0], new[1] - old[1]];
            if delta != [0.0, 0.0] {
                resid.axpy(-delta[0], &c0, 1.0);
                resid.axpy(-delta[1], &c1, 1.0);
                beta[j] = new[0];
                beta[p + j] = new[1];
            }
            max_change = max_change.max(delta[0].hypot(delta[1]));
        }
        if max_change <= ORACLE_TOL {
            return Ok(untilde_vec(&beta));
        }
    }
    Err(Error::NotConverged {
        iterations: ORACLE_MAX_SWEEPS,
        last_change: f64::NAN,
    })
}
