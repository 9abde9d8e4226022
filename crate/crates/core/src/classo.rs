//! Complex lasso by coordinate descent.
//!
//! Two drivers share the same cyclic update `β_j ← S_λ(·)`:
//! [`classo`] keeps a residual vector (data form), [`classo_cov`] keeps
//! `s_XY - S_XX β` (Gram form). Both support warm starts and active-set
//! sweeps; [`classo_path`] chains them along a decreasing λ grid.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, ZERO};

/// `(|z| - λ)₊ z / |z|`, zero when `|z| ≤ λ`.
pub fn soft_threshold(z: Complex64, lambda: f64) -> Complex64 {
    let modulus = z.norm();
    if modulus <= lambda {
        return ZERO;
    }
    z * ((modulus - lambda) / modulus)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence when the largest coordinate change in a full sweep is at most this.
    pub tol: f64,
    /// Cap on coordinate sweeps, active-set sweeps included.
    pub max_sweeps: usize,
    pub active_set: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_sweeps: 10_000,
            active_set: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LassoSolution {
    #[serde(skip)]
    pub beta: CVector,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoPath {
    pub lambdas: Vec<f64>,
    pub solutions: Vec<LassoSolution>,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")))
    }
}

struct Outcome {
    sweeps: usize,
    converged: bool,
}

/// Runs cyclic sweeps until a full sweep moves no coordinate by more than
/// `tol`. With `active_set`, sweeps between full passes visit only the
/// coordinates that were nonzero after the last full pass.
///
/// `update(j)` performs one coordinate update and returns the modulus of the
/// change and whether the coordinate is nonzero afterwards.
fn run_sweeps(p: usize, opts: &SolverOptions, mut update: impl FnMut(usize) -> (f64, bool)) -> Outcome {
    let mut sweeps = 0;
    let mut active = Vec::with_capacity(p);
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        active.clear();
        let mut max_change = 0.0_f64;
        for j in 0..p {
            let (change, nonzero) = update(j);
            max_change = max_change.max(change);
            if nonzero {
                active.push(j);
            }
        }
        if max_change <= opts.tol {
            return Outcome {
                sweeps,
                converged: true,
            };
        }
        if !opts.active_set {
            continue;
        }
        while sweeps < opts.max_sweeps {
            sweeps += 1;
            let mut inner = 0.0_f64;
            for &j in &active {
                inner = inner.max(update(j).0);
            }
            if inner <= opts.tol {
                break;
            }
        }
    }
    Outcome {
        sweeps,
        converged: false,
    }
}

/// `max_j |X_j† Y| / n`, the smallest λ with an all-zero solution.
pub fn lambda_max(x: &CMatrix, y: &CVector) -> f64 {
    let n = x.nrows() as f64;
    x.column_iter()
        .map(|col| (col.dotc(y) / n).norm())
        .fold(0.0, f64::max)
}

/// `(1/2n)‖Y - Xβ‖² + λ‖β‖₁`.
pub fn objective(x: &CMatrix, y: &CVector, beta: &CVector, lambda: f64) -> f64 {
    let r = y - x * beta;
    r.norm_squared() / (2.0 * x.nrows() as f64) + lambda * beta.iter().map(|b| b.norm()).sum::<f64>()
}

/// Largest violation of the lasso optimality conditions: phase-aligned
/// equality `X_j†r/n = λ β_j/|β_j|` on the support, `|X_j†r/n| ≤ λ` off it.
pub fn kkt_residual(x: &CMatrix, y: &CVector, beta: &CVector, lambda: f64) -> f64 {
    let n = x.nrows() as f64;
    let r = y - x * beta;
    x.column_iter()
        .zip(beta.iter())
        .map(|(col, b)| {
            let grad = col.dotc(&r) / n;
            if b.norm() > 0.0 {
                (grad - b * (lambda / b.norm())).norm()
            } else {
                (grad.norm() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

const SCALE_TOL: f64 = 1e-8;

/// Errors unless every column satisfies `‖X_j‖² = n` to relative `1e-8`.
pub fn check_scaled_columns(x: &CMatrix) -> Result<()> {
    let n = x.nrows() as f64;
    for (j, col) in x.column_iter().enumerate() {
        let sq = col.norm_squared();
        if (sq - n).abs() > SCALE_TOL * n {
            return Err(Error::invalid(format!(
                "column {j} has squared norm {sq}, expected n = {n}"
            )));
        }
    }
    Ok(())
}

/// Rescales columns to `‖X_j‖ = √n`. Returns the scaled matrix and the
/// per-column factors `√n / ‖X_j‖`; multiply scaled-problem coefficients by
/// them to recover coefficients on the original columns. Zero columns keep
/// factor zero.
pub fn scale_columns(x: &CMatrix) -> (CMatrix, Vec<f64>) {
    let root_n = (x.nrows() as f64).sqrt();
    let mut scaled = x.clone();
    let mut factors = Vec::with_capacity(x.ncols());
    for mut col in scaled.column_iter_mut() {
        let norm = col.norm();
        let f = if norm > 0.0 { root_n / norm } else { 0.0 };
        col.scale_mut(f);
        factors.push(f);
    }
    (scaled, factors)
}

/// Complex lasso with residual updates. Columns of `x` must be pre-scaled to
/// `‖X_j‖ = √n`.
pub fn classo(
    x: &CMatrix,
    y: &CVector,
    lambda: f64,
    beta0: &CVector,
    opts: &SolverOptions,
) -> Result<LassoSolution> {
    let (n, p) = x.shape();
    if y.len() != n || beta0.len() != p {
        return Err(Error::invalid(format!(
            "shape mismatch: X is {n}x{p}, Y has {}, beta0 has {}",
            y.len(),
            beta0.len()
        )));
    }
    check_lambda(lambda)?;
    check_scaled_columns(x)?;
    let nf = n as f64;
    let mut beta = beta0.clone();
    let mut r = y - x * &beta;

    let outcome = run_sweeps(p, opts, |j| {
        let col = x.column(j);
        let old = beta[j];
        // X_j† r^{(j)} / n with r^{(j)} = r + X_j β_j and ‖X_j‖² = n.
        let z = col.dotc(&r) / nf + old;
        let new = soft_threshold(z, lambda);
        let delta = new - old;
        if delta != ZERO {
            r.axpy(-delta, &col, Complex64::new(1.0, 0.0));
            beta[j] = new;
        }
        (delta.norm(), new != ZERO)
    });

    Ok(LassoSolution {
        objective: objective(x, y, &beta, lambda),
        beta,
        lambda,
        iterations: outcome.sweeps,
        converged: outcome.converged,
    })
}

/// `½β†Sβ - Re(s†β) + λ‖β‖₁`.
pub fn cov_objective(s_xx: &CMatrix, s_xy: &CVector, beta: &CVector, lambda: f64) -> f64 {
    let quad = beta.dotc(&(s_xx * beta)).re;
    0.5 * quad - s_xy.dotc(beta).re + lambda * beta.iter().map(|b| b.norm()).sum::<f64>()
}

/// Complex lasso from Gram quantities: minimizes
/// `½β†S_XXβ - Re(s_XY†β) + λ‖β‖₁`. Each coordinate update divides by the
/// (real, positive) diagonal entry `S_XX[j, j]`.
pub fn classo_cov(
    s_xx: &CMatrix,
    s_xy: &CVector,
    lambda: f64,
    beta0: &CVector,
    opts: &SolverOptions,
) -> Result<LassoSolution> {
    let p = s_xx.nrows();
    if s_xx.ncols() != p || s_xy.len() != p || beta0.len() != p {
        return Err(Error::invalid("S_XX must be p x p with s_XY and beta0 of length p"));
    }
    check_lambda(lambda)?;
    let diag: Vec<f64> = (0..p).map(|j| s_xx[(j, j)].re).collect();
    if let Some(j) = diag.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::invalid(format!(
            "S_XX diagonal entry {j} is {}, must be positive",
            diag[j]
        )));
    }
    let mut beta = beta0.clone();
    let mut s_xr = s_xy - s_xx * &beta;

    let outcome = run_sweeps(p, opts, |j| {
        let old = beta[j];
        let v = s_xr[j] + old * diag[j];
        let new = soft_threshold(v, lambda) / diag[j];
        let delta = new - old;
        if delta != ZERO {
            s_xr.axpy(-delta, &s_xx.column(j), Complex64::new(1.0, 0.0));
            beta[j] = new;
        }
        (delta.norm(), new != ZERO)
    });

    Ok(LassoSolution {
        objective: cov_objective(s_xx, s_xy, &beta, lambda),
        beta,
        lambda,
        iterations: outcome.sweeps,
        converged: outcome.converged,
    })
}

/// `count` values log-linearly spaced from `lambda_max` down to
/// `lambda_max * min_ratio`.
pub fn log_lambda_grid(lambda_max: f64, count: usize, min_ratio: f64) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lambda_max],
        _ => {
            let step = min_ratio.ln() / (count - 1) as f64;
            (0..count)
                .map(|i| lambda_max * (step * i as f64).exp())
                .collect()
        }
    }
}

pub(crate) fn check_decreasing(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda grid is empty"));
    }
    for l in lambdas {
        check_lambda(*l)?;
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("lambda grid must be strictly decreasing"));
    }
    Ok(())
}

/// Pathwise coordinate descent: each fit starts from the previous solution.
/// With `warm_start = false` every fit starts from zero.
pub fn classo_path(
    x: &CMatrix,
    y: &CVector,
    lambdas: &[f64],
    opts: &SolverOptions,
    warm_start: bool,
) -> Result<LassoPath> {
    check_decreasing(lambdas)?;
    let zero = CVector::zeros(x.ncols());
    let mut solutions: Vec<LassoSolution> = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let start = match solutions.last() {
            Some(prev) if warm_start => &prev.beta,
            _ => &zero,
        };
        solutions.push(classo(x, y, lambda, start, opts)?);
    }
    Ok(LassoPath {
        lambdas: lambdas.to_vec(),
        solutions,
    })
}
