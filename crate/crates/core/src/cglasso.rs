//! Complex graphical lasso.
//!
//! Minimizes `⟨Θ, P⟩ - log det Θ + λ Σ_{k≠l} |Θ_kl|` over Hermitian positive
//! definite `Θ` by block coordinate descent on the working covariance `W`:
//! each column of `W` is refit by a Gram-form complex lasso against the
//! matching column of `P`, and the precision matrix is read off the stored
//! regression coefficients once `W` stops moving and the optimality
//! conditions hold.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classo::{check_decreasing, classo_cov, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{
    column_without, delete_row_col, hermitian_defect, hermitian_part, hpd_inverse, hpd_logdet,
    max_modulus, trace_product, CMatrix, CVector, ZERO,
};
use crate::metrics::rmse;

/// Scaling applied around the basic algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// Unscaled input.
    #[serde(rename = "cglasso")]
    Plain,
    /// Solve on the coherence matrix `D^{-1/2} P D^{-1/2}`, then map back.
    #[serde(rename = "cglasso_I")]
    Coherence,
    /// Rescale the predictors of every inner lasso by `D^{-1/2}`.
    #[serde(rename = "cglasso_II")]
    ScaledInner,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Plain, Variant::Coherence, Variant::ScaledInner];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "cglasso",
            Variant::Coherence => "cglasso_I",
            Variant::ScaledInner => "cglasso_II",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cglasso" | "plain" => Ok(Variant::Plain),
            "cglasso_i" | "i" | "coherence" => Ok(Variant::Coherence),
            "cglasso_ii" | "ii" | "scaled" => Ok(Variant::ScaledInner),
            other => Err(Error::invalid(format!("unknown variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlassoOptions {
    /// Outer convergence: largest modulus change of `W` over a full sweep.
    pub tol: f64,
    /// A fit only counts as converged once its optimality residual (see
    /// [`kkt_residual_weighted`]) is at most this; small steps alone can
    /// stall short of the optimum on ill-conditioned inputs.
    pub kkt_tol: f64,
    pub max_sweeps: usize,
    pub inner: SolverOptions,
}

impl Default for GlassoOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            kkt_tol: 1e-7,
            max_sweeps: 1_000,
            inner: SolverOptions {
                tol: 1e-10,
                max_sweeps: 10_000,
                active_set: true,
            },
        }
    }
}

/// Working covariance `W` and stacked inner-lasso coefficients `𝓑`
/// (column `k` holds the fit for node `k` over the other `p - 1` nodes).
/// Carrying a state from one λ to the next is the warmer start.
#[derive(Debug, Clone, PartialEq)]
pub struct GlassoState {
    pub w: CMatrix,
    pub b: CMatrix,
}

impl GlassoState {
    /// `W = P`, `𝓑 = 0`.
    pub fn initial(p_mat: &CMatrix) -> Self {
        let p = p_mat.nrows();
        Self {
            w: p_mat.clone(),
            b: CMatrix::zeros(p.saturating_sub(1), p),
        }
    }

    /// One pass over `k = 1..p`. `inner_scale`, when present, holds
    /// `diag(P)^{1/2}` and turns on per-lasso predictor scaling. Returns the
    /// largest modulus change in `W`.
    pub fn sweep(
        &mut self,
        p_mat: &CMatrix,
        lambda: f64,
        inner_scale: Option<&[f64]>,
        inner: &SolverOptions,
    ) -> Result<f64> {
        let p = p_mat.nrows();
        let mut max_change = 0.0_f64;
        for k in 0..p {
            let w11 = delete_row_col(&self.w, k);
            let p12 = column_without(p_mat, k);
            let beta0: CVector = self.b.column(k).into_owned();
            let beta = match inner_scale {
                None => {
                    let fit = classo_cov(&w11, &p12, lambda, &beta0, inner)?;
                    self.b.set_column(k, &fit.beta);
                    fit.beta
                }
                Some(scale) => {
                    let d: Vec<f64> = others(scale, k);
                    let w11_sc = CMatrix::from_fn(p - 1, p - 1, |i, j| w11[(i, j)] / (d[i] * d[j]));
                    let p12_sc = CVector::from_fn(p - 1, |i, _| p12[i] / d[i]);
                    let fit = classo_cov(&w11_sc, &p12_sc, lambda, &beta0, inner)?;
                    self.b.set_column(k, &fit.beta);
                    CVector::from_fn(p - 1, |i, _| fit.beta[i] / d[i])
                }
            };
            let w12 = &w11 * &beta;
            for (i, row) in (0..p).filter(|&r| r != k).enumerate() {
                max_change = max_change.max((self.w[(row, k)] - w12[i]).norm());
                self.w[(row, k)] = w12[i];
                self.w[(k, row)] = w12[i].conj();
            }
        }
        Ok(max_change)
    }

    /// Reads `Θ` off `W` and `𝓑`: `θ₂₂ = 1/(w₂₂ - w₁₂†β)`, `θ₁₂ = -β θ₂₂`,
    /// then averages `Θ` with `Θ†`.
    pub fn precision(&self, inner_scale: Option<&[f64]>) -> CMatrix {
        let p = self.w.nrows();
        let mut theta = CMatrix::zeros(p, p);
        for k in 0..p {
            let mut beta: CVector = self.b.column(k).into_owned();
            if let Some(scale) = inner_scale {
                for (i, d) in others(scale, k).iter().enumerate() {
                    beta[i] /= d;
                }
            }
            let w12 = column_without(&self.w, k);
            let theta22 = 1.0 / (self.w[(k, k)].re - w12.dotc(&beta).re);
            theta[(k, k)] = Complex64::new(theta22, 0.0);
            for (i, row) in (0..p).filter(|&r| r != k).enumerate() {
                theta[(row, k)] = -beta[i] * theta22;
            }
        }
        hermitian_part(&theta)
    }
}

fn others(values: &[f64], k: usize) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, v)| *v)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecisionEstimate {
    #[serde(skip)]
    pub theta: CMatrix,
    pub lambda: f64,
    pub kkt_residual: f64,
    pub converged: bool,
    pub sweeps: usize,
}

fn validate_input(p_mat: &CMatrix) -> Result<()> {
    let p = p_mat.nrows();
    if p == 0 || p_mat.ncols() != p {
        return Err(Error::invalid(format!(
            "input must be a non-empty square matrix, got {}x{}",
            p_mat.nrows(),
            p_mat.ncols()
        )));
    }
    if let Some(k) = (0..p).find(|&k| !(p_mat[(k, k)].re > 0.0)) {
        return Err(Error::invalid(format!(
            "diagonal entry {k} is {}, must be positive",
            p_mat[(k, k)]
        )));
    }
    let scale = max_modulus(p_mat);
    if hermitian_defect(p_mat) > 1e-8 * scale {
        return Err(Error::invalid("input matrix is not Hermitian"));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")))
    }
}

/// Sweeps until `W` moves less than `opts.tol`. Returns (converged, sweeps).
fn run(
    p_mat: &CMatrix,
    lambda: f64,
    state: &mut GlassoState,
    inner_scale: Option<&[f64]>,
    opts: &GlassoOptions,
) -> Result<(bool, usize)> {
    for sweep in 1..=opts.max_sweeps {
        let change = state.sweep(p_mat, lambda, inner_scale, &opts.inner)?;
        if change <= opts.tol {
            return Ok((true, sweep));
        }
    }
    Ok((false, opts.max_sweeps))
}

/// Basic algorithm from a caller-supplied coefficient start `b0`
/// (`(p-1)×p`); `W` starts at `P`.
pub fn cglasso(p_mat: &CMatrix, lambda: f64, b0: &CMatrix, opts: &GlassoOptions) -> Result<PrecisionEstimate> {
    validate_input(p_mat)?;
    let p = p_mat.nrows();
    if b0.shape() != (p - 1, p) {
        return Err(Error::invalid(format!(
            "coefficient start must be {}x{p}",
            p - 1
        )));
    }
    let mut state = GlassoState {
        w: p_mat.clone(),
        b: b0.clone(),
    };
    fit_with_state(p_mat, lambda, Variant::Plain, &mut state, opts)
}

pub fn cglasso_i(fhat: &CMatrix, lambda: f64, opts: &GlassoOptions) -> Result<PrecisionEstimate> {
    validate_input(fhat)?;
    let mut state = GlassoState::initial(&coherence(fhat));
    fit_with_state(fhat, lambda, Variant::Coherence, &mut state, opts)
}

pub fn cglasso_ii(fhat: &CMatrix, lambda: f64, opts: &GlassoOptions) -> Result<PrecisionEstimate> {
    validate_input(fhat)?;
    let mut state = GlassoState::initial(fhat);
    fit_with_state(fhat, lambda, Variant::ScaledInner, &mut state, opts)
}

/// Fits one λ for any variant, cold-started.
pub fn fit(fhat: &CMatrix, lambda: f64, variant: Variant, opts: &GlassoOptions) -> Result<PrecisionEstimate> {
    validate_input(fhat)?;
    let mut state = initial_state(fhat, variant);
    fit_with_state(fhat, lambda, variant, &mut state, opts)
}

fn initial_state(fhat: &CMatrix, variant: Variant) -> GlassoState {
    match variant {
        Variant::Coherence => GlassoState::initial(&coherence(fhat)),
        _ => GlassoState::initial(fhat),
    }
}

/// Fits one λ continuing from `state`, which is left at the solution. For
/// [`Variant::Coherence`] the state lives in coherence coordinates.
pub fn fit_with_state(
    fhat: &CMatrix,
    lambda: f64,
    variant: Variant,
    state: &mut GlassoState,
    opts: &GlassoOptions,
) -> Result<PrecisionEstimate> {
    check_lambda(lambda)?;
    let sqrt_diag = sqrt_diagonal(fhat);
    let inv_sqrt: Vec<f64> = sqrt_diag.iter().map(|d| 1.0 / d).collect();
    let coh;
    let (target, inner_scale) = match variant {
        Variant::Plain => (fhat, None),
        Variant::Coherence => {
            coh = coherence(fhat);
            (&coh, None)
        }
        Variant::ScaledInner => (fhat, Some(sqrt_diag.as_slice())),
    };
    let recover = |state: &GlassoState| match variant {
        Variant::Coherence => scale_both(&state.precision(None), &inv_sqrt),
        _ => state.precision(inner_scale),
    };
    let weights = penalty_weights(fhat, variant);
    let mut sweeps = 0;
    loop {
        let budget = GlassoOptions {
            max_sweeps: opts.max_sweeps - sweeps,
            ..*opts
        };
        let (steps_small, s) = run(target, lambda, state, inner_scale, &budget)?;
        sweeps += s;
        let theta = recover(state);
        let kkt = kkt_residual_weighted(fhat, &theta, lambda, &weights).unwrap_or(f64::INFINITY);
        let certified = steps_small && kkt <= opts.kkt_tol;
        if certified || !steps_small || sweeps >= opts.max_sweeps {
            return Ok(PrecisionEstimate {
                theta,
                lambda,
                kkt_residual: kkt,
                converged: certified,
                sweeps,
            });
        }
    }
}

fn sqrt_diagonal(a: &CMatrix) -> Vec<f64> {
    (0..a.nrows()).map(|k| a[(k, k)].re.sqrt()).collect()
}

/// `diag(s) A diag(s)`.
fn scale_both(a: &CMatrix, s: &[f64]) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (s[i] * s[j]))
}

/// `D^{-1/2} A D^{-1/2}` with `D = diag(A)`.
pub fn coherence(a: &CMatrix) -> CMatrix {
    let inv: Vec<f64> = sqrt_diagonal(a).iter().map(|d| 1.0 / d).collect();
    let mut c = scale_both(a, &inv);
    for k in 0..c.nrows() {
        c[(k, k)] = Complex64::new(1.0, 0.0);
    }
    c
}

/// Entrywise penalty weights of the problem each variant solves: all ones for
/// the plain problem, `√(P_kk P_ll)` for the coherence variant, and
/// `√P_kk` on row `k` for per-lasso scaling.
pub fn penalty_weights(fhat: &CMatrix, variant: Variant) -> DMatrix<f64> {
    let p = fhat.nrows();
    let s = sqrt_diagonal(fhat);
    match variant {
        Variant::Plain => DMatrix::from_element(p, p, 1.0),
        Variant::Coherence => DMatrix::from_fn(p, p, |k, l| s[k] * s[l]),
        Variant::ScaledInner => DMatrix::from_fn(p, p, |k, _| s[k]),
    }
}

/// Moduli at or below this count as exact zeros in the optimality check.
const ZERO_TOL: f64 = 1e-12;

/// Largest violation of `P - Θ⁻¹ + λΨ = 0` for the unweighted problem.
pub fn kkt_residual(p_mat: &CMatrix, theta: &CMatrix, lambda: f64) -> Result<f64> {
    let p = p_mat.nrows();
    kkt_residual_weighted(p_mat, theta, lambda, &DMatrix::from_element(p, p, 1.0))
}

/// As [`kkt_residual`] with entrywise penalty weights `ω_kl`.
pub fn kkt_residual_weighted(
    p_mat: &CMatrix,
    theta: &CMatrix,
    lambda: f64,
    weights: &DMatrix<f64>,
) -> Result<f64> {
    let p = p_mat.nrows();
    if theta.shape() != (p, p) || weights.shape() != (p, p) {
        return Err(Error::invalid("shape mismatch in KKT check"));
    }
    let sigma = hpd_inverse(theta)?;
    let mut worst = 0.0_f64;
    for k in 0..p {
        for l in 0..p {
            let gap = p_mat[(k, l)] - sigma[(k, l)];
            let v = if k == l {
                gap.norm()
            } else {
                let t = theta[(k, l)];
                let lw = lambda * weights[(k, l)];
                if t.norm() > ZERO_TOL {
                    (gap + t * (lw / t.norm())).norm()
                } else {
                    (gap.norm() - lw).max(0.0)
                }
            };
            worst = worst.max(v);
        }
    }
    Ok(worst)
}

/// `⟨Θ, P⟩ - log det Θ + λ Σ_{k≠l} |Θ_kl|`.
pub fn objective(p_mat: &CMatrix, theta: &CMatrix, lambda: f64) -> Result<f64> {
    let p = theta.nrows();
    let mut off = 0.0;
    for k in 0..p {
        for l in 0..p {
            if k != l {
                off += theta[(k, l)].norm();
            }
        }
    }
    Ok(trace_product(p_mat, theta).re - hpd_logdet(theta)? + lambda * off)
}

/// Smallest λ for which the variant returns a diagonal estimate.
pub fn lambda_zero(fhat: &CMatrix, variant: Variant) -> f64 {
    let p = fhat.nrows();
    let s = sqrt_diagonal(fhat);
    let mut best = 0.0_f64;
    for k in 0..p {
        for l in 0..p {
            if k == l {
                continue;
            }
            let m = fhat[(k, l)].norm();
            let v = match variant {
                Variant::Plain => m,
                Variant::Coherence => m / (s[k] * s[l]),
                // Row k of column l's inner lasso is scaled by 1/√P_kk.
                Variant::ScaledInner => m / s[k],
            };
            best = best.max(v);
        }
    }
    best
}

/// Number of unordered off-diagonal pairs with modulus above `tol`.
pub fn edge_count(theta: &CMatrix, tol: f64) -> usize {
    let p = theta.nrows();
    let mut count = 0;
    for k in 0..p {
        for l in (k + 1)..p {
            if theta[(k, l)].norm() > tol || theta[(l, k)].norm() > tol {
                count += 1;
            }
        }
    }
    count
}

pub const EDGE_TOL: f64 = 1e-8;

/// Local Whittle log-likelihood `n_eff (log det Θ - tr(f̂Θ))`.
pub fn whittle_loglik(theta: &CMatrix, fhat: &CMatrix, n_eff: usize) -> Result<f64> {
    Ok(n_eff as f64 * (hpd_logdet(theta)? - trace_product(fhat, theta).re))
}

/// `-2 l(Θ) + |E| log n_raw + 4γ|E| log p`.
pub fn ebic(theta: &CMatrix, fhat: &CMatrix, n_eff: usize, n_raw: usize, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let loglik = whittle_loglik(theta, fhat, n_eff)?;
    let edges = edge_count(theta, EDGE_TOL) as f64;
    let p = theta.nrows() as f64;
    Ok(-2.0 * loglik + edges * (n_raw as f64).ln() + 4.0 * gamma * edges * p.ln())
}

/// `-θ_kl / √(θ_kk θ_ll)` off the diagonal, ones on it.
pub fn partial_coherence(theta: &CMatrix) -> Result<CMatrix> {
    let p = theta.nrows();
    let d: Vec<f64> = (0..p).map(|k| theta[(k, k)].re).collect();
    if let Some(k) = d.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::invalid(format!("precision diagonal entry {k} is not positive")));
    }
    Ok(CMatrix::from_fn(p, p, |k, l| {
        if k == l {
            Complex64::new(1.0, 0.0)
        } else {
            -theta[(k, l)] / (d[k] * d[l]).sqrt()
        }
    }))
}

/// Classical estimate `f̂⁻¹`; fails when `f̂` is singular (e.g. `2m+1 < p`).
pub fn inverse_periodogram(fhat: &CMatrix) -> Result<CMatrix> {
    let inv = hpd_inverse(fhat)?;
    let cond = crate::linalg::hermitian_eigenvalues(fhat);
    let (lo, hi) = (cond[0], *cond.last().unwrap());
    if !(lo > hi * 1e-12) {
        return Err(Error::Singular(format!(
            "averaged periodogram is numerically singular (eigenvalues {lo:e}..{hi:e})"
        )));
    }
    Ok(inv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig {
    pub variant: Variant,
    pub gamma: f64,
    /// Effective sample size `2m + 1` used in the likelihood.
    pub n_eff: usize,
    /// Series length used in the edge penalty.
    pub n_raw: usize,
    pub warm_start: bool,
    pub options: GlassoOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionPath {
    pub lambdas: Vec<f64>,
    pub estimates: Vec<PrecisionEstimate>,
    pub ebic: Vec<f64>,
    pub selected_index: usize,
    /// Relative errors against the truth, when one was supplied.
    pub rmse: Option<Vec<f64>>,
    /// Grid length before truncation by the stopping rule.
    pub requested: usize,
}

impl PrecisionPath {
    pub fn selected(&self) -> &PrecisionEstimate {
        &self.estimates[self.selected_index]
    }
}

const STOP_FACTOR: f64 = 0.5;
/// λ must have fallen below this fraction of λ₀ before the path may stop.
const STOP_MIN_DROP: f64 = 0.5;

/// Replays the truth-based stopping rule on a recorded error sequence.
/// Returns the index of the first λ at which the path stops (that entry is
/// still kept), or `None` to run the whole grid.
pub fn stopping_index(lambdas: &[f64], rmse: &[f64]) -> Option<usize> {
    let lambda0 = *lambdas.first()?;
    let rmse0 = *rmse.first()?;
    let mut best = rmse0;
    for (i, (&lambda, &err)) in lambdas.iter().zip(rmse).enumerate().skip(1) {
        best = best.min(err);
        let far = lambda <= STOP_MIN_DROP * lambda0;
        if far && err - best > STOP_FACTOR * (rmse0 - best) {
            return Some(i);
        }
    }
    None
}

/// Fits a decreasing λ grid. With `warm_start`, the working covariance and
/// coefficient matrix carry over from one λ to the next. With `truth`, the
/// relative error is recorded and the path stops early once it turns back up.
pub fn cglasso_path(
    fhat: &CMatrix,
    lambdas: &[f64],
    config: &PathConfig,
    truth: Option<&CMatrix>,
) -> Result<PrecisionPath> {
    validate_input(fhat)?;
    check_decreasing(lambdas)?;
    if !(0.0..=1.0).contains(&config.gamma) {
        return Err(Error::invalid(format!("gamma must lie in [0, 1], got {}", config.gamma)));
    }
    let mut state = initial_state(fhat, config.variant);
    let mut estimates = Vec::with_capacity(lambdas.len());
    let mut errors = Vec::new();
    let mut ebics = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !config.warm_start {
            state = initial_state(fhat, config.variant);
        }
        let est = fit_with_state(fhat, lambda, config.variant, &mut state, &config.options)?;
        ebics.push(
            ebic(&est.theta, fhat, config.n_eff, config.n_raw, config.gamma).unwrap_or(f64::INFINITY),
        );
        estimates.push(est);
        if let Some(t) = truth {
            errors.push(rmse(&estimates.last().unwrap().theta, t)?);
            let kept = &lambdas[..estimates.len()];
            if stopping_index(kept, &errors) == Some(estimates.len() - 1) {
                break;
            }
        }
    }
    let selected_index = select_min(&ebics, &estimates);
    Ok(PrecisionPath {
        lambdas: lambdas[..estimates.len()].to_vec(),
        estimates,
        ebic: ebics,
        selected_index,
        rmse: truth.map(|_| errors),
        requested: lambdas.len(),
    })
}

fn select_min(ebics: &[f64], estimates: &[PrecisionEstimate]) -> usize {
    let pick = |only_converged: bool| {
        ebics
            .iter()
            .zip(estimates)
            .enumerate()
            .filter(|(_, (e, est))| e.is_finite() && (est.converged || !only_converged))
            .min_by(|a, b| a.1 .0.total_cmp(b.1 .0))
            .map(|(i, _)| i)
    };
    pick(true).or_else(|| pick(false)).unwrap_or(0)
}

/// Diagonal estimate `1 / P_kk`, the exact solution for large λ.
pub fn diagonal_solution(p_mat: &CMatrix) -> CMatrix {
    let p = p_mat.nrows();
    CMatrix::from_fn(p, p, |k, l| {
        if k == l {
            Complex64::new(1.0 / p_mat[(k, k)].re, 0.0)
        } else {
            ZERO
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, min_eigenvalue};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Sample covariance of `n` complex Gaussian draws, always Hermitian PD for n > p.
    fn random_hpd(p: usize, n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
        let z = CMatrix::from_fn(n, p, |_, _| c(g(), g()));
        let mut s = z.adjoint() * z;
        s.unscale_mut(n as f64);
        hermitian_part(&s)
    }

    #[test]
    fn scalar_case() {
        let p = CMatrix::from_element(1, 1, c(2.5, 0.0));
        let est = cglasso(&p, 0.3, &CMatrix::zeros(0, 1), &GlassoOptions::default()).unwrap();
        assert!((est.theta[(0, 0)] - c(0.4, 0.0)).norm() < 1e-14);
        assert!(est.converged);
    }

    #[test]
    fn large_lambda_gives_diagonal() {
        let p = random_hpd(5, 12, 1);
        let lam = lambda_zero(&p, Variant::Plain);
        let est = fit(&p, lam, Variant::Plain, &GlassoOptions::default()).unwrap();
        assert!(max_abs_diff(&est.theta, &diagonal_solution(&p)) < 1e-12);
        assert!(kkt_residual(&p, &diagonal_solution(&p), lam).unwrap() <= 1e-10);
    }

    #[test]
    fn lambda_zero_per_variant_is_tight() {
        let p = random_hpd(4, 10, 2);
        for v in Variant::ALL {
            let lam = lambda_zero(&p, v);
            let at = fit(&p, lam, v, &GlassoOptions::default()).unwrap();
            assert_eq!(edge_count(&at.theta, EDGE_TOL), 0, "{v}");
            let below = fit(&p, 0.9 * lam, v, &GlassoOptions::default()).unwrap();
            assert!(edge_count(&below.theta, EDGE_TOL) > 0, "{v}");
        }
    }

    #[test]
    fn converged_fit_satisfies_kkt() {
        let p = random_hpd(6, 20, 3);
        let lam = 0.3 * lambda_zero(&p, Variant::Plain);
        let est = fit(&p, lam, Variant::Plain, &GlassoOptions::default()).unwrap();
        assert!(est.converged);
        assert!(est.kkt_residual <= 1e-5, "{}", est.kkt_residual);
        assert!(hermitian_defect(&est.theta) <= 1e-10);
        assert!(min_eigenvalue(&est.theta) > 0.0);

        let mut bumped = est.theta.clone();
        bumped[(0, 1)] += 0.1;
        bumped[(1, 0)] += 0.1;
        assert!(kkt_residual(&p, &bumped, lam).unwrap() > 1e-2);
    }

    #[test]
    fn working_covariance_keeps_diagonal() {
        let p = random_hpd(5, 15, 4);
        let mut state = GlassoState::initial(&p);
        let lam = 0.2 * lambda_zero(&p, Variant::Plain);
        let mut prev = f64::INFINITY;
        for _ in 0..20 {
            state.sweep(&p, lam, None, &GlassoOptions::default().inner).unwrap();
            for k in 0..5 {
                assert_eq!(state.w[(k, k)], p[(k, k)]);
            }
            assert!(hermitian_defect(&state.w) == 0.0);
            let theta = state.precision(None);
            let val = objective(&p, &theta, lam).unwrap();
            assert!(val <= prev + 1e-8, "{val} > {prev}");
            prev = val;
        }
    }

    #[test]
    fn unit_diagonal_variants_coincide() {
        let p = coherence(&random_hpd(5, 15, 5));
        let lam = 0.3;
        let a = fit(&p, lam, Variant::Plain, &GlassoOptions::default()).unwrap();
        let b = fit(&p, lam, Variant::Coherence, &GlassoOptions::default()).unwrap();
        let c2 = fit(&p, lam, Variant::ScaledInner, &GlassoOptions::default()).unwrap();
        assert!(max_abs_diff(&a.theta, &b.theta) < 1e-8);
        assert!(max_abs_diff(&a.theta, &c2.theta) < 1e-8);
    }

    #[test]
    fn coherence_variant_on_diagonal_input() {
        let p = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0, 0.0), c(0.5, 0.0), c(4.0, 0.0)]));
        let est = cglasso_i(&p, 1e-3, &GlassoOptions::default()).unwrap();
        assert!(max_abs_diff(&est.theta, &diagonal_solution(&p)) < 1e-6);
    }

    #[test]
    fn coherence_variant_satisfies_weighted_kkt() {
        let p = random_hpd(5, 20, 6);
        let lam = 0.3 * lambda_zero(&p, Variant::Coherence);
        let est = cglasso_i(&p, lam, &GlassoOptions::default()).unwrap();
        assert!(est.converged);
        assert!(est.kkt_residual <= 1e-5);
    }

    #[test]
    fn ebic_arithmetic() {
        let f = random_hpd(4, 30, 7);
        let diag = diagonal_solution(&f);
        let base = ebic(&diag, &f, 11, 100, 0.5).unwrap();
        let ll = whittle_loglik(&diag, &f, 11).unwrap();
        assert!((base + 2.0 * ll).abs() < 1e-12);
        let mut one_edge = diag.clone();
        one_edge[(0, 1)] = c(0.01, 0.0);
        one_edge[(1, 0)] = c(0.01, 0.0);
        let ll1 = whittle_loglik(&one_edge, &f, 11).unwrap();
        let with_edge = ebic(&one_edge, &f, 11, 100, 0.5).unwrap();
        let expected = -2.0 * ll1 + 100f64.ln() + 2.0 * 4f64.ln();
        assert!((with_edge - expected).abs() < 1e-10);
        let bic = ebic(&one_edge, &f, 11, 100, 0.0).unwrap();
        assert!((with_edge - bic - 2.0 * 4f64.ln()).abs() < 1e-10);
        assert!(ebic(&diag, &f, 11, 100, 1.5).is_err());
    }

    #[test]
    fn partial_coherence_examples() {
        let t = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]);
        let pc = partial_coherence(&t).unwrap();
        assert!((pc[(0, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(pc[(0, 0)], c(1.0, 0.0));
        let scaled = partial_coherence(&t.scale(3.7)).unwrap();
        assert!(max_abs_diff(&pc, &scaled) < 1e-15);
        let d = diagonal_solution(&random_hpd(3, 10, 1));
        assert_eq!(partial_coherence(&d).unwrap(), CMatrix::identity(3, 3));
        assert!(partial_coherence(&CMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn stopping_rule_replay() {
        let lambdas = [1.0, 0.8, 0.6, 0.45, 0.3, 0.2, 0.1];
        // Descends to 0.2 then climbs; threshold is 0.2 + 0.5 (1.0 - 0.2) = 0.6.
        let errs = [1.0, 0.7, 0.3, 0.2, 0.35, 0.65, 0.9];
        assert_eq!(stopping_index(&lambdas, &errs), Some(5));
        // A climb before λ has halved does not stop the path.
        let errs = [1.0, 0.2, 0.7, 0.2, 0.2, 0.2, 0.2];
        assert_eq!(stopping_index(&lambdas, &errs), None);
    }

    #[test]
    fn rejects_bad_input() {
        let mut p = random_hpd(3, 10, 8);
        p[(1, 1)] = c(0.0, 0.0);
        assert!(matches!(fit(&p, 0.1, Variant::Plain, &GlassoOptions::default()), Err(Error::InvalidInput(_))));
        let p = random_hpd(3, 10, 8);
        assert!(fit(&p, -1.0, Variant::Plain, &GlassoOptions::default()).is_err());
    }

    #[test]
    fn path_starts_diagonal_and_warm_equals_cold() {
        let f = random_hpd(6, 25, 9);
        for variant in [Variant::Plain, Variant::Coherence] {
            let l0 = lambda_zero(&f, variant);
            let lambdas = crate::classo::log_lambda_grid(l0, 12, 0.05);
            let mut cfg = PathConfig {
                variant,
                gamma: 0.0,
                n_eff: 25,
                n_raw: 100,
                warm_start: true,
                options: GlassoOptions {
                    tol: 1e-10,
                    ..Default::default()
                },
            };
            let warm = cglasso_path(&f, &lambdas, &cfg, None).unwrap();
            cfg.warm_start = false;
            let cold = cglasso_path(&f, &lambdas, &cfg, None).unwrap();
            assert_eq!(edge_count(&warm.estimates[0].theta, EDGE_TOL), 0);
            for (a, b) in warm.estimates.iter().zip(&cold.estimates) {
                assert!(a.converged && b.converged);
                assert!(max_abs_diff(&a.theta, &b.theta) < 1e-6, "{variant}");
                assert!(a.kkt_residual <= 1e-5);
            }
            let sel = warm.selected_index;
            assert!(warm.ebic.iter().all(|e| *e >= warm.ebic[sel]));
        }
    }
}
