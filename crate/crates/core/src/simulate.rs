//! Data-generating processes and their closed-form spectral quantities.
//!
//! A [`VarmaModel`] describes
//! `X_t = Σ A_i X_{t-i} + ε_t + Σ B_j ε_{t-j}`, `ε_t ~ N(0, Σ_ε)`, with
//! spectral density `f(ω) = (2π)⁻¹ 𝒜⁻¹ ℬ Σ_ε ℬ† 𝒜⁻†` evaluated at
//! `z = e^{-iω}`, where `𝒜(z) = I - Σ A_i z^i` and `ℬ(z) = I + Σ B_j z^j`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complexify, hermitian_part, inverse, CMatrix, CVector, ONE};
use crate::spectral::TimeSeriesPanel;

pub const BURN_IN: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct VarmaModel {
    ar: Vec<DMatrix<f64>>,
    ma: Vec<DMatrix<f64>>,
    sigma_eps: DMatrix<f64>,
}

impl VarmaModel {
    /// Validates shapes, symmetry and positive definiteness of `Σ_ε`, and
    /// stability of the autoregressive part.
    pub fn new(ar: Vec<DMatrix<f64>>, ma: Vec<DMatrix<f64>>, sigma_eps: DMatrix<f64>) -> Result<Self> {
        let p = sigma_eps.nrows();
        if p == 0 || sigma_eps.ncols() != p {
            return Err(Error::invalid("innovation covariance must be square and non-empty"));
        }
        if ar.iter().chain(&ma).any(|m| m.shape() != (p, p)) {
            return Err(Error::invalid(format!("coefficient matrices must be {p}x{p}")));
        }
        if (&sigma_eps - sigma_eps.transpose()).abs().max() > 1e-12 {
            return Err(Error::invalid("innovation covariance is not symmetric"));
        }
        if sigma_eps.clone().cholesky().is_none() {
            return Err(Error::invalid("innovation covariance is not positive definite"));
        }
        let model = Self { ar, ma, sigma_eps };
        let rho = model.spectral_radius();
        if rho >= 1.0 {
            return Err(Error::invalid(format!(
                "autoregressive part is not stable (companion spectral radius {rho})"
            )));
        }
        Ok(model)
    }

    pub fn p(&self) -> usize {
        self.sigma_eps.nrows()
    }

    pub fn ar(&self) -> &[DMatrix<f64>] {
        &self.ar
    }

    pub fn ma(&self) -> &[DMatrix<f64>] {
        &self.ma
    }

    pub fn sigma_eps(&self) -> &DMatrix<f64> {
        &self.sigma_eps
    }

    /// Spectral radius of the companion matrix of the AR part.
    pub fn spectral_radius(&self) -> f64 {
        let p = self.p();
        let order = self.ar.len();
        if order == 0 {
            return 0.0;
        }
        let mut companion = DMatrix::zeros(p * order, p * order);
        for (i, a) in self.ar.iter().enumerate() {
            companion.view_mut((0, i * p), (p, p)).copy_from(a);
        }
        for i in 1..order {
            companion
                .view_mut((i * p, (i - 1) * p), (p, p))
                .fill_with_identity();
        }
        companion
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DgpFamily {
    /// I.i.d. Gaussian noise whose precision `Σ_ε⁻¹` is tridiagonal (0.7 on
    /// the diagonal, 0.3 beside it).
    #[serde(rename = "white_noise")]
    WhiteNoise,
    /// I.i.d. Gaussian noise whose covariance `Σ_ε` is that tridiagonal
    /// matrix; its precision is dense.
    #[serde(rename = "white_noise_cov")]
    WhiteNoiseCov,
    #[serde(rename = "var1")]
    Var1,
    #[serde(rename = "varma22")]
    Varma22,
    #[serde(rename = "var1_block")]
    Var1Block,
}

impl DgpFamily {
    pub fn name(self) -> &'static str {
        match self {
            DgpFamily::WhiteNoise => "white_noise",
            DgpFamily::WhiteNoiseCov => "white_noise_cov",
            DgpFamily::Var1 => "var1",
            DgpFamily::Varma22 => "varma22",
            DgpFamily::Var1Block => "var1_block",
        }
    }
}

impl fmt::Display for DgpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DgpFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "white_noise" | "wn" | "whitenoise" => Ok(DgpFamily::WhiteNoise),
            "white_noise_cov" | "wn_cov" => Ok(DgpFamily::WhiteNoiseCov),
            "var1" | "var" => Ok(DgpFamily::Var1),
            "varma22" | "varma" => Ok(DgpFamily::Varma22),
            "var1_block" | "var1block" => Ok(DgpFamily::Var1Block),
            other => Err(Error::invalid(format!("unknown DGP '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub family: DgpFamily,
    pub p: usize,
    pub n: usize,
    pub seed: u64,
}

fn banded(p: usize, bands: &[(usize, f64)]) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| {
        bands
            .iter()
            .find(|(offset, _)| j >= i && j - i == *offset)
            .map_or(0.0, |(_, v)| *v)
    })
}

fn block_diag(p: usize, block: &DMatrix<f64>) -> DMatrix<f64> {
    let b = block.nrows();
    let mut out = DMatrix::zeros(p, p);
    for start in (0..p).step_by(b) {
        out.view_mut((start, start), (b, b)).copy_from(block);
    }
    out
}

/// Symmetric tridiagonal matrix with 0.7 on the diagonal and 0.3 beside it.
pub fn tridiagonal(p: usize) -> DMatrix<f64> {
    let mut t = banded(p, &[(0, 0.7), (1, 0.3)]);
    t.fill_lower_triangle_with_upper_triangle();
    t
}

pub fn build_dgp(spec: &DgpSpec) -> Result<VarmaModel> {
    let p = spec.p;
    if p == 0 {
        return Err(Error::invalid("p must be at least 1"));
    }
    if spec.n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let needs_blocks = matches!(spec.family, DgpFamily::Varma22 | DgpFamily::Var1Block);
    if needs_blocks && p % 5 != 0 {
        return Err(Error::invalid(format!(
            "{} needs p divisible by 5, got {p}",
            spec.family
        )));
    }
    let eye = DMatrix::<f64>::identity(p, p);
    match spec.family {
        DgpFamily::WhiteNoise => {
            let sigma = tridiagonal(p)
                .try_inverse()
                .ok_or_else(|| Error::Singular("tridiagonal precision is singular".into()))?;
            VarmaModel::new(vec![], vec![], (&sigma + sigma.transpose()) * 0.5)
        }
        DgpFamily::WhiteNoiseCov => VarmaModel::new(vec![], vec![], tridiagonal(p)),
        DgpFamily::Var1 => {
            let a = banded(p, &[(0, 0.5), (1, -0.3), (2, 0.2)]);
            VarmaModel::new(vec![a], vec![], eye)
        }
        DgpFamily::Varma22 => {
            let i_plus_j = DMatrix::<f64>::identity(5, 5) + DMatrix::from_element(5, 5, 1.0);
            let b1 = block_diag(p, &(&i_plus_j * 1.5));
            let b2 = block_diag(p, &(&i_plus_j * 0.75));
            VarmaModel::new(vec![&eye * 0.4, &eye * 0.2], vec![b1, b2], eye.clone())
        }
        DgpFamily::Var1Block => {
            let block = banded(5, &[(0, 0.5), (1, 0.2)]);
            VarmaModel::new(vec![block_diag(p, &block)], vec![], eye * 0.5)
        }
    }
}

/// Gaussian sample path of length `n` after discarding [`BURN_IN`] steps.
pub fn simulate_path(model: &VarmaModel, n: usize, seed: u64) -> Result<TimeSeriesPanel> {
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let p = model.p();
    let chol = model
        .sigma_eps
        .clone()
        .cholesky()
        .ok_or_else(|| Error::invalid("innovation covariance is not positive definite"))?;
    let l = chol.l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n + BURN_IN;
    let (ar_order, ma_order) = (model.ar.len(), model.ma.len());
    let mut x: Vec<DVector<f64>> = Vec::with_capacity(total);
    let mut eps: Vec<DVector<f64>> = Vec::with_capacity(total);
    for t in 0..total {
        let z = DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
        let e = &l * z;
        let mut xt = e.clone();
        for i in 1..=ar_order.min(t) {
            xt += &model.ar[i - 1] * &x[t - i];
        }
        for j in 1..=ma_order.min(t) {
            xt += &model.ma[j - 1] * &eps[t - j];
        }
        x.push(xt);
        eps.push(e);
    }
    let values = DMatrix::from_fn(n, p, |t, k| x[BURN_IN + t][k]);
    TimeSeriesPanel::new(values)
}

fn lag_polynomial(coeffs: &[DMatrix<f64>], z: Complex64, sign: f64) -> CMatrix {
    let p = coeffs.first().map_or(0, |m| m.nrows());
    let mut out = CMatrix::identity(p, p);
    let mut power = ONE;
    for c in coeffs {
        power *= z;
        out += complexify(c) * (power * sign);
    }
    out
}

pub fn true_spectral_density(model: &VarmaModel, omega: f64) -> Result<CMatrix> {
    let p = model.p();
    let z = Complex64::from_polar(1.0, -omega);
    let a = if model.ar.is_empty() {
        CMatrix::identity(p, p)
    } else {
        lag_polynomial(&model.ar, z, -1.0)
    };
    let b = if model.ma.is_empty() {
        CMatrix::identity(p, p)
    } else {
        lag_polynomial(&model.ma, z, 1.0)
    };
    let a_inv = inverse(&a).map_err(|_| Error::invalid(format!("AR polynomial singular at omega = {omega}")))?;
    let transfer = a_inv * b;
    let f = &transfer * complexify(&model.sigma_eps) * transfer.adjoint();
    Ok(hermitian_part(&f.unscale(2.0 * PI)))
}

pub fn true_precision(model: &VarmaModel, omega: f64) -> Result<CMatrix> {
    let f = true_spectral_density(model, omega)?;
    let theta = inverse(&f).map_err(|_| Error::invalid("spectral density is singular"))?;
    Ok(hermitian_part(&theta))
}

/// `count` draws from the complex normal `N_C(mu, Sigma)`: the stacked real
/// and imaginary parts are Gaussian with covariance `½[[Σ₁, -Σ₂], [Σ₂, Σ₁]]`.
/// Rows of the result are draws.
pub fn sample_complex_normal(mu: &CVector, sigma: &CMatrix, count: usize, seed: u64) -> Result<CMatrix> {
    let p = mu.len();
    if sigma.shape() != (p, p) {
        return Err(Error::invalid("covariance and mean dimensions differ"));
    }
    if crate::linalg::hermitian_defect(sigma) > 1e-10 * (1.0 + crate::linalg::max_modulus(sigma)) {
        return Err(Error::invalid("covariance is not Hermitian"));
    }
    let real_cov = crate::realify::tildetilde_mat(sigma) * 0.5;
    let eig = SymmetricEigen::new(real_cov);
    let scale = eig.eigenvalues.abs().max().max(1e-300);
    if eig.eigenvalues.min() < -1e-10 * scale {
        return Err(Error::invalid("covariance is not positive semidefinite"));
    }
    let root_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&root_vals);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CMatrix::zeros(count, p);
    for r in 0..count {
        let z = DVector::from_fn(2 * p, |_, _| StandardNormal.sample(&mut rng));
        let y = &root * z;
        for k in 0..p {
            out[(r, k)] = mu[k] + Complex64::new(y[k], y[p + k]);
        }
    }
    Ok(out)
}
