//! Independent reference solvers and random instances shared by the
//! integration tests.
//!
//! The graphical lasso oracle works entirely in the realified space: a
//! Hermitian `Θ` is carried as its real `2p×2p` image, the smooth part
//! `tr(PΘ) - log det Θ` is evaluated through real Cholesky factors (both terms
//! double under realification), and the penalty acts on each off-diagonal
//! `2×2` block as a group norm. Proximal gradient with backtracking is slow but
//! has nothing in common with block coordinate descent.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use spectral_precision::realify::phi_matrix;
use spectral_precision::{CMatrix, CVector};

pub fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn random_cmatrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn random_cvector(rng: &mut ChaCha8Rng, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| complex_normal(rng))
}

/// `A A† / k + ridge I` for a `p×k` Gaussian `A`: Hermitian and well
/// conditioned.
pub fn random_hpd(rng: &mut ChaCha8Rng, p: usize, k: usize, ridge: f64) -> CMatrix {
    let a = random_cmatrix(rng, p, k);
    let mut s = &a * a.adjoint() / Complex64::new(k as f64, 0.0);
    for i in 0..p {
        s[(i, i)] += Complex64::new(ridge, 0.0);
    }
    hermitize(&s)
}

pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Design with every column scaled to squared norm `n`.
pub fn scaled_design(rng: &mut ChaCha8Rng, n: usize, p: usize) -> CMatrix {
    let (x, _) = spectral_precision::classo::scale_columns(&random_cmatrix(rng, n, p));
    x
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_diff_vec(a: &CVector, b: &CVector) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Smooth part evaluated on the realified matrices, halved back to complex
/// units. `None` when `Θ` is not positive definite.
fn smooth(p_real: &DMatrix<f64>, theta: &CMatrix) -> Option<f64> {
    let t = phi_matrix(theta);
    let chol = t.clone().cholesky()?;
    let logdet: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    let trace = (p_real * &t).trace();
    Some(0.5 * (trace - logdet))
}

/// `P - Θ⁻¹` with the inverse taken in the realified space.
fn gradient(p_mat: &CMatrix, theta: &CMatrix) -> CMatrix {
    let inv = phi_matrix(theta).try_inverse().expect("iterate is positive definite");
    let p = theta.nrows();
    CMatrix::from_fn(p, p, |i, j| {
        // The (i, j) block of φ(Θ⁻¹) is [[a, -b], [b, a]].
        p_mat[(i, j)] - Complex64::new(inv[(2 * i, 2 * j)], inv[(2 * i + 1, 2 * j)])
    })
}

fn penalty(theta: &CMatrix, lambda: f64, weights: &DMatrix<f64>) -> f64 {
    let p = theta.nrows();
    let mut s = 0.0;
    for i in 0..p {
        for j in 0..p {
            if i != j {
                s += weights[(i, j)] * theta[(i, j)].norm();
            }
        }
    }
    lambda * s
}

/// Group soft threshold of each off-diagonal `2×2` block.
fn prox(a: &CMatrix, threshold: f64, weights: &DMatrix<f64>) -> CMatrix {
    let p = a.nrows();
    let out = CMatrix::from_fn(p, p, |i, j| {
        if i == j {
            Complex64::new(a[(i, j)].re, 0.0)
        } else {
            let t = threshold * weights[(i, j)];
            let m = a[(i, j)].norm();
            if m <= t {
                Complex64::new(0.0, 0.0)
            } else {
                a[(i, j)] * ((m - t) / m)
            }
        }
    });
    hermitize(&out)
}

/// Minimizes `tr(PΘ) - log det Θ + λ Σ_{k≠l} ω_kl |Θ_kl|` over Hermitian
/// positive definite `Θ` by proximal gradient with backtracking.
pub fn glasso_oracle(p_mat: &CMatrix, lambda: f64, weights: &DMatrix<f64>) -> CMatrix {
    let p = p_mat.nrows();
    let p_real = phi_matrix(p_mat);
    let mut theta = CMatrix::from_fn(p, p, |i, j| {
        if i == j {
            Complex64::new(1.0 / p_mat[(i, i)].re, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut f = smooth(&p_real, &theta).expect("diagonal start is positive definite");
    let mut step = 1.0;
    for _ in 0..200_000 {
        let g = gradient(p_mat, &theta);
        let (next, f_next) = loop {
            let cand = prox(&(&theta - &g * Complex64::new(step, 0.0)), lambda * step, weights);
            if let Some(fc) = smooth(&p_real, &cand) {
                let d = &cand - &theta;
                let lin: f64 = g.iter().zip(d.iter()).map(|(a, b)| (a.conj() * b).re).sum();
                let quad: f64 = d.iter().map(|v| v.norm_sqr()).sum::<f64>() / (2.0 * step);
                if fc <= f + lin + quad + 1e-15 * f.abs() {
                    break (cand, fc);
                }
            }
            step *= 0.5;
            assert!(step > 1e-20, "line search failed");
        };
        let change = max_diff(&next, &theta);
        theta = next;
        f = f_next;
        if change < 1e-13 {
            break;
        }
        step *= 2.0;
    }
    theta
}

/// Penalized objective used to compare solutions that agree only to the
/// oracle's accuracy.
pub fn glasso_objective(p_mat: &CMatrix, theta: &CMatrix, lambda: f64, weights: &DMatrix<f64>) -> f64 {
    smooth(&phi_matrix(p_mat), theta).unwrap_or(f64::INFINITY) + penalty(theta, lambda, weights)
}
