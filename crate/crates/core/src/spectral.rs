//! Discrete Fourier transforms at Fourier frequencies and the averaged
//! periodogram.
//!
//! Conventions: `d_j = n^{-1/2} Σ_{t=1}^{n} X_t exp(-i t ω_j)` with
//! `ω_j = 2πj/n`, and `f̂(ω_j) = (2π(2m+1))⁻¹ Σ_{|k|≤m} d_{j+k} d_{j+k}†`,
//! where `j + k` wraps modulo `n` into the Fourier grid.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// `n` consecutive observations of a `p`-variate series, one row per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    values: DMatrix<f64>,
    names: Vec<String>,
}

impl TimeSeriesPanel {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let names = (1..=values.ncols()).map(|k| format!("X{k}")).collect();
        Self::with_names(values, names)
    }

    pub fn with_names(values: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        if values.nrows() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 time points, got {}",
                values.nrows()
            )));
        }
        if values.ncols() == 0 {
            return Err(Error::invalid("panel has no series"));
        }
        if names.len() != values.ncols() {
            return Err(Error::invalid("one name per series is required"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % values.nrows(), pos / values.nrows());
            return Err(Error::invalid(format!(
                "non-finite value at row {row}, column {col}"
            )));
        }
        Ok(Self { values, names })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Copy with every column shifted to zero mean.
    pub fn centered(&self) -> Self {
        let mut values = self.values.clone();
        for mut col in values.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        Self {
            values,
            names: self.names.clone(),
        }
    }
}

/// The index set `F_n = {-[(n-1)/2], …, [n/2]}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierGrid {
    n: usize,
}

impl FourierGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("Fourier grid needs n >= 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lowest(&self) -> i64 {
        -(((self.n - 1) / 2) as i64)
    }

    pub fn highest(&self) -> i64 {
        (self.n / 2) as i64
    }

    pub fn indices(&self) -> Vec<i64> {
        (self.lowest()..=self.highest()).collect()
    }

    pub fn contains(&self, j: i64) -> bool {
        (self.lowest()..=self.highest()).contains(&j)
    }

    /// The unique representative of `j` modulo `n` inside the grid.
    pub fn wrap(&self, j: i64) -> i64 {
        let n = self.n as i64;
        let r = (j - self.lowest()).rem_euclid(n);
        r + self.lowest()
    }

    pub fn omega(&self, j: i64) -> f64 {
        2.0 * PI * j as f64 / self.n as f64
    }

    /// Nearest Fourier index to an angular frequency in radians.
    pub fn snap(&self, omega: f64) -> i64 {
        let j = (omega * self.n as f64 / (2.0 * PI)).round() as i64;
        self.wrap(j)
    }

    pub fn check(&self, j: i64) -> Result<()> {
        if self.contains(j) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "frequency index {j} outside [{}, {}]",
                self.lowest(),
                self.highest()
            )))
        }
    }
}

pub fn fourier_grid(n: usize) -> Result<FourierGrid> {
    FourierGrid::new(n)
}

/// Normalized DFT of the panel at Fourier index `j`.
pub fn dft(panel: &TimeSeriesPanel, j: i64) -> Result<CVector> {
    let grid = FourierGrid::new(panel.n())?;
    grid.check(j)?;
    Ok(dft_unchecked(panel, j))
}

fn dft_unchecked(panel: &TimeSeriesPanel, j: i64) -> CVector {
    let n = panel.n();
    let values = panel.values();
    let jm = j.rem_euclid(n as i64) as usize;
    let mut out = CVector::zeros(panel.p());
    for t in 1..=n {
        // Reduce t·j mod n before forming the angle to keep it exact.
        let angle = -2.0 * PI * ((t * jm) % n) as f64 / n as f64;
        let phase = Complex64::from_polar(1.0, angle);
        for (k, acc) in out.iter_mut().enumerate() {
            *acc += phase * values[(t - 1, k)];
        }
    }
    out.unscale_mut((n as f64).sqrt());
    out
}

/// `d d†`.
pub fn periodogram(d: &CVector) -> CMatrix {
    d * d.adjoint()
}

fn check_span(n: usize, m: usize) -> Result<()> {
    if 2 * m + 1 > n {
        return Err(Error::invalid(format!(
            "smoothing span m = {m} needs 2m+1 <= n = {n}"
        )));
    }
    Ok(())
}

/// Averaged periodogram at one Fourier frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub frequency_index: i64,
    pub m: usize,
    pub fhat: CMatrix,
}

impl SpectralEstimate {
    /// Effective sample size `2m + 1`.
    pub fn n_eff(&self) -> usize {
        2 * self.m + 1
    }
}

/// Rows `d_{j-m}, …, d_{j+m}` with wrapped indices.
pub fn dft_data_matrix(panel: &TimeSeriesPanel, j: i64, m: usize) -> Result<CMatrix> {
    let grid = FourierGrid::new(panel.n())?;
    grid.check(j)?;
    check_span(panel.n(), m)?;
    let offsets: Vec<i64> = (-(m as i64)..=m as i64).collect();
    let rows: Vec<CVector> = offsets
        .par_iter()
        .map(|&k| dft_unchecked(panel, grid.wrap(j + k)))
        .collect();
    let mut z = CMatrix::zeros(rows.len(), panel.p());
    for (r, d) in rows.iter().enumerate() {
        z.row_mut(r).copy_from(&d.transpose());
    }
    Ok(z)
}

/// `Σ_r d_r d_r† / (2π(2m+1))` from the rows `d_rᵀ` of `𝒵`.
///
/// This is `𝒵ᵀ conj(𝒵)`, the transpose of the Gram matrix `𝒵†𝒵`: the
/// periodogram is `d d†`, while `𝒵†𝒵` sums `conj(d) dᵀ`.
pub fn averaged_periodogram_from_dfts(z: &CMatrix) -> CMatrix {
    let scale = 2.0 * PI * z.nrows() as f64;
    let mut f = z.transpose() * z.conjugate();
    f.unscale_mut(scale);
    // Force exact Hermitian symmetry and a real diagonal.
    let p = f.nrows();
    for k in 0..p {
        f[(k, k)] = Complex64::new(f[(k, k)].re, 0.0);
        for l in (k + 1)..p {
            f[(l, k)] = f[(k, l)].conj();
        }
    }
    f
}

pub fn averaged_periodogram(panel: &TimeSeriesPanel, j: i64, m: usize) -> Result<SpectralEstimate> {
    let z = dft_data_matrix(panel, j, m)?;
    Ok(SpectralEstimate {
        frequency_index: j,
        m,
        fhat: averaged_periodogram_from_dfts(&z),
    })
}

/// Smoothing span `⌊√n⌋`.
pub fn span_floor_sqrt(n: usize) -> usize {
    (n as f64).sqrt().floor() as usize
}

/// Smoothing span `⌈4√n⌉`.
pub fn span_ceil_4_sqrt(n: usize) -> usize {
    (4.0 * (n as f64).sqrt()).ceil() as usize
}
