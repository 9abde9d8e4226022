//! Sparse spectral precision matrices of multivariate stationary time series.
//!
//! The estimators minimize an ℓ1-penalized local Whittle likelihood at a
//! single Fourier frequency. Complex coordinate descent solvers do the work:
//! [`classo`] for complex lasso regression and [`cglasso`] for the complex
//! graphical lasso. [`realify`] maps complex problems onto structured real ones
//! and provides the reference solver used to check them.

pub mod cglasso;
pub mod classo;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod nodewise;
pub mod realify;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
