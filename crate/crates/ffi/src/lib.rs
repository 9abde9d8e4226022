//! C interface to the spectral precision estimators.
//!
//! Objects cross the boundary as opaque handles created by `sp_*_new` or by
//! an estimator and released with the matching `sp_*_free`. Every fallible
//! function returns an [`SpStatus`]; on failure the message is kept per thread
//! and can be read with [`sp_last_error_message`]. Matrices are exchanged as
//! row-major arrays, complex ones as separate real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use spectral_precision::cglasso::{self, GlassoOptions, PathConfig, PrecisionPath, Variant};
use spectral_precision::classo::{self, log_lambda_grid, SolverOptions};
use spectral_precision::simulate::{build_dgp, simulate_path, DgpFamily, DgpSpec};
use spectral_precision::spectral::{averaged_periodogram, SpectralEstimate, TimeSeriesPanel};
use spectral_precision::{CMatrix, CVector, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Singular = 3,
    NotConverged = 4,
    Undefined = 5,
    Io = 6,
    Panic = 7,
}

/// Data-generating processes available to [`sp_panel_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpDgp {
    WhiteNoise = 0,
    WhiteNoiseCov = 1,
    Var1 = 2,
    Varma22 = 3,
    Var1Block = 4,
}

/// Estimator variant for [`sp_cglasso_path`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpVariant {
    Plain = 0,
    Coherence = 1,
    ScaledInner = 2,
}

/// An `n × p` real panel of time series.
pub struct SpPanel(TimeSeriesPanel);

/// Averaged periodogram at one Fourier frequency.
pub struct SpSpectralEstimate(SpectralEstimate);

/// Precision estimates along a penalty path with their EBIC values.
pub struct SpPrecisionPath(PrecisionPath);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SpStatus {
    match err {
        Error::InvalidInput(_) => SpStatus::InvalidInput,
        Error::Singular(_) => SpStatus::Singular,
        Error::NotConverged { .. } => SpStatus::NotConverged,
        Error::Undefined(_) => SpStatus::Undefined,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => SpStatus::Io,
    }
}

/// Internal failure carrying the code to return.
struct Fail(SpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SpStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(SpStatus::InvalidInput, msg.into())
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SpStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            SpStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn checked_len(rows: usize, cols: usize) -> Result<usize, Fail> {
    rows.checked_mul(cols).ok_or_else(|| invalid("matrix size overflows"))
}

/// Writes a complex matrix row-major into two caller arrays of `len` entries.
unsafe fn export(m: &CMatrix, re: *mut f64, im: *mut f64, len: usize) -> Result<(), Fail> {
    let need = checked_len(m.nrows(), m.ncols())?;
    if len < need {
        return Err(invalid(format!("output arrays hold {len} entries, need {need}")));
    }
    let re = slice_mut(re, need, "real output")?;
    let im = slice_mut(im, need, "imaginary output")?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            re[i * m.ncols() + j] = z.re;
            im[i * m.ncols() + j] = z.im;
        }
    }
    Ok(())
}

unsafe fn import(re: *const f64, im: *const f64, rows: usize, cols: usize) -> Result<CMatrix, Fail> {
    let len = checked_len(rows, cols)?;
    let re = slice(re, len, "real input")?;
    let im = slice(im, len, "imaginary input")?;
    Ok(CMatrix::from_fn(rows, cols, |i, j| Complex64::new(re[i * cols + j], im[i * cols + j])))
}

/// Message of the last failed call on this thread, or null if it succeeded.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn sp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a panel from `n * p` row-major values (row `t` is time `t`).
///
/// # Safety
/// `values` must point to `n * p` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_panel_new(values: *const f64, n: usize, p: usize, out: *mut *mut SpPanel) -> SpStatus {
    guard(|| {
        let len = checked_len(n, p)?;
        let v = slice(values, len, "values")?;
        let panel = TimeSeriesPanel::new(nalgebra::DMatrix::from_row_slice(n, p, v))?;
        put(out, SpPanel(panel))
    })
}

/// Simulates `n` observations of a `p`-dimensional built-in process.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_panel_simulate(
    dgp: SpDgp,
    p: usize,
    n: usize,
    seed: u64,
    out: *mut *mut SpPanel,
) -> SpStatus {
    guard(|| {
        let family = match dgp {
            SpDgp::WhiteNoise => DgpFamily::WhiteNoise,
            SpDgp::WhiteNoiseCov => DgpFamily::WhiteNoiseCov,
            SpDgp::Var1 => DgpFamily::Var1,
            SpDgp::Varma22 => DgpFamily::Varma22,
            SpDgp::Var1Block => DgpFamily::Var1Block,
        };
        let model = build_dgp(&DgpSpec { family, p, n, seed })?;
        put(out, SpPanel(simulate_path(&model, n, seed)?))
    })
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `panel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_panel_n(panel: *const SpPanel) -> usize {
    panel.as_ref().map_or(0, |p| p.0.n())
}

/// Number of series, or 0 for a null handle.
///
/// # Safety
/// `panel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_panel_p(panel: *const SpPanel) -> usize {
    panel.as_ref().map_or(0, |p| p.0.p())
}

/// Copies the panel row-major into `values`, which holds `len` doubles.
///
/// # Safety
/// `panel` must be a live handle and `values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sp_panel_values(panel: *const SpPanel, values: *mut f64, len: usize) -> SpStatus {
    guard(|| {
        let panel = &handle(panel, "panel")?.0;
        let need = checked_len(panel.n(), panel.p())?;
        if len < need {
            return Err(invalid(format!("output array holds {len} entries, need {need}")));
        }
        let dst = slice_mut(values, need, "values")?;
        for t in 0..panel.n() {
            for k in 0..panel.p() {
                dst[t * panel.p() + k] = panel.values()[(t, k)];
            }
        }
        Ok(())
    })
}

/// Releases a panel. Null is ignored.
///
/// # Safety
/// `panel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_panel_free(panel: *mut SpPanel) {
    if !panel.is_null() {
        drop(Box::from_raw(panel));
    }
}

/// Averaged periodogram at Fourier index `j` (wrapped into the grid of the
/// panel length) with smoothing half-width `m`.
///
/// # Safety
/// `panel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_averaged_periodogram(
    panel: *const SpPanel,
    j: i64,
    m: usize,
    out: *mut *mut SpSpectralEstimate,
) -> SpStatus {
    guard(|| {
        let panel = &handle(panel, "panel")?.0;
        put(out, SpSpectralEstimate(averaged_periodogram(panel, j, m)?))
    })
}

/// Dimension `p` of the estimate, or 0 for a null handle.
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_spectral_estimate_dim(est: *const SpSpectralEstimate) -> usize {
    est.as_ref().map_or(0, |e| e.0.fhat.nrows())
}

/// Copies `f̂` row-major into `re` and `im`, each holding `len` doubles.
///
/// # Safety
/// `est` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sp_spectral_estimate_matrix(
    est: *const SpSpectralEstimate,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SpStatus {
    guard(|| export(&handle(est, "spectral estimate")?.0.fhat, re, im, len))
}

/// Releases a spectral estimate. Null is ignored.
///
/// # Safety
/// `est` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_spectral_estimate_free(est: *mut SpSpectralEstimate) {
    if !est.is_null() {
        drop(Box::from_raw(est));
    }
}

/// Fits the graphical lasso path on `count` penalties spaced log-evenly over
/// `decades` decades below the variant's smallest all-zero penalty, and
/// marks the EBIC minimizer (`gamma` in `[0, 1]`, `n_raw` the series length).
///
/// # Safety
/// `est` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_cglasso_path(
    est: *const SpSpectralEstimate,
    variant: SpVariant,
    count: usize,
    decades: f64,
    gamma: f64,
    n_raw: usize,
    out: *mut *mut SpPrecisionPath,
) -> SpStatus {
    guard(|| {
        let est = &handle(est, "spectral estimate")?.0;
        if count == 0 || !(decades > 0.0) {
            return Err(invalid("path needs count >= 1 and decades > 0"));
        }
        let variant = match variant {
            SpVariant::Plain => Variant::Plain,
            SpVariant::Coherence => Variant::Coherence,
            SpVariant::ScaledInner => Variant::ScaledInner,
        };
        let lambda0 = cglasso::lambda_zero(&est.fhat, variant);
        let lambdas = log_lambda_grid(lambda0, count, 10f64.powf(-decades));
        let config = PathConfig {
            variant,
            gamma,
            n_eff: est.n_eff(),
            n_raw,
            warm_start: true,
            options: GlassoOptions::default(),
        };
        put(out, SpPrecisionPath(cglasso::cglasso_path(&est.fhat, &lambdas, &config, None)?))
    })
}

/// Number of fitted penalties, or 0 for a null handle.
///
/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_precision_path_len(path: *const SpPrecisionPath) -> usize {
    path.as_ref().map_or(0, |p| p.0.estimates.len())
}

/// Dimension `p` of the estimates, or 0 for a null handle.
///
/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_precision_path_dim(path: *const SpPrecisionPath) -> usize {
    path.as_ref()
        .and_then(|p| p.0.estimates.first())
        .map_or(0, |e| e.theta.nrows())
}

/// Index of the EBIC-selected estimate.
///
/// # Safety
/// `path` must be a live handle; `index` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_precision_path_selected(path: *const SpPrecisionPath, index: *mut usize) -> SpStatus {
    guard(|| {
        let path = &handle(path, "precision path")?.0;
        let out = index.as_mut().ok_or_else(|| null("index"))?;
        *out = path.selected_index;
        Ok(())
    })
}

/// Penalty, EBIC, optimality residual and convergence flag of estimate `i`.
/// Any output pointer may be null to skip it.
///
/// # Safety
/// `path` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_precision_path_info(
    path: *const SpPrecisionPath,
    i: usize,
    lambda: *mut f64,
    ebic: *mut f64,
    kkt_residual: *mut f64,
    converged: *mut bool,
) -> SpStatus {
    guard(|| {
        let path = &handle(path, "precision path")?.0;
        let est = path
            .estimates
            .get(i)
            .ok_or_else(|| invalid(format!("index {i} out of range for a path of {}", path.estimates.len())))?;
        if let Some(v) = lambda.as_mut() {
            *v = est.lambda;
        }
        if let Some(v) = ebic.as_mut() {
            *v = path.ebic[i];
        }
        if let Some(v) = kkt_residual.as_mut() {
            *v = est.kkt_residual;
        }
        if let Some(v) = converged.as_mut() {
            *v = est.converged;
        }
        Ok(())
    })
}

/// Copies `Θ̂` of estimate `i` row-major into `re` and `im` (`len` doubles
/// each).
///
/// # Safety
/// `path` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sp_precision_path_theta(
    path: *const SpPrecisionPath,
    i: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SpStatus {
    guard(|| {
        let path = &handle(path, "precision path")?.0;
        let est = path
            .estimates
            .get(i)
            .ok_or_else(|| invalid(format!("index {i} out of range for a path of {}", path.estimates.len())))?;
        export(&est.theta, re, im, len)
    })
}

/// Releases a precision path. Null is ignored.
///
/// # Safety
/// `path` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_precision_path_free(path: *mut SpPrecisionPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Complex lasso `(1/2n)‖y − Xβ‖² + λ‖β‖₁` for an `n × p` design given
/// row-major as real and imaginary parts. Columns are rescaled to norm `√n`
/// internally and the coefficients returned on the original scale. Writes
/// `p` entries to `beta_re` and `beta_im`; `converged` may be null.
///
/// # Safety
/// Inputs must hold `n * p` (design) and `n` (response) doubles; outputs `p`.
#[no_mangle]
pub unsafe extern "C" fn sp_classo(
    x_re: *const f64,
    x_im: *const f64,
    y_re: *const f64,
    y_im: *const f64,
    n: usize,
    p: usize,
    lambda: f64,
    beta_re: *mut f64,
    beta_im: *mut f64,
    converged: *mut bool,
) -> SpStatus {
    guard(|| {
        let x = import(x_re, x_im, n, p)?;
        let y_mat = import(y_re, y_im, n, 1)?;
        let y = CVector::from_column_slice(y_mat.as_slice());
        let (scaled, factors) = classo::scale_columns(&x);
        if let Some(j) = factors.iter().position(|f| *f == 0.0) {
            return Err(invalid(format!("design column {j} is zero")));
        }
        let fit = classo::classo(&scaled, &y, lambda, &CVector::zeros(p), &SolverOptions::default())?;
        let beta = CMatrix::from_fn(1, p, |_, j| fit.beta[j] * factors[j]);
        export(&beta, beta_re, beta_im, p)?;
        if let Some(c) = converged.as_mut() {
            *c = fit.converged;
        }
        Ok(())
    })
}
