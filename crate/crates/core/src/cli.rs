//! Experiment orchestration, CSV ingestion and the runtime benchmark behind
//! the `specprec` binary.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cglasso::{
    self, cglasso_path, lambda_zero, partial_coherence, GlassoOptions, PathConfig, PrecisionPath, Variant,
    EDGE_TOL,
};
use crate::classo::{self, log_lambda_grid, scale_columns, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::metrics::{rmse, roc_curve, scores_from_supports, support_of, truth_support, Support};
use crate::nodewise::{self, nodewise_path, NodewiseResult, SymmetrizeRule};
use crate::realify::real_group_lasso_oracle;
use crate::simulate::{build_dgp, simulate_path, true_precision, DgpFamily, DgpSpec};
use crate::spectral::{
    averaged_periodogram, dft_data_matrix, span_ceil_4_sqrt, span_floor_sqrt, FourierGrid, TimeSeriesPanel,
};

/// How the smoothing span `m` follows from the series length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MRule {
    FloorSqrtN,
    Ceil4SqrtN,
    Explicit(usize),
}

impl MRule {
    pub fn span(self, n: usize) -> usize {
        match self {
            MRule::FloorSqrtN => span_floor_sqrt(n),
            MRule::Ceil4SqrtN => span_ceil_4_sqrt(n),
            MRule::Explicit(m) => m,
        }
    }
}

impl fmt::Display for MRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MRule::FloorSqrtN => f.write_str("floor_sqrt_n"),
            MRule::Ceil4SqrtN => f.write_str("ceil_4_sqrt_n"),
            MRule::Explicit(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for MRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "floor_sqrt_n" => Ok(MRule::FloorSqrtN),
            "ceil_4_sqrt_n" => Ok(MRule::Ceil4SqrtN),
            other => other.parse().map(MRule::Explicit).map_err(|_| {
                Error::invalid(format!(
                    "m rule '{other}' is not floor_sqrt_n, ceil_4_sqrt_n or a count"
                ))
            }),
        }
    }
}

impl TryFrom<String> for MRule {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MRule> for String {
    fn from(m: MRule) -> String {
        m.to_string()
    }
}

/// A requested frequency: a Fourier index (`j=300`) or radians (`0`,
/// `pi/2`, `1.3`, `2pi/3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FrequencySpec {
    Index(i64),
    Radians(f64),
}

fn parse_radians(s: &str) -> Option<f64> {
    let s = s.replace(' ', "").to_ascii_lowercase();
    if let Some(pos) = s.find("pi") {
        let (coef, rest) = (&s[..pos], &s[pos + 2..]);
        let coef = match coef {
            "" => 1.0,
            "-" => -1.0,
            c => c.trim_end_matches('*').parse().ok()?,
        };
        let div = match rest {
            "" => 1.0,
            r => r.strip_prefix('/')?.parse().ok()?,
        };
        return Some(coef * PI / div);
    }
    s.parse().ok()
}

impl FrequencySpec {
    /// Snaps to the grid of a length-`n` series.
    pub fn resolve(self, n: usize) -> Result<ResolvedFrequency> {
        let grid = FourierGrid::new(n)?;
        match self {
            FrequencySpec::Index(j) => {
                grid.check(j)?;
                let omega = grid.omega(j);
                Ok(ResolvedFrequency {
                    requested: self.to_string(),
                    index: j,
                    omega,
                    delta: 0.0,
                })
            }
            FrequencySpec::Radians(w) => {
                let j = grid.snap(w);
                let omega = grid.omega(j);
                Ok(ResolvedFrequency {
                    requested: self.to_string(),
                    index: j,
                    omega,
                    delta: omega - w,
                })
            }
        }
    }
}

impl fmt::Display for FrequencySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencySpec::Index(j) => write!(f, "j={j}"),
            FrequencySpec::Radians(w) => write!(f, "{w}"),
        }
    }
}

impl FromStr for FrequencySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(j) = t.strip_prefix("j=").or_else(|| t.strip_prefix("j:")) {
            return j
                .parse()
                .map(FrequencySpec::Index)
                .map_err(|_| Error::invalid(format!("bad Fourier index '{j}'")));
        }
        match parse_radians(t) {
            Some(w) if w.is_finite() => Ok(FrequencySpec::Radians(w)),
            _ => Err(Error::invalid(format!(
                "frequency '{t}' is neither radians (e.g. pi/2) nor an index (j=300)"
            ))),
        }
    }
}

impl TryFrom<String> for FrequencySpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FrequencySpec> for String {
    fn from(f: FrequencySpec) -> String {
        f.to_string()
    }
}

/// The Fourier frequency actually used, with the snapping offset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedFrequency {
    pub requested: String,
    pub index: i64,
    pub omega: f64,
    /// `omega - requested` in radians; zero for index requests.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    Cglasso(Variant),
    Nodewise,
    InversePeriodogram,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Cglasso(v) => v.name(),
            Method::Nodewise => "nodewise",
            Method::InversePeriodogram => "inverse_periodogram",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nodewise" | "nwr" => Ok(Method::Nodewise),
            "inverse_periodogram" => Ok(Method::InversePeriodogram),
            other => other.parse().map(Method::Cglasso).map_err(|_| {
                Error::invalid(format!(
                    "unknown method '{other}' (cglasso, cglasso_I, cglasso_II, nodewise, inverse_periodogram)"
                ))
            }),
        }
    }
}

impl TryFrom<String> for Method {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.name().to_string()
    }
}

/// `count` log-spaced penalties spanning `decades` below the method's `λ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LambdaGrid {
    pub count: usize,
    pub decades: f64,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self {
            count: 50,
            decades: 3.0,
        }
    }
}

impl LambdaGrid {
    pub fn values(self, lambda0: f64) -> Vec<f64> {
        log_lambda_grid(lambda0, self.count, 10f64.powf(-self.decades))
    }

    fn validate(self) -> Result<()> {
        if self.count < 2 || !(self.decades > 0.0) || !self.decades.is_finite() {
            return Err(Error::invalid(format!(
                "lambda grid needs count >= 2 and a positive decade span, got {self}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for LambdaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.count, self.decades)
    }
}

impl FromStr for LambdaGrid {
    type Err = Error;

    /// `COUNT:DECADES`, e.g. `50:3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("lambda grid '{s}' is not COUNT:DECADES"));
        let (c, d) = s.split_once([':', 'x', ',']).ok_or_else(bad)?;
        let grid = LambdaGrid {
            count: c.trim().parse().map_err(|_| bad())?,
            decades: d.trim().parse().map_err(|_| bad())?,
        };
        grid.validate()?;
        Ok(grid)
    }
}

impl TryFrom<String> for LambdaGrid {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LambdaGrid> for String {
    fn from(g: LambdaGrid) -> String {
        g.to_string()
    }
}

/// Settings of a simulation study. Loaded from JSON; every field has a
/// default, so a config file only lists what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dgp: DgpFamily,
    pub p: usize,
    pub n: usize,
    pub frequencies: Vec<FrequencySpec>,
    pub m_rule: MRule,
    pub methods: Vec<Method>,
    pub lambda_grid: LambdaGrid,
    pub gamma: f64,
    pub replicates: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dgp: DgpFamily::WhiteNoise,
            p: 10,
            n: 200,
            frequencies: vec![FrequencySpec::Radians(0.0)],
            m_rule: MRule::FloorSqrtN,
            methods: vec![Method::Cglasso(DEFAULT_VARIANT), Method::Nodewise],
            lambda_grid: LambdaGrid::default(),
            gamma: 0.0,
            replicates: 20,
            base_seed: 1,
            output_dir: PathBuf::from("results"),
            threads: None,
        }
    }
}

/// Variant used when none is named.
pub const DEFAULT_VARIANT: Variant = Variant::Plain;

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if self.p == 0 {
            return Err(Error::invalid("p must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods requested"));
        }
        if self.frequencies.is_empty() {
            return Err(Error::invalid("no frequencies requested"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be at least 1"));
        }
        self.lambda_grid.validate()?;
        let m = self.m_rule.span(self.n);
        if 2 * m + 1 > self.n {
            return Err(Error::invalid(format!(
                "smoothing span m = {m} needs 2m+1 <= n = {}",
                self.n
            )));
        }
        for f in &self.frequencies {
            f.resolve(self.n)?;
        }
        Ok(())
    }

    pub fn dgp_spec(&self) -> DgpSpec {
        DgpSpec {
            family: self.dgp,
            p: self.p,
            n: self.n,
            seed: self.base_seed,
        }
    }

    /// Seed of replicate `r`.
    pub fn replicate_seed(&self, r: usize) -> u64 {
        self.base_seed.wrapping_add(r as u64)
    }
}

/// Metrics of one method at one frequency of one replicate. Fractions are
/// in `[0, 1]`; `None` marks a quantity that is unavailable or undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub seed: u64,
    pub frequency_index: i64,
    pub omega: f64,
    pub method: String,
    pub m: usize,
    pub available: bool,
    pub lambda_selected: Option<f64>,
    pub rmse_oracle: Option<f64>,
    pub rmse_bic: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub accuracy: Option<f64>,
    pub auroc: Option<f64>,
    /// Fraction of path points whose solver converged.
    pub converged_fraction: Option<f64>,
}

/// Wall-clock time of one record, kept apart so the other outputs are
/// byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeRecord {
    pub replicate: usize,
    pub frequency_index: i64,
    pub method: String,
    pub seconds: f64,
}

/// Mean and standard deviation (n−1 denominator) of a metric over the
/// replicates where it is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub count: usize,
}

pub fn mean_sd(values: impl IntoIterator<Item = Option<f64>>) -> MeanSd {
    let v: Vec<f64> = values.into_iter().flatten().collect();
    let count = v.len();
    if count == 0 {
        return MeanSd {
            mean: None,
            sd: None,
            count,
        };
    }
    let mean = v.iter().sum::<f64>() / count as f64;
    let sd = (count > 1).then(|| {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    });
    MeanSd {
        mean: Some(mean),
        sd,
        count,
    }
}

/// One summary line per frequency and method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub frequency_index: i64,
    pub omega: f64,
    pub method: String,
    pub replicates: usize,
    pub available: usize,
    pub rmse_oracle: MeanSd,
    pub rmse_bic: MeanSd,
    pub precision: MeanSd,
    pub recall: MeanSd,
    pub accuracy: MeanSd,
    pub auroc: MeanSd,
}

pub fn summarize(records: &[ReplicateRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(i64, String), Vec<&ReplicateRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.frequency_index, r.method.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((frequency_index, method), rs)| {
            let stat = |f: fn(&ReplicateRecord) -> Option<f64>| mean_sd(rs.iter().map(|r| f(r)));
            SummaryRow {
                frequency_index,
                omega: rs[0].omega,
                method,
                replicates: rs.len(),
                available: rs.iter().filter(|r| r.available).count(),
                rmse_oracle: stat(|r| r.rmse_oracle),
                rmse_bic: stat(|r| r.rmse_bic),
                precision: stat(|r| r.precision),
                recall: stat(|r| r.recall),
                accuracy: stat(|r| r.accuracy),
                auroc: stat(|r| r.auroc),
            }
        })
        .collect()
}

/// Ground truth available in simulations.
pub struct Truth {
    pub theta: CMatrix,
    pub support: Support,
}

/// Full output of one method on one spectral estimate.
#[derive(Debug, Clone)]
pub enum MethodFit {
    Glasso(PrecisionPath),
    Nodewise {
        lambdas: Vec<f64>,
        path: Vec<NodewiseResult>,
        criterion: Vec<f64>,
        selected_index: usize,
    },
    Inverse(Option<CMatrix>),
}

/// Settings shared by every method fit.
#[derive(Debug, Clone, Copy)]
pub struct FitSettings {
    pub grid: LambdaGrid,
    pub gamma: f64,
    pub n_raw: usize,
}

/// Per-node regression EBIC summed over nodes:
/// `Σ_k 2N log(RSS_k/N) + |S_k| (log N + 2γ log(p−1))`, with `S_k` the
/// selected predictors of node `k`.
pub fn nodewise_criterion(z: &CMatrix, fit: &NodewiseResult, gamma: f64) -> f64 {
    let (n, p) = z.shape();
    let nf = n as f64;
    let mut total = 0.0;
    for k in 0..p {
        let beta: CVector = fit.coefficients.column(k).into_owned();
        let x = z.clone().remove_column(k);
        let rss = (z.column(k) - x * &beta).norm_squared().max(f64::MIN_POSITIVE);
        let df = beta.iter().filter(|b| b.norm() > 0.0).count() as f64;
        let dim = ((p - 1).max(1)) as f64;
        total += 2.0 * nf * (rss / nf).ln() + df * (nf.ln() + 2.0 * gamma * dim.ln());
    }
    total
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i)
}

/// Fits `method` at Fourier index `j` with span `m`. A known `truth`
/// switches on the error-based early stop of the CGLASSO path, so λ
/// selection only sees the stopped path.
pub fn fit_method(
    panel: &TimeSeriesPanel,
    j: i64,
    m: usize,
    method: Method,
    settings: &FitSettings,
    truth: Option<&CMatrix>,
) -> Result<MethodFit> {
    match method {
        Method::Cglasso(variant) => {
            let est = averaged_periodogram(panel, j, m)?;
            let lambda0 = lambda_zero(&est.fhat, variant).max(f64::MIN_POSITIVE);
            let config = PathConfig {
                variant,
                gamma: settings.gamma,
                n_eff: est.n_eff(),
                n_raw: settings.n_raw,
                warm_start: true,
                options: GlassoOptions::default(),
            };
            Ok(MethodFit::Glasso(cglasso_path(&est.fhat, &settings.grid.values(lambda0), &config, truth)?))
        }
        Method::Nodewise => {
            let z = dft_data_matrix(panel, j, m)?;
            let lambdas = settings.grid.values(nodewise::lambda_max(&z).max(f64::MIN_POSITIVE));
            let path = nodewise_path(&z, &lambdas, SymmetrizeRule::Or, &SolverOptions::default())?;
            let criterion: Vec<f64> = path.iter().map(|r| nodewise_criterion(&z, r, settings.gamma)).collect();
            let selected_index = argmin(&criterion);
            Ok(MethodFit::Nodewise {
                lambdas,
                path,
                criterion,
                selected_index,
            })
        }
        Method::InversePeriodogram => {
            let est = averaged_periodogram(panel, j, m)?;
            match cglasso::inverse_periodogram(&est.fhat) {
                Ok(theta) => Ok(MethodFit::Inverse(Some(theta))),
                Err(Error::Singular(_)) => Ok(MethodFit::Inverse(None)),
                Err(e) => Err(e),
            }
        }
    }
}

struct Scored {
    available: bool,
    lambda_selected: Option<f64>,
    rmse_oracle: Option<f64>,
    rmse_bic: Option<f64>,
    precision: Option<f64>,
    recall: Option<f64>,
    accuracy: Option<f64>,
    auroc: Option<f64>,
    converged_fraction: Option<f64>,
}

fn auroc_of(supports: &[Support], truth: &Support) -> Result<Option<f64>> {
    match roc_curve(supports, truth) {
        Ok(c) => Ok(Some(c.auroc)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn scores(est: &Support, truth: &Support) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
    match scores_from_supports(est, truth) {
        Ok(s) => Ok((s.precision, Some(s.recall), Some(s.accuracy))),
        Err(Error::Undefined(_)) => Ok((None, None, None)),
        Err(e) => Err(e),
    }
}

fn score(fit: &MethodFit, truth: Option<&Truth>) -> Result<Scored> {
    let mut out = Scored {
        available: true,
        lambda_selected: None,
        rmse_oracle: None,
        rmse_bic: None,
        precision: None,
        recall: None,
        accuracy: None,
        auroc: None,
        converged_fraction: None,
    };
    match fit {
        MethodFit::Glasso(path) => {
            out.lambda_selected = Some(path.lambdas[path.selected_index]);
            let conv = path.estimates.iter().filter(|e| e.converged).count();
            out.converged_fraction = Some(conv as f64 / path.estimates.len() as f64);
            if let Some(t) = truth {
                let errors = path
                    .estimates
                    .iter()
                    .map(|e| rmse(&e.theta, &t.theta))
                    .collect::<Result<Vec<_>>>()?;
                out.rmse_oracle = errors.iter().copied().reduce(f64::min);
                out.rmse_bic = Some(errors[path.selected_index]);
                let supports: Vec<Support> = path.estimates.iter().map(|e| support_of(&e.theta, EDGE_TOL)).collect();
                (out.precision, out.recall, out.accuracy) = scores(&supports[path.selected_index], &t.support)?;
                out.auroc = auroc_of(&supports, &t.support)?;
            }
        }
        MethodFit::Nodewise {
            lambdas,
            path,
            selected_index,
            ..
        } => {
            out.lambda_selected = Some(lambdas[*selected_index]);
            let conv = path.iter().filter(|r| r.converged).count();
            out.converged_fraction = Some(conv as f64 / path.len() as f64);
            if let Some(t) = truth {
                let supports: Vec<Support> = path.iter().map(|r| r.support.clone()).collect();
                (out.precision, out.recall, out.accuracy) = scores(&supports[*selected_index], &t.support)?;
                out.auroc = auroc_of(&supports, &t.support)?;
            }
        }
        MethodFit::Inverse(None) => out.available = false,
        MethodFit::Inverse(Some(theta)) => {
            if let Some(t) = truth {
                let e = rmse(theta, &t.theta)?;
                out.rmse_oracle = Some(e);
                out.rmse_bic = Some(e);
                (out.precision, out.recall, out.accuracy) = scores(&support_of(theta, EDGE_TOL), &t.support)?;
            }
        }
    }
    Ok(out)
}

fn matrix_rows(a: &CMatrix, part: fn(&num_complex::Complex64) -> f64) -> Vec<Vec<f64>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| part(&a[(i, j)])).collect()).collect()
}

/// JSON document describing one fit.
pub fn fit_to_json(fit: &MethodFit, freq: &ResolvedFrequency, m: usize, method: Method) -> serde_json::Value {
    use serde_json::json;
    let head = json!({
        "method": method.name(),
        "frequency_index": freq.index,
        "omega": freq.omega,
        "omega_requested": freq.requested,
        "omega_delta": freq.delta,
        "m": m,
    });
    let body = match fit {
        MethodFit::Glasso(path) => {
            let sel = path.selected();
            json!({
                "lambdas": path.lambdas,
                "ebic": path.ebic,
                "converged": path.estimates.iter().map(|e| e.converged).collect::<Vec<_>>(),
                "kkt_residual": path.estimates.iter().map(|e| e.kkt_residual).collect::<Vec<_>>(),
                "selected_index": path.selected_index,
                "lambda_selected": sel.lambda,
                "theta_re": matrix_rows(&sel.theta, |z| z.re),
                "theta_im": matrix_rows(&sel.theta, |z| z.im),
            })
        }
        MethodFit::Nodewise {
            lambdas,
            path,
            criterion,
            selected_index,
        } => {
            let sel = &path[*selected_index];
            json!({
                "lambdas": lambdas,
                "criterion": criterion,
                "selected_index": selected_index,
                "lambda_selected": lambdas[*selected_index],
                "rule": format!("{:?}", sel.rule),
                "support": (0..sel.support.nrows())
                    .map(|i| (0..sel.support.ncols()).map(|j| sel.support[(i, j)]).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "coefficients_re": matrix_rows(&sel.coefficients, |z| z.re),
                "coefficients_im": matrix_rows(&sel.coefficients, |z| z.im),
            })
        }
        MethodFit::Inverse(None) => json!({ "available": false }),
        MethodFit::Inverse(Some(theta)) => json!({
            "available": true,
            "theta_re": matrix_rows(theta, |z| z.re),
            "theta_im": matrix_rows(theta, |z| z.im),
        }),
    };
    let mut doc = head;
    if let (Some(a), serde_json::Value::Object(b)) = (doc.as_object_mut(), body) {
        a.extend(b);
    }
    doc
}

/// Everything one replicate produces.
pub struct ReplicateOutput {
    pub records: Vec<ReplicateRecord>,
    pub runtimes: Vec<RuntimeRecord>,
    pub documents: Vec<(i64, Method, serde_json::Value)>,
}

/// Simulates replicate `r` and evaluates every frequency and method on it.
pub fn run_replicate(config: &ExperimentConfig, r: usize) -> Result<ReplicateOutput> {
    let model = build_dgp(&config.dgp_spec())?;
    let seed = config.replicate_seed(r);
    let panel = simulate_path(&model, config.n, seed)?;
    let m = config.m_rule.span(config.n);
    let settings = FitSettings {
        grid: config.lambda_grid,
        gamma: config.gamma,
        n_raw: config.n,
    };
    let mut out = ReplicateOutput {
        records: Vec::new(),
        runtimes: Vec::new(),
        documents: Vec::new(),
    };
    for spec in &config.frequencies {
        let freq = spec.resolve(config.n)?;
        let theta = true_precision(&model, freq.omega)?;
        let truth = Truth {
            theta: theta.clone(),
            support: truth_support(&theta),
        };
        for &method in &config.methods {
            let start = Instant::now();
            let fit = fit_method(&panel, freq.index, m, method, &settings, Some(&truth.theta))?;
            let seconds = start.elapsed().as_secs_f64();
            let s = score(&fit, Some(&truth))?;
            out.records.push(ReplicateRecord {
                replicate: r,
                seed,
                frequency_index: freq.index,
                omega: freq.omega,
                method: method.name().to_string(),
                m,
                available: s.available,
                lambda_selected: s.lambda_selected,
                rmse_oracle: s.rmse_oracle,
                rmse_bic: s.rmse_bic,
                precision: s.precision,
                recall: s.recall,
                accuracy: s.accuracy,
                auroc: s.auroc,
                converged_fraction: s.converged_fraction,
            });
            out.runtimes.push(RuntimeRecord {
                replicate: r,
                frequency_index: freq.index,
                method: method.name().to_string(),
                seconds,
            });
            out.documents.push((freq.index, method, fit_to_json(&fit, &freq, m, method)));
        }
    }
    Ok(out)
}

/// In-memory result of [`run_experiment`].
pub struct ExperimentReport {
    pub records: Vec<ReplicateRecord>,
    pub runtimes: Vec<RuntimeRecord>,
    pub summary: Vec<SummaryRow>,
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs all replicates without touching the disk.
pub fn evaluate_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (report, _) = evaluate_with_documents(config, false)?;
    Ok(report)
}

type Documents = Vec<(usize, i64, Method, serde_json::Value)>;

fn evaluate_with_documents(config: &ExperimentConfig, keep_documents: bool) -> Result<(ExperimentReport, Documents)> {
    config.validate()?;
    let outputs = with_pool(config.threads, || {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| run_replicate(config, r))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut records = Vec::new();
    let mut runtimes = Vec::new();
    let mut documents = Vec::new();
    for (r, o) in outputs.into_iter().enumerate() {
        records.extend(o.records);
        runtimes.extend(o.runtimes);
        if keep_documents {
            documents.extend(o.documents.into_iter().map(|(j, m, d)| (r, j, m, d)));
        }
    }
    let summary = summarize(&records);
    Ok((
        ExperimentReport {
            records,
            runtimes,
            summary,
        },
        documents,
    ))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.10}")).unwrap_or_default()
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.4}", 100.0 * x)).unwrap_or_default()
}

fn ensure_writable_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot create output directory {}: {e}", dir.display()),
        ))
    })
}

/// Runs the experiment and writes `summary.csv` (percentages, mean and sd
/// over replicates), `per_replicate.csv`, `runtimes.csv`, `config.json` and
/// `estimates/<rep>/<freq>/<method>.json` under `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let dir = &config.output_dir;
    ensure_writable_dir(dir)?;
    let (report, documents) = evaluate_with_documents(config, true)?;

    fs::write(dir.join("config.json"), serde_json::to_string_pretty(config)?)?;

    let mut w = csv::Writer::from_path(dir.join("per_replicate.csv"))?;
    w.write_record([
        "replicate",
        "seed",
        "frequency_index",
        "omega",
        "method",
        "m",
        "available",
        "lambda_selected",
        "rmse_oracle",
        "rmse_bic",
        "precision",
        "recall",
        "accuracy",
        "auroc",
        "converged_fraction",
    ])?;
    for r in &report.records {
        w.write_record([
            r.replicate.to_string(),
            r.seed.to_string(),
            r.frequency_index.to_string(),
            format!("{:.10}", r.omega),
            r.method.clone(),
            r.m.to_string(),
            r.available.to_string(),
            fmt_opt(r.lambda_selected),
            fmt_opt(r.rmse_oracle),
            fmt_opt(r.rmse_bic),
            fmt_opt(r.precision),
            fmt_opt(r.recall),
            fmt_opt(r.accuracy),
            fmt_opt(r.auroc),
            fmt_opt(r.converged_fraction),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    let metrics = ["rmse_oracle", "rmse_bic", "precision", "recall", "accuracy", "auroc"];
    let mut header = vec!["frequency_index".to_string(), "omega".into(), "method".into(), "replicates".into(), "available".into()];
    for m in metrics {
        header.push(format!("{m}_pct_mean"));
        header.push(format!("{m}_pct_sd"));
    }
    w.write_record(&header)?;
    for s in &report.summary {
        let mut row = vec![
            s.frequency_index.to_string(),
            format!("{:.10}", s.omega),
            s.method.clone(),
            s.replicates.to_string(),
            s.available.to_string(),
        ];
        for ms in [&s.rmse_oracle, &s.rmse_bic, &s.precision, &s.recall, &s.accuracy, &s.auroc] {
            row.push(pct(ms.mean));
            row.push(pct(ms.sd));
        }
        w.write_record(&row)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("runtimes.csv"))?;
    for r in &report.runtimes {
        w.serialize(r)?;
    }
    w.flush()?;

    for (r, j, method, doc) in documents {
        let sub = dir.join("estimates").join(r.to_string()).join(j.to_string());
        fs::create_dir_all(&sub)?;
        fs::write(sub.join(format!("{}.json", method.name())), serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(report)
}

/// Reads an `n × p` CSV with a header row of series names.
pub fn read_panel_csv(path: &Path) -> Result<TimeSeriesPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(std::fs::File::open(path).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?);
    let names: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let p = names.len();
    if p == 0 || names.iter().all(|n| n.is_empty()) {
        return Err(Error::invalid(format!("{}: missing header row", path.display())));
    }
    let mut values: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 2, |pos| pos.line() as usize);
        if record.len() != p {
            return Err(Error::invalid(format!(
                "line {line}: expected {p} fields, found {}",
                record.len()
            )));
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                Error::invalid(format!(
                    "line {line}, column {} ('{}'): cannot parse '{cell}' as a number",
                    c + 1,
                    names[c]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "line {line}, column {} ('{}'): value is not finite",
                    c + 1,
                    names[c]
                )));
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::invalid(format!("{}: no data rows after the header", path.display())));
    }
    TimeSeriesPanel::with_names(DMatrix::from_row_slice(rows, p, &values), names)
}

/// Writes a panel as CSV with a header of series names.
pub fn write_panel_csv(panel: &TimeSeriesPanel, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(panel.names())?;
    for t in 0..panel.n() {
        w.write_record(panel.values().row(t).iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// How `estimate_file` picks λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSelection {
    Ebic,
    Fixed(f64),
}

impl FromStr for LambdaSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ebic" | "bic" => Ok(LambdaSelection::Ebic),
            v => match v.parse::<f64>() {
                Ok(x) if x.is_finite() && x >= 0.0 => Ok(LambdaSelection::Fixed(x)),
                _ => Err(Error::invalid(format!("lambda selection '{v}' is not 'ebic' or a value >= 0"))),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct EstimateOptions {
    pub frequency: FrequencySpec,
    pub m_rule: MRule,
    pub variant: Variant,
    pub selection: LambdaSelection,
    pub grid: LambdaGrid,
    pub gamma: f64,
    /// Subtract column means before the DFT.
    pub center: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            frequency: FrequencySpec::Radians(0.0),
            m_rule: MRule::FloorSqrtN,
            variant: DEFAULT_VARIANT,
            selection: LambdaSelection::Ebic,
            grid: LambdaGrid::default(),
            gamma: 0.0,
            center: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub k: usize,
    pub l: usize,
    pub name_k: String,
    pub name_l: String,
    pub abs_partial_coherence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub series: Vec<String>,
    pub frequency: ResolvedFrequency,
    pub m: usize,
    pub variant: Variant,
    pub lambda_selected: f64,
    pub converged: bool,
    pub lambdas: Vec<f64>,
    pub ebic: Vec<f64>,
    #[serde(skip)]
    pub theta: CMatrix,
    #[serde(skip)]
    pub partial_coherence: CMatrix,
    pub edges: Vec<Edge>,
}

/// Spectral precision of an in-memory panel.
pub fn estimate_panel(panel: &TimeSeriesPanel, opts: &EstimateOptions) -> Result<EstimateReport> {
    let panel = if opts.center { panel.centered() } else { panel.clone() };
    let n = panel.n();
    let m = opts.m_rule.span(n);
    if 2 * m + 1 > n {
        return Err(Error::invalid(format!(
            "series has n = {n} rows but the smoothing span m = {m} needs at least {}",
            2 * m + 1
        )));
    }
    let freq = opts.frequency.resolve(n)?;
    let est = averaged_periodogram(&panel, freq.index, m)?;
    let config = PathConfig {
        variant: opts.variant,
        gamma: opts.gamma,
        n_eff: est.n_eff(),
        n_raw: n,
        warm_start: true,
        options: GlassoOptions::default(),
    };
    let lambdas = match opts.selection {
        LambdaSelection::Ebic => opts.grid.values(lambda_zero(&est.fhat, opts.variant).max(f64::MIN_POSITIVE)),
        LambdaSelection::Fixed(l) => vec![l],
    };
    let path = cglasso_path(&est.fhat, &lambdas, &config, None)?;
    let sel = path.selected();
    let pc = partial_coherence(&sel.theta)?;
    let p = panel.p();
    let names = panel.names().to_vec();
    let mut edges = Vec::new();
    for k in 0..p {
        for l in (k + 1)..p {
            if sel.theta[(k, l)].norm() > EDGE_TOL {
                edges.push(Edge {
                    k,
                    l,
                    name_k: names[k].clone(),
                    name_l: names[l].clone(),
                    abs_partial_coherence: pc[(k, l)].norm(),
                });
            }
        }
    }
    Ok(EstimateReport {
        series: names,
        frequency: freq,
        m,
        variant: opts.variant,
        lambda_selected: sel.lambda,
        converged: sel.converged,
        lambdas: path.lambdas.clone(),
        ebic: path.ebic.clone(),
        theta: sel.theta.clone(),
        partial_coherence: pc,
        edges,
    })
}

fn write_matrix_csv(path: &Path, names: &[String], a: &CMatrix, part: fn(&num_complex::Complex64) -> f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(names)?;
    for row in matrix_rows(a, part) {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `input`, estimates, and writes `estimate.json`, `theta_re.csv`,
/// `theta_im.csv`, `partial_coherence_re.csv`, `partial_coherence_im.csv`,
/// `ebic_path.csv` and `edges.csv` into `out_dir`.
pub fn estimate_file(input: &Path, opts: &EstimateOptions, out_dir: &Path) -> Result<EstimateReport> {
    let panel = read_panel_csv(input)?;
    let report = estimate_panel(&panel, opts)?;
    ensure_writable_dir(out_dir)?;
    let mut doc = serde_json::to_value(&report)?;
    if let Some(obj) = doc.as_object_mut() {
        obj.insert("theta_re".into(), serde_json::to_value(matrix_rows(&report.theta, |z| z.re))?);
        obj.insert("theta_im".into(), serde_json::to_value(matrix_rows(&report.theta, |z| z.im))?);
        obj.insert(
            "partial_coherence_re".into(),
            serde_json::to_value(matrix_rows(&report.partial_coherence, |z| z.re))?,
        );
        obj.insert(
            "partial_coherence_im".into(),
            serde_json::to_value(matrix_rows(&report.partial_coherence, |z| z.im))?,
        );
    }
    fs::write(out_dir.join("estimate.json"), serde_json::to_string_pretty(&doc)?)?;
    write_matrix_csv(&out_dir.join("theta_re.csv"), &report.series, &report.theta, |z| z.re)?;
    write_matrix_csv(&out_dir.join("theta_im.csv"), &report.series, &report.theta, |z| z.im)?;
    write_matrix_csv(&out_dir.join("partial_coherence_re.csv"), &report.series, &report.partial_coherence, |z| z.re)?;
    write_matrix_csv(&out_dir.join("partial_coherence_im.csv"), &report.series, &report.partial_coherence, |z| z.im)?;
    let mut w = csv::Writer::from_path(out_dir.join("ebic_path.csv"))?;
    w.write_record(["lambda", "ebic"])?;
    for (l, e) in report.lambdas.iter().zip(&report.ebic) {
        w.write_record([format!("{l:e}"), format!("{e:e}")])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(out_dir.join("edges.csv"))?;
    for e in &report.edges {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(report)
}

/// Simulates one panel of a DGP.
pub fn simulate_panel(spec: &DgpSpec) -> Result<TimeSeriesPanel> {
    simulate_path(&build_dgp(spec)?, spec.n, spec.seed)
}

/// Regression design of the runtime experiment: standard normal real and
/// imaginary parts in `X`, `β_k = 1 − i` for odd `k` (1-based) and 0
/// otherwise, real `N(0, 1)` noise. Columns of `X` are rescaled to norm
/// `√n`; `y` is generated from the unscaled design.
pub fn benchmark_design(p: usize, n: usize, seed: u64) -> (CMatrix, CVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
    let x = CMatrix::from_fn(n, p, |_, _| num_complex::Complex64::new(g(), g()));
    let beta = CVector::from_fn(p, |k, _| {
        if k % 2 == 0 {
            num_complex::Complex64::new(1.0, -1.0)
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    });
    let noise = CVector::from_fn(n, |_, _| num_complex::Complex64::new(g(), 0.0));
    let y = &x * beta + noise;
    (scale_columns(&x).0, y)
}

/// Penalty used by the benchmark, as a fraction of `λ_max`.
pub const BENCHMARK_LAMBDA_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub p: usize,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub seconds: Vec<f64>,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    /// Largest coefficient gap to the realified group-lasso oracle on the
    /// first replicate.
    pub oracle_max_diff: f64,
}

/// Times `classo` on `replicates` independent designs; replicate `r` uses
/// seed `seed + r`.
pub fn benchmark_classo(p: usize, n: usize, replicates: usize, seed: u64) -> Result<BenchmarkReport> {
    if p == 0 || n == 0 || replicates == 0 {
        return Err(Error::invalid("benchmark sizes must be positive"));
    }
    let mut seconds = Vec::with_capacity(replicates);
    let mut oracle_max_diff = 0.0;
    for r in 0..replicates {
        let (x, y) = benchmark_design(p, n, seed.wrapping_add(r as u64));
        let lambda = BENCHMARK_LAMBDA_RATIO * classo::lambda_max(&x, &y);
        let start = Instant::now();
        let fit = classo::classo(&x, &y, lambda, &CVector::zeros(p), &SolverOptions::default())?;
        seconds.push(start.elapsed().as_secs_f64());
        if r == 0 {
            let tight = SolverOptions {
                tol: 1e-12,
                max_sweeps: 100_000,
                ..Default::default()
            };
            let exact = classo::classo(&x, &y, lambda, &fit.beta, &tight)?;
            let oracle = real_group_lasso_oracle(&x, &y, lambda)?;
            oracle_max_diff = exact
                .beta
                .iter()
                .zip(oracle.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
        }
    }
    let stats = mean_sd(seconds.iter().map(|s| Some(*s)));
    let mut sorted = seconds.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    Ok(BenchmarkReport {
        p,
        n,
        replicates,
        seed,
        mean: stats.mean.unwrap_or(0.0),
        median,
        sd: stats.sd.unwrap_or(0.0),
        seconds,
        oracle_max_diff,
    })
}
