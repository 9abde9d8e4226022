//! Estimation and support-recovery metrics.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, CMatrix};

/// Boolean `p×p` sparsity pattern.
pub type Support = DMatrix<bool>;

/// `‖Θ̂ - Θ‖²_F / ‖Θ‖²_F`.
pub fn rmse(theta_hat: &CMatrix, theta_true: &CMatrix) -> Result<f64> {
    if theta_hat.shape() != theta_true.shape() {
        return Err(Error::invalid("estimate and truth differ in shape"));
    }
    let denom = frobenius_sq(theta_true);
    if denom == 0.0 {
        return Err(Error::invalid("true matrix is zero"));
    }
    Ok(frobenius_sq(&(theta_hat - theta_true)) / denom)
}

/// Entries with modulus strictly above `tol`.
pub fn support_of(theta: &CMatrix, tol: f64) -> Support {
    theta.map(|z| z.norm() > tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportScores {
    /// `None` when nothing is predicted nonzero.
    pub precision: Option<f64>,
    pub recall: f64,
    pub accuracy: f64,
}

/// Relative cutoff below which entries of an analytic truth count as zero.
pub const TRUTH_REL_TOL: f64 = 1e-8;

/// Support of a computed truth: entries above `TRUTH_REL_TOL` times the
/// largest modulus, so round-off in exact zeros is ignored.
pub fn truth_support(theta_true: &CMatrix) -> Support {
    let scale = crate::linalg::max_modulus(theta_true);
    support_of(theta_true, TRUTH_REL_TOL * scale)
}

/// Precision, recall and accuracy over all `p²` entries, diagonal included.
/// `tol` thresholds the estimate; the truth uses [`truth_support`].
pub fn support_scores(theta_hat: &CMatrix, theta_true: &CMatrix, tol: f64) -> Result<SupportScores> {
    if theta_hat.shape() != theta_true.shape() {
        return Err(Error::invalid("estimate and truth differ in shape"));
    }
    scores_from_supports(&support_of(theta_hat, tol), &truth_support(theta_true))
}

pub fn scores_from_supports(est: &Support, truth: &Support) -> Result<SupportScores> {
    if est.shape() != truth.shape() {
        return Err(Error::invalid("supports differ in shape"));
    }
    let (mut tp, mut tn, mut predicted, mut actual) = (0usize, 0usize, 0usize, 0usize);
    for (&e, &t) in est.iter().zip(truth.iter()) {
        predicted += e as usize;
        actual += t as usize;
        tp += (e && t) as usize;
        tn += (!e && !t) as usize;
    }
    if actual == 0 {
        return Err(Error::Undefined("true support is empty, recall undefined".into()));
    }
    let total = est.len() as f64;
    Ok(SupportScores {
        precision: (predicted > 0).then(|| tp as f64 / predicted as f64),
        recall: tp as f64 / actual as f64,
        accuracy: (tp + tn) as f64 / total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` per path point, in path order.
    pub points: Vec<(f64, f64)>,
    pub auroc: f64,
}

/// True/false positive rates on unordered off-diagonal pairs. A pair counts
/// as selected when either of its two entries is.
fn rates(est: &Support, truth: &Support) -> (usize, usize, usize, usize) {
    let p = truth.nrows();
    let (mut tp, mut fp, mut pos, mut neg) = (0, 0, 0, 0);
    for k in 0..p {
        for l in (k + 1)..p {
            let t = truth[(k, l)] || truth[(l, k)];
            let e = est[(k, l)] || est[(l, k)];
            if t {
                pos += 1;
                tp += e as usize;
            } else {
                neg += 1;
                fp += e as usize;
            }
        }
    }
    (tp, fp, pos, neg)
}

/// ROC curve of a sequence of supports (typically one per λ, largest λ
/// first). The curve is anchored at (0,0) and (1,1), sorted by false
/// positive rate, and integrated by the trapezoid rule.
pub fn roc_curve(supports: &[Support], truth: &Support) -> Result<RocCurve> {
    if supports.is_empty() {
        return Err(Error::invalid("ROC needs at least one path point"));
    }
    if supports.iter().any(|s| s.shape() != truth.shape()) {
        return Err(Error::invalid("supports differ in shape"));
    }
    let (_, _, pos, neg) = rates(truth, truth);
    if pos == 0 || neg == 0 {
        return Err(Error::Undefined(
            "true graph has no edges or is complete; ROC undefined".into(),
        ));
    }
    let points: Vec<(f64, f64)> = supports
        .iter()
        .map(|s| {
            let (tp, fp, _, _) = rates(s, truth);
            (fp as f64 / neg as f64, tp as f64 / pos as f64)
        })
        .collect();
    let mut curve = Vec::with_capacity(points.len() + 2);
    curve.push((0.0, 0.0));
    curve.extend(points.iter().copied());
    curve.push((1.0, 1.0));
    curve.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let auroc = curve
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * 0.5 * (w[0].1 + w[1].1))
        .sum();
    Ok(RocCurve { points, auroc })
}

/// AUROC of a path of estimates against the true precision matrix.
pub fn auroc(estimates: &[CMatrix], theta_true: &CMatrix, tol: f64) -> Result<f64> {
    if estimates.len() < 2 {
        return Err(Error::invalid("AUROC needs at least two path points"));
    }
    let supports: Vec<Support> = estimates.iter().map(|e| support_of(e, tol)).collect();
    Ok(roc_curve(&supports, &truth_support(theta_true))?.auroc)
}
