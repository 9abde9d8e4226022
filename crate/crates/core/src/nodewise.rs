//! Node-wise complex lasso regression of DFT columns.
//!
//! Each series is regressed on all others across the `2m+1` DFT rows; the
//! nonzero pattern of the coefficients, symmetrized, estimates the off-diagonal
//! support of the spectral precision matrix.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classo::{self, check_decreasing, classo_path, scale_columns, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, CMatrix, CVector, ZERO};
use crate::metrics::Support;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SymmetrizeRule {
    /// Edge when both regressions select it.
    And,
    /// Edge when either regression selects it.
    #[default]
    Or,
}

impl FromStr for SymmetrizeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Self::And),
            "or" => Ok(Self::Or),
            other => Err(Error::invalid(format!("unknown symmetrization rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodewiseResult {
    /// Column `k` holds the coefficients of node `k` on the other nodes, in
    /// their original order.
    pub coefficients: CMatrix,
    pub support: Support,
    pub rule: SymmetrizeRule,
    /// False if any node's solver hit its iteration cap.
    pub converged: bool,
}

/// Penalty per node.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeLambda {
    Shared(f64),
    PerNode(Vec<f64>),
}

impl NodeLambda {
    fn for_node(&self, k: usize) -> f64 {
        match self {
            NodeLambda::Shared(l) => *l,
            NodeLambda::PerNode(v) => v[k],
        }
    }
}

fn split(z: &CMatrix, k: usize) -> (CMatrix, CVector) {
    (z.clone().remove_column(k), z.column(k).into_owned())
}

/// Symmetrizes the raw selection pattern (`raw[(l, k)]`: node `k`'s fit
/// selected `l`). The diagonal is always set.
pub fn symmetrize(raw: &Support, rule: SymmetrizeRule) -> Support {
    let p = raw.nrows();
    Support::from_fn(p, p, |k, l| {
        k == l
            || match rule {
                SymmetrizeRule::And => raw[(k, l)] && raw[(l, k)],
                SymmetrizeRule::Or => raw[(k, l)] || raw[(l, k)],
            }
    })
}

fn raw_support(coefficients: &CMatrix) -> Support {
    let p = coefficients.ncols();
    let mut raw = Support::from_element(p, p, false);
    for k in 0..p {
        for (i, l) in (0..p).filter(|&l| l != k).enumerate() {
            raw[(l, k)] = coefficients[(i, k)] != ZERO;
        }
    }
    raw
}

fn assemble(columns: Vec<(CVector, bool)>, rule: SymmetrizeRule) -> NodewiseResult {
    let p = columns.len();
    let mut coefficients = CMatrix::zeros(p.saturating_sub(1), p);
    let mut converged = true;
    for (k, (beta, ok)) in columns.into_iter().enumerate() {
        coefficients.set_column(k, &beta);
        converged &= ok;
    }
    let support = symmetrize(&raw_support(&coefficients), rule);
    NodewiseResult {
        coefficients,
        support,
        rule,
        converged,
    }
}

/// One complex lasso per node: `Z_k` on `Z_{-k}` with columns scaled to
/// `‖·‖ = √N`. Coefficients are returned on the original column scale.
pub fn nodewise_regression(
    z: &CMatrix,
    lambda: &NodeLambda,
    rule: SymmetrizeRule,
    opts: &SolverOptions,
) -> Result<NodewiseResult> {
    let p = z.ncols();
    if p < 2 {
        return Err(Error::invalid("node-wise regression needs at least two series"));
    }
    if let NodeLambda::PerNode(v) = lambda {
        if v.len() != p {
            return Err(Error::invalid(format!("expected {p} per-node penalties, got {}", v.len())));
        }
    }
    let columns = (0..p)
        .into_par_iter()
        .map(|k| {
            let (x, y) = split(z, k);
            let (xs, factors) = scale_columns(&x);
            let fit = classo::classo(&xs, &y, lambda.for_node(k), &CVector::zeros(p - 1), opts)?;
            let beta = CVector::from_fn(p - 1, |i, _| fit.beta[i] * factors[i]);
            Ok((beta, fit.converged))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(columns, rule))
}

/// Largest per-node `λ_max` after column scaling; every node fit is empty at
/// or above it.
pub fn lambda_max(z: &CMatrix) -> f64 {
    (0..z.ncols())
        .map(|k| {
            let (x, y) = split(z, k);
            classo::lambda_max(&scale_columns(&x).0, &y)
        })
        .fold(0.0, f64::max)
}

/// Node-wise fits along a shared decreasing λ grid, warm-started per node.
pub fn nodewise_path(
    z: &CMatrix,
    lambdas: &[f64],
    rule: SymmetrizeRule,
    opts: &SolverOptions,
) -> Result<Vec<NodewiseResult>> {
    check_decreasing(lambdas)?;
    let p = z.ncols();
    if p < 2 {
        return Err(Error::invalid("node-wise regression needs at least two series"));
    }
    let per_node = (0..p)
        .into_par_iter()
        .map(|k| {
            let (x, y) = split(z, k);
            let (xs, factors) = scale_columns(&x);
            let path = classo_path(&xs, &y, lambdas, opts, true)?;
            Ok(path
                .solutions
                .into_iter()
                .map(|s| {
                    let beta = CVector::from_fn(p - 1, |i, _| s.beta[i] * factors[i]);
                    (beta, s.converged)
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..lambdas.len())
        .map(|i| assemble(per_node.iter().map(|node| node[i].clone()).collect(), rule))
        .collect())
}

/// Per-node complex least squares from the normal equations.
pub fn nodewise_ols(z: &CMatrix) -> Result<CMatrix> {
    let (n, p) = z.shape();
    if p < 2 {
        return Err(Error::invalid("node-wise regression needs at least two series"));
    }
    if n <= p - 1 {
        return Err(Error::invalid(format!(
            "OLS needs more rows ({n}) than predictors ({})",
            p - 1
        )));
    }
    let mut out = CMatrix::zeros(p - 1, p);
    for k in 0..p {
        let (x, y) = split(z, k);
        let gram = x.adjoint() * &x;
        let chol = cholesky(&gram).map_err(|_| {
            Error::invalid(format!("predictors for node {k} are rank deficient"))
        })?;
        let diag_ratio = {
            let l = chol.l_dirty();
            let d: Vec<f64> = (0..p - 1).map(|i| l[(i, i)].re).collect();
            d.iter().cloned().fold(f64::INFINITY, f64::min) / d.iter().cloned().fold(0.0, f64::max)
        };
        if !(diag_ratio > 1e-7) {
            return Err(Error::invalid(format!("predictors for node {k} are rank deficient")));
        }
        out.set_column(k, &chol.solve(&(x.adjoint() * y)));
    }
    Ok(out)
}
