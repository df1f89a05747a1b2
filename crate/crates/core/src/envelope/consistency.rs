use rayon::prelude::*;

use super::linalg::lambda_min;
use super::test_fn::SmoothTestFunction;
use crate::error::{Error, Result};
use crate::rgg::Board;

/// `min_y (phi(y) + phi(y_x)) / 2 - phi(x)` over the move pairs of interior `x`.
pub fn discrete_operator(board: &Board, phi: &dyn SmoothTestFunction, x: usize) -> Result<f64> {
    let pairs = board
        .stencil()
        .pairs(x)
        .filter(|p| !p.is_empty())
        .ok_or(Error::MissingAnnulus { vertex: x })?;
    let px = phi.value(board.point(x));
    Ok(pairs
        .iter()
        .map(|&(y, yx)| 0.5 * (phi.value(board.point(y)) + phi.value(board.point(yx))) - px)
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexResidual {
    pub vertex: usize,
    /// `|discrete op - (r^2/2) lambda_1| / r^2`.
    pub residual: f64,
    /// `4 C delta + C' e_x / r^2` with `e_x` the worst reflection error at the vertex.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub max_normalized_residual: f64,
    pub median_normalized_residual: f64,
    /// Largest `residual - bound` (positive means the bound failed somewhere).
    pub max_excess: f64,
    pub violations: usize,
    pub residuals: Vec<VertexResidual>,
}

impl ConsistencyReport {
    pub fn bound_holds(&self) -> bool {
        self.violations == 0
    }
}

/// Normalized consistency residual at every interior vertex.
pub fn consistency_report(board: &Board, phi: &dyn SmoothTestFunction) -> Result<ConsistencyReport> {
    let r = board.graph().radius();
    let d = phi.dim();
    let delta = board.delta();
    let (c2, c1) = (phi.hessian_bound(), phi.lipschitz_bound());
    let stencil = board.stencil();
    let residuals: Vec<VertexResidual> = stencil
        .vertices()
        .par_iter()
        .enumerate()
        .map(|(k, &x)| {
            let op = discrete_operator(board, phi, x)?;
            let lam = lambda_min(&phi.hessian(board.point(x)), d)?;
            let residual = (op - 0.5 * r * r * lam).abs() / (r * r);
            let bound = 4.0 * c2 * delta + c1 * stencil.max_error_at(k) / (r * r);
            Ok(VertexResidual {
                vertex: x,
                residual,
                bound,
            })
        })
        .collect::<Result<_>>()?;
    if residuals.is_empty() {
        return Err(Error::DegenerateExperiment("no interior vertices".into()));
    }
    let mut sorted: Vec<f64> = residuals.iter().map(|v| v.residual).collect();
    sorted.sort_by(f64::total_cmp);
    Ok(ConsistencyReport {
        max_normalized_residual: *sorted.last().unwrap_or(&0.0),
        median_normalized_residual: median_sorted(&sorted),
        max_excess: residuals
            .iter()
            .map(|v| v.residual - v.bound)
            .fold(f64::NEG_INFINITY, f64::max),
        violations: residuals.iter().filter(|v| v.residual > v.bound).count(),
        residuals,
    })
}

/// Median of an ascending slice (mean of the middle two for even length).
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

/// Median of arbitrary values.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    median_sorted(&v)
}
