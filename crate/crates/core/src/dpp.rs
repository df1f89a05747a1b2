//! The min-average dynamic programming principle
//!
//! ```text
//! u(x) = min_{y in N_x} ( u(y) + u(y_x) ) / 2    for interior x
//! u(x) = f(x)                                    for boundary x
//! ```
//!
//! solved by Jacobi value iteration from the constant subsolution `-|f|_inf`.
//! Every sweep reads only the previous field, so iterates increase pointwise
//! and sweeps are order-independent.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rgg::{AnnulusStencil, Board};

/// A payoff function on the complement of the domain.
pub trait BoundaryDatum: Sync {
    fn eval(&self, x: &[f64]) -> f64;

    /// Identifier recorded on solved fields.
    fn id(&self) -> String {
        "custom".to_string()
    }
}

/// Wraps a closure as a [`BoundaryDatum`].
pub struct FnDatum<F> {
    id: String,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnDatum<F> {
    pub fn new(id: impl Into<String>, f: F) -> Self {
        Self { id: id.into(), f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> BoundaryDatum for FnDatum<F> {
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn id(&self) -> String {
        self.id.clone()
    }
}

/// `max |f|` over the boundary vertices.
pub fn datum_sup_norm(board: &Board, f: &dyn BoundaryDatum) -> f64 {
    board
        .classes()
        .boundary()
        .iter()
        .map(|&v| f.eval(board.point(v)).abs())
        .fold(0.0, f64::max)
}

/// `min f` over the boundary vertices: the largest constant subsolution.
pub fn datum_floor(board: &Board, f: &dyn BoundaryDatum) -> f64 {
    board
        .classes()
        .boundary()
        .iter()
        .map(|&v| f.eval(board.point(v)))
        .fold(f64::INFINITY, f64::min)
}

/// Per-vertex values on the largest component; `NaN` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueField {
    values: Vec<f64>,
    pub sweeps: usize,
    /// Sup-norm change of the last sweep.
    pub residual: f64,
    pub datum_id: String,
    /// Residual after each sweep.
    pub residual_history: Vec<f64>,
    /// Whether every sweep was pointwise nondecreasing.
    pub monotone: bool,
}

impl ValueField {
    /// Wraps raw values (indexed by vertex, `NaN` off the component).
    pub fn from_values(values: Vec<f64>, datum_id: impl Into<String>) -> Self {
        Self {
            values,
            sweeps: 0,
            residual: 0.0,
            datum_id: datum_id.into(),
            residual_history: Vec::new(),
            monotone: true,
        }
    }

    /// `f` on boundary vertices and `interior` on interior vertices.
    pub fn seeded(board: &Board, f: &dyn BoundaryDatum, interior: f64) -> Self {
        let classes = board.classes();
        let mut values = vec![f64::NAN; board.len()];
        for &v in classes.boundary() {
            values[v] = f.eval(board.point(v));
        }
        for &v in classes.interior() {
            values[v] = interior;
        }
        Self::from_values(values, f.id())
    }

    pub fn get(&self, v: usize) -> Option<f64> {
        self.values.get(v).copied().filter(|x| !x.is_nan())
    }

    /// Raw slice; off-component entries are `NaN`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl SolverOptions {
    pub const DEFAULT_MAX_SWEEPS: usize = 1_000_000;

    /// `tol = 1e-9 max(1, |f|_inf)`.
    pub fn for_sup_norm(sup_norm: f64) -> Self {
        Self {
            tol: 1e-9 * sup_norm.max(1.0),
            max_sweeps: Self::DEFAULT_MAX_SWEEPS,
        }
    }
}

/// `min_y (u(y) + u(y_x)) / 2` over the move pairs of one vertex.
#[inline]
fn min_average(values: &[f64], pairs: &[(usize, usize)]) -> f64 {
    pairs
        .iter()
        .map(|&(y, z)| 0.5 * (values[y] + values[z]))
        .fold(f64::INFINITY, f64::min)
}

/// One Jacobi sweep: returns the updated field and `max |new - old|` over the interior.
///
/// Boundary and off-component entries are copied unchanged.
pub fn dpp_sweep(values: &[f64], stencil: &AnnulusStencil) -> (Vec<f64>, f64) {
    let mut next = values.to_vec();
    let residual = sweep_into(values, stencil, &mut next);
    (next, residual)
}

fn sweep_into(values: &[f64], stencil: &AnnulusStencil, next: &mut [f64]) -> f64 {
    let updated: Vec<f64> = (0..stencil.vertices().len())
        .into_par_iter()
        .map(|k| min_average(values, stencil.pairs_at(k)))
        .collect();
    let mut residual = 0.0f64;
    for (&v, new) in stencil.vertices().iter().zip(updated) {
        residual = residual.max((new - values[v]).abs());
        next[v] = new;
    }
    residual
}

/// Monotone value iteration from the constant subsolution `min f >= -|f|_inf`.
///
/// Any constant no larger than every boundary value is a subsolution, so the
/// iterates increase to the same fixed point as from `-|f|_inf`.
pub fn solve_dpp(board: &Board, f: &dyn BoundaryDatum, opts: SolverOptions) -> Result<ValueField> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} must be positive", opts.tol)));
    }
    board.classes().require_game()?;
    let mut field = ValueField::seeded(board, f, datum_floor(board, f));
    let stencil = board.stencil();
    let mut next = field.values.clone();
    let mut history = Vec::new();
    let mut monotone = true;
    loop {
        if history.len() >= opts.max_sweeps {
            let residual = history.last().copied().unwrap_or(f64::INFINITY);
            return Err(Error::NonConvergence {
                sweeps: history.len(),
                residual,
                history,
            });
        }
        let residual = sweep_into(&field.values, stencil, &mut next);
        monotone &= stencil
            .vertices()
            .iter()
            .all(|&v| next[v] >= field.values[v]);
        std::mem::swap(&mut field.values, &mut next);
        history.push(residual);
        if residual <= opts.tol {
            break;
        }
    }
    field.sweeps = history.len();
    field.residual = *history.last().unwrap();
    field.residual_history = history;
    field.monotone = monotone;
    Ok(field)
}

/// Worst violation of the subsolution inequalities; `>= 0` certifies a subsolution.
///
/// Minimum of `min_y (v(y)+v(y_x))/2 - v(x)` over interior `x` and of
/// `f(x) - v(x)` over boundary `x`.
pub fn check_subsolution(values: &[f64], board: &Board, f: &dyn BoundaryDatum) -> f64 {
    let interior = interior_gap(values, board.stencil()).fold(f64::INFINITY, f64::min);
    let boundary = board
        .classes()
        .boundary()
        .iter()
        .map(|&v| f.eval(board.point(v)) - values[v])
        .fold(f64::INFINITY, f64::min);
    interior.min(boundary)
}

/// Mirror of [`check_subsolution`]; `>= 0` certifies a supersolution.
pub fn check_supersolution(values: &[f64], board: &Board, f: &dyn BoundaryDatum) -> f64 {
    let interior = interior_gap(values, board.stencil()).fold(f64::INFINITY, |m, g| m.min(-g));
    let boundary = board
        .classes()
        .boundary()
        .iter()
        .map(|&v| values[v] - f.eval(board.point(v)))
        .fold(f64::INFINITY, f64::min);
    interior.min(boundary)
}

/// `min_y (v(y)+v(y_x))/2 - v(x)` at each interior vertex, in stencil order.
pub fn interior_gap<'a>(values: &'a [f64], stencil: &'a AnnulusStencil) -> impl Iterator<Item = f64> + 'a {
    stencil
        .vertices()
        .iter()
        .enumerate()
        .map(move |(k, &v)| min_average(values, stencil.pairs_at(k)) - values[v])
}

/// Minimizing move `(y, y_x)` at interior vertex `x`; ties go to the smallest `y`.
pub fn greedy_policy(values: &[f64], board: &Board, x: usize) -> Result<(usize, usize)> {
    let pairs = board
        .stencil()
        .pairs(x)
        .ok_or(Error::MissingAnnulus { vertex: x })?;
    greedy_among(values, pairs).ok_or(Error::MissingAnnulus { vertex: x })
}

#[inline]
pub(crate) fn greedy_among(values: &[f64], pairs: &[(usize, usize)]) -> Option<(usize, usize)> {
    let mut best: Option<(f64, (usize, usize))> = None;
    for &(y, z) in pairs {
        let a = 0.5 * (values[y] + values[z]);
        // Pairs are ordered by `y`, so strict improvement keeps the smallest index.
        if best.is_none_or(|(b, _)| a < b) {
            best = Some((a, (y, z)));
        }
    }
    best.map(|(_, p)| p)
}
