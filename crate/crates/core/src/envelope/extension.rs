use std::cmp::Ordering;

use rayon::prelude::*;

use super::EnvelopeCase;
use crate::error::{Error, Result};
use crate::geometry::{dist2, lex_cmp, DomainSpec};
use crate::rgg::{Board, CellGrid, ProximityGraph};

/// Nearest-vertex lookup restricted to the largest component.
///
/// Ties in distance go to the lexicographically smaller point, then the smaller index.
#[derive(Debug, Clone)]
pub struct NearestVertex<'g> {
    graph: &'g ProximityGraph,
    grid: CellGrid,
    members: usize,
}

impl<'g> NearestVertex<'g> {
    pub fn new(board: &'g Board) -> Result<Self> {
        Self::over(board.graph(), board.classes().component())
    }

    /// Index over an explicit vertex subset of `graph`.
    pub fn over(graph: &'g ProximityGraph, members: &[usize]) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::DegenerateExperiment(
                "cannot extend values from an empty component".into(),
            ));
        }
        let d = graph.cloud().dim();
        // About two members per cell on average.
        let cell = (2.0 / members.len() as f64).powf(1.0 / d as f64).min(1.0);
        let grid = CellGrid::build(graph.cloud(), members.iter().copied(), cell);
        Ok(Self {
            graph,
            grid,
            members: members.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    /// The member closest to `x`, which must lie in the unit cube.
    pub fn nearest(&self, x: &[f64]) -> usize {
        let center = self.grid.cell_of(x);
        let side = self.grid.side();
        let mut best: Option<(f64, usize)> = None;
        let mut ring = 0isize;
        loop {
            self.grid.for_ring(&center, ring, |bucket| {
                for &j in bucket {
                    let dj = dist2(self.graph.point(j), x);
                    let better = match best {
                        None => true,
                        Some((db, b)) => match dj.total_cmp(&db) {
                            Ordering::Less => true,
                            Ordering::Greater => false,
                            Ordering::Equal => {
                                lex_cmp(self.graph.point(j), self.graph.point(b)).then(j.cmp(&b))
                                    == Ordering::Less
                            }
                        },
                    };
                    if better {
                        best = Some((dj, j));
                    }
                }
            });
            // Cells beyond `ring` are at least `ring * side` away from x.
            if let Some((db, b)) = best {
                let reach = ring as f64 * side;
                if db < reach * reach {
                    return b;
                }
            }
            ring += 1;
        }
    }

    /// Exhaustive version of [`Self::nearest`] over `members`.
    pub fn nearest_by_scan(graph: &ProximityGraph, members: &[usize], x: &[f64]) -> Option<usize> {
        members.iter().copied().min_by(|&a, &b| {
            dist2(graph.point(a), x)
                .total_cmp(&dist2(graph.point(b), x))
                .then_with(|| lex_cmp(graph.point(a), graph.point(b)))
                .then(a.cmp(&b))
        })
    }
}

/// `values[T(x)]` with `T` the nearest component vertex.
pub fn extend_values(values: &[f64], index: &NearestVertex<'_>, x: &[f64]) -> f64 {
    values[index.nearest(x)]
}

/// Regular evaluation lattice `((k + 1/2) / m)` kept `margin` inside the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalGrid {
    pub resolution: usize,
    pub margin: f64,
}

impl EvalGrid {
    pub fn new(resolution: usize, margin: f64) -> Self {
        Self { resolution, margin }
    }

    /// Default margin of half the connection radius.
    pub fn with_default_margin(resolution: usize, r: f64) -> Self {
        Self::new(resolution, 0.5 * r)
    }

    /// Lattice points with `boundary_distance <= -margin`, in row-major order.
    pub fn points(&self, domain: &DomainSpec) -> Vec<Vec<f64>> {
        let d = domain.dim();
        let m = self.resolution;
        let total = m.checked_pow(d as u32).unwrap_or(0);
        (0..total)
            .map(|mut code| {
                (0..d)
                    .map(|_| {
                        let k = code % m;
                        code /= m;
                        (k as f64 + 0.5) / m as f64
                    })
                    .collect::<Vec<f64>>()
            })
            .filter(|p| domain.boundary_distance(p) <= -self.margin)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    pub sup: f64,
    pub mean: f64,
    pub points: usize,
}

/// Sup and mean of `|extend_values(x) - truth(x)|` over the evaluation grid.
pub fn sup_error_against(
    values: &[f64],
    index: &NearestVertex<'_>,
    domain: &DomainSpec,
    grid: &EvalGrid,
    truth: impl Fn(&[f64]) -> Result<f64> + Sync,
) -> Result<ErrorSummary> {
    let pts = grid.points(domain);
    if pts.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "evaluation grid of resolution {} with margin {} is empty",
            grid.resolution, grid.margin
        )));
    }
    let errs: Vec<f64> = pts
        .par_iter()
        .map(|p| Ok((extend_values(values, index, p) - truth(p)?).abs()))
        .collect::<Result<_>>()?;
    Ok(ErrorSummary {
        sup: errs.iter().copied().fold(0.0, f64::max),
        mean: errs.iter().sum::<f64>() / errs.len() as f64,
        points: errs.len(),
    })
}

/// Error of a solved field against the closed-form envelope.
pub fn sup_error(values: &[f64], index: &NearestVertex<'_>, case: &EnvelopeCase, grid: &EvalGrid) -> Result<ErrorSummary> {
    sup_error_against(values, index, case.domain(), grid, |p| case.analytic(p))
}
