use rayon::prelude::*;

use crate::dpp::BoundaryDatum;
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::rgg::Board;

/// Quadratic barrier anchored at a boundary point `y0` with inward normal `n`:
/// `v(x) = -K <x - y0, n> + (eta/2) |x - y0|^2 + f(y0) - eta/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Barrier {
    pub y0: Vec<f64>,
    pub inward: Vec<f64>,
    pub slope: f64,
    pub eta: f64,
    pub offset: f64,
}

impl Barrier {
    pub fn new(domain: &DomainSpec, y0: Vec<f64>, slope: f64, eta: f64, f_y0: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        if (domain.level(&y0) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("barrier anchor must lie on the boundary".into()));
        }
        let inward = domain.outward_normal(&y0).into_iter().map(|v| -v).collect();
        Ok(Self {
            y0,
            inward,
            slope,
            eta,
            offset: f_y0 - 0.5 * eta,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut lin = 0.0;
        let mut sq = 0.0;
        for k in 0..x.len() {
            let w = x[k] - self.y0[k];
            lin += w * self.inward[k];
            sq += w * w;
        }
        -self.slope * lin + 0.5 * self.eta * sq + self.offset
    }
}

/// Slope that keeps the barrier under an `L`-Lipschitz datum near the anchor.
///
/// Uses the largest radius of curvature `rho` of the domain: `K = rho (L^2/eta + eta)`.
pub fn barrier_slope(domain: &DomainSpec, lipschitz: f64, eta: f64) -> f64 {
    let radii = domain.radii();
    let amax = radii.iter().copied().fold(0.0, f64::max);
    let amin = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let rho = amax * amax / amin;
    rho * (lipschitz * lipschitz / eta + eta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierResidual {
    /// `min_x [min_y (v(y) + v(y_x))/2 - v(x)]` over interior vertices.
    pub min_residual: f64,
    pub vertex: usize,
}

/// Minimum discrete-operator residual of the barrier over the interior.
///
/// The barrier must lie below `f` at every boundary vertex some move can
/// reach; the first violating vertex is reported otherwise.
pub fn barrier_residual(
    board: &Board,
    domain: &DomainSpec,
    y0: &[f64],
    slope: f64,
    eta: f64,
    f: &dyn BoundaryDatum,
) -> Result<BarrierResidual> {
    let barrier = Barrier::new(domain, y0.to_vec(), slope, eta, f.eval(y0))?;
    for v in board.stencil().reachable_boundary(board.classes()) {
        let p = board.point(v);
        let excess = barrier.eval(p) - f.eval(p);
        if excess > 0.0 {
            return Err(Error::BarrierPrecondition { vertex: v, excess });
        }
    }
    let stencil = board.stencil();
    stencil
        .vertices()
        .par_iter()
        .enumerate()
        .map(|(k, &x)| {
            let vx = barrier.eval(board.point(x));
            let res = stencil
                .pairs_at(k)
                .iter()
                .map(|&(y, yx)| 0.5 * (barrier.eval(board.point(y)) + barrier.eval(board.point(yx))) - vx)
                .fold(f64::INFINITY, f64::min);
            BarrierResidual {
                min_residual: res,
                vertex: x,
            }
        })
        .min_by(|a, b| a.min_residual.total_cmp(&b.min_residual).then(a.vertex.cmp(&b.vertex)))
        .ok_or_else(|| Error::DegenerateExperiment("no interior vertices".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::FnDatum;
    use crate::envelope::testing::exact_cross;
    use crate::geometry::dist2;

    #[test]
    fn exact_graph_residual_is_half_eta_times_min_step() {
        let b = exact_cross(0.1);
        let dom = DomainSpec::ball(vec![0.5, 0.5], 0.05).unwrap();
        let f = FnDatum::new("high", |_: &[f64]| 10.0);
        let y0 = [0.55, 0.5];
        let x = b.stencil().vertices()[0];
        let min_step = b
            .stencil()
            .pairs(x)
            .unwrap()
            .iter()
            .map(|&(y, _)| dist2(b.point(y), b.point(x)))
            .fold(f64::INFINITY, f64::min);
        for eta in [0.25, 0.5, 2.0] {
            let res = barrier_residual(&b, &dom, &y0, 1.0, eta, &f).unwrap();
            assert!((res.min_residual - 0.5 * eta * min_step).abs() < 1e-12);
            assert!(res.min_residual > 0.5 * eta * (0.9f64 * 0.1).powi(2));
        }
    }

    #[test]
    fn shallow_slope_violates_precondition() {
        let b = exact_cross(0.1);
        let dom = DomainSpec::ball(vec![0.5, 0.5], 0.05).unwrap();
        // A flat barrier sits above a datum that falls off along the normal.
        let f = FnDatum::new("ramp", |x: &[f64]| 5.0 * (x[0] - 0.55));
        let err = barrier_residual(&b, &dom, &[0.55, 0.5], 0.0, 0.1, &f).unwrap_err();
        assert!(matches!(err, Error::BarrierPrecondition { .. }));
        assert!(barrier_residual(&b, &dom, &[0.55, 0.5], 5.0, 0.1, &f).is_ok());
    }

    #[test]
    fn anchor_and_eta_checked() {
        let b = exact_cross(0.1);
        let dom = DomainSpec::ball(vec![0.5, 0.5], 0.05).unwrap();
        let f = FnDatum::new("c", |_: &[f64]| 0.0);
        assert!(barrier_residual(&b, &dom, &[0.5, 0.5], 1.0, 0.5, &f).is_err());
        assert!(barrier_residual(&b, &dom, &[0.55, 0.5], 1.0, 0.0, &f).is_err());
    }

    #[test]
    fn slope_for_a_disc() {
        let dom = DomainSpec::ball(vec![0.5, 0.5], 0.3).unwrap();
        let k = barrier_slope(&dom, 2f64.sqrt(), 0.5);
        assert!((k - 0.3 * (4.0 + 0.5)).abs() < 1e-14);
    }
}
