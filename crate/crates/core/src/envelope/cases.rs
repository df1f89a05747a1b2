use crate::dpp::BoundaryDatum;
use crate::error::{Error, Result};
use crate::geometry::{DomainKind, DomainSpec};

/// Slack on the closed-domain test for points computed in floating point.
const CLOSURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum CaseKind {
    Constant { c: f64 },
    /// `<a, x> + b`.
    Affine { a: Vec<f64>, b: f64 },
    /// `(x_1 - c_1)^2 - (x_2 - c_2)^2` around the center of a disc.
    Saddle,
}

/// A boundary datum whose convex envelope on the domain is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCase {
    domain: DomainSpec,
    kind: CaseKind,
}

impl EnvelopeCase {
    pub fn constant(domain: DomainSpec, c: f64) -> Self {
        Self {
            domain,
            kind: CaseKind::Constant { c },
        }
    }

    pub fn affine(domain: DomainSpec, a: Vec<f64>, b: f64) -> Result<Self> {
        if a.len() != domain.dim() {
            return Err(Error::InvalidParameter(format!(
                "affine slope has {} entries, domain dimension is {}",
                a.len(),
                domain.dim()
            )));
        }
        Ok(Self {
            domain,
            kind: CaseKind::Affine { a, b },
        })
    }

    /// Saddle datum on the disc `B(center, radius)`.
    pub fn saddle(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() != 2 {
            return Err(Error::InvalidParameter("the saddle case is planar".into()));
        }
        Self::saddle_on(DomainSpec::ball(center, radius)?)
    }

    pub fn saddle_on(domain: DomainSpec) -> Result<Self> {
        if domain.dim() != 2 || domain.kind() != DomainKind::Ball {
            return Err(Error::InvalidParameter(
                "the saddle case needs a disc in the plane".into(),
            ));
        }
        Ok(Self {
            domain,
            kind: CaseKind::Saddle,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn kind(&self) -> &CaseKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            CaseKind::Constant { .. } => "constant",
            CaseKind::Affine { .. } => "affine",
            CaseKind::Saddle => "saddle",
        }
    }

    /// The datum, defined on the whole unit cube.
    pub fn datum(&self, x: &[f64]) -> f64 {
        match &self.kind {
            CaseKind::Constant { c } => *c,
            CaseKind::Affine { a, b } => a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + b,
            CaseKind::Saddle => {
                let c = self.domain.center();
                (x[0] - c[0]).powi(2) - (x[1] - c[1]).powi(2)
            }
        }
    }

    /// Closed-form convex envelope at `x` in the closed domain.
    pub fn analytic(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.domain.dim() || self.domain.level(x) > 1.0 + CLOSURE_TOL {
            return Err(Error::OutOfDomain);
        }
        Ok(match &self.kind {
            CaseKind::Saddle => {
                let c = self.domain.center();
                let r = self.domain.radii()[0];
                2.0 * (x[0] - c[0]).powi(2) - r * r
            }
            _ => self.datum(x),
        })
    }

    /// Gradient-norm bound of the datum over the unit cube.
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.kind {
            CaseKind::Constant { .. } => 0.0,
            CaseKind::Affine { a, .. } => a.iter().map(|v| v * v).sum::<f64>().sqrt(),
            // |grad| = 2 |x - c|, largest at the farthest cube corner.
            CaseKind::Saddle => {
                let far: f64 = self
                    .domain
                    .center()
                    .iter()
                    .map(|&c| c.max(1.0 - c).powi(2))
                    .sum();
                2.0 * far.sqrt()
            }
        }
    }

    /// `max f - min f` over the boundary of the domain.
    pub fn boundary_oscillation(&self) -> f64 {
        match &self.kind {
            CaseKind::Constant { .. } => 0.0,
            // Extremes of a linear function over an ellipsoid: +-|diag(radii) a|.
            CaseKind::Affine { a, .. } => {
                2.0 * a
                    .iter()
                    .zip(self.domain.radii())
                    .map(|(u, s)| (u * s).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
            CaseKind::Saddle => 2.0 * self.domain.radii()[0].powi(2),
        }
    }
}

impl BoundaryDatum for EnvelopeCase {
    fn eval(&self, x: &[f64]) -> f64 {
        self.datum(x)
    }

    fn id(&self) -> String {
        self.name().to_string()
    }
}
