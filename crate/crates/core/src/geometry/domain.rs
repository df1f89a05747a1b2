//! Strictly convex domains: balls and axis-aligned ellipsoids inside the unit cube.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Ball,
    Ellipsoid,
}

/// A ball or axis-aligned ellipsoid whose closure lies in the open unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    kind: DomainKind,
    center: Vec<f64>,
    radii: Vec<f64>,
}

impl DomainSpec {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let radii = vec![radius; center.len()];
        Self::new(DomainKind::Ball, center, radii)
    }

    pub fn ellipsoid(center: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        Self::new(DomainKind::Ellipsoid, center, radii)
    }

    /// A ball that need not fit in the unit cube, for continuum-only computations.
    pub fn free_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let radii = vec![radius; center.len()];
        Self::validated(DomainKind::Ball, center, radii)
    }

    fn new(kind: DomainKind, center: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        let spec = Self::validated(kind, center, radii)?;
        if !(spec.cube_margin() > 0.0) {
            return Err(Error::InvalidParameter(
                "domain closure must lie inside the open unit cube".into(),
            ));
        }
        Ok(spec)
    }

    fn validated(kind: DomainKind, center: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        let d = center.len();
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if radii.len() != d {
            return Err(Error::InvalidParameter(format!(
                "domain has {} radii for dimension {d}",
                radii.len()
            )));
        }
        if radii.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameter("domain radii must be positive".into()));
        }
        Ok(Self { kind, center, radii })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Distance from the domain to the complement of the unit cube.
    pub fn cube_margin(&self) -> f64 {
        self.center
            .iter()
            .zip(&self.radii)
            .map(|(c, a)| (c - a).min(1.0 - c - a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.level(x) < 1.0
    }

    /// `sum ((x_i - c_i) / a_i)^2`, below 1 inside.
    pub fn level(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .zip(&self.radii)
            .map(|((x, c), a)| {
                let t = (x - c) / a;
                t * t
            })
            .sum()
    }

    /// Signed Euclidean distance to the boundary: negative inside.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self.kind {
            DomainKind::Ball => {
                let r2: f64 = x
                    .iter()
                    .zip(&self.center)
                    .map(|(x, c)| (x - c) * (x - c))
                    .sum();
                r2.sqrt() - self.radii[0]
            }
            DomainKind::Ellipsoid => {
                let y: Vec<f64> = x.iter().zip(&self.center).map(|(x, c)| (x - c).abs()).collect();
                let p = closest_on_ellipsoid(&self.radii, &y);
                let dist = y
                    .iter()
                    .zip(&p)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if self.level(x) < 1.0 {
                    -dist
                } else {
                    dist
                }
            }
        }
    }

    /// Point of the boundary at hyperspherical angles `angles` (length `d - 1`).
    ///
    /// In the plane this is `c + (a_1 cos t, a_2 sin t)`.
    pub fn boundary_point(&self, angles: &[f64]) -> Vec<f64> {
        let u = unit_from_angles(angles, self.dim());
        u.iter()
            .zip(&self.center)
            .zip(&self.radii)
            .map(|((u, c), a)| c + a * u)
            .collect()
    }

    /// Outward unit normal at a boundary point.
    pub fn outward_normal(&self, p: &[f64]) -> Vec<f64> {
        let g: Vec<f64> = p
            .iter()
            .zip(&self.center)
            .zip(&self.radii)
            .map(|((p, c), a)| (p - c) / (a * a))
            .collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.into_iter().map(|v| v / norm).collect()
    }

    /// Second endpoint of the chord that starts at boundary point `p` and passes through `x`.
    ///
    /// Returns `None` when `x == p`.
    pub fn chord_exit(&self, p: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        // Solve level(p + t (x - p)) = 1 for the nonzero root t.
        let mut qa = 0.0;
        let mut qb = 0.0;
        for k in 0..self.dim() {
            let dir = (x[k] - p[k]) / self.radii[k];
            let off = (p[k] - self.center[k]) / self.radii[k];
            qa += dir * dir;
            qb += 2.0 * dir * off;
        }
        if qa == 0.0 {
            return None;
        }
        // level(p) = 1 so the constant term cancels: t (qa t + qb) = 0.
        let t = -qb / qa;
        Some((0..self.dim()).map(|k| p[k] + t * (x[k] - p[k])).collect())
    }
}

/// Unit vector from `d - 1` hyperspherical angles.
pub fn unit_from_angles(angles: &[f64], d: usize) -> Vec<f64> {
    assert_eq!(angles.len(), d - 1, "expected {} angles", d - 1);
    let mut u = vec![0.0; d];
    let mut s = 1.0;
    for k in 0..d - 1 {
        u[k] = s * angles[k].cos();
        s *= angles[k].sin();
    }
    u[d - 1] = s;
    u
}

/// Closest point on the ellipsoid `sum (x_i/a_i)^2 = 1` to `y`, all `y_i >= 0`.
fn closest_on_ellipsoid(a: &[f64], y: &[f64]) -> Vec<f64> {
    let d = a.len();
    // Axis with the smallest semi-axis.
    let m = (0..d).min_by(|&i, &j| a[i].total_cmp(&a[j])).unwrap();
    if y[m] == 0.0 {
        let am2 = a[m] * a[m];
        let mut degenerate = true;
        let mut g = 0.0;
        for i in 0..d {
            if i == m || y[i] == 0.0 {
                continue;
            }
            let ai2 = a[i] * a[i];
            if ai2 <= am2 {
                degenerate = false;
                break;
            }
            let t = a[i] * y[i] / (ai2 - am2);
            g += t * t;
        }
        if degenerate && g < 1.0 {
            let mut p = vec![0.0; d];
            let mut used = 0.0;
            for i in 0..d {
                if i == m || y[i] == 0.0 {
                    continue;
                }
                p[i] = a[i] * a[i] * y[i] / (a[i] * a[i] - am2);
                used += (p[i] / a[i]).powi(2);
            }
            p[m] = a[m] * (1.0 - used).max(0.0).sqrt();
            return p;
        }
    }
    if y.iter().all(|&v| v == 0.0) {
        let mut p = vec![0.0; d];
        p[m] = a[m];
        return p;
    }
    // Root of F(t) = sum (a_i y_i / (t + a_i^2))^2 - 1 on (-a_min^2, inf), over nonzero y_i.
    let f = |t: f64| -> f64 {
        (0..d)
            .filter(|&i| y[i] > 0.0)
            .map(|i| {
                let q = a[i] * y[i] / (t + a[i] * a[i]);
                q * q
            })
            .sum::<f64>()
            - 1.0
    };
    let amin2 = (0..d)
        .filter(|&i| y[i] > 0.0)
        .map(|i| a[i] * a[i])
        .fold(f64::INFINITY, f64::min);
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let amax = a.iter().cloned().fold(0.0, f64::max);
    let mut lo = -amin2;
    let mut hi = amax * ynorm;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    (0..d).map(|i| a[i] * a[i] * y[i] / (t + a[i] * a[i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ball() -> DomainSpec {
        DomainSpec::ball(vec![0.5, 0.5], 0.3).unwrap()
    }

    #[test]
    fn ball_queries() {
        let b = ball();
        assert!(b.contains(&[0.5, 0.5]));
        assert!(b.boundary_distance(&[0.5, 0.8]).abs() < 1e-12);
        let p = b.boundary_point(&[0.0]);
        assert!((p[0] - 0.8).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert!(!b.contains(&[0.5, 0.8 + 1e-9]));
        assert!(b.boundary_distance(&[0.5, 0.5]) < 0.0);
        assert!(b.boundary_distance(&[0.9, 0.5]) > 0.0);
    }

    #[test]
    fn margin() {
        assert!((ball().cube_margin() - 0.2).abs() < 1e-15);
        assert!(DomainSpec::ball(vec![0.5, 0.5], 0.5).is_err());
        assert!(DomainSpec::ball(vec![0.5, 0.5], -0.1).is_err());
        assert!(DomainSpec::ball(vec![0.5], 0.1).is_err());
    }

    #[test]
    fn boundary_points_lie_on_boundary() {
        let e = DomainSpec::ellipsoid(vec![0.5, 0.45, 0.5], vec![0.3, 0.2, 0.1]).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.37;
            let p = e.boundary_point(&[t, 2.0 * t]);
            assert!((e.level(&p) - 1.0).abs() < 1e-12);
            assert!(e.boundary_distance(&p).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipse_distance_matches_dense_scan() {
        let e = DomainSpec::ellipsoid(vec![0.5, 0.5], vec![0.3, 0.15]).unwrap();
        let queries = [
            [0.5, 0.5],
            [0.55, 0.5],
            [0.5, 0.52],
            [0.7, 0.6],
            [0.9, 0.9],
            [0.1, 0.45],
            [0.5, 0.2],
            [0.79, 0.5],
        ];
        for q in queries {
            let scan = (0..200_000)
                .map(|k| {
                    let p = e.boundary_point(&[2.0 * PI * k as f64 / 200_000.0]);
                    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            let got = e.boundary_distance(&q);
            assert!((got.abs() - scan).abs() < 1e-6, "{q:?}: {got} vs {scan}");
            assert_eq!(got < 0.0, e.contains(&q));
        }
    }

    #[test]
    fn chord_exit_on_ball() {
        let b = ball();
        let p = b.boundary_point(&[PI / 2.0]);
        let q = b.chord_exit(&p, &[0.5, 0.5]).unwrap();
        assert!((q[0] - 0.5).abs() < 1e-12 && (q[1] - 0.2).abs() < 1e-12);
        assert!(b.chord_exit(&p, &p).is_none());
    }

    #[test]
    fn outward_normal_of_ball() {
        let n = ball().outward_normal(&[0.8, 0.5]);
        assert!((n[0] - 1.0).abs() < 1e-12 && n[1].abs() < 1e-12);
    }
}
