//! Empirical "points in all directions" diagnostics.
//!
//! A sector is `S(r, delta, alpha) = {(1-delta) r < |z| < r} ∩ K(alpha)` with
//! `K(alpha) = {|z_perp| <= alpha z_axis}` around a unit axis. Sectors are
//! tested around every interior vertex for each axis of a finite direction net.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::annulus::{annulus_neighbors, reflect_within};
use super::{ProximityGraph, VertexClassification};
use crate::error::{Error, Result};
use crate::geometry::GraphParams;

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub sectors_tested: usize,
    pub sectors_empty: usize,
    /// Max of `|y_x - (2x - y)| / r` over interior `x` and annulus members `y`.
    pub max_reflection_error: f64,
    pub mean_reflection_error: f64,
    /// `n` times the exact sector volume.
    pub expected_sector_count: f64,
    /// Interior vertices whose annulus is empty.
    pub empty_annuli: usize,
    /// Sector constant `c` in `vol = c r^d delta alpha^{d-1}`.
    pub sector_constant: f64,
}

/// Sector counts and reflection errors around a single vertex.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VertexCoverage {
    pub sectors_tested: usize,
    pub sectors_empty: usize,
    pub annulus_size: usize,
    /// Max of `|y_x - (2x - y)| / r` over annulus members.
    pub max_reflection_error: f64,
    /// Sum of `|y_x - (2x - y)| / r` over annulus members.
    pub sum_reflection_error: f64,
}

/// Unit directions with neighboring angular spacing at most `spacing`.
///
/// In the plane the net is `m` equally spaced angles; in higher dimensions it is
/// a square lattice on each face of `[-1,1]^d`, projected radially (the
/// projection never increases angular distances beyond face distances).
pub fn direction_net(d: usize, spacing: f64) -> Vec<Vec<f64>> {
    assert!(spacing > 0.0, "direction net spacing must be positive");
    if d == 2 {
        let m = (2.0 * PI / spacing).ceil() as usize;
        return (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
    }
    let steps = (2.0 / spacing).ceil() as usize;
    let mut out = Vec::new();
    let mut idx = vec![0usize; d - 1];
    for axis in 0..d {
        for sign in [-1.0, 1.0] {
            idx.iter_mut().for_each(|v| *v = 0);
            loop {
                let mut v = Vec::with_capacity(d);
                let mut free = idx.iter();
                for k in 0..d {
                    if k == axis {
                        v.push(sign);
                    } else {
                        v.push(-1.0 + 2.0 * *free.next().unwrap() as f64 / steps as f64);
                    }
                }
                // Shared face edges: keep a lattice point only on the first face
                // (lowest axis) where it has a +-1 coordinate.
                let owned = (0..axis).all(|k| v[k].abs() < 1.0);
                if owned {
                    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    out.push(v.into_iter().map(|c| c / norm).collect());
                }
                let mut k = 0;
                loop {
                    if k == d - 1 {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] > steps {
                        idx[k] = 0;
                        k += 1;
                    } else {
                        break;
                    }
                }
                if k == d - 1 {
                    break;
                }
            }
        }
    }
    out
}

/// Surface area of the unit sphere `S^k`.
fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// `int_0^beta sin^k`.
fn sin_power_integral(k: usize, beta: f64) -> f64 {
    match k {
        0 => beta,
        1 => 1.0 - beta.cos(),
        _ => {
            let kf = k as f64;
            -beta.cos() * beta.sin().powi(k as i32 - 1) / kf
                + (kf - 1.0) / kf * sin_power_integral(k - 2, beta)
        }
    }
}

/// Exact Lebesgue measure of `S(r, delta, alpha)` in dimension `d`.
pub fn sector_volume(d: usize, r: f64, delta: f64, alpha: f64) -> f64 {
    let radial = (r.powi(d as i32) - ((1.0 - delta) * r).powi(d as i32)) / d as f64;
    let cap = sphere_area(d - 2) * sin_power_integral(d - 2, alpha.atan());
    radial * cap
}

/// Sector test and reflection errors at vertex `x`.
pub fn scan_vertex(
    graph: &ProximityGraph,
    x: usize,
    params: &GraphParams,
    net: &[Vec<f64>],
) -> Result<VertexCoverage> {
    let annulus = annulus_neighbors(graph, x, params.delta);
    let cloud = graph.cloud();
    let px = cloud.point(x);
    let d = cloud.dim();
    let offsets: Vec<Vec<f64>> = annulus
        .iter()
        .map(|&y| (0..d).map(|k| cloud.point(y)[k] - px[k]).collect())
        .collect();
    let mut empty = 0;
    for axis in net {
        let hit = offsets.iter().any(|z| in_cone(z, axis, params.alpha));
        if !hit {
            empty += 1;
        }
    }
    let r = graph.radius();
    let mut max_e = 0.0f64;
    let mut sum_e = 0.0;
    for &y in &annulus {
        let refl = reflect_within(graph, x, &annulus, y)?;
        let e = refl.error2.sqrt() / r;
        max_e = max_e.max(e);
        sum_e += e;
    }
    Ok(VertexCoverage {
        sectors_tested: net.len(),
        sectors_empty: empty,
        annulus_size: annulus.len(),
        max_reflection_error: max_e,
        sum_reflection_error: sum_e,
    })
}

/// `|z_perp| <= alpha <z, axis>` for unit `axis`.
#[inline]
pub fn in_cone(z: &[f64], axis: &[f64], alpha: f64) -> bool {
    let along: f64 = z.iter().zip(axis).map(|(a, b)| a * b).sum();
    if along <= 0.0 {
        return false;
    }
    let total: f64 = z.iter().map(|a| a * a).sum();
    let perp2 = (total - along * along).max(0.0);
    perp2 <= alpha * alpha * along * along
}

/// Sector coverage and reflection-error summary over all interior vertices.
pub fn coverage_report(
    graph: &ProximityGraph,
    classes: &VertexClassification,
    params: &GraphParams,
    direction_net_spacing: f64,
) -> Result<CoverageReport> {
    if !(direction_net_spacing > 0.0) {
        return Err(Error::InvalidParameter(
            "direction net spacing must be positive".into(),
        ));
    }
    let d = graph.cloud().dim();
    let net = direction_net(d, direction_net_spacing);
    let per_vertex: Vec<VertexCoverage> = classes
        .interior()
        .par_iter()
        .map(|&x| scan_vertex(graph, x, params, &net))
        .collect::<Result<_>>()?;

    let mut report = CoverageReport {
        sectors_tested: 0,
        sectors_empty: 0,
        max_reflection_error: 0.0,
        mean_reflection_error: 0.0,
        expected_sector_count: 0.0,
        empty_annuli: 0,
        sector_constant: 0.0,
    };
    let mut pairs = 0usize;
    let mut sum = 0.0;
    for v in &per_vertex {
        report.sectors_tested += v.sectors_tested;
        report.sectors_empty += v.sectors_empty;
        report.max_reflection_error = report.max_reflection_error.max(v.max_reflection_error);
        sum += v.sum_reflection_error;
        pairs += v.annulus_size;
        if v.annulus_size == 0 {
            report.empty_annuli += 1;
        }
    }
    if pairs > 0 {
        report.mean_reflection_error = sum / pairs as f64;
    }
    let vol = sector_volume(d, params.r, params.delta, params.alpha);
    report.expected_sector_count = graph.len() as f64 * vol;
    report.sector_constant =
        vol / (params.r.powi(d as i32) * params.delta * params.alpha.powi(d as i32 - 1));
    Ok(report)
}
