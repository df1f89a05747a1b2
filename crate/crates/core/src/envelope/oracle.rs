use rand::RngCore;
use rayon::prelude::*;

use crate::dpp::BoundaryDatum;
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::rng::{seek_u64, stream_rng, unit_f64, STREAM_ORACLE};

/// Smallest sample count the oracle accepts.
pub const MIN_ORACLE_SAMPLES: usize = 100;
const WEIGHT_TOL: f64 = 1e-12;

/// Brute-force convex envelope of boundary data at an interior point of a planar domain.
///
/// Sample `i` reads three angles from words `3i..3i+3` of the oracle stream,
/// takes the boundary triangle they span and, when it contains `x`, the convex
/// combination of the datum with the barycentric weights of `x`. The chord from
/// the first of those boundary points through `x` is always evaluated too. The
/// result is the minimum over all samples, so adding samples never raises it.
pub fn brute_envelope_oracle(
    domain: &DomainSpec,
    f: &dyn BoundaryDatum,
    x: &[f64],
    m_samples: usize,
    oracle_seed: u64,
) -> Result<f64> {
    if domain.dim() != 2 || x.len() != 2 {
        return Err(Error::InvalidParameter("the envelope oracle is planar".into()));
    }
    if !domain.contains(x) {
        return Err(Error::OutOfDomain);
    }
    if m_samples < MIN_ORACLE_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "oracle needs at least {MIN_ORACLE_SAMPLES} samples, got {m_samples}"
        )));
    }
    let best = (0..m_samples)
        .into_par_iter()
        .filter_map(|i| sample_value(domain, f, x, oracle_seed, i as u64))
        .min_by(f64::total_cmp);
    best.ok_or(Error::InfeasibleOracle { samples: m_samples })
}

fn sample_value(domain: &DomainSpec, f: &dyn BoundaryDatum, x: &[f64], seed: u64, i: u64) -> Option<f64> {
    let mut rng = stream_rng(seed, STREAM_ORACLE);
    seek_u64(&mut rng, 3 * i);
    let p: Vec<Vec<f64>> = (0..3)
        .map(|_| domain.boundary_point(&[unit_f64(rng.next_u64()) * std::f64::consts::TAU]))
        .collect();
    let chord = chord_value(domain, f, &p[0], x);
    let triple = triangle_value(f, &p, x);
    match (chord, triple) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn chord_value(domain: &DomainSpec, f: &dyn BoundaryDatum, p: &[f64], x: &[f64]) -> Option<f64> {
    let q = domain.chord_exit(p, x)?;
    let len = dist(p, &q);
    if len == 0.0 {
        return None;
    }
    // x = w p + (1 - w) q
    let w = dist(x, &q) / len;
    let v = w * f.eval(p) + (1.0 - w) * f.eval(&q);
    v.is_finite().then_some(v)
}

fn triangle_value(f: &dyn BoundaryDatum, p: &[Vec<f64>], x: &[f64]) -> Option<f64> {
    let (e1, e2) = ([p[0][0] - p[2][0], p[0][1] - p[2][1]], [p[1][0] - p[2][0], p[1][1] - p[2][1]]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    if det == 0.0 {
        return None;
    }
    let rx = [x[0] - p[2][0], x[1] - p[2][1]];
    let l1 = (rx[0] * e2[1] - rx[1] * e2[0]) / det;
    let l2 = (e1[0] * rx[1] - e1[1] * rx[0]) / det;
    let l3 = 1.0 - l1 - l2;
    let w = [l1, l2, l3];
    if w.iter().any(|&l| !(l >= -WEIGHT_TOL)) {
        return None;
    }
    let v: f64 = w.iter().zip(p).map(|(&l, q)| l.max(0.0) * f.eval(q)).sum();
    v.is_finite().then_some(v)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::FnDatum;
    use crate::envelope::EnvelopeCase;

    #[test]
    fn constant_datum() {
        let dom = DomainSpec::ball(vec![0.5, 0.5], 0.3).unwrap();
        let f = FnDatum::new("c", |_: &[f64]| 0.4);
        let v = brute_envelope_oracle(&dom, &f, &[0.6, 0.45], 500, 1).unwrap();
        assert!((v - 0.4).abs() < 1e-12);
    }

    #[test]
    fn saddle_at_center_of_unit_disc() {
        // The vertical chord attains cos(2 pi/2) = -1.
        let disc = DomainSpec::free_ball(vec![0.0, 0.0], 1.0).unwrap();
        let case = EnvelopeCase::saddle_on(disc).unwrap();
        let v = brute_envelope_oracle(case.domain(), &case, &[0.0, 0.0], 10_000, 3).unwrap();
        assert!(v >= -1.0 - 1e-12 && v < -1.0 + 1e-3, "{v}");
    }

    #[test]
    fn monotone_in_sample_count() {
        let case = EnvelopeCase::saddle(vec![0.5, 0.5], 0.3).unwrap();
        let x = [0.6, 0.42];
        let mut last = f64::INFINITY;
        for m in [100, 200, 400, 1000, 3000] {
            let v = brute_envelope_oracle(case.domain(), &case, &x, m, 5).unwrap();
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn jensen_for_convex_data() {
        let dom = DomainSpec::ball(vec![0.5, 0.5], 0.3).unwrap();
        let h = |x: &[f64]| (x[0] - 0.2).powi(2) + 3.0 * (x[1] - 0.7).powi(2) + x[0];
        let f = FnDatum::new("h", h);
        for x in [[0.5, 0.5], [0.3, 0.6], [0.7, 0.35]] {
            let v = brute_envelope_oracle(&dom, &f, &x, 2000, 8).unwrap();
            assert!(v >= h(&x) - 1e-9);
        }
    }

    #[test]
    fn preconditions() {
        let dom = DomainSpec::ball(vec![0.5, 0.5], 0.3).unwrap();
        let f = FnDatum::new("c", |_: &[f64]| 0.0);
        assert_eq!(
            brute_envelope_oracle(&dom, &f, &[0.95, 0.5], 500, 1),
            Err(Error::OutOfDomain)
        );
        assert!(matches!(
            brute_envelope_oracle(&dom, &f, &[0.5, 0.5], 99, 1),
            Err(Error::InvalidParameter(_))
        ));
    }
}
