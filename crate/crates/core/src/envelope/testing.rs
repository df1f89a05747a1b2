//! Fixtures with exactly representable reflections.

use crate::geometry::{DomainSpec, PointCloud};
use crate::rgg::{Board, ProximityGraph};

/// One interior vertex at the center of a tiny disc, ringed by eight
/// boundary vertices placed in antipodal pairs on dyadic coordinates, so
/// every quasi-reflection is exact. Radius 0.1; ring distances lie in
/// `(0.09, 0.1)`, so `delta` must be at least 0.1.
pub(crate) fn exact_cross(delta: f64) -> Board {
    let a = 0.09375;
    let b = 0.0703125;
    let offsets = [
        (a, 0.0),
        (-a, 0.0),
        (0.0, a),
        (0.0, -a),
        (b, b),
        (-b, -b),
        (b, -b),
        (-b, b),
    ];
    let mut pts = vec![vec![0.5, 0.5]];
    pts.extend(offsets.iter().map(|&(u, v)| vec![0.5 + u, 0.5 + v]));
    let g = ProximityGraph::build(PointCloud::from_points(2, &pts).unwrap(), 0.1).unwrap();
    Board::new(g, &DomainSpec::ball(vec![0.5, 0.5], 0.05).unwrap(), delta).unwrap()
}
