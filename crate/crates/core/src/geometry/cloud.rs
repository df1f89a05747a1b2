use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{next_unit, seek_u64, stream_rng, STREAM_CLOUD};

/// An ordered sample of points in the unit cube, stored row-major.
///
/// Coordinate `j` of point `i` is the `(i * d + j)`-th word of the cloud
/// stream for `seed`, so the first `m` points of a cloud with `n >= m` points
/// are exactly the cloud with `m` points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    d: usize,
    seed: Option<u64>,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Samples `n` independent uniform points in `[0,1]^d`.
    pub fn sample(d: usize, n: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        const CHUNK: usize = 4096;
        let mut coords = vec![0.0; n * d];
        coords
            .par_chunks_mut(CHUNK * d)
            .enumerate()
            .for_each(|(chunk, out)| {
                let mut rng = stream_rng(seed, STREAM_CLOUD);
                seek_u64(&mut rng, (chunk * CHUNK * d) as u64);
                for c in out.iter_mut() {
                    *c = next_unit(&mut rng);
                }
            });
        Ok(Self {
            d,
            seed: Some(seed),
            coords,
        })
    }

    /// Wraps explicit coordinates (hand fixtures, synthetic clouds).
    pub fn from_points(d: usize, points: &[Vec<f64>]) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let mut coords = Vec::with_capacity(points.len() * d);
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::InvalidParameter(format!(
                    "point {i} has {} coordinates, expected {d}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::InvalidParameter(format!(
                    "point {i} lies outside the unit cube"
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self {
            d,
            seed: None,
            coords,
        })
    }

    /// Restores a cloud from row-major coordinates, e.g. read back from a cache.
    pub fn from_coords(d: usize, coords: Vec<f64>, seed: Option<u64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if coords.len() % d != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not form {d}-dimensional points",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidParameter("coordinate outside the unit cube".into()));
        }
        Ok(Self { d, seed, coords })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Seed the cloud was sampled from; `None` for explicit clouds.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    /// Flat row-major coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Squared Euclidean distance between points `i` and `j`.
    #[inline]
    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        dist2(self.point(i), self.point(j))
    }
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lexicographic comparison of coordinate vectors.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}
