use rayon::prelude::*;

use super::{ProximityGraph, VertexClassification};
use crate::error::{Error, Result};
use crate::geometry::lex_cmp;

/// Neighbors `y` of `x` with `(1 - delta) r < |x - y|`, ascending.
pub fn annulus_neighbors(graph: &ProximityGraph, x: usize, delta: f64) -> Vec<usize> {
    let inner = (1.0 - delta) * graph.radius();
    let inner2 = inner * inner;
    let cloud = graph.cloud();
    graph
        .neighbors(x)
        .iter()
        .copied()
        .filter(|&y| cloud.dist2(x, y) > inner2)
        .collect()
}

/// The quasi-reflection of `y` through `x` within an annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    /// Annulus member closest to `2x - y`.
    pub index: usize,
    /// `|y_x + y - 2x|^2`.
    pub error2: f64,
    /// Set when the reflection is `y` itself.
    pub degenerate: bool,
}

/// `|z + y - 2x|^2`.
#[inline]
fn reflection_error2(z: &[f64], y: &[f64], x: &[f64]) -> f64 {
    z.iter()
        .zip(y)
        .zip(x)
        .map(|((z, y), x)| {
            let e = z + y - 2.0 * x;
            e * e
        })
        .sum()
}

/// Argmin of `|z + y - 2x|^2` over `annulus`; ties go to the lexicographically
/// smaller point, then to the smaller index.
pub fn reflect_within(graph: &ProximityGraph, x: usize, annulus: &[usize], y: usize) -> Result<Reflection> {
    let cloud = graph.cloud();
    let (px, py) = (cloud.point(x), cloud.point(y));
    let mut best: Option<(f64, usize)> = None;
    for &z in annulus {
        let e = reflection_error2(cloud.point(z), py, px);
        let better = match best {
            None => true,
            Some((be, bz)) => match e.total_cmp(&be) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => lex_cmp(cloud.point(z), cloud.point(bz))
                    .then(z.cmp(&bz))
                    .is_lt(),
            },
        };
        if better {
            best = Some((e, z));
        }
    }
    let (error2, index) = best.ok_or(Error::MissingAnnulus { vertex: x })?;
    Ok(Reflection {
        index,
        error2,
        degenerate: index == y,
    })
}

/// Quasi-reflection of annulus member `y` through vertex `x`.
pub fn reflect(graph: &ProximityGraph, x: usize, y: usize, delta: f64) -> Result<Reflection> {
    let annulus = annulus_neighbors(graph, x, delta);
    if annulus.is_empty() {
        return Err(Error::MissingAnnulus { vertex: x });
    }
    if annulus.binary_search(&y).is_err() {
        return Err(Error::InvalidParameter(format!(
            "vertex {y} is not in the annulus of {x}"
        )));
    }
    reflect_within(graph, x, &annulus, y)
}

/// Move pairs `(y, y_x)` for every interior vertex: the full game stencil.
#[derive(Debug, Clone)]
pub struct AnnulusStencil {
    delta: f64,
    /// Interior vertices in ascending order.
    vertices: Vec<usize>,
    /// `slot[v]` is the position of `v` in `vertices`, or `usize::MAX`.
    slot: Vec<usize>,
    offsets: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    /// Per interior vertex: max over `y` of `|y_x - (2x - y)|`.
    max_error: Vec<f64>,
    /// Per interior vertex: sum over `y` of `|y_x - (2x - y)|`.
    sum_error: Vec<f64>,
    degenerate: Vec<bool>,
}

impl AnnulusStencil {
    /// Fails with the smallest interior vertex whose annulus is empty.
    pub fn build(graph: &ProximityGraph, classes: &VertexClassification, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {delta} outside (0,1)")));
        }
        let vertices = classes.interior().to_vec();
        type Row = (Vec<(usize, usize)>, f64, f64, bool);
        let rows: Vec<Result<Row>> = vertices
            .par_iter()
            .map(|&x| {
                let annulus = annulus_neighbors(graph, x, delta);
                if annulus.is_empty() {
                    return Err(Error::MissingAnnulus { vertex: x });
                }
                let mut pairs = Vec::with_capacity(annulus.len());
                let (mut max_e, mut sum_e, mut degen) = (0.0f64, 0.0, false);
                for &y in &annulus {
                    let refl = reflect_within(graph, x, &annulus, y)?;
                    let e = refl.error2.sqrt();
                    max_e = max_e.max(e);
                    sum_e += e;
                    degen |= refl.degenerate;
                    pairs.push((y, refl.index));
                }
                Ok((pairs, max_e, sum_e, degen))
            })
            .collect();
        let mut slot = vec![usize::MAX; graph.len()];
        let mut offsets = vec![0];
        let mut pairs = Vec::new();
        let mut max_error = Vec::with_capacity(vertices.len());
        let mut sum_error = Vec::with_capacity(vertices.len());
        let mut degenerate = Vec::with_capacity(vertices.len());
        for (k, row) in rows.into_iter().enumerate() {
            let (p, m, s, dg) = row?;
            slot[vertices[k]] = k;
            pairs.extend(p);
            offsets.push(pairs.len());
            max_error.push(m);
            sum_error.push(s);
            degenerate.push(dg);
        }
        Ok(Self {
            delta,
            vertices,
            slot,
            offsets,
            pairs,
            max_error,
            sum_error,
            degenerate,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Interior vertices covered by the stencil, ascending.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Position of interior vertex `v`, if covered.
    pub fn slot(&self, v: usize) -> Option<usize> {
        self.slot.get(v).copied().filter(|&s| s != usize::MAX)
    }

    /// Move pairs of the `k`-th interior vertex, ordered by `y`.
    #[inline]
    pub fn pairs_at(&self, k: usize) -> &[(usize, usize)] {
        &self.pairs[self.offsets[k]..self.offsets[k + 1]]
    }

    /// Move pairs of interior vertex `v`.
    pub fn pairs(&self, v: usize) -> Option<&[(usize, usize)]> {
        self.slot(v).map(|k| self.pairs_at(k))
    }

    /// Max absolute reflection error at the `k`-th interior vertex.
    pub fn max_error_at(&self, k: usize) -> f64 {
        self.max_error[k]
    }

    pub fn sum_error_at(&self, k: usize) -> f64 {
        self.sum_error[k]
    }

    pub fn degenerate_at(&self, k: usize) -> bool {
        self.degenerate[k]
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Boundary vertices that some interior move can reach.
    pub fn reachable_boundary(&self, classes: &VertexClassification) -> Vec<usize> {
        let mut hit = vec![false; self.slot.len()];
        for &(y, z) in &self.pairs {
            hit[y] = true;
            hit[z] = true;
        }
        classes
            .boundary()
            .iter()
            .copied()
            .filter(|&v| hit[v])
            .collect()
    }
}
