use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Uniform grid over the unit cube with cells of side at least `cell`.
///
/// Point indices are bucketed per cell in ascending order.
#[derive(Debug, Clone)]
pub(crate) struct CellGrid {
    d: usize,
    per_axis: usize,
    starts: Vec<usize>,
    entries: Vec<usize>,
}

impl CellGrid {
    pub(crate) fn build(cloud: &PointCloud, members: impl Iterator<Item = usize>, cell: f64) -> Self {
        let d = cloud.dim();
        let per_axis = ((1.0 / cell).floor() as usize).clamp(1, max_cells_per_axis(d));
        let total = per_axis.pow(d as u32);
        let members: Vec<usize> = members.collect();
        let keys: Vec<usize> = members
            .iter()
            .map(|&i| cell_key(cloud.point(i), per_axis))
            .collect();
        let mut starts = vec![0usize; total + 1];
        for &k in &keys {
            starts[k + 1] += 1;
        }
        for c in 0..total {
            starts[c + 1] += starts[c];
        }
        let mut fill = starts.clone();
        let mut entries = vec![0usize; members.len()];
        for (&i, &k) in members.iter().zip(&keys) {
            entries[fill[k]] = i;
            fill[k] += 1;
        }
        Self {
            d,
            per_axis,
            starts,
            entries,
        }
    }

    pub(crate) fn side(&self) -> f64 {
        1.0 / self.per_axis as f64
    }

    pub(crate) fn cell_of(&self, x: &[f64]) -> Vec<isize> {
        x.iter()
            .map(|&c| axis_cell(c, self.per_axis) as isize)
            .collect()
    }

    pub(crate) fn bucket(&self, cell: &[isize]) -> &[usize] {
        let mut key = 0usize;
        for &c in cell.iter().rev() {
            if c < 0 || c >= self.per_axis as isize {
                return &[];
            }
            key = key * self.per_axis + c as usize;
        }
        &self.entries[self.starts[key]..self.starts[key + 1]]
    }

    /// Calls `visit` on every cell within Chebyshev distance `ring` of `center`
    /// and exactly at that distance.
    pub(crate) fn for_ring(&self, center: &[isize], ring: isize, mut visit: impl FnMut(&[usize])) {
        let d = self.d;
        let mut offset = vec![-ring; d];
        let mut cell = vec![0isize; d];
        loop {
            if offset.iter().any(|o| o.abs() == ring) {
                for k in 0..d {
                    cell[k] = center[k] + offset[k];
                }
                let b = self.bucket(&cell);
                if !b.is_empty() {
                    visit(b);
                }
            }
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                offset[k] += 1;
                if offset[k] > ring {
                    offset[k] = -ring;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn per_axis(&self) -> usize {
        self.per_axis
    }
}

fn max_cells_per_axis(d: usize) -> usize {
    // Keep the dense cell table below ~16M entries.
    ((1usize << 24) as f64).powf(1.0 / d as f64).floor() as usize
}

#[inline]
fn axis_cell(c: f64, per_axis: usize) -> usize {
    ((c * per_axis as f64) as usize).min(per_axis - 1)
}

fn cell_key(x: &[f64], per_axis: usize) -> usize {
    x.iter()
        .rev()
        .fold(0, |key, &c| key * per_axis + axis_cell(c, per_axis))
}

/// Radius-`r` proximity graph in compressed adjacency layout.
///
/// `j` is a neighbor of `i` iff `i != j` and `|x_i - x_j| < r`; each neighbor
/// list is strictly ascending.
#[derive(Debug, Clone)]
pub struct ProximityGraph {
    cloud: PointCloud,
    r: f64,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl ProximityGraph {
    /// Builds the graph with a uniform grid of cell side `>= r`, comparing each
    /// point only against its `3^d` neighboring cells.
    pub fn build(cloud: PointCloud, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("radius {r} outside (0,1)")));
        }
        let grid = CellGrid::build(&cloud, 0..cloud.len(), r);
        let r2 = r * r;
        let lists: Vec<Vec<usize>> = (0..cloud.len())
            .into_par_iter()
            .map(|i| {
                let x = cloud.point(i);
                let center = grid.cell_of(x);
                let mut out = Vec::new();
                let reach = (r / grid.side()).ceil() as isize;
                for ring in 0..=reach {
                    grid.for_ring(&center, ring, |bucket| {
                        for &j in bucket {
                            if j != i && cloud.dist2(i, j) < r2 {
                                out.push(j);
                            }
                        }
                    });
                }
                out.sort_unstable();
                out
            })
            .collect();
        let mut offsets = Vec::with_capacity(cloud.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        for l in lists {
            neighbors.extend_from_slice(&l);
            offsets.push(neighbors.len());
        }
        Ok(Self {
            cloud,
            r,
            offsets,
            neighbors,
        })
    }

    /// All-pairs construction; quadratic, for cross-checks on small clouds.
    pub fn build_brute_force(cloud: PointCloud, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("radius {r} outside (0,1)")));
        }
        let n = cloud.len();
        let r2 = r * r;
        let mut offsets = vec![0];
        let mut neighbors = Vec::new();
        for i in 0..n {
            neighbors.extend((0..n).filter(|&j| j != i && cloud.dist2(i, j) < r2));
            offsets.push(neighbors.len());
        }
        Ok(Self {
            cloud,
            r,
            offsets,
            neighbors,
        })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        self.cloud.point(i)
    }

    /// Raw compressed layout `(offsets, neighbors)`.
    pub fn adjacency(&self) -> (&[usize], &[usize]) {
        (&self.offsets, &self.neighbors)
    }

    /// Reassembles a graph from a cached adjacency, validating its shape.
    pub fn from_parts(
        cloud: PointCloud,
        r: f64,
        offsets: Vec<usize>,
        neighbors: Vec<usize>,
    ) -> Result<Self> {
        let n = cloud.len();
        let ok = offsets.len() == n + 1
            && offsets.first() == Some(&0)
            && offsets.last() == Some(&neighbors.len())
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && neighbors.iter().all(|&j| j < n);
        if !ok {
            return Err(Error::InvalidParameter("malformed adjacency".into()));
        }
        Ok(Self {
            cloud,
            r,
            offsets,
            neighbors,
        })
    }
}
