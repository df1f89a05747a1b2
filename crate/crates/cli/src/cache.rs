//! On-disk cache of point clouds and their proximity graphs.
//!
//! Layout (little endian): magic `RGGC`, format version `u32`, `d u32`,
//! `n u64`, `seed u64`, `r f64`, `n*d` coordinates, `n+1` offsets, the
//! neighbor list, then the SHA-256 of everything before it.

use std::fs;
use std::path::{Path, PathBuf};

use rgg_envelope::geometry::PointCloud;
use rgg_envelope::rgg::ProximityGraph;
use sha2::{Digest, Sha256};

use crate::config::{RunSpec, SCHEMA_VERSION};
use crate::error::{CliError, Result};

const MAGIC: &[u8; 4] = b"RGGC";
const FORMAT_VERSION: u32 = 1;
/// Overrides the cache directory.
pub const CACHE_ENV: &str = "RGG_ENVELOPE_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// The file existed but failed validation and was rebuilt.
    Rebuilt,
}

#[derive(Debug, Clone)]
pub struct GraphCache {
    dir: PathBuf,
}

impl GraphCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$RGG_ENVELOPE_CACHE` if set, else `<out>/cache`.
    pub fn locate(out: &Path) -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => Self::new(dir),
            _ => Self::new(out.join("cache")),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Content key of a run: schema version, dimension, size, seed and radius,
    /// plus the coordinates for explicit fixtures.
    pub fn key(d: usize, run: &RunSpec) -> String {
        let mut h = Sha256::new();
        h.update(b"rgg-envelope-graph");
        h.update(SCHEMA_VERSION.to_le_bytes());
        h.update((d as u64).to_le_bytes());
        h.update((run.params.n as u64).to_le_bytes());
        h.update(run.seed.to_le_bytes());
        h.update(run.params.r.to_bits().to_le_bytes());
        if let Some(points) = &run.fixture {
            for c in points.iter().flatten() {
                h.update(c.to_bits().to_le_bytes());
            }
        }
        let digest = h.finalize();
        digest[..16].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn path_for(&self, d: usize, run: &RunSpec) -> PathBuf {
        self.dir.join(format!("{}.graph", Self::key(d, run)))
    }

    /// Loads the graph of `run`, building and storing it when absent or corrupt.
    pub fn load_or_build(&self, d: usize, run: &RunSpec) -> Result<(ProximityGraph, CacheStatus)> {
        let path = self.path_for(d, run);
        let mut status = CacheStatus::Miss;
        if path.exists() {
            match fs::read(&path).map_err(|e| e.to_string()).and_then(|b| decode(&b, d, run)) {
                Ok(g) => return Ok((g, CacheStatus::Hit)),
                Err(why) => {
                    eprintln!("warning: cache entry {} is invalid ({why}); rebuilding", path.display());
                    status = CacheStatus::Rebuilt;
                }
            }
        }
        let graph = build(d, run)?;
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, encode(&graph, run)).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
        Ok((graph, status))
    }
}

/// Samples (or wraps) the cloud of `run` and connects it.
pub fn build(d: usize, run: &RunSpec) -> Result<ProximityGraph> {
    let label = run.label();
    let cloud = match &run.fixture {
        Some(points) => PointCloud::from_points(d, points),
        None => PointCloud::sample(d, run.params.n, run.seed),
    }
    .map_err(|e| CliError::core(&label, e))?;
    ProximityGraph::build(cloud, run.params.r).map_err(|e| CliError::core(&label, e))
}

fn encode(graph: &ProximityGraph, run: &RunSpec) -> Vec<u8> {
    let cloud = graph.cloud();
    let (offsets, neighbors) = graph.adjacency();
    let mut out = Vec::with_capacity(40 + 8 * (cloud.coords().len() + offsets.len() + neighbors.len()) + 32);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(cloud.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(cloud.len() as u64).to_le_bytes());
    out.extend_from_slice(&run.seed.to_le_bytes());
    out.extend_from_slice(&graph.radius().to_le_bytes());
    for c in cloud.coords() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    for &o in offsets {
        out.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for &j in neighbors {
        out.extend_from_slice(&(j as u64).to_le_bytes());
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> std::result::Result<[u8; N], String> {
        let end = self.pos + N;
        let bytes = self.buf.get(self.pos..end).ok_or("truncated file")?;
        self.pos = end;
        Ok(bytes.try_into().expect("slice length"))
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        self.take::<8>().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        self.take::<8>().map(f64::from_le_bytes)
    }
}

fn decode(bytes: &[u8], d: usize, run: &RunSpec) -> std::result::Result<ProximityGraph, String> {
    if bytes.len() < 32 {
        return Err("truncated file".into());
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err("checksum mismatch".into());
    }
    let mut rd = Reader { buf: body, pos: 0 };
    if &rd.take::<4>()? != MAGIC || rd.u32()? != FORMAT_VERSION {
        return Err("unknown format".into());
    }
    let fd = rd.u32()? as usize;
    let n = rd.u64()? as usize;
    let seed = rd.u64()?;
    let r = rd.f64()?;
    if fd != d || n != run.params.n || seed != run.seed || r.to_bits() != run.params.r.to_bits() {
        return Err("header does not match the run".into());
    }
    let coords = (0..n * d).map(|_| rd.f64()).collect::<std::result::Result<Vec<_>, _>>()?;
    let offsets = (0..=n)
        .map(|_| rd.u64().map(|v| v as usize))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let m = *offsets.last().ok_or("missing offsets")?;
    let neighbors = (0..m)
        .map(|_| rd.u64().map(|v| v as usize))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if rd.pos != body.len() {
        return Err("trailing bytes".into());
    }
    let seed = run.fixture.is_none().then_some(seed);
    let cloud = PointCloud::from_coords(d, coords, seed).map_err(|e| e.to_string())?;
    ProximityGraph::from_parts(cloud, r, offsets, neighbors).map_err(|e| e.to_string())
}
