//! Proximity graphs, components, annulus neighborhoods and quasi-reflections.

mod annulus;
mod board;
mod components;
mod coverage;
mod graph;

pub use annulus::{annulus_neighbors, reflect, reflect_within, AnnulusStencil, Reflection};
pub use board::Board;
pub use components::{Components, Region, VertexClassification};
pub use coverage::{
    coverage_report, direction_net, in_cone, scan_vertex, sector_volume, CoverageReport,
    VertexCoverage,
};
pub(crate) use graph::CellGrid;
pub use graph::ProximityGraph;
