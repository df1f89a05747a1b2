use super::{AnnulusStencil, ProximityGraph, VertexClassification};
use crate::error::Result;
use crate::geometry::DomainSpec;

/// Everything the game and the solver read: the graph, the split of its largest
/// component against the domain, and the annulus move pairs.
#[derive(Debug, Clone)]
pub struct Board {
    graph: ProximityGraph,
    classes: VertexClassification,
    stencil: AnnulusStencil,
}

impl Board {
    /// Classifies the largest component and builds the stencil; fails on an
    /// empty interior or boundary, or on any empty interior annulus.
    pub fn new(graph: ProximityGraph, domain: &DomainSpec, delta: f64) -> Result<Self> {
        let classes = VertexClassification::new(&graph, domain)?;
        Self::from_parts(graph, classes, delta)
    }

    pub fn from_parts(graph: ProximityGraph, classes: VertexClassification, delta: f64) -> Result<Self> {
        classes.require_game()?;
        let stencil = AnnulusStencil::build(&graph, &classes, delta)?;
        Ok(Self {
            graph,
            classes,
            stencil,
        })
    }

    pub fn graph(&self) -> &ProximityGraph {
        &self.graph
    }

    pub fn classes(&self) -> &VertexClassification {
        &self.classes
    }

    pub fn stencil(&self) -> &AnnulusStencil {
        &self.stencil
    }

    pub fn delta(&self) -> f64 {
        self.stencil.delta()
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    #[inline]
    pub fn point(&self, v: usize) -> &[f64] {
        self.graph.point(v)
    }
}
