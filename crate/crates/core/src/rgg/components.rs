use std::collections::VecDeque;

use super::ProximityGraph;
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;

/// Where a vertex sits relative to the largest component and the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    /// Not in the largest component; carries no value.
    Outside,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::Boundary => "boundary",
            Region::Outside => "outside",
        }
    }
}

/// Connected components, labelled in order of their smallest vertex.
#[derive(Debug, Clone)]
pub struct Components {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl Components {
    pub fn compute(graph: &ProximityGraph) -> Self {
        let n = graph.len();
        let mut labels = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if labels[s] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            labels[s] = id;
            queue.push_back(s);
            let mut size = 0;
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &w in graph.neighbors(v) {
                    if labels[w] == usize::MAX {
                        labels[w] = id;
                        queue.push_back(w);
                    }
                }
            }
            sizes.push(size);
        }
        Self { labels, sizes }
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Label of the largest component; ties go to the component holding the
    /// smallest vertex index, which is the smallest label.
    pub fn largest(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (id, &s) in self.sizes.iter().enumerate() {
            if best.is_none_or(|b| s > self.sizes[b]) {
                best = Some(id);
            }
        }
        best
    }

    /// Ascending vertex list of component `id`.
    pub fn members(&self, id: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == id).collect()
    }
}

/// The largest component split into interior (inside the domain) and boundary vertices.
#[derive(Debug, Clone)]
pub struct VertexClassification {
    component_of: Vec<usize>,
    component: Vec<usize>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    region: Vec<Region>,
}

impl VertexClassification {
    /// Largest component only; every member is marked boundary until
    /// [`classify`](Self::classify) assigns the domain split.
    pub fn largest_component(graph: &ProximityGraph) -> Result<Self> {
        let comps = Components::compute(graph);
        let id = comps
            .largest()
            .ok_or_else(|| Error::DegenerateExperiment("graph has no vertices".into()))?;
        let component = comps.members(id);
        let mut region = vec![Region::Outside; graph.len()];
        for &v in &component {
            region[v] = Region::Boundary;
        }
        Ok(Self {
            component_of: comps.labels,
            boundary: component.clone(),
            component,
            interior: Vec::new(),
            region,
        })
    }

    /// Assigns each component vertex to the interior iff the domain contains it.
    pub fn classify(mut self, graph: &ProximityGraph, domain: &DomainSpec) -> Result<Self> {
        if self.component.is_empty() {
            return Err(Error::DegenerateExperiment("empty component".into()));
        }
        if domain.dim() != graph.cloud().dim() {
            return Err(Error::InvalidParameter("domain and cloud dimensions differ".into()));
        }
        self.interior.clear();
        self.boundary.clear();
        for &v in &self.component {
            if domain.contains(graph.point(v)) {
                self.interior.push(v);
                self.region[v] = Region::Interior;
            } else {
                self.boundary.push(v);
                self.region[v] = Region::Boundary;
            }
        }
        Ok(self)
    }

    /// Largest component plus domain split in one call.
    pub fn new(graph: &ProximityGraph, domain: &DomainSpec) -> Result<Self> {
        Self::largest_component(graph)?.classify(graph, domain)
    }

    pub fn component(&self) -> &[usize] {
        &self.component
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn region(&self, v: usize) -> Region {
        self.region[v]
    }

    pub fn component_label(&self, v: usize) -> usize {
        self.component_of[v]
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.region[v] == Region::Interior
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.region[v] == Region::Boundary
    }

    pub fn in_component(&self, v: usize) -> bool {
        self.region[v] != Region::Outside
    }

    /// Errors unless both the interior and the boundary are nonempty.
    pub fn require_game(&self) -> Result<()> {
        if self.interior.is_empty() {
            return Err(Error::DegenerateExperiment("no interior vertices".into()));
        }
        if self.boundary.is_empty() {
            return Err(Error::DegenerateExperiment("no boundary vertices".into()));
        }
        Ok(())
    }
}
