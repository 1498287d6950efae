//! Covering hypergraphs and their exact expected coverage time.
//!
//! A [`CoverageModel`] is the universal draw space: each round picks one of its
//! edges uniformly at random and collects its vertices. Two independent exact
//! routes compute `E[T]`:
//!
//! * [`recovery_profile`] + [`expected_coverage_exact`], which counts covering
//!   edge subsets by size and applies the harmonic/recovery-count formula;
//! * [`expected_coverage_ie`], inclusion–exclusion over sets of uncovered vertices.
//!
//! They share nothing but the model, so agreement between them is a strong check.

mod families;
mod inclusion_exclusion;
mod model_file;
mod profile;
mod vertex_set;

pub use families::{
    build_hamming_model, build_hamming_model_with, coupon_collector_model, cyclic_windows_model,
    windows_model,
};
pub use inclusion_exclusion::{expected_coverage_ie, expected_coverage_ie_with};
pub use model_file::{parse_model, write_model};
pub use profile::{
    expected_coverage_exact, recovery_profile, recovery_profile_with, RecoveryProfile,
};
pub use vertex_set::VertexSet;

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Enumeration limits for the brute-force oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest edge count accepted by [`recovery_profile`] (it scans `2^edges` subsets).
    pub max_profile_edges: usize,
    /// Largest vertex count accepted by [`expected_coverage_ie`] (it scans `2^vertices` subsets).
    pub max_ie_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_profile_edges: 22,
            max_ie_vertices: 20,
        }
    }
}

/// A covering hypergraph on `0..n_vertices` with distinct, non-empty edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageModel {
    n_vertices: usize,
    edges: Vec<VertexSet>,
}

impl CoverageModel {
    pub fn new(n_vertices: usize, edges: Vec<VertexSet>) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::input("a coverage model needs at least one vertex"));
        }
        if edges.is_empty() {
            return Err(Error::input("a coverage model needs at least one edge"));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut union = VertexSet::empty(n_vertices);
        for (i, edge) in edges.iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::input(format!("edge {i} is empty")));
            }
            if edge.span() > n_vertices || edge.word_count() != n_vertices.div_ceil(64).max(1) {
                return Err(Error::input(format!(
                    "edge {i} is not a subset of the {n_vertices} vertices"
                )));
            }
            if !seen.insert(edge) {
                return Err(Error::input(format!("edge {i} duplicates an earlier edge")));
            }
            union.union_with(edge);
        }
        if union.len() != n_vertices {
            let missing = (0..n_vertices).find(|&v| !union.contains(v)).unwrap();
            return Err(Error::input(format!(
                "model is not covering: vertex {missing} lies in no edge"
            )));
        }
        Ok(CoverageModel { n_vertices, edges })
    }

    /// Builds a model from vertex index lists, validating ranges.
    pub fn from_edge_lists(n_vertices: usize, edges: &[Vec<usize>]) -> Result<Self> {
        let mut sets = Vec::with_capacity(edges.len());
        for (i, list) in edges.iter().enumerate() {
            if let Some(&v) = list.iter().find(|&&v| v >= n_vertices) {
                return Err(Error::input(format!(
                    "edge {i} mentions vertex {v}, but there are only {n_vertices} vertices"
                )));
            }
            sets.push(VertexSet::from_indices(n_vertices, list.iter().copied()));
        }
        Self::new(n_vertices, sets)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[VertexSet] {
        &self.edges
    }

    /// Number of edges containing vertex `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    /// Whether the chosen edges (by index) jointly cover every vertex.
    pub fn is_recovery_set(&self, subset: &[usize]) -> Result<bool> {
        let mut union = VertexSet::empty(self.n_vertices);
        for &i in subset {
            let edge = self.edges.get(i).ok_or_else(|| {
                Error::input(format!("edge index {i} out of range (model has {})", self.n_edges()))
            })?;
            union.union_with(edge);
        }
        Ok(union.len() == self.n_vertices)
    }
}
