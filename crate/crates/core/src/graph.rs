//! Immutable directed graph with an in-degree index.
//!
//! Vertices are dense `0..n` ids. The graph keeps its edges in insertion
//! order plus a CSR-style list of in-neighbors per vertex; there is no
//! out-adjacency because every quantity computed downstream is a function of
//! in-degrees only.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

/// Counts of edges discarded while building a graph from raw pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub input_pairs: u64,
    pub self_loops_dropped: u64,
    pub duplicates_dropped: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n_vertices: usize,
    edges: Vec<(VertexId, VertexId)>,
    in_degree: Vec<u64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<VertexId>,
    /// dense id -> raw id; `None` when the ids were dense to begin with.
    original_ids: Option<Vec<u64>>,
}

impl DirectedGraph {
    /// Builds a graph from edges that are already dense, loop-free and
    /// duplicate-free. Used by the generators. Vertices without any edge
    /// still count towards `n_vertices`.
    ///
    /// Panics if an endpoint is out of range or the edge set is not simple
    /// (checked in debug builds for duplicates).
    pub fn from_simple_edges(n_vertices: usize, edges: Vec<(VertexId, VertexId)>) -> Self {
        for &(s, t) in &edges {
            assert!(
                s.index() < n_vertices && t.index() < n_vertices,
                "edge ({s}, {t}) out of range for {n_vertices} vertices"
            );
            assert!(s != t, "self-loop at {s}");
        }
        debug_assert_eq!(
            edges.iter().collect::<HashSet<_>>().len(),
            edges.len(),
            "duplicate edges"
        );
        Self::index(n_vertices, edges, None)
    }

    fn index(
        n_vertices: usize,
        edges: Vec<(VertexId, VertexId)>,
        original_ids: Option<Vec<u64>>,
    ) -> Self {
        let mut in_degree = vec![0u64; n_vertices];
        for &(_, t) in &edges {
            in_degree[t.index()] += 1;
        }
        let mut in_offsets = Vec::with_capacity(n_vertices + 1);
        in_offsets.push(0usize);
        let mut acc = 0usize;
        for &d in &in_degree {
            acc += d as usize;
            in_offsets.push(acc);
        }
        let mut cursor = in_offsets[..n_vertices].to_vec();
        let mut in_sources = vec![VertexId(0); edges.len()];
        for &(s, t) in &edges {
            let slot = &mut cursor[t.index()];
            in_sources[*slot] = s;
            *slot += 1;
        }
        DirectedGraph {
            n_vertices,
            edges,
            in_degree,
            in_offsets,
            in_sources,
            original_ids,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    #[inline]
    pub fn in_degree(&self, v: VertexId) -> u64 {
        self.in_degree[v.index()]
    }

    pub fn in_degrees(&self) -> &[u64] {
        &self.in_degree
    }

    /// The follower set of `v`.
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        let i = v.index();
        &self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    pub fn max_in_degree(&self) -> u64 {
        self.in_degree.iter().copied().max().unwrap_or(0)
    }

    pub fn contains_edge(&self, source: VertexId, target: VertexId) -> bool {
        target.index() < self.n_vertices && self.in_neighbors(target).contains(&source)
    }

    /// Raw id that `v` had in the ingested input.
    pub fn original_id(&self, v: VertexId) -> u64 {
        match &self.original_ids {
            Some(ids) => ids[v.index()],
            None => v.0,
        }
    }

    /// Applies a vertex permutation (`perm[old] = new`). The edge order is
    /// preserved.
    pub fn relabel(&self, perm: &[usize]) -> DirectedGraph {
        assert_eq!(perm.len(), self.n_vertices, "permutation length mismatch");
        let edges = self
            .edges
            .iter()
            .map(|&(s, t)| {
                (
                    VertexId(perm[s.index()] as u64),
                    VertexId(perm[t.index()] as u64),
                )
            })
            .collect();
        DirectedGraph::from_simple_edges(self.n_vertices, edges)
    }
}

/// Builds a simple digraph from raw id pairs.
///
/// Raw ids are densified in order of first appearance (source before target
/// within a pair). Self-loops and repeated pairs are dropped and counted; a
/// self-loop still registers its vertex.
pub fn build_graph<I>(edge_pairs: I) -> (DirectedGraph, BuildReport)
where
    I: IntoIterator<Item = (u64, u64)>,
{
    let mut dense: HashMap<u64, u64> = HashMap::new();
    let mut original = Vec::new();
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    let mut edges = Vec::new();
    let mut report = BuildReport::default();

    let mut densify = |raw: u64, original: &mut Vec<u64>| -> u64 {
        *dense.entry(raw).or_insert_with(|| {
            original.push(raw);
            (original.len() - 1) as u64
        })
    };

    for (s, t) in edge_pairs {
        report.input_pairs += 1;
        let ds = densify(s, &mut original);
        let dt = densify(t, &mut original);
        if ds == dt {
            report.self_loops_dropped += 1;
            continue;
        }
        if !seen.insert((ds, dt)) {
            report.duplicates_dropped += 1;
            continue;
        }
        edges.push((VertexId(ds), VertexId(dt)));
    }

    let n = original.len();
    let graph = DirectedGraph::index(n, edges, Some(original));
    (graph, report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InDegreeHistogram {
    counts: BTreeMap<u64, u64>,
    n_vertices: u64,
}

impl InDegreeHistogram {
    /// Histogram from explicit `(k, N_k)` pairs. Zero counts are dropped and
    /// repeated keys are summed.
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Self {
        let mut counts = BTreeMap::new();
        for (k, c) in pairs {
            if c > 0 {
                *counts.entry(k).or_insert(0) += c;
            }
        }
        let n_vertices = counts.values().sum();
        InDegreeHistogram { counts, n_vertices }
    }

    pub fn from_degrees<I: IntoIterator<Item = u64>>(degrees: I) -> Self {
        Self::from_counts(degrees.into_iter().map(|k| (k, 1)))
    }

    pub fn n_vertices(&self) -> u64 {
        self.n_vertices
    }

    pub fn count(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// `(k, N_k)` in ascending `k`, non-zero counts only.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    pub fn distinct_degrees(&self) -> usize {
        self.counts.len()
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    /// Σ k·N_k, which equals the edge count of the source graph.
    pub fn degree_mass(&self) -> u64 {
        self.iter().map(|(k, c)| k * c).sum()
    }
}

pub fn in_degree_histogram(g: &DirectedGraph) -> InDegreeHistogram {
    InDegreeHistogram::from_degrees(g.in_degrees().iter().copied())
}
