//! Finite simple undirected graphs and the structural operations the rest of
//! the toolkit is built on: balls, ball deletion, induced subgraphs, 2-cores
//! and connected components.
//!
//! Vertices are dense ids `0..n`. Every operation that produces a smaller
//! graph returns an [`InducedSubgraph`] which remembers, for each new vertex,
//! the id it had in the parent so witnesses can be reported in the caller's
//! coordinates.

mod degree;
pub mod io;
mod weights;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use degree::{average_degree, second_order_average_degree, DegreeStats};
pub use weights::{EdgeWeights, VertexWeighting};

/// Immutable simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, parallel
    /// edges and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge {i} ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::input(format!("edge {i} is a self-loop at {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::input(format!(
                    "parallel edge between {u} and {}",
                    w[0]
                )));
            }
        }
        Ok(Graph {
            adjacency,
            edge_count: edges.len(),
        })
    }

    /// Trusted constructor for adjacency lists already known to be sorted,
    /// symmetric and loop-free.
    pub(crate) fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        debug_assert!(adjacency
            .iter()
            .enumerate()
            .all(|(u, n)| n.windows(2).all(|w| w[0] < w[1]) && !n.contains(&u)));
        Graph {
            adjacency,
            edge_count,
        }
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::input(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    /// Path on `n` vertices (`n - 1` edges).
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path edges are simple")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).expect("complete graph edges are simple")
    }

    /// Star K₁,ₖ: center 0 joined to `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges).expect("star edges are simple")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &edges).expect("petersen edges are simple")
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.vertex_count();
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(
            other
                .adjacency
                .iter()
                .map(|n| n.iter().map(|&v| v + shift).collect()),
        );
        Graph::from_sorted_adjacency(adjacency)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.adjacency.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.adjacency.len()
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::input(format!(
                "unknown vertex {v} (graph has {} vertices)",
                self.vertex_count()
            )))
        }
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.adjacency[v].len())
    }

    /// Degree without the bounds check; panics on an unknown vertex.
    pub fn deg(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).max()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, n)| n.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// BFS distances from `v`, truncated at `cutoff` (`None` = unreachable or
    /// beyond the cutoff).
    pub fn distances_from(&self, v: usize, cutoff: Option<usize>) -> Result<Vec<Option<usize>>> {
        self.check_vertex(v)?;
        let mut dist = vec![None; self.vertex_count()];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have a distance");
            if cutoff.is_some_and(|c| du >= c) {
                continue;
            }
            for &x in &self.adjacency[u] {
                if dist[x].is_none() {
                    dist[x] = Some(du + 1);
                    queue.push_back(x);
                }
            }
        }
        Ok(dist)
    }

    /// Vertex set of the radius-`r` ball around `v`, ascending.
    pub fn ball_vertices(&self, v: usize, r: usize) -> Result<Vec<usize>> {
        let dist = self.distances_from(v, Some(r))?;
        Ok(dist
            .iter()
            .enumerate()
            .filter_map(|(u, d)| d.map(|_| u))
            .collect())
    }

    /// Induced subgraph on the vertices within distance `r` of `v`.
    pub fn ball(&self, v: usize, r: usize) -> Result<InducedSubgraph> {
        let verts = self.ball_vertices(v, r)?;
        self.induced_subgraph(&verts)
    }

    /// Induced subgraph on everything outside the radius-`r` ball around `v`.
    pub fn delete_ball(&self, v: usize, r: usize) -> Result<InducedSubgraph> {
        let dist = self.distances_from(v, Some(r))?;
        let keep: Vec<usize> = dist
            .iter()
            .enumerate()
            .filter_map(|(u, d)| d.is_none().then_some(u))
            .collect();
        self.induced_subgraph(&keep)
    }

    /// Induced subgraph on `vertices`. Duplicates are ignored; the new ids
    /// follow ascending parent id.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<InducedSubgraph> {
        let n = self.vertex_count();
        let mut new_id = vec![usize::MAX; n];
        let mut original: Vec<usize> = Vec::with_capacity(vertices.len());
        for &v in vertices {
            self.check_vertex(v)?;
            original.push(v);
        }
        original.sort_unstable();
        original.dedup();
        for (i, &v) in original.iter().enumerate() {
            new_id[v] = i;
        }
        let adjacency = original
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter_map(|&u| (new_id[u] != usize::MAX).then_some(new_id[u]))
                    .collect()
            })
            .collect();
        Ok(InducedSubgraph {
            graph: Graph::from_sorted_adjacency(adjacency),
            original,
        })
    }

    /// The 2-core: the fixed point of repeatedly deleting vertices of degree
    /// at most one. May be empty.
    pub fn two_core(&self) -> InducedSubgraph {
        let n = self.vertex_count();
        let mut deg = self.degrees();
        let mut removed = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
        while let Some(v) = stack.pop() {
            if removed[v] {
                continue;
            }
            removed[v] = true;
            for &u in &self.adjacency[v] {
                if !removed[u] {
                    deg[u] -= 1;
                    if deg[u] == 1 {
                        stack.push(u);
                    }
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&v| !removed[v]).collect();
        self.induced_subgraph(&keep).expect("kept vertices are in range")
    }

    /// Connected components ordered by their smallest vertex id.
    pub fn connected_components(&self) -> Vec<InducedSubgraph> {
        self.component_vertex_sets()
            .into_iter()
            .map(|c| self.induced_subgraph(&c).expect("component vertices are in range"))
            .collect()
    }

    pub(crate) fn component_vertex_sets(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &x in &self.adjacency[u] {
                    if !seen[x] {
                        seen[x] = true;
                        comp.push(x);
                        queue.push_back(x);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.component_vertex_sets().len() == 1
    }

    /// `true` for a nonempty connected acyclic graph.
    pub fn is_tree(&self) -> bool {
        !self.is_empty() && self.edge_count + 1 == self.vertex_count() && self.is_connected()
    }

    /// FNV-1a fingerprint of `n` and the sorted edge list, as 16 hex digits.
    pub fn digest(&self) -> String {
        let mut h = crate::rng::Fnv64::new();
        h.write_u64(self.vertex_count() as u64);
        for (u, v) in self.edges() {
            h.write_u64(u as u64);
            h.write_u64(v as u64);
        }
        format!("{:016x}", h.finish())
    }
}

/// A subgraph together with the parent id of each of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[i]` is the parent id of local vertex `i`; strictly increasing.
    pub original: Vec<usize>,
}

impl InducedSubgraph {
    /// Parent id of a local vertex.
    pub fn to_parent(&self, local: usize) -> usize {
        self.original[local]
    }

    /// Local id of a parent vertex, if it survived.
    pub fn to_local(&self, parent: usize) -> Option<usize> {
        self.original.binary_search(&parent).ok()
    }

    /// Re-expresses a subgraph of this subgraph in the parent's coordinates.
    pub fn compose(&self, inner: InducedSubgraph) -> InducedSubgraph {
        InducedSubgraph {
            original: inner.original.iter().map(|&i| self.original[i]).collect(),
            graph: inner.graph,
        }
    }

    /// Identity embedding of a whole graph.
    pub fn whole(graph: &Graph) -> InducedSubgraph {
        InducedSubgraph {
            original: graph.vertices().collect(),
            graph: graph.clone(),
        }
    }
}
