//! Non-backtracking walks, unraveled balls and the walk forest.
//!
//! Nodes of every tree built here are stored in BFS order: walks grouped by
//! length, lexicographic within a length. The children of a node are then a
//! contiguous id range, and tree edges sorted as `(parent, child)` line up
//! with child ids.

mod canon;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::io::{GraphDocument, NodeAttributes};
use crate::graph::{EdgeWeights, Graph};
use crate::scalar::Real;

pub use canon::{rooted_isomorphic, unrooted_isomorphic, TreeCanonizer};

pub const DEFAULT_MAX_NODES: usize = 2_000_000;
pub const MAX_NODES_ENV: &str = "SPECBOUND_MAX_NODES";

/// Upper bound on the number of tree nodes a single construction may create.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeBudget(pub usize);

impl Default for NodeBudget {
    fn default() -> Self {
        NodeBudget(DEFAULT_MAX_NODES)
    }
}

impl NodeBudget {
    /// `SPECBOUND_MAX_NODES` if set and parseable, otherwise the default.
    pub fn from_env() -> Self {
        std::env::var(MAX_NODES_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(NodeBudget)
            .unwrap_or_default()
    }
}

/// A walk `v₀, …, v_i` with `v_j ≠ v_{j+2}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NbWalk {
    vertices: Vec<usize>,
}

impl NbWalk {
    /// Validates adjacency and the non-backtracking condition against `g`.
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::input("a walk has at least one vertex"));
        }
        for &v in &vertices {
            g.check_vertex(v)?;
        }
        if let Some(w) = vertices.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
            return Err(Error::input(format!("{} and {} are not adjacent", w[0], w[1])));
        }
        if let Some(w) = vertices.windows(3).find(|w| w[0] == w[2]) {
            return Err(Error::input(format!(
                "walk backtracks at {} -> {} -> {}",
                w[0], w[1], w[2]
            )));
        }
        Ok(NbWalk { vertices })
    }

    pub fn trivial(v: usize) -> Self {
        NbWalk { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_trivial(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("walks are nonempty")
    }

    /// `ω⁻`: the walk with its last step removed.
    pub fn truncated(&self) -> Option<NbWalk> {
        (self.vertices.len() > 1).then(|| NbWalk {
            vertices: self.vertices[..self.vertices.len() - 1].to_vec(),
        })
    }

    /// The walk with its first vertex removed.
    pub fn tail(&self) -> Option<NbWalk> {
        (self.vertices.len() > 1).then(|| NbWalk {
            vertices: self.vertices[1..].to_vec(),
        })
    }
}

/// Number of non-backtracking walks from `v` of each length `0..=r`,
/// saturating at `u128::MAX`.
pub fn nb_walk_counts(g: &Graph, v: usize, r: usize) -> Result<Vec<u128>> {
    g.check_vertex(v)?;
    let mut counts = vec![1u128];
    if r == 0 {
        return Ok(counts);
    }
    // per directed edge (a -> b), walks of the current length ending with it
    let arcs: Vec<(usize, usize)> = g
        .vertices()
        .flat_map(|a| g.neighbors(a).iter().map(move |&b| (a, b)))
        .collect();
    let arc_index = |a: usize, b: usize| -> usize {
        let base = arcs.partition_point(|&(x, _)| x < a);
        base + g.neighbors(a).binary_search(&b).expect("arc exists")
    };
    let mut cur = vec![0u128; arcs.len()];
    for &b in g.neighbors(v) {
        cur[arc_index(v, b)] = 1;
    }
    counts.push(g.deg(v) as u128);
    for _ in 2..=r {
        let mut next = vec![0u128; arcs.len()];
        for (i, &(a, b)) in arcs.iter().enumerate() {
            if cur[i] == 0 {
                continue;
            }
            for &c in g.neighbors(b) {
                if c != a {
                    let j = arc_index(b, c);
                    next[j] = next[j].saturating_add(cur[i]);
                }
            }
        }
        counts.push(next.iter().fold(0u128, |s, &x| s.saturating_add(x)));
        cur = next;
    }
    Ok(counts)
}

/// All non-backtracking walks from `v` of length `0..=r`, grouped by length.
pub fn nb_walks(g: &Graph, v: usize, r: usize) -> Result<Vec<Vec<NbWalk>>> {
    nb_walks_with(g, v, r, NodeBudget::from_env())
}

pub fn nb_walks_with(g: &Graph, v: usize, r: usize, budget: NodeBudget) -> Result<Vec<Vec<NbWalk>>> {
    check_budget(g, v, r, budget)?;
    let mut levels = vec![vec![NbWalk::trivial(v)]];
    for _ in 0..r {
        let last = levels.last().expect("at least one level");
        let mut next = Vec::new();
        for walk in last {
            let prev = walk.vertices.len().checked_sub(2).map(|i| walk.vertices[i]);
            for &u in g.neighbors(walk.end()) {
                if Some(u) != prev {
                    let mut vs = walk.vertices.clone();
                    vs.push(u);
                    next.push(NbWalk { vertices: vs });
                }
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// `W₁`: every edge in both directions, lexicographic.
pub fn all_nb_edge_walks(g: &Graph) -> Vec<NbWalk> {
    g.vertices()
        .flat_map(|u| {
            g.neighbors(u).iter().map(move |&v| NbWalk {
                vertices: vec![u, v],
            })
        })
        .collect()
}

fn check_budget(g: &Graph, v: usize, r: usize, budget: NodeBudget) -> Result<()> {
    let total = nb_walk_counts(g, v, r)?
        .iter()
        .fold(0u128, |s, &x| s.saturating_add(x));
    if total > budget.0 as u128 {
        return Err(Error::resource(format!(
            "unraveled ball at v={v}, r={r} needs {total} nodes (cap {})",
            budget.0
        )));
    }
    Ok(())
}

/// Shared BFS expansion of walk trees. Each node records the vertex it
/// covers, the vertex before that on its walk, and its parent node.
#[derive(Debug, Clone, PartialEq)]
struct WalkTree {
    parent: Vec<Option<usize>>,
    covering: Vec<usize>,
    prev: Vec<Option<usize>>,
    depth: Vec<usize>,
    children: Vec<(usize, usize)>,
}

impl WalkTree {
    fn new() -> Self {
        WalkTree {
            parent: Vec::new(),
            covering: Vec::new(),
            prev: Vec::new(),
            depth: Vec::new(),
            children: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.covering.len()
    }

    fn push(&mut self, parent: Option<usize>, covering: usize, prev: Option<usize>, depth: usize) {
        self.parent.push(parent);
        self.covering.push(covering);
        self.prev.push(prev);
        self.depth.push(depth);
        self.children.push((0, 0));
    }

    /// Expands every node from `start` on until depth `max_depth`.
    fn expand(&mut self, g: &Graph, start: usize, max_depth: usize, cap: usize) -> Result<()> {
        let mut i = start;
        while i < self.len() {
            let first = self.len();
            if self.depth[i] < max_depth {
                let (x, p) = (self.covering[i], self.prev[i]);
                for &u in g.neighbors(x) {
                    if Some(u) != p {
                        if self.len() == cap {
                            return Err(Error::resource(format!("node cap {cap} reached")));
                        }
                        self.push(Some(i), u, Some(x), self.depth[i] + 1);
                    }
                }
            }
            self.children[i] = (first, self.len());
            i += 1;
        }
        Ok(())
    }

    fn graph(&self) -> Graph {
        let adjacency = (0..self.len())
            .map(|x| {
                let (a, b) = self.children[x];
                self.parent[x].into_iter().chain(a..b).collect()
            })
            .collect();
        Graph::from_sorted_adjacency(adjacency)
    }

    fn lifted<T: Real>(&self, tree: &Graph, w: &EdgeWeights<T>) -> EdgeWeights<T> {
        let values = (0..self.len())
            .flat_map(|x| {
                let (a, b) = self.children[x];
                (a..b).map(move |c| (x, c))
            })
            .map(|(x, c)| w.weight(self.covering[x], self.covering[c]))
            .collect();
        EdgeWeights::from_edge_values(tree, values).expect("lifted weights are positive")
    }

    fn label(&self, mut x: usize) -> NbWalk {
        let mut vs = vec![self.covering[x]];
        while let Some(p) = self.parent[x] {
            vs.push(self.covering[p]);
            x = p;
        }
        if let Some(p) = self.prev[x] {
            vs.push(p);
        }
        vs.reverse();
        NbWalk { vertices: vs }
    }

    fn child_covering(&self, x: usize, u: usize) -> Option<usize> {
        let (a, b) = self.children[x];
        let kids = &self.covering[a..b];
        kids.binary_search(&u).ok().map(|k| a + k)
    }
}

/// `G̃(v, r)`: the tree of non-backtracking walks from `v` of length at most
/// `r`, two walks adjacent when one extends the other by a single step. Node
/// 0 is the trivial walk; every tree edge carries the weight of the `G`-edge
/// it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct UnraveledBall<T = f64> {
    tree: Graph,
    nodes: WalkTree,
    lifted: EdgeWeights<T>,
    center: usize,
    radius: usize,
}

/// Builds `G̃(v, r)` under the node cap from the environment.
pub fn unraveled_ball<T: Real>(
    g: &Graph,
    w: &EdgeWeights<T>,
    v: usize,
    r: usize,
) -> Result<UnraveledBall<T>> {
    unraveled_ball_with(g, w, v, r, NodeBudget::from_env())
}

pub fn unraveled_ball_with<T: Real>(
    g: &Graph,
    w: &EdgeWeights<T>,
    v: usize,
    r: usize,
    budget: NodeBudget,
) -> Result<UnraveledBall<T>> {
    w.validate_for(g)?;
    check_budget(g, v, r, budget)?;
    let mut nodes = WalkTree::new();
    nodes.push(None, v, None, 0);
    nodes.expand(g, 0, r, budget.0)?;
    let tree = nodes.graph();
    let lifted = nodes.lifted(&tree, w);
    Ok(UnraveledBall {
        tree,
        nodes,
        lifted,
        center: v,
        radius: r,
    })
}

impl<T: Real> UnraveledBall<T> {
    pub fn tree(&self) -> &Graph {
        &self.tree
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn lifted_weights(&self) -> &EdgeWeights<T> {
        &self.lifted
    }

    /// `φ(x)`: the terminal vertex of the walk at node `x`.
    pub fn covering(&self, x: usize) -> usize {
        self.nodes.covering[x]
    }

    pub fn covering_map(&self) -> &[usize] {
        &self.nodes.covering
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.nodes.parent[x]
    }

    pub fn depth(&self, x: usize) -> usize {
        self.nodes.depth[x]
    }

    pub fn children(&self, x: usize) -> Range<usize> {
        let (a, b) = self.nodes.children[x];
        a..b
    }

    /// The walk labelling node `x`.
    pub fn label(&self, x: usize) -> NbWalk {
        self.nodes.label(x)
    }

    /// Node whose label is `walk`, if the walk lies in the ball.
    pub fn find(&self, walk: &NbWalk) -> Option<usize> {
        if walk.start() != self.center || walk.len() > self.radius {
            return None;
        }
        walk.vertices[1..]
            .iter()
            .try_fold(0, |x, &u| self.nodes.child_covering(x, u))
    }

    /// Node counts per depth `0..=radius`.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.radius + 1];
        for &d in &self.nodes.depth {
            sizes[d] += 1;
        }
        sizes
    }

    /// Number of nodes at depth at most `d`; they are exactly ids `0..count`.
    pub fn prefix_len(&self, d: usize) -> usize {
        self.nodes.depth.partition_point(|&x| x <= d)
    }

    pub fn to_document(&self) -> GraphDocument {
        let mut doc = GraphDocument::new(&self.tree, None);
        doc.weights = Some(
            self.lifted
                .values()
                .iter()
                .map(|x| x.to_f64_lossy())
                .collect(),
        );
        doc.root = Some(0);
        doc.nodes = Some(
            (0..self.node_count())
                .map(|x| NodeAttributes {
                    label: self.label(x).vertices,
                    covering: self.covering(x),
                })
                .collect(),
        );
        doc
    }
}

/// Checks that `ball` is a tree whose covering map is a local isomorphism
/// onto `(g, w)`: at every node of depth below the radius the incident tree
/// edges map bijectively onto the edges at the covered vertex, and every
/// tree edge carries exactly the weight of the edge it covers.
pub fn covering_map_check<T: Real>(ball: &UnraveledBall<T>, g: &Graph, w: &EdgeWeights<T>) -> bool {
    let t = &ball.tree;
    let n = t.vertex_count();
    if n != ball.nodes.len() || n == 0 || !t.is_tree() {
        return false;
    }
    if ball.lifted.validate_for(t).is_err() || w.validate_for(g).is_err() {
        return false;
    }
    let cov = &ball.nodes.covering;
    if cov.iter().any(|&x| !g.contains(x)) || cov[0] != ball.center {
        return false;
    }
    for ((a, b), x) in ball.lifted.iter() {
        match w.get(cov[a], cov[b]) {
            Some(y) if y == x => {}
            _ => return false,
        }
    }
    for x in t.vertices() {
        if ball.nodes.depth[x] >= ball.radius {
            continue;
        }
        let mut image: Vec<usize> = t.neighbors(x).iter().map(|&y| cov[y]).collect();
        image.sort_unstable();
        if image != g.neighbors(cov[x]) {
            return false;
        }
    }
    true
}

/// The forest `T`: one component `T_e` per `e = (v₀, v₁) ∈ W₁`, holding the
/// walks of length `1..=r+1` that begin with `e`. Node ids of `T_e` form a
/// contiguous range; a node covers the terminal vertex of its walk.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkForest<T = f64> {
    forest: Graph,
    nodes: WalkTree,
    lifted: EdgeWeights<T>,
    edge_walks: Vec<NbWalk>,
    components: Vec<Range<usize>>,
    radius: usize,
}

pub fn walk_forest<T: Real>(g: &Graph, w: &EdgeWeights<T>, r: usize) -> Result<WalkForest<T>> {
    walk_forest_with(g, w, r, NodeBudget::from_env())
}

pub fn walk_forest_with<T: Real>(
    g: &Graph,
    w: &EdgeWeights<T>,
    r: usize,
    budget: NodeBudget,
) -> Result<WalkForest<T>> {
    w.validate_for(g)?;
    if let Some(v) = g.vertices().find(|&v| g.deg(v) == 0) {
        return Err(Error::precondition(format!(
            "walk forest needs minimum degree 1, vertex {v} is isolated"
        )));
    }
    // |⋃_{i=1}^{r+1} W_i| = Σ_v Σ_{i=1}^{r+1} |W_i from v|
    let mut total = 0u128;
    for v in g.vertices() {
        let counts = nb_walk_counts(g, v, r + 1)?;
        total = counts[1..].iter().fold(total, |s, &x| s.saturating_add(x));
    }
    if total > budget.0 as u128 {
        return Err(Error::resource(format!(
            "walk forest at r={r} needs {total} nodes (cap {})",
            budget.0
        )));
    }
    let edge_walks = all_nb_edge_walks(g);
    let mut nodes = WalkTree::new();
    let mut components = Vec::with_capacity(edge_walks.len());
    for e in &edge_walks {
        let start = nodes.len();
        nodes.push(None, e.vertices[1], Some(e.vertices[0]), 1);
        nodes.expand(g, start, r + 1, budget.0)?;
        components.push(start..nodes.len());
    }
    let forest = nodes.graph();
    let lifted = nodes.lifted(&forest, w);
    Ok(WalkForest {
        forest,
        nodes,
        lifted,
        edge_walks,
        components,
        radius: r,
    })
}

impl<T: Real> WalkForest<T> {
    pub fn forest(&self) -> &Graph {
        &self.forest
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn lifted_weights(&self) -> &EdgeWeights<T> {
        &self.lifted
    }

    /// `W₁` in the order components are stored.
    pub fn edge_walks(&self) -> &[NbWalk] {
        &self.edge_walks
    }

    /// Node ids of `T_e` for the `k`-th edge walk; the first id is its root.
    pub fn component(&self, k: usize) -> Range<usize> {
        self.components[k].clone()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Index of the component containing node `x`.
    pub fn component_of(&self, x: usize) -> usize {
        self.components.partition_point(|c| c.end <= x)
    }

    pub fn covering(&self, x: usize) -> usize {
        self.nodes.covering[x]
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.nodes.parent[x]
    }

    pub fn children(&self, x: usize) -> Range<usize> {
        let (a, b) = self.nodes.children[x];
        a..b
    }

    /// Walk length of node `x`, between 1 and `r + 1`.
    pub fn depth(&self, x: usize) -> usize {
        self.nodes.depth[x]
    }

    pub fn label(&self, x: usize) -> NbWalk {
        self.nodes.label(x)
    }

    /// Image of node `x` in `G̃(v₁, r)` under `(v₀, v₁, …, v_i) ↦ (v₁, …, v_i)`.
    pub fn embed_in(&self, x: usize, ball: &UnraveledBall<T>) -> Option<usize> {
        let tail = self.label(x).tail()?;
        ball.find(&tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_ball(g: &Graph, v: usize, r: usize) -> UnraveledBall {
        unraveled_ball(g, &EdgeWeights::unit(g), v, r).unwrap()
    }

    /// Every walk of length `r` from `v`, then filter the backtracking ones.
    fn brute_force_nb(g: &Graph, v: usize, r: usize) -> Vec<Vec<usize>> {
        let mut walks = vec![vec![v]];
        for _ in 0..r {
            walks = walks
                .into_iter()
                .flat_map(|w| {
                    g.neighbors(*w.last().unwrap()).iter().map(move |&u| {
                        let mut w = w.clone();
                        w.push(u);
                        w
                    })
                })
                .collect();
        }
        walks.retain(|w| w.windows(3).all(|t| t[0] != t[2]));
        walks.sort();
        walks
    }

    #[test]
    fn walk_level_sizes() {
        let c4 = Graph::cycle(4).unwrap();
        let k4 = Graph::complete(4);
        let sizes = |g: &Graph, r| -> Vec<usize> {
            nb_walks(g, 0, r).unwrap().iter().map(Vec::len).collect()
        };
        assert_eq!(sizes(&c4, 2), vec![1, 2, 2]);
        assert_eq!(sizes(&k4, 2), vec![1, 3, 6]);
        assert_eq!(sizes(&Graph::petersen(), 0), vec![1]);
        for r in 0..5 {
            let got: Vec<Vec<usize>> = nb_walks(&c4, 1, r).unwrap()[r]
                .iter()
                .map(|w| w.vertices().to_vec())
                .collect();
            assert_eq!(got, brute_force_nb(&c4, 1, r));
        }
    }

    #[test]
    fn edge_walks() {
        assert_eq!(all_nb_edge_walks(&Graph::cycle(4).unwrap()).len(), 8);
        assert_eq!(all_nb_edge_walks(&Graph::petersen()).len(), 30);
        assert!(all_nb_edge_walks(&Graph::empty(4)).is_empty());
    }

    #[test]
    fn walk_validation() {
        let g = Graph::cycle(5).unwrap();
        assert!(NbWalk::new(&g, vec![0, 1, 2, 3]).is_ok());
        assert!(NbWalk::new(&g, vec![0, 1, 0]).is_err());
        assert!(NbWalk::new(&g, vec![0, 2]).is_err());
        assert!(NbWalk::new(&g, vec![]).is_err());
        assert!(NbWalk::new(&g, vec![7]).is_err());
    }

    #[test]
    fn cycle_unravels_to_path() {
        let c6 = Graph::cycle(6).unwrap();
        let ball = unit_ball(&c6, 0, 2);
        assert_eq!(ball.node_count(), 5);
        let p5 = Graph::path(5);
        assert!(rooted_isomorphic(
            (ball.tree(), 0, ball.lifted_weights()),
            (&p5, 2, &EdgeWeights::unit(&p5))
        ));
    }

    #[test]
    fn complete_graph_ball_shape() {
        let k4 = Graph::complete(4);
        let ball = unit_ball(&k4, 0, 2);
        assert_eq!(ball.node_count(), 10);
        assert_eq!(ball.tree().deg(0), 3);
        for x in 1..4 {
            assert_eq!(ball.tree().deg(x), 3);
        }
        for x in 4..10 {
            assert_eq!(ball.tree().deg(x), 1);
        }
        assert_eq!(ball.label(4).vertices(), &[0, 1, 2]);
        assert_eq!(ball.find(&ball.label(7)), Some(7));
    }

    #[test]
    fn tree_is_its_own_cover() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
        let w = EdgeWeights::from_fn(&g, |u, v| 1.0 + (u + v) as f64 / 4.0).unwrap();
        for v in g.vertices() {
            let ball = unraveled_ball(&g, &w, v, 6).unwrap();
            assert!(rooted_isomorphic((ball.tree(), 0, ball.lifted_weights()), (&g, v, &w)));
        }
    }

    #[test]
    fn covering_check_detects_tampering() {
        let g = Graph::petersen();
        let w = EdgeWeights::from_fn(&g, |u, v| 0.5 + (u * v % 7) as f64).unwrap();
        let ball = unraveled_ball(&g, &w, 3, 3).unwrap();
        assert!(covering_map_check(&ball, &g, &w));

        let mut bad = ball.clone();
        bad.lifted.set_unchecked(0, 1, 123.0);
        assert!(!covering_map_check(&bad, &g, &w));

        let mut bad = ball.clone();
        let edges: Vec<_> = bad.tree.edges().filter(|&(u, v)| !(u == 0 && v == 1)).collect();
        bad.tree = Graph::from_edges(bad.tree.vertex_count(), &edges).unwrap();
        assert!(!covering_map_check(&bad, &g, &w));

        let mut bad = ball.clone();
        bad.nodes.covering.swap(1, 2);
        assert!(!covering_map_check(&bad, &g, &w));
    }

    #[test]
    fn node_cap_is_a_resource_error() {
        let g = Graph::petersen();
        let w = EdgeWeights::<f64>::unit(&g);
        let err = unraveled_ball_with(&g, &w, 4, 10, NodeBudget(1000)).unwrap_err();
        assert!(matches!(&err, Error::Resource(m) if m.contains("v=4") && m.contains("r=10")));
        assert!(walk_forest_with(&g, &w, 6, NodeBudget(1000)).is_err());
        assert!(nb_walks_with(&g, 0, 12, NodeBudget(1000)).is_err());
    }

    #[test]
    fn forest_shapes() {
        let c4 = Graph::cycle(4).unwrap();
        let f = walk_forest(&c4, &EdgeWeights::<f64>::unit(&c4), 1).unwrap();
        assert_eq!(f.component_count(), 8);
        assert_eq!(f.node_count(), 16);
        for k in 0..8 {
            let c = f.component(k);
            assert_eq!(c.len(), 2);
            assert!(f.forest().has_edge(c.start, c.start + 1));
        }

        let k4 = Graph::complete(4);
        let f = walk_forest(&k4, &EdgeWeights::<f64>::unit(&k4), 1).unwrap();
        assert_eq!(f.component_count(), 12);
        for k in 0..12 {
            let c = f.component(k);
            assert_eq!(c.len(), 3);
            assert_eq!(f.forest().deg(c.start), 2);
            assert_eq!(f.depth(c.start), 1);
            assert_eq!(f.depth(c.start + 1), 2);
        }

        let p2 = Graph::path(2);
        let f = walk_forest(&p2, &EdgeWeights::<f64>::unit(&p2), 1).unwrap();
        assert_eq!(f.node_count(), 2);
        assert_eq!(f.forest().edge_count(), 0);

        assert!(matches!(
            walk_forest(&Graph::empty(2), &EdgeWeights::<f64>::unit(&Graph::empty(2)), 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn forest_embeds_into_unraveled_balls() {
        let g = Graph::petersen();
        let w = EdgeWeights::from_fn(&g, |u, v| 1.0 / (1 + u + v) as f64).unwrap();
        let r = 2;
        let f = walk_forest(&g, &w, r).unwrap();
        let balls: Vec<_> = g.vertices().map(|v| unraveled_ball(&g, &w, v, r).unwrap()).collect();
        for x in 0..f.node_count() {
            let k = f.component_of(x);
            let e = &f.edge_walks()[k];
            assert!(f.component(k).contains(&x));
            assert_eq!(f.label(x).vertices()[..2], e.vertices()[..]);
            let ball = &balls[e.vertices()[1]];
            let y = f.embed_in(x, ball).unwrap();
            assert_eq!(ball.covering(y), f.covering(x));
            if let Some(p) = f.parent(x) {
                let py = f.embed_in(p, ball).unwrap();
                assert_eq!(ball.parent(y), Some(py));
                assert_eq!(
                    f.lifted_weights().weight(p, x),
                    ball.lifted_weights().weight(py, y)
                );
            }
        }
    }

    #[test]
    fn document_carries_labels() {
        let g = Graph::cycle(5).unwrap();
        let ball = unit_ball(&g, 2, 2);
        let doc = ball.to_document();
        assert_eq!(doc.root, Some(0));
        let nodes = doc.nodes.as_ref().unwrap();
        assert_eq!(nodes[3].label, vec![2, 1, 0]);
        assert_eq!(nodes[3].covering, 0);
        let back = GraphDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_graph().unwrap().0, *ball.tree());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..8, proptest::collection::vec(any::<bool>(), 28)).prop_map(|(n, mask)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ball_invariants(g in arb_graph(), r in 0usize..5) {
            let w = EdgeWeights::from_fn(&g, |u, v| 0.25 + (3 * u + v) as f64 / 8.0).unwrap();
            for v in g.vertices() {
                let ball = unraveled_ball(&g, &w, v, r).unwrap();
                prop_assert!(ball.tree().is_tree());
                prop_assert!(covering_map_check(&ball, &g, &w));
                let counts = nb_walk_counts(&g, v, r).unwrap();
                let sizes: Vec<u128> = ball.level_sizes().iter().map(|&s| s as u128).collect();
                prop_assert_eq!(&sizes, &counts);
                for x in 0..ball.node_count() {
                    let label = ball.label(x);
                    prop_assert_eq!(label.len(), ball.depth(x));
                    prop_assert_eq!(label.end(), ball.covering(x));
                    prop_assert!(NbWalk::new(&g, label.vertices().to_vec()).is_ok());
                    prop_assert_eq!(ball.find(&label), Some(x));
                    if let Some(p) = ball.parent(x) {
                        prop_assert_eq!(Some(ball.label(p)), label.truncated());
                    }
                }
                if r > 0 {
                    let smaller = unraveled_ball(&g, &w, v, r - 1).unwrap();
                    let k = ball.prefix_len(r - 1);
                    prop_assert_eq!(k, smaller.node_count());
                    prop_assert_eq!(&ball.covering_map()[..k], smaller.covering_map());
                    for x in 1..k {
                        prop_assert_eq!(ball.parent(x), smaller.parent(x));
                        let p = ball.parent(x).unwrap();
                        prop_assert_eq!(
                            ball.lifted_weights().weight(p, x),
                            smaller.lifted_weights().weight(p, x)
                        );
                    }
                }
            }
        }

        #[test]
        fn regular_level_counts(r in 1usize..6) {
            for (g, d) in [(Graph::complete(4), 3usize), (Graph::petersen(), 3)] {
                let sizes = unit_ball(&g, 0, r).level_sizes();
                for (i, &s) in sizes.iter().enumerate().skip(1) {
                    prop_assert_eq!(s, d * (d - 1).pow(i as u32 - 1));
                }
            }
        }

        #[test]
        fn cycles_unravel_to_paths(n in 3usize..13, r in 0usize..7) {
            let c = Graph::cycle(n).unwrap();
            let ball = unit_ball(&c, n / 2, r);
            let p = Graph::path(2 * r + 1);
            prop_assert!(rooted_isomorphic(
                (ball.tree(), 0, ball.lifted_weights()),
                (&p, r, &EdgeWeights::unit(&p))
            ));
            prop_assert!(unrooted_isomorphic(
                (ball.tree(), ball.lifted_weights()),
                (&p, &EdgeWeights::unit(&p))
            ));
        }
    }
}
