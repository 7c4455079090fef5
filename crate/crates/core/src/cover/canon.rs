//! Canonical encodings of weighted trees (AHU with an interning table).
//!
//! A node's code is the interned sorted multiset of `(edge weight, child
//! code)` pairs. Weights enter as `round(w · 1e12)`, so trees whose weights
//! agree to 12 decimal digits get the same code. Codes are only comparable
//! between trees encoded by the same [`TreeCanonizer`].

use std::collections::{HashMap, VecDeque};

use crate::graph::{EdgeWeights, Graph};
use crate::scalar::Real;

const WEIGHT_SCALE: f64 = 1e12;

fn quantize<T: Real>(w: T) -> i64 {
    (w.to_f64_lossy() * WEIGHT_SCALE).round() as i64
}

#[derive(Debug, Default)]
pub struct TreeCanonizer {
    table: HashMap<Vec<(i64, u32)>, u32>,
}

impl TreeCanonizer {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, mut key: Vec<(i64, u32)>) -> u32 {
        key.sort_unstable();
        let next = self.table.len() as u32;
        *self.table.entry(key).or_insert(next)
    }

    /// Code of `g` rooted at `root`, or `None` if `g` is not a tree.
    pub fn rooted<T: Real>(&mut self, g: &Graph, root: usize, w: &EdgeWeights<T>) -> Option<u32> {
        let n = g.vertex_count();
        if root >= n || g.edge_count() + 1 != n {
            return None;
        }
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        parent[root] = root;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in g.neighbors(x) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if order.len() != n {
            return None;
        }
        let mut pending: Vec<Vec<(i64, u32)>> = vec![Vec::new(); n];
        let mut code = 0;
        for &x in order.iter().rev() {
            code = self.intern(std::mem::take(&mut pending[x]));
            if x != root {
                let p = parent[x];
                pending[p].push((quantize(w.get(p, x)?), code));
            }
        }
        Some(code)
    }

    /// Codes of `g` rooted at each of its (one or two) centers, sorted.
    pub fn unrooted<T: Real>(&mut self, g: &Graph, w: &EdgeWeights<T>) -> Option<Vec<u32>> {
        let centers = tree_centers(g)?;
        let mut codes = centers
            .into_iter()
            .map(|c| self.rooted(g, c, w))
            .collect::<Option<Vec<_>>>()?;
        codes.sort_unstable();
        Some(codes)
    }
}

/// Centers of a tree by iterated leaf removal.
fn tree_centers(g: &Graph) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    if n == 0 || g.edge_count() + 1 != n || !g.is_connected() {
        return None;
    }
    if n == 1 {
        return Some(vec![0]);
    }
    let mut deg = g.degrees();
    let mut layer: Vec<usize> = g.vertices().filter(|&v| deg[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &x in &layer {
            for &y in g.neighbors(x) {
                deg[y] -= 1;
                if deg[y] == 1 {
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    Some(layer)
}

/// Weighted rooted-tree isomorphism.
pub fn rooted_isomorphic<T: Real>(
    a: (&Graph, usize, &EdgeWeights<T>),
    b: (&Graph, usize, &EdgeWeights<T>),
) -> bool {
    let mut c = TreeCanonizer::new();
    match (c.rooted(a.0, a.1, a.2), c.rooted(b.0, b.1, b.2)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// Weighted free-tree isomorphism.
pub fn unrooted_isomorphic<T: Real>(a: (&Graph, &EdgeWeights<T>), b: (&Graph, &EdgeWeights<T>)) -> bool {
    let mut c = TreeCanonizer::new();
    match (c.unrooted(a.0, a.1), c.unrooted(b.0, b.1)) {
        (Some(x), Some(y)) => x.iter().any(|code| y.contains(code)),
        _ => false,
    }
}
