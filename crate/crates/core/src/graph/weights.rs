use serde::{Deserialize, Serialize};

use super::{Graph, InducedSubgraph};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Strictly positive weights on exactly the edges of a graph.
///
/// Keys are stored as `(u, v)` with `u < v` in lexicographic order, the same
/// order [`Graph::edges`] yields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeights<T = f64> {
    keys: Vec<(usize, usize)>,
    values: Vec<T>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl<T: Real> EdgeWeights<T> {
    /// Weight 1 on every edge.
    pub fn unit(g: &Graph) -> Self {
        Self::constant(g, T::one()).expect("1 is positive")
    }

    pub fn constant(g: &Graph, value: T) -> Result<Self> {
        Self::from_fn(g, |_, _| value)
    }

    /// Weights computed per edge `(u, v)`, `u < v`.
    pub fn from_fn(g: &Graph, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let keys: Vec<_> = g.edges().collect();
        let values: Vec<T> = keys.iter().map(|&(u, v)| f(u, v)).collect();
        Self::from_parts(keys, values)
    }

    /// Weights aligned with [`Graph::edges`] order.
    pub fn from_edge_values(g: &Graph, values: Vec<T>) -> Result<Self> {
        if values.len() != g.edge_count() {
            return Err(Error::input(format!(
                "expected {} edge weights, got {}",
                g.edge_count(),
                values.len()
            )));
        }
        Self::from_parts(g.edges().collect(), values)
    }

    /// Weights given as an unordered list of `(u, v, w)`; the domain must be
    /// exactly the edge set of `g`.
    pub fn from_triples(g: &Graph, triples: &[(usize, usize, T)]) -> Result<Self> {
        let mut items: Vec<((usize, usize), T)> =
            triples.iter().map(|&(u, v, w)| (key(u, v), w)).collect();
        items.sort_by_key(|a| a.0);
        for w in items.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::input(format!("edge {:?} weighted twice", w[0].0)));
            }
        }
        let expected: Vec<_> = g.edges().collect();
        if items.len() != expected.len() || items.iter().zip(&expected).any(|(a, b)| a.0 != *b) {
            let missing = expected
                .iter()
                .find(|e| items.binary_search_by(|(k, _)| k.cmp(e)).is_err());
            return Err(match missing {
                Some(e) => Error::input(format!("missing weight for edge {e:?}")),
                None => Error::input("weight given for a pair that is not an edge"),
            });
        }
        let (keys, values) = items.into_iter().unzip();
        Self::from_parts(keys, values)
    }

    fn from_parts(keys: Vec<(usize, usize)>, values: Vec<T>) -> Result<Self> {
        if let Some((i, w)) = values
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > T::zero()))
        {
            return Err(Error::input(format!(
                "edge weight {w} on {:?} is not strictly positive",
                keys[i]
            )));
        }
        Ok(EdgeWeights { keys, values })
    }

    /// Checks that the domain is exactly `E(g)`.
    pub fn validate_for(&self, g: &Graph) -> Result<()> {
        if self.keys.len() != g.edge_count() || !self.keys.iter().copied().eq(g.edges()) {
            return Err(Error::input(
                "edge weights are not defined on exactly the edges of the graph",
            ));
        }
        Ok(())
    }

    pub fn get(&self, u: usize, v: usize) -> Option<T> {
        self.keys
            .binary_search(&key(u, v))
            .ok()
            .map(|i| self.values[i])
    }

    /// Weight of an edge known to exist; panics otherwise.
    pub fn weight(&self, u: usize, v: usize) -> T {
        self.get(u, v)
            .unwrap_or_else(|| panic!("no weight for ({u}, {v})"))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.keys.iter().copied().zip(self.values.iter().copied())
    }

    /// Values in [`Graph::edges`] order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Restriction to an induced subgraph, re-keyed to local ids.
    pub fn restrict(&self, sub: &InducedSubgraph) -> Self {
        let keys: Vec<_> = sub.graph.edges().collect();
        let values = keys
            .iter()
            .map(|&(u, v)| self.weight(sub.to_parent(u), sub.to_parent(v)))
            .collect();
        EdgeWeights { keys, values }
    }

    /// Every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        Self::from_parts(
            self.keys.clone(),
            self.values.iter().map(|&w| w * factor).collect(),
        )
    }

    /// Test hook: overwrite one weight without the positivity check.
    #[doc(hidden)]
    pub fn set_unchecked(&mut self, u: usize, v: usize, w: T) {
        let i = self.keys.binary_search(&key(u, v)).expect("edge exists");
        self.values[i] = w;
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> EdgeWeights<U> {
        EdgeWeights {
            keys: self.keys.clone(),
            values: self.values.iter().map(|&w| f(w)).collect(),
        }
    }
}

/// Strictly positive weights on every vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexWeighting<T = f64>(Vec<T>);

impl<T: Real> VertexWeighting<T> {
    pub fn new(g: &Graph, values: Vec<T>) -> Result<Self> {
        if values.len() != g.vertex_count() {
            return Err(Error::input(format!(
                "vertex weighting has {} values for {} vertices",
                values.len(),
                g.vertex_count()
            )));
        }
        if let Some((v, x)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !(x.is_finite() && **x > T::zero()))
        {
            return Err(Error::input(format!(
                "vertex weight {x} at {v} is not strictly positive"
            )));
        }
        Ok(VertexWeighting(values))
    }

    pub fn ones(g: &Graph) -> Self {
        VertexWeighting(vec![T::one(); g.vertex_count()])
    }

    /// g(v) = d(v); requires min degree >= 1.
    pub fn degrees(g: &Graph) -> Result<Self> {
        Self::new(g, g.degrees().into_iter().map(|d| T::lit(d as f64)).collect())
    }

    pub fn get(&self, v: usize) -> T {
        self.0[v]
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn restrict(&self, sub: &InducedSubgraph) -> Self {
        VertexWeighting(sub.original.iter().map(|&v| self.0[v]).collect())
    }

    pub fn scaled(&self, factor: T) -> Result<Self> {
        let values: Vec<T> = self.0.iter().map(|&x| x * factor).collect();
        if values.iter().any(|x| !(x.is_finite() && *x > T::zero())) {
            return Err(Error::input("scaled vertex weighting is not strictly positive"));
        }
        Ok(VertexWeighting(values))
    }
}
