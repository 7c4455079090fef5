//! Text and JSON graph formats.
//!
//! Edge list: first data line `n m`, then `m` lines `u v` or `u v weight`,
//! 0-based ids, `#` starts a comment line. Either every edge carries a weight
//! or none does.
//!
//! JSON graph document (`schema: 1`):
//!
//! ```json
//! { "schema": 1, "n": 3, "edges": [[0, 1], [1, 2]],
//!   "weights": [0.5, 2.0],
//!   "root": 0,
//!   "nodes": [{ "label": [0], "covering": 0 }, ...] }
//! ```
//!
//! `weights`, `root` and `nodes` are optional. Edges are written in
//! lexicographic `(u < v)` order; floats use shortest round-trip formatting so
//! a document survives parse/serialize byte-for-byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{EdgeWeights, Graph};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Per-node attributes carried by unraveled balls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAttributes {
    pub label: Vec<usize>,
    pub covering: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub schema: u32,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeAttributes>>,
}

impl GraphDocument {
    pub fn new(g: &Graph, weights: Option<&EdgeWeights>) -> Self {
        GraphDocument {
            schema: SCHEMA_VERSION,
            n: g.vertex_count(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            weights: weights.map(|w| w.values().to_vec()),
            root: None,
            nodes: None,
        }
    }

    pub fn to_graph(&self) -> Result<(Graph, Option<EdgeWeights>)> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::input(format!(
                "unsupported graph schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Graph::from_edges(self.n, &edges)?;
        let weights = match &self.weights {
            None => None,
            Some(ws) => {
                if ws.len() != edges.len() {
                    return Err(Error::input(format!(
                        "{} weights for {} edges",
                        ws.len(),
                        edges.len()
                    )));
                }
                let triples: Vec<_> = edges
                    .iter()
                    .zip(ws)
                    .map(|(&(u, v), &w)| (u, v, w))
                    .collect();
                Some(EdgeWeights::from_triples(&g, &triples)?)
            }
        };
        if let Some(nodes) = &self.nodes {
            if nodes.len() != self.n {
                return Err(Error::input(format!(
                    "{} node records for {} vertices",
                    nodes.len(),
                    self.n
                )));
            }
        }
        Ok((g, weights))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Parses the edge-list format; errors carry 1-based line numbers.
pub fn parse_edge_list(text: &str) -> Result<(Graph, Option<EdgeWeights>)> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut weighted: Option<bool> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |what: &str| Error::input(format!("line {line_no}: {what}: `{line}`"));
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(bad("expected header `n m`"));
                }
                let n = fields[0].parse().map_err(|_| bad("invalid vertex count"))?;
                let m = fields[1].parse().map_err(|_| bad("invalid edge count"))?;
                header = Some((n, m));
            }
            Some((n, m)) => {
                if edges.len() == m {
                    return Err(bad(&format!("more than the declared {m} edges")));
                }
                if fields.len() != 2 && fields.len() != 3 {
                    return Err(bad("expected `u v` or `u v weight`"));
                }
                let has_weight = fields.len() == 3;
                if *weighted.get_or_insert(has_weight) != has_weight {
                    return Err(bad("mixed weighted and unweighted edges"));
                }
                let u: usize = fields[0].parse().map_err(|_| bad("invalid vertex id"))?;
                let v: usize = fields[1].parse().map_err(|_| bad("invalid vertex id"))?;
                if u >= n || v >= n {
                    return Err(bad(&format!("vertex id out of range 0..{n}")));
                }
                if u == v {
                    return Err(bad("self-loop"));
                }
                if has_weight {
                    let w: f64 = fields[2].parse().map_err(|_| bad("invalid weight"))?;
                    if !(w.is_finite() && w > 0.0) {
                        return Err(bad("weight must be a positive decimal"));
                    }
                    weights.push(w);
                }
                edges.push((u, v));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| Error::input("edge list is empty (missing `n m` header)"))?;
    if edges.len() != m {
        return Err(Error::input(format!(
            "declared {m} edges but found {}",
            edges.len()
        )));
    }
    let g = Graph::from_edges(n, &edges)?;
    let w = if weighted == Some(true) {
        let triples: Vec<_> = edges
            .iter()
            .zip(&weights)
            .map(|(&(u, v), &w)| (u, v, w))
            .collect();
        Some(EdgeWeights::from_triples(&g, &triples)?)
    } else {
        None
    };
    Ok((g, w))
}

pub fn write_edge_list(g: &Graph, weights: Option<&EdgeWeights>) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        match weights {
            Some(w) => writeln!(out, "{u} {v} {}", w.weight(u, v)),
            None => writeln!(out, "{u} {v}"),
        }
        .expect("writing to a String cannot fail");
    }
    out
}
