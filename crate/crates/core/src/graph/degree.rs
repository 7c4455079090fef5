use serde::Serialize;

use super::Graph;
use crate::error::{Error, Result};
use crate::scalar::{ratio_to_f64, Rational};

/// Σ d(v) / |V|, exact. Undefined (domain error) on the empty graph.
pub fn average_degree(g: &Graph) -> Result<Rational> {
    if g.is_empty() {
        return Err(Error::domain("average degree of the empty graph is undefined"));
    }
    Ok(Rational::new(
        2 * g.edge_count() as i64,
        g.vertex_count() as i64,
    ))
}

/// Σ d(u)² / Σ d(u), exact. Undefined (domain error) without edges.
pub fn second_order_average_degree(g: &Graph) -> Result<Rational> {
    if g.edge_count() == 0 {
        return Err(Error::domain(
            "second order average degree of an edgeless graph is undefined",
        ));
    }
    let squares: i64 = g.degrees().iter().map(|&d| (d * d) as i64).sum();
    Ok(Rational::new(squares, 2 * g.edge_count() as i64))
}

/// Both degree statistics with real-valued views.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStats {
    pub vertices: usize,
    pub edges: usize,
    pub average: Option<Rational>,
    pub second_order: Option<Rational>,
}

impl DegreeStats {
    pub fn of(g: &Graph) -> Self {
        DegreeStats {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            average: average_degree(g).ok(),
            second_order: second_order_average_degree(g).ok(),
        }
    }

    pub fn average_f64(&self) -> Option<f64> {
        self.average.as_ref().map(ratio_to_f64)
    }

    pub fn second_order_f64(&self) -> Option<f64> {
        self.second_order.as_ref().map(ratio_to_f64)
    }
}
