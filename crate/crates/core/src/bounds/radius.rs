//! Per-vertex spectral radii of balls and unraveled balls.

use rayon::prelude::*;

use crate::cover::{unraveled_ball_with, NodeBudget};
use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph};
use crate::scalar::Real;
use crate::spectra::spectral_radius;

/// `λ₁(G̃(v, r), w)`.
pub fn unraveled_radius<T: Real>(
    g: &Graph,
    w: &EdgeWeights<T>,
    v: usize,
    r: usize,
    budget: NodeBudget,
) -> Result<T> {
    let ball = unraveled_ball_with(g, w, v, r, budget)?;
    spectral_radius(ball.tree(), ball.lifted_weights())
}

/// `λ₁(G(v, r), w)` with `w` restricted to the ball.
pub fn ball_radius<T: Real>(g: &Graph, w: &EdgeWeights<T>, v: usize, r: usize) -> Result<T> {
    let ball = g.ball(v, r)?;
    spectral_radius(&ball.graph, &w.restrict(&ball))
}

/// One value per vertex plus the maximum; ties go to the smallest id.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusProfile<T = f64> {
    pub values: Vec<T>,
    pub argmax: usize,
    pub max: T,
}

impl<T: Real> RadiusProfile<T> {
    fn from_values(values: Vec<T>) -> Result<Self> {
        let mut argmax = 0;
        for (v, &x) in values.iter().enumerate() {
            if x > values[argmax] {
                argmax = v;
            }
        }
        let max = *values
            .get(argmax)
            .ok_or_else(|| Error::input("graph has no vertices"))?;
        Ok(RadiusProfile { values, argmax, max })
    }
}

pub fn max_unraveled_radius<T: Real>(
    g: &Graph,
    w: &EdgeWeights<T>,
    r: usize,
    budget: NodeBudget,
) -> Result<RadiusProfile<T>> {
    w.validate_for(g)?;
    let values = g
        .vertices()
        .into_par_iter()
        .map(|v| unraveled_radius(g, w, v, r, budget))
        .collect::<Result<Vec<_>>>()?;
    RadiusProfile::from_values(values)
}

pub fn max_ball_radius<T: Real>(g: &Graph, w: &EdgeWeights<T>, r: usize) -> Result<RadiusProfile<T>> {
    w.validate_for(g)?;
    let values = g
        .vertices()
        .into_par_iter()
        .map(|v| ball_radius(g, w, v, r))
        .collect::<Result<Vec<_>>>()?;
    RadiusProfile::from_values(values)
}
