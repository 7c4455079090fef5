//! Verdicts for the earlier second-eigenvalue bounds the new ones are
//! compared against.

use super::{
    alon_boppana_rhs, hoory_rhs, jiang_rhs, norm_ab_rhs, young_rhs, BoundVerdict, Direction, TheoremId,
    Witness,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::robustness::{max_robust_params, r_robust_average_degree, RobustDegree, RobustOptions};
use crate::scalar::{ratio_to_f64, Rational};
use crate::spectra::{adjacency_matrix, normalized_laplacian_spectrum, spectrum, Spectrum};

fn adjacency_spectrum(g: &Graph) -> Result<Spectrum> {
    if g.vertex_count() < 2 {
        return Err(Error::input("second eigenvalue needs at least two vertices"));
    }
    spectrum(&adjacency_matrix::<f64>(g))
}

fn regular_degree(g: &Graph) -> Result<usize> {
    match (g.min_degree(), g.max_degree()) {
        (Some(a), Some(b)) if a == b => Ok(a),
        _ => Err(Error::precondition("graph is not regular")),
    }
}

fn robust_degree(g: &Graph, r: usize) -> Result<Rational> {
    match r_robust_average_degree(g, r)? {
        RobustDegree::Value { degree, .. } => Ok(degree),
        RobustDegree::EmptyRemainder { center } => Err(Error::precondition(match center {
            Some(v) => format!("deleting the radius-{r} ball at {v} leaves nothing"),
            None => "graph is empty".into(),
        })),
    }
}

/// Two edges whose closest endpoints are at distance `≥ 2k+2`, smallest
/// first edge in edge order.
fn far_edge_pair(g: &Graph, k: usize) -> Option<[usize; 4]> {
    let dist: Vec<Vec<Option<usize>>> = g
        .vertices()
        .map(|v| g.distances_from(v, None).expect("vertex in range"))
        .collect();
    let far = |a: usize, b: usize| dist[a][b].is_none_or(|x| x >= 2 * k + 2);
    let edges: Vec<(usize, usize)> = g.edges().collect();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if far(a, c) && far(a, d) && far(b, c) && far(b, d) {
                return Some([a, b, c, d]);
            }
        }
    }
    None
}

/// `λ₂ ≥ 2√(d−1)(1 − 1/(k+1)) + 1/(k+1)` for `d`-regular graphs with two
/// edges at distance `≥ 2k+2`.
pub fn verify_alon_boppana(g: &Graph, k: usize) -> Result<BoundVerdict> {
    let d = regular_degree(g)?;
    let pair = far_edge_pair(g, k)
        .ok_or_else(|| Error::precondition(format!("no two edges at distance ≥ {}", 2 * k + 2)))?;
    let rhs = alon_boppana_rhs(d as f64, k)?;
    let lhs = adjacency_spectrum(g)?.nth(2).expect("n ≥ 2");
    Ok(BoundVerdict::new(TheoremId::AlonBoppana, lhs, rhs, Direction::AtLeast)
        .with_witness(Witness::Vertices(pair.to_vec()))
        .natural("d", d)
        .natural("k", k))
}

/// `λ₂ ≥ 2√(d−1)·cos(π/(r+1))` with `d` the `r`-robust average degree.
pub fn verify_jiang(g: &Graph, r: usize) -> Result<BoundVerdict> {
    let d = robust_degree(g, r)?;
    if d < Rational::from_integer(1) {
        return Err(Error::precondition(format!("{r}-robust average degree {d} is below 1")));
    }
    let rhs = jiang_rhs(ratio_to_f64(&d), r)?;
    let lhs = adjacency_spectrum(g)?.nth(2).expect("n ≥ 2");
    Ok(BoundVerdict::new(TheoremId::Jiang, lhs, rhs, Direction::AtLeast)
        .natural("r", r)
        .exact("d", d))
}

/// `max(λ₂, |λ_n|) ≥ 2√(d−1)(1 − c·log r/r)` for a caller-supplied `c`.
pub fn verify_hoory(g: &Graph, r: usize, c: f64) -> Result<BoundVerdict> {
    let d = robust_degree(g, r)?;
    if d < Rational::from_integer(2) {
        return Err(Error::precondition(format!("{r}-robust average degree {d} is below 2")));
    }
    let rhs = hoory_rhs(ratio_to_f64(&d), r, c)?;
    let spec = adjacency_spectrum(g)?;
    let lambda_n = *spec.eigenvalues.last().expect("n ≥ 2");
    let lhs = spec.nth(2).expect("n ≥ 2").max(lambda_n.abs());
    Ok(BoundVerdict::new(TheoremId::Hoory, lhs, rhs, Direction::AtLeast)
        .natural("r", r)
        .exact("d", d)
        .real("c", c)
        .flag("constant-supplied"))
}

/// `μ₂ ≤ 1 − (2√(d−1)/d̃)(1 − c·log r/r)` with the tightest single-deletion
/// `(d, d̃)` and a caller-supplied `c`.
pub fn verify_young(g: &Graph, r: usize, c: f64) -> Result<BoundVerdict> {
    let p = max_robust_params(g, r, 1, RobustOptions::default())?;
    if p.d_max < Rational::from_integer(2) || p.dtilde_min < p.d_max {
        return Err(Error::precondition(format!(
            "need d̃ ≥ d ≥ 2, tightest parameters are d = {}, d̃ = {}",
            p.d_max, p.dtilde_min
        )));
    }
    let rhs = young_rhs(ratio_to_f64(&p.d_max), ratio_to_f64(&p.dtilde_min), r, c)?;
    let lhs = normalized_laplacian_spectrum::<f64>(g)?.nth(2).ok_or_else(|| Error::input("graph has one vertex"))?;
    Ok(BoundVerdict::new(TheoremId::Young, lhs, rhs, Direction::AtMost)
        .natural("r", r)
        .exact("d", p.d_max)
        .exact("dtilde", p.dtilde_min)
        .real("c", c)
        .flag("constant-supplied"))
}

/// `μ₂ ≤ 1 − 2√(d−1)/d` for `d`-regular graphs, leading term only.
pub fn verify_norm_ab(g: &Graph) -> Result<BoundVerdict> {
    let d = regular_degree(g)?;
    if d == 0 {
        return Err(Error::precondition("graph has no edges"));
    }
    let rhs = norm_ab_rhs(d as f64)?;
    let lhs = normalized_laplacian_spectrum::<f64>(g)?.nth(2).ok_or_else(|| Error::input("graph has one vertex"))?;
    Ok(BoundVerdict::new(TheoremId::NormalizedAlonBoppana, lhs, rhs, Direction::AtMost)
        .natural("d", d)
        .flag("asymptotic-only"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn long_cycle_alon_boppana() {
        let c = Graph::cycle(20).unwrap();
        let v = verify_alon_boppana(&c, 3).unwrap();
        assert!(v.pass);
        assert_abs_diff_eq!(v.rhs, 2.0 * 0.75 + 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(v.lhs, 2.0 * (std::f64::consts::PI / 10.0).cos(), epsilon = 1e-10);
        assert!(matches!(verify_alon_boppana(&c, 8), Err(Error::Precondition(_))));
        assert!(matches!(verify_alon_boppana(&Graph::path(9), 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn edge_distance_is_closest_endpoints() {
        // P6: edges 01 and 45 have closest endpoints 1 and 4 at distance 3
        let p = Graph::path(6);
        assert!(far_edge_pair(&p, 0).is_some());
        assert_eq!(far_edge_pair(&Graph::path(4), 0), None);
        assert_eq!(far_edge_pair(&Graph::cycle(10).unwrap(), 1), Some([0, 1, 5, 6]));
    }

    #[test]
    fn petersen_jiang_and_norm_ab() {
        let p = Graph::petersen();
        let v = verify_jiang(&p, 1).unwrap();
        assert!(v.pass);
        assert_abs_diff_eq!(v.lhs, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v.rhs, 0.0, epsilon = 1e-15);
        let n = verify_norm_ab(&p).unwrap();
        assert!(n.is_asymptotic_only());
        assert_abs_diff_eq!(n.lhs, 2.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(n.rhs, 1.0 - 2.0 * 2f64.sqrt() / 3.0, epsilon = 1e-15);
        assert!(!n.pass);
    }

    #[test]
    fn hoory_and_young_with_zero_constant() {
        let g = Graph::petersen().disjoint_union(&Graph::petersen());
        // any radius-2 ball is a whole Petersen component
        let h = verify_hoory(&g, 2, 0.0).unwrap();
        assert_abs_diff_eq!(h.rhs, 2.0 * 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(h.lhs, 3.0, epsilon = 1e-10);
        assert!(h.pass);
        assert!(h.flags.contains(&"constant-supplied".to_string()));
        let g = Graph::complete(8);
        assert!(matches!(verify_young(&g, 2, 0.0), Err(Error::Domain(_))));
        let c = Graph::cycle(12).unwrap();
        assert!(matches!(verify_young(&c, 2, 0.5), Err(Error::Precondition(_))));
    }
}
