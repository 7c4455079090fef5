//! The `s`-th eigenvalue bounds under `(r, d, d̃, s−1)`-robustness.

use serde::{Deserialize, Serialize};

use super::radius::{ball_radius, max_ball_radius};
use super::{lemma4_rhs, thm2_rhs, thm3_rhs, BoundVerdict, Direction, SubCheck, TheoremId, Witness, SLACK};
use crate::error::{Error, Result};
use crate::graph::{average_degree, second_order_average_degree, Graph, InducedSubgraph};
use crate::robustness::{BallMetric, RobustStatus, RobustnessCertificate};
use crate::scalar::{ratio_to_f64, Rational};
use crate::spectra::{
    jacobi_eigen, normalized_laplacian_spectrum, normalized_weights, spectral_radius_detailed, spectrum,
    weighted_adjacency, JacobiOptions, PowerOptions, SymMatrix,
};

/// The disjoint balls `G_1, …, G_s` and their Perron vectors, in input ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Construction {
    pub centers: Vec<usize>,
    pub balls: Vec<Vec<usize>>,
    /// `λ₁(G_i, w₀)`
    pub ball_radii: Vec<f64>,
    /// Unit Perron vector of `G_i`, indexed like `balls[i]`.
    pub vectors: Vec<Vec<f64>>,
    /// Smallest eigenvalue of `⟨g_i, A(G, w₀) g_j⟩`, i.e. the minimum
    /// Rayleigh quotient over the span.
    pub min_quotient: f64,
    #[serde(skip)]
    checks: Vec<SubCheck>,
}

fn validate(g: &Graph, r: usize, s: usize, cert: &RobustnessCertificate) -> Result<(Rational, Rational)> {
    let fail = |msg: String| Err(Error::precondition(msg));
    if r == 0 {
        return Err(Error::input("radius must be at least 1"));
    }
    if s < 2 {
        return Err(Error::input("s must be at least 2"));
    }
    if !cert.is_certified() {
        return fail("certificate does not certify robustness".into());
    }
    if cert.graph_digest != g.digest() {
        return fail("certificate was issued for a different graph".into());
    }
    if cert.r != r || cert.s + 1 != s {
        return fail(format!(
            "certificate covers (r={}, s={}), need (r={r}, s={})",
            cert.r,
            cert.s,
            s - 1
        ));
    }
    if cert.metric != BallMetric::Current {
        return fail("certificate must use current-graph balls".into());
    }
    let (d, dt) = (cert.required_d, cert.required_dtilde);
    if d < Rational::from_integer(2) || dt < d {
        return fail(format!("need d̃ ≥ d ≥ 2, certificate has d = {d}, d̃ = {dt}"));
    }
    if g.vertex_count() < s {
        return fail(format!("graph has fewer than {s} vertices"));
    }
    Ok((d, dt))
}

/// Re-runs the sequential construction: at step `i`, `H_i` is the current
/// graph after `s−i` further deletions (each centered at the smallest
/// surviving id), `v_i ∈ H_i` maximizes `λ₁(G^{(i−1)}(v, r−1), w₀)`,
/// `G_i = G^{(i−1)}(v_i, r−1)` and `G^{(i)} = G^{(i−1)} − G^{(i−1)}(v_i, r)`.
pub fn lemma4_construction(g: &Graph, r: usize, s: usize, d: Rational, dt: Rational) -> Result<Lemma4Construction> {
    let w0 = normalized_weights::<f64>(g);
    let rhs = lemma4_rhs(ratio_to_f64(&d), ratio_to_f64(&dt), r)?;
    let mut checks = Vec::new();
    let mut cur = InducedSubgraph::whole(g);
    let (mut centers, mut balls, mut ball_radii, mut vectors) = (vec![], vec![], vec![], vec![]);
    for i in 1..=s {
        let mut h = cur.clone();
        for _ in 0..s - i {
            if h.graph.is_empty() {
                break;
            }
            h = h.compose(h.graph.delete_ball(0, r)?);
        }
        let (hd, hdt) = match (average_degree(&h.graph), second_order_average_degree(&h.graph)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                return Err(Error::precondition(format!(
                    "step {i}: remainder has no edges, robustness does not hold"
                )))
            }
        };
        let (hdf, hdtf) = (ratio_to_f64(&hd), ratio_to_f64(&hdt));
        checks.push(SubCheck::new(format!("step{i}-remainder-degree"), hdf, ratio_to_f64(&d), Direction::AtLeast, 0.0));
        checks.push(SubCheck::new(format!("step{i}-remainder-second-order"), hdtf, ratio_to_f64(&dt), Direction::AtMost, 0.0));
        if hd >= Rational::from_integer(2) {
            let own = max_ball_radius(&h.graph, &normalized_weights::<f64>(&h.graph), r - 1)?;
            checks.push(SubCheck::new(
                format!("step{i}-remainder-ball-bound"),
                own.max,
                thm3_rhs(hdf, hdtf, r - 1)?,
                Direction::AtLeast,
                SLACK,
            ));
        }

        let wc = w0.restrict(&cur);
        let mut best: Option<(usize, f64)> = None;
        for &v in &h.original {
            let local = cur.to_local(v).expect("H_i is a subgraph of the current graph");
            let x = ball_radius(&cur.graph, &wc, local, r - 1)?;
            if best.is_none_or(|(_, b)| x > b) {
                best = Some((local, x));
            }
        }
        let (vc, _) = best.ok_or_else(|| Error::precondition(format!("step {i}: remainder is empty")))?;
        let ball = cur.compose(cur.graph.ball(vc, r - 1)?);
        let pr = spectral_radius_detailed(&ball.graph, &w0.restrict(&ball), PowerOptions::default())?;
        checks.push(SubCheck::new(format!("step{i}-ball"), pr.value, rhs, Direction::AtLeast, SLACK));
        centers.push(cur.to_parent(vc));
        ball_radii.push(pr.value);
        vectors.push(pr.vector);
        balls.push(ball.original);
        cur = cur.compose(cur.graph.delete_ball(vc, r)?);
    }

    let mut owner = vec![usize::MAX; g.vertex_count()];
    let mut disjoint = true;
    for (i, b) in balls.iter().enumerate() {
        for &v in b {
            disjoint &= owner[v] == usize::MAX;
            owner[v] = i;
        }
    }
    let separated = g
        .edges()
        .all(|(u, v)| owner[u] == owner[v] || owner[u] == usize::MAX || owner[v] == usize::MAX);
    checks.push(SubCheck::flag("disjoint", disjoint));
    checks.push(SubCheck::flag("non-adjacent", separated));

    let n = g.vertex_count();
    let lift = |i: usize| {
        let mut x = vec![0.0; n];
        for (&v, &f) in balls[i].iter().zip(&vectors[i]) {
            x[v] += f;
        }
        x
    };
    let lifted: Vec<Vec<f64>> = (0..s).map(lift).collect();
    let a = weighted_adjacency(g, &w0)?;
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let mut gram_dev = 0.0f64;
    let mut quad = Vec::with_capacity(s * s);
    for i in 0..s {
        let ai = a.matvec(&lifted[i]);
        for j in 0..s {
            let delta = if i == j { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((dot(&lifted[i], &lifted[j]) - delta).abs());
            quad.push(dot(&ai, &lifted[j]));
        }
    }
    // symmetrize the rounding
    let quad = SymMatrix::from_rows(
        &(0..s)
            .map(|i| (0..s).map(|j| 0.5 * (quad[i * s + j] + quad[j * s + i])).collect())
            .collect::<Vec<Vec<f64>>>(),
    )?;
    let eig = jacobi_eigen(&quad, JacobiOptions::default())?;
    let min_quotient = *eig.values.last().expect("s ≥ 2");
    checks.push(SubCheck::new("orthonormal", gram_dev, 0.0, Direction::AtMost, SLACK));
    checks.push(SubCheck::new("subspace-min-quotient", min_quotient, rhs, Direction::AtLeast, SLACK));
    Ok(Lemma4Construction {
        centers,
        balls,
        ball_radii,
        vectors,
        min_quotient,
        checks,
    })
}

/// `λ_s(A(G, w₀)) ≥ (2√(d−1)/d̃)·cos(π/(r+1))` given a certificate of
/// `(r, d, d̃, s−1)`-robustness.
pub fn verify_lemma4(g: &Graph, r: usize, s: usize, cert: &RobustnessCertificate) -> Result<BoundVerdict> {
    let (d, dt) = validate(g, r, s, cert)?;
    let rhs = lemma4_rhs(ratio_to_f64(&d), ratio_to_f64(&dt), r)?;
    let lambda = spectrum(&weighted_adjacency(g, &normalized_weights::<f64>(g))?)?;
    let lhs = lambda.nth(s).expect("n ≥ s checked");
    let built = lemma4_construction(g, r, s, d, dt)?;
    let mut v = BoundVerdict::new(TheoremId::Lemma4, lhs, rhs, Direction::AtLeast)
        .with_witness(Witness::Vertices(built.centers.clone()))
        .natural("r", r)
        .natural("s", s)
        .exact("d", d)
        .exact("dtilde", dt)
        .real("min_quotient", built.min_quotient);
    if cert.status == RobustStatus::CertifiedSampled {
        v = v.flag("sampled-certificate");
    }
    for c in built.checks {
        v = v.check(c);
    }
    Ok(v)
}

/// `μ_s ≤ 1 − (2√(d−1)/d̃)·cos(π/(r+1))` given a certificate of
/// `(r, d, d̃, s−1)`-robustness.
pub fn verify_thm2(g: &Graph, r: usize, s: usize, cert: &RobustnessCertificate) -> Result<BoundVerdict> {
    let (d, dt) = validate(g, r, s, cert)?;
    let rhs = thm2_rhs(ratio_to_f64(&d), ratio_to_f64(&dt), r)?;
    let mu = normalized_laplacian_spectrum::<f64>(g)?;
    let lambda = spectrum(&weighted_adjacency(g, &normalized_weights::<f64>(g))?)?;
    let (mu_s, lambda_s) = (mu.nth(s).expect("n ≥ s"), lambda.nth(s).expect("n ≥ s"));
    let mut v = BoundVerdict::new(TheoremId::Thm2, mu_s, rhs, Direction::AtMost)
        .natural("r", r)
        .natural("s", s)
        .exact("d", d)
        .exact("dtilde", dt)
        .check(SubCheck::new("laplacian-identity", mu_s + lambda_s, 1.0, Direction::Equal, SLACK));
    if rhs >= 1.0 {
        v = v.flag("vacuous");
    }
    if cert.status == RobustStatus::CertifiedSampled {
        v = v.flag("sampled-certificate");
    }
    Ok(v)
}
