//! Executable replica of the test-vector argument behind the unraveled-ball
//! bound: the non-backtracking chain on directed edges, its stationary
//! facts, the vector `f` on the walk forest and the identities that turn
//! `⟨f, Af⟩/⟨f, f⟩` into the closed-form bound.
//!
//! Arcs `(u, v)` are indexed in ascending `(u, v)` order, which is also the
//! component order of [`WalkForest`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{ball_radius, thm1_rhs, unraveled_radius, Direction};
use crate::cover::{unraveled_ball_with, walk_forest_with, NodeBudget, WalkForest};
use crate::error::{Error, Result};
use crate::graph::io::GraphDocument;
use crate::graph::{EdgeWeights, Graph, VertexWeighting};
use crate::rng;
use crate::spectra::{path_spectral_data, spectral_radius, SparseSym};

/// Default horizon of [`chain_facts`].
pub const DEFAULT_I_MAX: usize = 6;
/// Absolute tolerance of the stationary laws.
pub const CHAIN_TOL: f64 = 1e-12;
/// Relative tolerance of the identities.
pub const IDENTITY_TOL: f64 = 1e-9;

fn require_min2(g: &Graph) -> Result<()> {
    if g.is_empty() {
        return Err(Error::precondition("graph is empty"));
    }
    match g.vertices().find(|&v| g.deg(v) < 2) {
        Some(v) => Err(Error::precondition(format!(
            "the chain has an absorbing state: vertex {v} has degree {}",
            g.deg(v)
        ))),
        None => Ok(()),
    }
}

struct Arcs<'a> {
    g: &'a Graph,
    offset: Vec<usize>,
}

impl<'a> Arcs<'a> {
    fn new(g: &'a Graph) -> Self {
        let mut offset = Vec::with_capacity(g.vertex_count() + 1);
        let mut acc = 0;
        for v in g.vertices() {
            offset.push(acc);
            acc += g.deg(v);
        }
        offset.push(acc);
        Arcs { g, offset }
    }

    fn len(&self) -> usize {
        *self.offset.last().expect("offset has n+1 entries")
    }

    fn id(&self, u: usize, v: usize) -> usize {
        self.offset[u] + self.g.neighbors(u).binary_search(&v).expect("arc exists")
    }

    fn all(&self) -> impl Iterator<Item = (usize, usize)> + 'a {
        let g = self.g;
        g.vertices().flat_map(move |u| g.neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// `(successor arc, probability)` pairs of `(u, v)`.
    fn successors(&self, u: usize, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let p = 1.0 / (self.g.deg(v) - 1) as f64;
        self.g
            .neighbors(v)
            .iter()
            .filter(move |&&z| z != u)
            .map(move |&z| (self.id(v, z), p))
    }
}

/// Builds the transition matrix row by row and checks that rows sum to 1
/// and the uniform law on arcs is stationary, both to [`CHAIN_TOL`].
pub fn nb_transition_check(g: &Graph) -> Result<bool> {
    require_min2(g)?;
    let arcs = Arcs::new(g);
    let m = arcs.len();
    let mut column = vec![0.0; m];
    let mut rows_ok = true;
    for (u, v) in arcs.all() {
        let mut row = 0.0;
        for (k, p) in arcs.successors(u, v) {
            row += p;
            column[k] += p / m as f64;
        }
        rows_ok &= (row - 1.0).abs() <= CHAIN_TOL;
    }
    let stationary = column.iter().all(|&c| (c - 1.0 / m as f64).abs() <= CHAIN_TOL);
    Ok(rows_ok && stationary)
}

/// Exact forward laws of the chain started uniformly on `W₁`. Index `i − 1`
/// of each table holds step `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbChainFacts {
    pub w1_size: usize,
    pub arcs: Vec<(usize, usize)>,
    /// `Pr(E_i = e)` per arc.
    pub edge_dist: Vec<Vec<f64>>,
    /// `Pr(X_i = v)` per vertex.
    pub vertex_dist: Vec<Vec<f64>>,
    /// `Pr(X_{i−1} = v₁, X_i = v₂)` per arc, summed over the previous arc.
    pub pair_dist: Vec<Vec<f64>>,
    /// Largest deviation from `1/|W₁|`, `d(v)/|W₁|` and `1/|W₁|`.
    pub max_deviation: f64,
}

pub fn chain_facts(g: &Graph, i_max: usize) -> Result<NbChainFacts> {
    require_min2(g)?;
    if i_max == 0 {
        return Err(Error::input("i_max must be at least 1"));
    }
    let arcs = Arcs::new(g);
    let m = arcs.len();
    let list: Vec<(usize, usize)> = arcs.all().collect();
    let mut edge = vec![1.0 / m as f64; m];
    let (mut edge_dist, mut vertex_dist, mut pair_dist) = (vec![], vec![], vec![]);
    for i in 1..=i_max {
        let mut vert = vec![0.0; g.vertex_count()];
        for (&(_, v), &p) in list.iter().zip(&edge) {
            vert[v] += p;
        }
        let pair = if i == 1 {
            edge.clone()
        } else {
            // Σ_{u ≠ v₂} Pr(E_{i−1} = (u, v₁))·P((u, v₁), (v₁, v₂))
            let prev: &Vec<f64> = edge_dist.last().expect("i ≥ 2");
            list.iter()
                .map(|&(v1, v2)| {
                    g.neighbors(v1)
                        .iter()
                        .filter(|&&u| u != v2)
                        .map(|&u| prev[arcs.id(u, v1)] / (g.deg(v1) - 1) as f64)
                        .sum()
                })
                .collect()
        };
        let mut next = vec![0.0; m];
        for (k, &(u, v)) in list.iter().enumerate() {
            for (j, p) in arcs.successors(u, v) {
                next[j] += edge[k] * p;
            }
        }
        edge_dist.push(std::mem::replace(&mut edge, next));
        vertex_dist.push(vert);
        pair_dist.push(pair);
    }
    let uniform = 1.0 / m as f64;
    let mut dev = 0.0f64;
    for i in 0..i_max {
        for k in 0..m {
            dev = dev.max((edge_dist[i][k] - uniform).abs());
            dev = dev.max((pair_dist[i][k] - uniform).abs());
        }
        for v in g.vertices() {
            dev = dev.max((vertex_dist[i][v] - g.deg(v) as f64 * uniform).abs());
        }
    }
    if dev > CHAIN_TOL {
        return Err(Error::Numeric {
            message: "chain laws deviate from their stationary values".into(),
            residual: dev,
        });
    }
    Ok(NbChainFacts {
        w1_size: m,
        arcs: list,
        edge_dist,
        vertex_dist,
        pair_dist,
        max_deviation: dev,
    })
}

/// Empirical `Pr(X_i = v)` from `samples` independent runs of length `i`.
pub fn sample_vertex_frequencies(g: &Graph, i: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    require_min2(g)?;
    let arcs: Vec<(usize, usize)> = Arcs::new(g).all().collect();
    let mut stream = rng::stream(seed, "nb-chain-sample");
    let mut counts = vec![0usize; g.vertex_count()];
    for _ in 0..samples {
        let (mut u, mut v) = arcs[stream.gen_range(0..arcs.len())];
        for _ in 1..i {
            let choices: Vec<usize> = g.neighbors(v).iter().copied().filter(|&z| z != u).collect();
            let z = choices[stream.gen_range(0..choices.len())];
            (u, v) = (v, z);
        }
        counts[v] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / samples as f64).collect())
}

/// `f(ω) = x_i·√(g(v_i)·Pr(Y_i = ω))` on the walk forest, `ω ∈ W_i`.
#[derive(Debug, Clone)]
pub struct TestVector {
    pub forest: WalkForest,
    pub values: Vec<f64>,
    /// `1/Pr(Y_i = ω) = |W₁|·Π_{j=1}^{i−1}(d(v_j)−1)` per node.
    pub denominators: Vec<u128>,
    pub r: usize,
    pub g: VertexWeighting,
    pub path_vector: Vec<f64>,
}

impl TestVector {
    /// Multiplies one entry by `factor`; for negative controls.
    pub fn perturb(&mut self, node: usize, factor: f64) {
        self.values[node] *= factor;
    }
}

pub fn build_test_vector(g: &Graph, w: &EdgeWeights, gv: &VertexWeighting, r: usize) -> Result<TestVector> {
    build_test_vector_with(g, w, gv, r, NodeBudget::from_env())
}

pub fn build_test_vector_with(
    g: &Graph,
    w: &EdgeWeights,
    gv: &VertexWeighting,
    r: usize,
    budget: NodeBudget,
) -> Result<TestVector> {
    require_min2(g)?;
    if !g.is_connected() {
        return Err(Error::precondition("graph is not connected"));
    }
    if gv.values().len() != g.vertex_count() {
        return Err(Error::input("vertex weighting does not match the graph"));
    }
    let forest = walk_forest_with(g, w, r, budget)?;
    let x = path_spectral_data::<f64>(r + 1)?.eigenvector;
    let w1 = 2 * g.edge_count() as u128;
    let mut denominators = vec![0u128; forest.node_count()];
    let mut values = vec![0.0; forest.node_count()];
    for node in 0..forest.node_count() {
        denominators[node] = match forest.parent(node) {
            None => w1,
            Some(p) => denominators[p]
                .checked_mul((g.deg(forest.covering(p)) - 1) as u128)
                .ok_or_else(|| Error::resource("walk probability denominator overflows u128"))?,
        };
        let depth = forest.depth(node);
        let prob = 1.0 / denominators[node] as f64;
        values[node] = x[depth - 1] * (gv.get(forest.covering(node)) * prob).sqrt();
    }
    Ok(TestVector {
        forest,
        values,
        denominators,
        r,
        g: gv.clone(),
        path_vector: x,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Direction,
    pub abs_error: f64,
    pub rel_error: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn equal(name: &str, lhs: f64, rhs: f64) -> Self {
        let abs_error = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_error = if scale == 0.0 { 0.0 } else { abs_error / scale };
        IdentityCheck {
            name: name.into(),
            lhs,
            rhs,
            relation: Direction::Equal,
            abs_error,
            rel_error,
            pass: rel_error <= IDENTITY_TOL,
        }
    }

    /// `lhs ≥ rhs` up to [`IDENTITY_TOL`] absolute.
    fn at_least(name: &str, lhs: f64, rhs: f64) -> Self {
        let abs_error = (rhs - lhs).max(0.0);
        IdentityCheck {
            name: name.into(),
            lhs,
            rhs,
            relation: Direction::AtLeast,
            abs_error,
            rel_error: if rhs == 0.0 { abs_error } else { abs_error / rhs.abs() },
            pass: lhs >= rhs - IDENTITY_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofLabLimits {
    pub max_r: usize,
    pub max_w1: usize,
    pub budget: NodeBudget,
}

impl Default for ProofLabLimits {
    fn default() -> Self {
        ProofLabLimits {
            max_r: 4,
            max_w1: 4000,
            budget: NodeBudget::from_env(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub schema: u32,
    pub r: usize,
    pub w1_size: usize,
    pub forest_nodes: usize,
    pub checks: Vec<IdentityCheck>,
    pub quotient: f64,
    pub bound: f64,
    /// Arc `e*` whose component attains `λ₁(T)`.
    pub best_arc: (usize, usize),
    pub component_radius: f64,
    pub unraveled_radius: f64,
    pub ball_radius: f64,
    pub instance: GraphDocument,
    pub g: Vec<f64>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

pub fn identity_suite(g: &Graph, w: &EdgeWeights, gv: &VertexWeighting, r: usize) -> Result<IdentityReport> {
    identity_suite_with(g, w, gv, r, ProofLabLimits::default())
}

pub fn identity_suite_with(
    g: &Graph,
    w: &EdgeWeights,
    gv: &VertexWeighting,
    r: usize,
    limits: ProofLabLimits,
) -> Result<IdentityReport> {
    if r > limits.max_r {
        return Err(Error::resource(format!("r = {r} exceeds the limit {}", limits.max_r)));
    }
    if 2 * g.edge_count() > limits.max_w1 {
        return Err(Error::resource(format!(
            "|W₁| = {} exceeds the limit {}",
            2 * g.edge_count(),
            limits.max_w1
        )));
    }
    let f = build_test_vector_with(g, w, gv, r, limits.budget)?;
    check_identities(g, w, &f, limits.budget)
}

/// Runs every identity against a (possibly tampered) test vector.
pub fn check_identities(g: &Graph, w: &EdgeWeights, f: &TestVector, budget: NodeBudget) -> Result<IdentityReport> {
    let r = f.r;
    let gv = &f.g;
    let m = 2 * g.edge_count();
    let path = path_spectral_data::<f64>(r + 1)?;
    let (pa, pb) = path.eigen_identity();
    let x2: f64 = path.eigenvector.iter().map(|x| x * x).sum();
    let mut checks = vec![IdentityCheck::equal("path-eigen", pa, pb)];

    let forest = &f.forest;
    let ff: f64 = f.values.iter().map(|v| v * v).sum();
    let gd: f64 = g.vertices().map(|v| gv.get(v) * g.deg(v) as f64).sum();
    checks.push(IdentityCheck::equal("norm", ff, x2 * gd / m as f64));

    let a = SparseSym::from_weighted(forest.forest(), forest.lifted_weights())?;
    let faf = a.quadratic_form(&f.values);
    let arc_sum: f64 = g
        .vertices()
        .flat_map(|v1| g.neighbors(v1).iter().map(move |&v2| (v1, v2)))
        .map(|(v1, v2)| ((g.deg(v1) - 1) as f64).sqrt() * w.weight(v1, v2) * (gv.get(v1) * gv.get(v2)).sqrt())
        .sum();
    checks.push(IdentityCheck::equal("quadratic-form", faf, pa * arc_sum / m as f64));

    let quotient = faf / ff;
    let bound = thm1_rhs(g, w, gv, r)?;
    checks.push(IdentityCheck::equal("quotient-equals-bound", quotient, bound));

    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 0..forest.component_count() {
        let nodes: Vec<usize> = forest.component(k).collect();
        let sub = forest.forest().induced_subgraph(&nodes)?;
        let rad = spectral_radius(&sub.graph, &forest.lifted_weights().restrict(&sub))?;
        if rad > best.1 {
            best = (k, rad);
        }
    }
    let (k, component_radius) = best;
    let arc = forest.edge_walks()[k].clone();
    let v1 = arc.end();
    checks.push(IdentityCheck::at_least("component-max", component_radius, quotient));

    let ball = unraveled_ball_with(g, w, v1, r, budget)?;
    let mut image = Vec::new();
    let mut embeds = true;
    for x in forest.component(k) {
        match forest.embed_in(x, &ball) {
            Some(y) => {
                embeds &= ball.covering(y) == forest.covering(x);
                if let Some(p) = forest.parent(x) {
                    let py = forest.embed_in(p, &ball);
                    embeds &= py.is_some() && ball.parent(y) == py;
                    embeds &= ball.lifted_weights().get(y, py.unwrap_or(y))
                        == forest.lifted_weights().get(x, p);
                }
                image.push(y);
            }
            None => embeds = false,
        }
    }
    image.sort_unstable();
    image.dedup();
    embeds &= image.len() == forest.component(k).len();
    checks.push(IdentityCheck::at_least("embedding-is-subtree", embeds as u8 as f64, 1.0));

    let unraveled = unraveled_radius(g, w, v1, r, budget)?;
    let in_ball = ball_radius(g, w, v1, r)?;
    checks.push(IdentityCheck::at_least("component-embedding", unraveled, component_radius));
    checks.push(IdentityCheck::at_least("unravel-to-ball", in_ball, unraveled));

    Ok(IdentityReport {
        schema: crate::graph::io::SCHEMA_VERSION,
        r,
        w1_size: m,
        forest_nodes: forest.node_count(),
        checks,
        quotient,
        bound,
        best_arc: (arc.start(), v1),
        component_radius,
        unraveled_radius: unraveled,
        ball_radius: in_ball,
        instance: GraphDocument::new(g, Some(w)),
        g: gv.values().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit(g: &Graph) -> (EdgeWeights, VertexWeighting) {
        (EdgeWeights::unit(g), VertexWeighting::ones(g))
    }

    #[test]
    fn transition_goldens() {
        assert!(nb_transition_check(&Graph::cycle(4).unwrap()).unwrap());
        assert!(nb_transition_check(&Graph::complete(4)).unwrap());
        assert!(nb_transition_check(&Graph::petersen()).unwrap());
        assert!(matches!(nb_transition_check(&Graph::path(4)), Err(Error::Precondition(_))));
        let k4 = Graph::complete(4);
        let arcs = Arcs::new(&k4);
        let row: Vec<(usize, f64)> = arcs.successors(0, 1).collect();
        assert_eq!(row, vec![(arcs.id(1, 2), 0.5), (arcs.id(1, 3), 0.5)]);
    }

    #[test]
    fn chain_fact_goldens() {
        let c = chain_facts(&Graph::cycle(6).unwrap(), 5).unwrap();
        assert_eq!(c.w1_size, 12);
        for &p in &c.vertex_dist[4] {
            assert_abs_diff_eq!(p, 1.0 / 6.0, epsilon = 1e-15);
        }
        let k = chain_facts(&Graph::complete(4), 3).unwrap();
        for &p in &k.vertex_dist[2] {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-15);
        }
        // triangle with a chord-free square attached: irregular degrees
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let f = chain_facts(&g, DEFAULT_I_MAX).unwrap();
        assert!(f.max_deviation <= CHAIN_TOL);
        for &p in &f.pair_dist[1] {
            assert_abs_diff_eq!(p, 1.0 / 12.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn test_vector_goldens() {
        let c4 = Graph::cycle(4).unwrap();
        let (w, gv) = unit(&c4);
        let f = build_test_vector(&c4, &w, &gv, 1).unwrap();
        let x = &f.path_vector;
        for node in 0..f.forest.node_count() {
            if f.forest.depth(node) == 1 {
                assert_eq!(f.denominators[node], 8);
                assert_abs_diff_eq!(f.values[node], x[0] / 8f64.sqrt(), epsilon = 1e-15);
            }
        }
        let k4 = Graph::complete(4);
        let (w, gv) = unit(&k4);
        let f = build_test_vector(&k4, &w, &gv, 1).unwrap();
        let deep: Vec<f64> = (0..f.forest.node_count())
            .filter(|&x| f.forest.depth(x) == 2)
            .map(|x| f.values[x])
            .collect();
        assert_eq!(deep.len(), 24);
        for v in deep {
            assert_abs_diff_eq!(v, f.path_vector[1] * (1.0f64 / 24.0).sqrt(), epsilon = 1e-15);
        }
        assert!(f.values.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn cycle_identities_close() {
        let c6 = Graph::cycle(6).unwrap();
        let (w, gv) = unit(&c6);
        let rep = identity_suite(&c6, &w, &gv, 2).unwrap();
        assert!(rep.all_pass(), "{}", rep.to_json());
        assert_abs_diff_eq!(rep.quotient, 2f64.sqrt(), epsilon = 1e-12);
        // T_e is a path on r+1 nodes, G̃(v, r) a path on 2r+1
        assert_abs_diff_eq!(rep.component_radius, 2f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(rep.unraveled_radius, 3f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(rep.ball_radius, 3f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn perturbed_vector_breaks_norm() {
        let k4 = Graph::complete(4);
        let (w, gv) = unit(&k4);
        let mut f = build_test_vector(&k4, &w, &gv, 2).unwrap();
        f.perturb(3, 1.5);
        let rep = check_identities(&k4, &w, &f, NodeBudget::default()).unwrap();
        let failed: Vec<&str> = rep.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"norm"));
        assert!(!rep.all_pass());
    }

    #[test]
    fn limits_are_enforced() {
        let p = Graph::petersen();
        let (w, gv) = unit(&p);
        assert!(matches!(identity_suite(&p, &w, &gv, 5), Err(Error::Resource(_))));
        let tight = ProofLabLimits { max_w1: 20, ..Default::default() };
        assert!(matches!(identity_suite_with(&p, &w, &gv, 1, tight), Err(Error::Resource(_))));
    }

    #[test]
    fn monte_carlo_frequencies_within_bands() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let n = 100_000;
        let freq = sample_vertex_frequencies(&g, 5, n, 7).unwrap();
        for v in g.vertices() {
            let p = g.deg(v) as f64 / 12.0;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq[v] - p).abs() <= 4.0 * sigma, "vertex {v}: {} vs {p}", freq[v]);
        }
    }

    fn arb_instance() -> impl Strategy<Value = (Graph, Vec<f64>, Vec<f64>, usize)> {
        (3usize..8).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), n * n),
                proptest::collection::vec(0.01f64..=2.0, n * n),
                proptest::collection::vec(0.01f64..=1.0, n),
                1usize..3,
            )
                .prop_map(|(n, mask, ws, gs, r)| {
                    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
                    for u in 0..n {
                        for v in u + 2..n {
                            if mask[u * n + v] && !(u == 0 && v == n - 1) {
                                edges.push((u, v));
                            }
                        }
                    }
                    let g = Graph::from_edges(n, &edges).unwrap();
                    let m = g.edge_count();
                    (g, ws[..m].to_vec(), gs, r)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn identities_hold((g, ws, gs, r) in arb_instance()) {
            let w = EdgeWeights::from_edge_values(&g, ws).unwrap();
            let gv = VertexWeighting::new(&g, gs).unwrap();
            let rep = identity_suite(&g, &w, &gv, r).unwrap();
            prop_assert!(rep.all_pass(), "{}", rep.to_json());
            prop_assert!(nb_transition_check(&g).unwrap());
        }
    }
}
