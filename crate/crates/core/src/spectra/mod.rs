//! Symmetric matrices and their spectra: weighted adjacency, the normalized
//! Laplacian, spectral radius, Rayleigh quotients, closed-walk weights and the
//! path eigenpair used to build test vectors.

mod jacobi;
mod matrix;
mod power;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph};
use crate::scalar::Real;

pub use jacobi::{jacobi_eigen, JacobiOptions, SymmetricEigen};
pub use matrix::{adjacency_matrix, weighted_adjacency, MatrixKind, SparseSym, SymMatrix};
pub use power::{power_radius, PowerOptions, PowerResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumOrder {
    /// λ₁ ≥ λ₂ ≥ … (adjacency-type matrices)
    Descending,
    /// μ₁ ≤ μ₂ ≤ … (normalized Laplacian)
    Ascending,
}

/// All eigenvalues of a symmetric matrix plus where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T = f64> {
    pub source: MatrixKind,
    pub order: usize,
    pub ordering: SpectrumOrder,
    pub eigenvalues: Vec<T>,
    /// Largest eigenpair residual ‖Mx − λx‖ reported by the solver.
    pub residual: T,
}

impl<T: Real> Spectrum<T> {
    /// 1-based access in the spectrum's own ordering (λ_s or μ_s).
    pub fn nth(&self, s: usize) -> Option<T> {
        s.checked_sub(1).and_then(|i| self.eigenvalues.get(i).copied())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectra always serialize")
    }
}

/// Full spectrum of `m` (descending), checking every eigenpair residual
/// against `1e-10 · max(1, ‖M‖)`.
pub fn spectrum<T: Real>(m: &SymMatrix<T>) -> Result<Spectrum<T>> {
    let eig = jacobi_eigen(m, JacobiOptions::default())?;
    let residual = eig.max_residual(m);
    let bound = T::lit(1e-10).max(T::epsilon() * T::lit(1e3)) * m.frobenius_norm().max(T::one());
    if residual > bound {
        return Err(Error::Numeric {
            message: "eigenpair residual above tolerance".into(),
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(Spectrum {
        source: m.kind(),
        order: m.order(),
        ordering: SpectrumOrder::Descending,
        eigenvalues: eig.values,
        residual,
    })
}

/// `w₀(uv) = 1/√(d(u)d(v))`.
pub fn normalized_weights<T: Real>(g: &Graph) -> EdgeWeights<T> {
    EdgeWeights::from_fn(g, |u, v| {
        T::one() / (T::lit(g.deg(u) as f64) * T::lit(g.deg(v) as f64)).sqrt()
    })
    .expect("edge endpoints have positive degree")
}

/// `I − D^{-1/2} A D^{-1/2}` assembled directly from degrees.
pub fn normalized_laplacian<T: Real>(g: &Graph) -> Result<SymMatrix<T>> {
    if let Some(v) = g.vertices().find(|&v| g.deg(v) == 0) {
        return Err(Error::input(format!(
            "normalized Laplacian undefined: vertex {v} has degree 0"
        )));
    }
    let mut m = SymMatrix::identity(g.vertex_count());
    for (u, v) in g.edges() {
        let x = -T::one() / (T::lit(g.deg(u) as f64) * T::lit(g.deg(v) as f64)).sqrt();
        m.set_sym(u, v, x);
    }
    Ok(m.with_kind(MatrixKind::NormalizedLaplacian))
}

/// μ₁ ≤ … ≤ μ_n as `1 − λ(A(G, w₀))`, cross-checked against the directly
/// assembled Laplacian.
pub fn normalized_laplacian_spectrum<T: Real>(g: &Graph) -> Result<Spectrum<T>> {
    let direct = spectrum(&normalized_laplacian::<T>(g)?)?;
    let weighted = spectrum(&weighted_adjacency(g, &normalized_weights::<T>(g))?)?;
    let mu: Vec<T> = weighted.eigenvalues.iter().map(|&l| T::one() - l).collect();
    // direct is descending in μ; reverse to ascending.
    let tol = T::lit(1e-9).max(T::epsilon().sqrt() * T::lit(10.0));
    for (a, b) in mu.iter().zip(direct.eigenvalues.iter().rev()) {
        if (*a - *b).abs() > tol {
            return Err(Error::Numeric {
                message: "1 − λ(A(G,w₀)) disagrees with the direct Laplacian spectrum".into(),
                residual: (*a - *b).abs().to_f64_lossy(),
            });
        }
    }
    Ok(Spectrum {
        source: MatrixKind::NormalizedLaplacian,
        order: g.vertex_count(),
        ordering: SpectrumOrder::Ascending,
        eigenvalues: mu,
        residual: weighted.residual.max(direct.residual),
    })
}

/// λ₁(G, w) by shifted power iteration.
pub fn spectral_radius<T: Real>(g: &Graph, w: &EdgeWeights<T>) -> Result<T> {
    Ok(spectral_radius_detailed(g, w, PowerOptions::default())?.value)
}

pub fn spectral_radius_detailed<T: Real>(
    g: &Graph,
    w: &EdgeWeights<T>,
    opts: PowerOptions<T>,
) -> Result<PowerResult<T>> {
    if g.is_empty() {
        return Err(Error::input("spectral radius of the empty graph"));
    }
    power_radius(&SparseSym::from_weighted(g, w)?, opts)
}

/// `t_{2k}(v) = (A^{2k})_{vv}` for `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedWalkTable<T = f64> {
    pub base_vertex: usize,
    /// `values[k - 1] = t_{2k}`.
    pub values: Vec<T>,
}

impl<T: Real> ClosedWalkTable<T> {
    pub fn t(&self, k: usize) -> Option<T> {
        k.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// `t_{2k}^{1/(2k)}`.
    pub fn root(&self, k: usize) -> Option<T> {
        self.t(k).map(|t| t.powf(T::one() / T::lit(2.0 * k as f64)))
    }
}

/// Total weight of closed walks of each even length at `v`, by repeated
/// matrix-vector products from the indicator of `v`.
pub fn closed_walk_weight<T: Real>(
    g: &Graph,
    w: &EdgeWeights<T>,
    v: usize,
    k_max: usize,
) -> Result<ClosedWalkTable<T>> {
    g.check_vertex(v)?;
    let m = SparseSym::from_weighted(g, w)?;
    let mut x = vec![T::zero(); g.vertex_count()];
    x[v] = T::one();
    let mut y = x.clone();
    let mut values = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        m.matvec_into(&x, &mut y);
        m.matvec_into(&y, &mut x);
        values.push(x[v]);
    }
    Ok(ClosedWalkTable {
        base_vertex: v,
        values,
    })
}

/// `⟨f, Mf⟩ / ⟨f, f⟩`.
pub fn rayleigh_quotient<T: Real>(m: &SymMatrix<T>, f: &[T]) -> Result<T> {
    if f.len() != m.order() {
        return Err(Error::input(format!(
            "vector of length {} for matrix of order {}",
            f.len(),
            m.order()
        )));
    }
    let ff: T = f.iter().map(|&x| x * x).sum();
    if ff == T::zero() {
        return Err(Error::input("Rayleigh quotient of the zero vector"));
    }
    let fmf: T = m.matvec(f).iter().zip(f).map(|(&a, &b)| a * b).sum();
    Ok(fmf / ff)
}

/// Spectral radius `2cos(π/(m+1))` of the path on `m` vertices and its
/// positive eigenvector `x_j = sin(jπ/(m+1))`, `j = 1..=m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSpectralData<T = f64> {
    pub radius: T,
    pub eigenvector: Vec<T>,
}

pub fn path_spectral_data<T: Real>(m: usize) -> Result<PathSpectralData<T>> {
    if m == 0 {
        return Err(Error::input("path spectral data needs at least one vertex"));
    }
    let step = T::PI() / T::lit((m + 1) as f64);
    Ok(PathSpectralData {
        radius: T::lit(2.0) * step.cos(),
        eigenvector: (1..=m).map(|j| (step * T::lit(j as f64)).sin()).collect(),
    })
}

impl<T: Real> PathSpectralData<T> {
    /// `(Σ_{j≥2} 2x_{j−1}x_j, λ·Σ x_j²)`; the two agree for the path eigenpair.
    pub fn eigen_identity(&self) -> (T, T) {
        let x = &self.eigenvector;
        let lhs = x.windows(2).map(|w| T::lit(2.0) * w[0] * w[1]).sum();
        let rhs = self.radius * x.iter().map(|&v| v * v).sum::<T>();
        (lhs, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexWeighting;
    use approx::assert_abs_diff_eq;
    use num_rational::Rational64 as Q;
    use proptest::prelude::*;

    /// Nullity of `M − λI` for an integer matrix, by exact Gaussian
    /// elimination over the rationals.
    fn nullity(m: &[Vec<i64>], lambda: i64) -> usize {
        let n = m.len();
        let mut a: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Q::from_integer(m[i][j] - if i == j { lambda } else { 0 }))
                    .collect()
            })
            .collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| a[r][col] != Q::from_integer(0)) else {
                continue;
            };
            a.swap(rank, p);
            for r in 0..n {
                if r != rank && a[r][col] != Q::from_integer(0) {
                    let f = a[r][col] / a[rank][col];
                    for c in 0..n {
                        let x = a[rank][c];
                        a[r][c] -= f * x;
                    }
                }
            }
            rank += 1;
        }
        n - rank
    }

    /// Closed walks of length `len` at `v`, by brute-force enumeration.
    fn count_closed_walks(g: &Graph, v: usize, len: usize) -> u64 {
        fn go(g: &Graph, at: usize, target: usize, left: usize) -> u64 {
            if left == 0 {
                return u64::from(at == target);
            }
            g.neighbors(at).iter().map(|&u| go(g, u, target, left - 1)).sum()
        }
        go(g, v, v, len)
    }

    #[test]
    fn path_spectrum_closed_form() {
        for m in 1..=12 {
            let s = spectrum(&adjacency_matrix::<f64>(&Graph::path(m))).unwrap();
            for (j, &l) in s.eigenvalues.iter().enumerate() {
                let want = 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (m + 1) as f64).cos();
                assert_abs_diff_eq!(l, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn cycle4_spectrum_matches_exact_nullities() {
        let c4 = Graph::cycle(4).unwrap();
        let int: Vec<Vec<i64>> = (0..4)
            .map(|i| (0..4).map(|j| i64::from(c4.has_edge(i, j))).collect())
            .collect();
        // Oracle: 2, 0, 0, -2 with multiplicities from exact nullities.
        let mut oracle = Vec::new();
        for lambda in [2, 1, 0, -1, -2] {
            oracle.extend(std::iter::repeat_n(lambda as f64, nullity(&int, lambda)));
        }
        assert_eq!(oracle, vec![2.0, 0.0, 0.0, -2.0]);
        let s = spectrum(&adjacency_matrix::<f64>(&c4)).unwrap();
        for (a, b) in s.eigenvalues.iter().zip(&oracle) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
        assert_eq!(s.source, MatrixKind::Adjacency);
    }

    #[test]
    fn zero_matrix_spectrum() {
        let s = spectrum(&SymMatrix::<f64>::zeros(3)).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn normalized_weight_law() {
        let p = Graph::petersen();
        assert!(normalized_weights::<f64>(&p).values().iter().all(|&w| (w - 1.0 / 3.0).abs() < 1e-15));
        let star = Graph::star(3);
        assert_abs_diff_eq!(normalized_weights::<f64>(&star).weight(0, 1), 1.0 / 3f64.sqrt());
        let p3 = Graph::path(3);
        assert_abs_diff_eq!(normalized_weights::<f64>(&p3).weight(1, 2), 1.0 / 2f64.sqrt());
    }

    #[test]
    fn radius_examples() {
        let c = Graph::cycle(7).unwrap();
        assert_abs_diff_eq!(spectral_radius(&c, &EdgeWeights::<f64>::unit(&c)).unwrap(), 2.0, epsilon = 1e-12);
        let k4 = Graph::complete(4);
        assert_abs_diff_eq!(
            spectral_radius(&k4, &normalized_weights::<f64>(&k4)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let p5 = Graph::path(5);
        let r = spectral_radius(&p5, &EdgeWeights::<f64>::unit(&p5)).unwrap();
        assert_abs_diff_eq!(r, 3f64.sqrt(), epsilon = 1e-12);
        let dense = spectrum(&adjacency_matrix::<f64>(&p5)).unwrap().eigenvalues[0];
        assert_abs_diff_eq!(r, dense, epsilon = 1e-9);
        assert!(spectral_radius(&Graph::empty(0), &EdgeWeights::<f64>::unit(&Graph::empty(0))).is_err());
    }

    #[test]
    fn normalized_laplacian_examples() {
        for n in 2..=8 {
            let s = normalized_laplacian_spectrum::<f64>(&Graph::complete(n)).unwrap();
            assert_abs_diff_eq!(s.eigenvalues[0], 0.0, epsilon = 1e-12);
            for &mu in &s.eigenvalues[1..] {
                assert_abs_diff_eq!(mu, n as f64 / (n - 1) as f64, epsilon = 1e-12);
            }
        }
        let c4 = normalized_laplacian_spectrum::<f64>(&Graph::cycle(4).unwrap()).unwrap();
        for (a, j) in c4.eigenvalues.iter().zip([0.0, 1.0, 1.0, 2.0]) {
            assert_abs_diff_eq!(*a, j, epsilon = 1e-12);
        }
        // Oracle for C4: 1 − cos(2πj/4).
        let mut oracle: Vec<f64> = (0..4)
            .map(|j| 1.0 - (2.0 * std::f64::consts::PI * j as f64 / 4.0).cos())
            .collect();
        oracle.sort_by(f64::total_cmp);
        for (a, b) in c4.eigenvalues.iter().zip(&oracle) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
        let e = normalized_laplacian_spectrum::<f64>(&Graph::path(2)).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.eigenvalues[1], 2.0, epsilon = 1e-12);
        assert!(matches!(
            normalized_laplacian_spectrum::<f64>(&Graph::empty(2)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn closed_walk_examples() {
        let c4 = Graph::cycle(4).unwrap();
        let t = closed_walk_weight(&c4, &EdgeWeights::unit(&c4), 0, 3).unwrap();
        for k in 1..=3 {
            assert_eq!(t.t(k).unwrap(), count_closed_walks(&c4, 0, 2 * k) as f64);
        }
        assert_eq!(t.t(1), Some(2.0));
        assert_eq!(t.t(2), Some(8.0));

        let e = Graph::path(2);
        let t = closed_walk_weight(&e, &EdgeWeights::constant(&e, 0.5).unwrap(), 1, 5).unwrap();
        for k in 1..=5 {
            assert_abs_diff_eq!(t.t(k).unwrap(), 0.25f64.powi(k as i32), epsilon = 1e-15);
        }
        let iso = Graph::empty(1);
        let t = closed_walk_weight(&iso, &EdgeWeights::<f64>::unit(&iso), 0, 4).unwrap();
        assert!(t.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rayleigh_examples() {
        let c4 = Graph::cycle(4).unwrap();
        let a = adjacency_matrix::<f64>(&c4);
        assert_abs_diff_eq!(rayleigh_quotient(&a, &[1.0; 4]).unwrap(), 2.0);
        let d = SymMatrix::identity(3).affine(0.0, 5.0);
        assert_abs_diff_eq!(rayleigh_quotient(&d, &[0.3, -1.0, 2.0]).unwrap(), 5.0);
        let p = Graph::petersen();
        let m = adjacency_matrix::<f64>(&p);
        let eig = jacobi_eigen(&m, JacobiOptions::default()).unwrap();
        assert_abs_diff_eq!(rayleigh_quotient(&m, &eig.vectors[0]).unwrap(), 3.0, epsilon = 1e-12);
        assert!(matches!(rayleigh_quotient(&a, &[0.0; 4]), Err(Error::Input(_))));
        assert!(rayleigh_quotient(&a, &[1.0; 3]).is_err());
    }

    #[test]
    fn path_data_examples() {
        let one = path_spectral_data::<f64>(1).unwrap();
        assert_abs_diff_eq!(one.radius, 0.0, epsilon = 1e-15);
        assert_eq!(one.eigenvector.len(), 1);
        let two = path_spectral_data::<f64>(2).unwrap();
        assert_abs_diff_eq!(two.radius, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two.eigenvector[0], two.eigenvector[1], epsilon = 1e-15);
        let three = path_spectral_data::<f64>(3).unwrap();
        assert_abs_diff_eq!(three.radius, 2f64.sqrt(), epsilon = 1e-15);
        let x = &three.eigenvector;
        assert_abs_diff_eq!(x[1] / x[0], 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(x[2] / x[0], 1.0, epsilon = 1e-14);
        assert!(path_spectral_data::<f64>(0).is_err());
        for m in 1..40 {
            let d = path_spectral_data::<f64>(m).unwrap();
            assert!(d.eigenvector.iter().all(|&v| v > 0.0));
            let (l, r) = d.eigen_identity();
            assert_abs_diff_eq!(l, r, epsilon = 1e-12);
        }
    }

    fn arb_weighted() -> impl Strategy<Value = (Graph, EdgeWeights)> {
        (2usize..=12, any::<u64>()).prop_map(|(n, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = rng.gen_range(0.2..0.8);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let w = EdgeWeights::from_fn(&g, |_, _| rng.gen_range(0.05..2.0)).unwrap();
            (g, w)
        })
    }

    proptest! {
        #[test]
        fn trace_and_square_sums((g, w) in arb_weighted()) {
            let m = weighted_adjacency(&g, &w).unwrap();
            let s = spectrum(&m).unwrap();
            let sum: f64 = s.eigenvalues.iter().sum();
            let sq: f64 = s.eigenvalues.iter().map(|x| x * x).sum();
            prop_assert!((sum - m.trace()).abs() < 1e-8);
            prop_assert!((sq - m.frobenius_norm().powi(2)).abs() < 1e-8);
            prop_assert!(s.eigenvalues.windows(2).all(|p| p[0] >= p[1]));
        }

        #[test]
        fn induced_subgraph_radius_monotone((g, w) in arb_weighted(), mask in any::<u16>()) {
            let keep: Vec<usize> = g.vertices().filter(|&v| mask >> v & 1 == 1).collect();
            prop_assume!(!keep.is_empty());
            let sub = g.induced_subgraph(&keep).unwrap();
            let host = spectral_radius(&g, &w).unwrap();
            let inner = spectral_radius(&sub.graph, &w.restrict(&sub)).unwrap();
            prop_assert!(inner <= host + 1e-9);
        }

        #[test]
        fn power_agrees_with_dense((g, w) in arb_weighted()) {
            let dense = spectrum(&weighted_adjacency(&g, &w).unwrap()).unwrap().eigenvalues[0];
            let power = spectral_radius(&g, &w).unwrap();
            prop_assert!((dense - power).abs() < 1e-9, "{} vs {}", dense, power);
        }

        #[test]
        fn laplacian_spectrum_invariants((g, _w) in arb_weighted()) {
            prop_assume!(g.min_degree().unwrap() >= 1);
            let s = normalized_laplacian_spectrum::<f64>(&g).unwrap();
            prop_assert!(s.eigenvalues[0].abs() <= 1e-9);
            prop_assert!(s.eigenvalues.iter().all(|&mu| (-1e-9..=2.0 + 1e-9).contains(&mu)));
            let zeros = s.eigenvalues.iter().filter(|mu| mu.abs() <= 1e-9).count();
            prop_assert_eq!(zeros, g.connected_components().len());
        }

        #[test]
        fn closed_walks_bounded_by_radius((g, _w) in arb_weighted()) {
            prop_assume!(g.min_degree().unwrap() >= 1 && g.is_connected());
            let w0 = normalized_weights::<f64>(&g);
            let lambda = spectral_radius(&g, &w0).unwrap();
            for v in g.vertices() {
                let t = closed_walk_weight(&g, &w0, v, 100).unwrap();
                for k in 1..=100 {
                    prop_assert!(t.t(k).unwrap() > 0.0);
                    prop_assert!(t.root(k).unwrap() <= lambda * (1.0 + 1e-12));
                }
                // (A^{2k})_{vv} ≥ φ₁(v)² λ₁^{2k} with φ₁(v)² = d(v)/Σd for w₀,
                // so the k-th root is within −ln(φ₁(v)²)/(2k) of λ₁.
                let share = g.deg(v) as f64 / (2 * g.edge_count()) as f64;
                let gap = 1.0 - t.root(100).unwrap() / lambda;
                prop_assert!(gap <= -share.ln() / 200.0 + 1e-9);
            }
        }
    }

    #[test]
    fn vertex_weighting_by_degree() {
        let g = Graph::star(3);
        let d = VertexWeighting::<f64>::degrees(&g).unwrap();
        assert_eq!(d.values(), &[3.0, 1.0, 1.0, 1.0]);
    }
}
