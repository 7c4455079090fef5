use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph};
use crate::scalar::Real;

/// Which matrix of which kind a spectrum was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Adjacency,
    WeightedAdjacency,
    NormalizedLaplacian,
    General,
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T = f64> {
    order: usize,
    data: Vec<T>,
    kind: MatrixKind,
}

impl<T: Real> SymMatrix<T> {
    /// Validates shape, finiteness and exact symmetry.
    pub fn new(order: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::input(format!(
                "matrix of order {order} needs {} entries, got {}",
                order * order,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("matrix has non-finite entries"));
        }
        for i in 0..order {
            for j in i + 1..order {
                if data[i * order + j] != data[j * order + i] {
                    return Err(Error::input(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymMatrix {
            order,
            data,
            kind: MatrixKind::General,
        })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("matrix rows are not all of the same length"));
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            data: vec![T::zero(); order * order],
            kind: MatrixKind::General,
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = T::one();
        }
        m
    }

    pub(crate) fn with_kind(mut self, kind: MatrixKind) -> Self {
        self.kind = kind;
        self
    }

    /// Writes `x` at `(i, j)` and `(j, i)`.
    pub(crate) fn set_sym(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.order + j] = x;
        self.data[j * self.order + i] = x;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.order + j]
    }

    pub(crate) fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn trace(&self) -> T {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.order, "vector length must match matrix order");
        (0..self.order)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        SymMatrix {
            order: k,
            data,
            kind: self.kind,
        }
    }

    /// `a·I + b·self`.
    pub fn affine(&self, a: T, b: T) -> Self {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = *x * b;
        }
        for i in 0..self.order {
            out.data[i * self.order + i] = out.data[i * self.order + i] + a;
        }
        out.kind = MatrixKind::General;
        out
    }
}

/// `A(G, w)`: entry `(u, v)` is `w(uv)` on edges and 0 elsewhere.
pub fn weighted_adjacency<T: Real>(g: &Graph, w: &EdgeWeights<T>) -> Result<SymMatrix<T>> {
    w.validate_for(g)?;
    let mut m = SymMatrix::zeros(g.vertex_count());
    for ((u, v), x) in w.iter() {
        m.set_sym(u, v, x);
    }
    Ok(m.with_kind(MatrixKind::WeightedAdjacency))
}

/// 0/1 adjacency matrix.
pub fn adjacency_matrix<T: Real>(g: &Graph) -> SymMatrix<T> {
    let mut m = SymMatrix::zeros(g.vertex_count());
    for (u, v) in g.edges() {
        m.set_sym(u, v, T::one());
    }
    m.with_kind(MatrixKind::Adjacency)
}

/// Compressed sparse symmetric matrix with nonnegative off-diagonal entries,
/// used for matrix-vector heavy routines on large trees.
#[derive(Debug, Clone)]
pub struct SparseSym<T = f64> {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> SparseSym<T> {
    pub fn from_weighted(g: &Graph, w: &EdgeWeights<T>) -> Result<Self> {
        w.validate_for(g)?;
        let mut offsets = Vec::with_capacity(g.vertex_count() + 1);
        let mut cols = Vec::with_capacity(2 * g.edge_count());
        let mut vals = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for u in g.vertices() {
            for &v in g.neighbors(u) {
                cols.push(v);
                vals.push(w.weight(u, v));
            }
            offsets.push(cols.len());
        }
        Ok(SparseSym {
            offsets,
            cols,
            vals,
        })
    }

    pub fn from_dense(m: &SymMatrix<T>) -> Self {
        let n = m.order();
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = m.get(i, j);
                if x != T::zero() {
                    cols.push(j);
                    vals.push(x);
                }
            }
            offsets.push(cols.len());
        }
        SparseSym {
            offsets,
            cols,
            vals,
        }
    }

    pub fn order(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn to_dense(&self) -> SymMatrix<T> {
        let n = self.order();
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for k in self.offsets[i]..self.offsets[i + 1] {
                data[i * n + self.cols[k]] = self.vals[k];
            }
        }
        SymMatrix::new(n, data).expect("square by construction")
    }

    pub fn matvec_into(&self, x: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.offsets[i]..self.offsets[i + 1] {
                acc = acc + self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.order()];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn max_abs_row_sum(&self) -> T {
        (0..self.order())
            .map(|i| {
                self.vals[self.offsets[i]..self.offsets[i + 1]]
                    .iter()
                    .map(|x| x.abs())
                    .sum::<T>()
            })
            .fold(T::zero(), T::max)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.vals.iter().all(|&x| x >= T::zero())
    }

    pub fn quadratic_form(&self, x: &[T]) -> T {
        self.matvec(x).iter().zip(x).map(|(&a, &b)| a * b).sum()
    }
}
