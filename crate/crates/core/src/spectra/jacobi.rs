//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Each sweep visits every off-diagonal pair `(p, q)` once and applies the
//! plane rotation that annihilates `a[p][q]`; rotations are accumulated into
//! the eigenvector matrix. Sweeps stop once the off-diagonal Frobenius norm
//! drops below `tol · ‖A‖_F`.

use super::matrix::SymMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct JacobiOptions<T> {
    pub tol: T,
    pub max_sweeps: usize,
}

impl<T: Real> Default for JacobiOptions<T> {
    fn default() -> Self {
        JacobiOptions {
            tol: T::lit(1e-12).max(T::epsilon() * T::lit(4.0)),
            max_sweeps: 100,
        }
    }
}

/// Eigenvalues in descending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T = f64> {
    pub values: Vec<T>,
    /// `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<T>>,
    pub sweeps: usize,
}

pub fn jacobi_eigen<T: Real>(m: &SymMatrix<T>, opts: JacobiOptions<T>) -> Result<SymmetricEigen<T>> {
    let n = m.order();
    let mut a: Vec<T> = m.data().to_vec();
    let mut v: Vec<T> = SymMatrix::<T>::identity(n).data().to_vec();
    let norm = m.frobenius_norm();
    let off_norm = |a: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let two = T::lit(2.0);
    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= opts.tol * norm {
            break;
        }
        if sweeps == opts.max_sweeps {
            return Err(Error::Numeric {
                message: format!("Jacobi did not converge in {} sweeps", opts.max_sweeps),
                residual: off.to_f64_lossy(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (two * apq);
                let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
                    T::one() / (two * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .expect("eigenvalues are finite")
    });
    Ok(SymmetricEigen {
        values: order.iter().map(|&i| a[i * n + i]).collect(),
        vectors: order
            .iter()
            .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
            .collect(),
        sweeps,
    })
}

impl<T: Real> SymmetricEigen<T> {
    /// Largest `‖Mx − λx‖` over all eigenpairs.
    pub fn max_residual(&self, m: &SymMatrix<T>) -> T {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&lambda, x)| {
                m.matvec(x)
                    .iter()
                    .zip(x)
                    .map(|(&mx, &xi)| (mx - lambda * xi) * (mx - lambda * xi))
                    .sum::<T>()
                    .sqrt()
            })
            .fold(T::zero(), T::max)
    }
}
