//! Spectral radius of nonnegative symmetric matrices by power iteration on the
//! shifted operator `M + ρI`, `ρ` the largest absolute row sum. The shift
//! makes every eigenvalue nonnegative, so a bipartite `±λ₁` pair can no longer
//! make the iterate oscillate. A nearly degenerate top pair still stalls the
//! iteration; it then continues as restarted Lanczos from the current iterate.

use super::jacobi::{jacobi_eigen, JacobiOptions};
use super::matrix::{SparseSym, SymMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Power steps before switching to Lanczos.
pub const POWER_STEPS: usize = 5_000;
/// Largest Krylov basis per Lanczos restart.
pub const LANCZOS_BASIS: usize = 40;

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions<T> {
    /// Stop once `‖Mx − θx‖ ≤ tol · max(1, ρ)`.
    pub tol: T,
    /// Cap on matrix-vector products.
    pub max_iterations: usize,
}

impl<T: Real> Default for PowerOptions<T> {
    fn default() -> Self {
        PowerOptions {
            tol: T::lit(1e-12).max(T::epsilon() * T::lit(16.0)),
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerResult<T = f64> {
    pub value: T,
    /// Unit vector, nonnegative up to rounding.
    pub vector: Vec<T>,
    /// Matrix-vector products used.
    pub iterations: usize,
    pub residual: T,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn normalize<T: Real>(x: &mut [T]) -> T {
    let norm = dot(x, x).sqrt();
    if norm > T::zero() {
        for xi in x.iter_mut() {
            *xi = *xi / norm;
        }
    }
    norm
}

/// Rayleigh quotient and residual norm of a unit vector.
fn rayleigh<T: Real>(m: &SparseSym<T>, x: &[T], mx: &mut [T]) -> (T, T) {
    m.matvec_into(x, mx);
    let theta = dot(mx, x);
    let r = mx
        .iter()
        .zip(x)
        .map(|(&a, &b)| (a - theta * b) * (a - theta * b))
        .sum::<T>()
        .sqrt();
    (theta, r)
}

/// One Lanczos pass of at most `k` steps from unit `x`, with full
/// reorthogonalization; returns the top Ritz vector.
fn lanczos_pass<T: Real>(m: &SparseSym<T>, x: &[T], k: usize) -> Result<(Vec<T>, usize)> {
    let n = x.len();
    let mut basis: Vec<Vec<T>> = vec![x.to_vec()];
    let mut alpha = Vec::with_capacity(k);
    let mut beta: Vec<T> = Vec::with_capacity(k);
    let mut w = vec![T::zero(); n];
    let breakdown = T::lit(1e-14);
    for j in 0..k {
        m.matvec_into(&basis[j], &mut w);
        alpha.push(dot(&w, &basis[j]));
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                for (wi, &qi) in w.iter_mut().zip(q) {
                    *wi = *wi - c * qi;
                }
            }
        }
        if j + 1 == k {
            break;
        }
        let b = normalize(&mut w);
        if b <= breakdown {
            break;
        }
        beta.push(b);
        basis.push(w.clone());
    }
    let steps = alpha.len();
    let mut t = vec![T::zero(); steps * steps];
    for i in 0..steps {
        t[i * steps + i] = alpha[i];
        if i + 1 < steps {
            t[i * steps + i + 1] = beta[i];
            t[(i + 1) * steps + i] = beta[i];
        }
    }
    let eig = jacobi_eigen(&SymMatrix::new(steps, t)?, JacobiOptions::default())?;
    let y = &eig.vectors[0];
    let mut ritz = vec![T::zero(); n];
    for (q, &c) in basis.iter().zip(y) {
        for (ri, &qi) in ritz.iter_mut().zip(q) {
            *ri = *ri + c * qi;
        }
    }
    if ritz.iter().copied().sum::<T>() < T::zero() {
        for ri in &mut ritz {
            *ri = -*ri;
        }
    }
    normalize(&mut ritz);
    Ok((ritz, steps))
}

pub fn power_radius<T: Real>(m: &SparseSym<T>, opts: PowerOptions<T>) -> Result<PowerResult<T>> {
    if !m.is_nonnegative() {
        return Err(Error::input(
            "power iteration radius requires a nonnegative matrix",
        ));
    }
    let n = m.order();
    if n == 0 {
        return Err(Error::input("spectral radius of an empty matrix"));
    }
    let rho = m.max_abs_row_sum();
    let inv = T::one() / T::lit(n as f64).sqrt();
    let mut x = vec![inv; n];
    if rho == T::zero() {
        return Ok(PowerResult {
            value: T::zero(),
            vector: x,
            iterations: 0,
            residual: T::zero(),
        });
    }
    let threshold = opts.tol * rho.max(T::one());
    let mut mx = vec![T::zero(); n];
    let mut used = 0;
    let mut residual = T::infinity();
    let done = |x: Vec<T>, value: T, residual: T, used: usize| PowerResult {
        value,
        vector: x,
        iterations: used,
        residual,
    };
    while used <= opts.max_iterations.min(POWER_STEPS) {
        let (theta, r) = rayleigh(m, &x, &mut mx);
        used += 1;
        residual = r;
        if r <= threshold {
            return Ok(done(x, theta, r, used));
        }
        // x ← (M + ρI)x / ‖·‖
        for (xi, &mi) in x.iter_mut().zip(&mx) {
            *xi = mi + rho * *xi;
        }
        normalize(&mut x);
    }
    let k = LANCZOS_BASIS.min(n);
    while used < opts.max_iterations {
        let (ritz, steps) = lanczos_pass(m, &x, k)?;
        used += steps;
        x = ritz;
        let (theta, r) = rayleigh(m, &x, &mut mx);
        used += 1;
        residual = r;
        if r <= threshold {
            return Ok(done(x, theta, r, used));
        }
    }
    Err(Error::Numeric {
        message: format!(
            "power iteration did not converge in {} iterations",
            opts.max_iterations
        ),
        residual: residual.to_f64_lossy(),
    })
}
