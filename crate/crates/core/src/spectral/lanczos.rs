//! Lanczos iteration with full reorthogonalization for the bottom of the
//! spectrum of a symmetric operator restricted to the complement of a set of
//! orthonormal locked vectors.

use crate::error::{Error, Result};
use crate::tridiag;

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    pub max_iter: usize,
    /// Converged when the Ritz residual is below `tol * max(1, |theta|)`.
    pub tol: f64,
    pub check_every: usize,
    pub salt: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_iter: 2500,
            tol: 1e-8,
            check_every: 10,
            salt: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RitzPair {
    pub value: f64,
    /// Unit vector orthogonal to the locked set.
    pub vector: Vec<f64>,
    pub residual_estimate: f64,
    pub iterations: usize,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Two passes of classical Gram-Schmidt against each basis.
fn orthogonalize(w: &mut [f64], locked: &[Vec<f64>], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in locked.iter().chain(basis) {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

/// Smallest eigenpair of `apply` on the orthogonal complement of `locked`.
pub fn lanczos_smallest(
    n: usize,
    apply: &dyn Fn(&[f64]) -> Vec<f64>,
    locked: &[Vec<f64>],
    options: &LanczosOptions,
) -> Result<RitzPair> {
    let free = n.saturating_sub(locked.len());
    if free == 0 {
        return Err(Error::InvalidInput("no directions left outside the locked set".into()));
    }
    let mut q = tridiag::start_vector(n, options.salt);
    orthogonalize(&mut q, locked, &[]);
    if normalize(&mut q) == 0.0 {
        return Err(Error::InvalidInput("start vector lies in the locked span".into()));
    }

    let max_iter = options.max_iter.min(free).max(1);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter.min(512));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut scale = 0.0f64;
    let mut last = (f64::NAN, f64::INFINITY);

    basis.push(q);
    for j in 0..max_iter {
        let mut w = apply(&basis[j]);
        let a = dot(&basis[j], &w);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        orthogonalize(&mut w, locked, &basis);
        alpha.push(a);
        let b = dot(&w, &w).sqrt();
        scale = scale.max(a.abs() + b);

        let exhausted = b <= 1e-13 * scale.max(f64::MIN_POSITIVE) || j + 1 == max_iter;
        if exhausted || (j + 1) % options.check_every == 0 {
            let (values, vectors) = tridiag::smallest_eigenpairs(&alpha, &beta, 1)?;
            let theta = values[0];
            let y = &vectors[0];
            let estimate = b * y[j].abs();
            let threshold = options.tol * theta.abs().max(1.0);
            // require the Ritz value to have settled as well
            let settled = (theta - last.0).abs() <= 1e-10 * theta.abs().max(1.0);
            if exhausted && b <= 1e-13 * scale || (estimate <= threshold && settled) {
                let mut x = vec![0.0; n];
                for (coef, qk) in y.iter().zip(&basis) {
                    axpy(*coef, qk, &mut x);
                }
                orthogonalize(&mut x, locked, &[]);
                normalize(&mut x);
                return Ok(RitzPair {
                    value: theta,
                    vector: x,
                    residual_estimate: estimate,
                    iterations: j + 1,
                });
            }
            if exhausted {
                return Err(Error::NonConvergence {
                    iterations: j + 1,
                    estimate: theta,
                    residual: estimate,
                });
            }
            last = (theta, estimate);
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    unreachable!("loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(u: &[f64]) -> Vec<f64> {
        let n = u.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { u[i] - u[i - 1] } else { 0.0 };
                let right = if i + 1 < n { u[i] - u[i + 1] } else { 0.0 };
                left + right
            })
            .collect()
    }

    #[test]
    fn path_graph_spectrum() {
        // Neumann path Laplacian: eigenvalues 2 - 2 cos(pi k / n)
        let n = 400;
        let ones = vec![1.0 / (n as f64).sqrt(); n];
        let mut locked = vec![ones];
        let mut found = Vec::new();
        for k in 0..3 {
            let opts = LanczosOptions {
                salt: k,
                ..Default::default()
            };
            let pair = lanczos_smallest(n, &path_laplacian, &locked, &opts).unwrap();
            found.push(pair.value);
            locked.push(pair.vector);
        }
        for (k, value) in found.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / n as f64).cos();
            assert!((value - exact).abs() < 1e-10, "{k}: {value} vs {exact}");
        }
    }

    #[test]
    fn invariant_subspace_terminates() {
        // diagonal operator on a tiny space hits breakdown before max_iter
        let apply = |u: &[f64]| {
            u.iter()
                .enumerate()
                .map(|(i, x)| (i + 1) as f64 * x)
                .collect::<Vec<_>>()
        };
        let pair = lanczos_smallest(5, &apply, &[], &LanczosOptions::default()).unwrap();
        assert!((pair.value - 1.0).abs() < 1e-12);
        assert!(pair.iterations <= 5);
    }

    #[test]
    fn non_convergence_is_reported() {
        let opts = LanczosOptions {
            max_iter: 5,
            ..Default::default()
        };
        let r = lanczos_smallest(1000, &path_laplacian, &[], &opts);
        assert!(matches!(r, Err(Error::NonConvergence { iterations: 5, .. })));
    }
}
