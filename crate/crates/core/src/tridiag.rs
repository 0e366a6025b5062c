//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, and
//! eigenvectors by inverse iteration.
//!
//! The matrix is given by its diagonal `diag` (length n) and off-diagonal
//! `off` (length n - 1).

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 256;
const INVERSE_SWEEPS: usize = 3;

/// Infinity norm of the matrix.
pub fn norm_inf(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { off[i].abs() } else { 0.0 };
            diag[i].abs() + left + right
        })
        .fold(0.0, f64::max)
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// Number of eigenvalues strictly below `x` (negative pivots of `T - x I = L D L^T`).
pub fn sturm_count(diag: &[f64], off2: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off2[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues, ascending, each bracketed to roughly
/// `eps * ||T||`.
pub fn smallest_eigenvalues(diag: &[f64], off: &[f64], count: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
            n,
            off.len()
        )));
    }
    if count > n {
        return Err(Error::InvalidInput(format!(
            "requested {count} eigenvalues of a {n}x{n} matrix"
        )));
    }
    let off2: Vec<f64> = off.iter().map(|b| b * b).collect();
    let max_off2 = off2.iter().copied().fold(1.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_off2;
    let (glo, ghi) = gershgorin(diag, off);
    let tnorm = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let atol = 2.0 * f64::EPSILON * tnorm;
    // widen so the ends are strict bounds
    let pad = atol + 2.0 * f64::EPSILON * (ghi - glo);
    let (glo, ghi) = (glo - pad, ghi + pad);

    let mut out = Vec::with_capacity(count);
    let mut lo_start = glo;
    for k in 0..count {
        let mut lo = lo_start;
        let mut hi = ghi;
        let mut converged = false;
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= atol + 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                converged = true;
                break;
            }
            let mid = 0.5 * (lo + hi);
            if sturm_count(diag, &off2, mid, pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        if !converged {
            return Err(Error::NonConvergence {
                iterations: MAX_BISECTIONS,
                estimate: value,
                residual: hi - lo,
            });
        }
        out.push(value);
        lo_start = lo;
    }
    Ok(out)
}

/// LU factorization with partial pivoting of a shifted tridiagonal matrix.
struct ShiftedLu {
    dl: Vec<f64>,
    dd: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(diag: &[f64], off: &[f64], shift: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut dd: Vec<f64> = diag.iter().map(|a| a - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if dd[i].abs() >= dl[i].abs() {
                if dd[i].abs() < tiny {
                    dd[i] = tiny;
                }
                let fact = dl[i] / dd[i];
                dl[i] = fact;
                dd[i + 1] -= fact * du[i];
            } else {
                let fact = dd[i] / dl[i];
                dd[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = temp - fact * dd[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if dd[n - 1].abs() < tiny {
            dd[n - 1] = tiny;
        }
        Self {
            dl,
            dd,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.dd[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.dd[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.dd[i];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Deterministic start vector with no special symmetry.
pub(crate) fn start_vector(n: usize, salt: u64) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            // splitmix64
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Flip sign so the largest-magnitude entry is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    for &x in v.iter() {
        if x.abs() > best.abs() {
            best = x;
        }
    }
    if best < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Unit eigenvector for an eigenvalue estimate `shift`, orthogonal to `prior`.
pub fn inverse_iteration(diag: &[f64], off: &[f64], shift: f64, prior: &[Vec<f64>]) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let tnorm = norm_inf(diag, off).max(f64::MIN_POSITIVE);
    let lu = ShiftedLu::new(diag, off, shift, f64::EPSILON * tnorm);
    let mut v = start_vector(n, n as u64 + prior.len() as u64);
    for _ in 0..INVERSE_SWEEPS {
        for p in prior {
            let c = dot(&v, p);
            v.iter_mut().zip(p).for_each(|(x, y)| *x -= c * y);
        }
        normalize(&mut v);
        lu.solve(&mut v);
        normalize(&mut v);
    }
    for p in prior {
        let c = dot(&v, p);
        v.iter_mut().zip(p).for_each(|(x, y)| *x -= c * y);
    }
    normalize(&mut v);
    fix_sign(&mut v);
    v
}

/// `||(T - lambda) v|| / ||v||`.
pub fn residual(diag: &[f64], off: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut r2 = 0.0;
    for i in 0..n {
        let mut tv = (diag[i] - lambda) * v[i];
        if i > 0 {
            tv += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            tv += off[i] * v[i + 1];
        }
        r2 += tv * tv;
    }
    (r2 / dot(v, v)).sqrt()
}

/// Smallest `count` eigenpairs. Vectors are unit length; eigenvalues sorted ascending.
pub fn smallest_eigenpairs(diag: &[f64], off: &[f64], count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let values = smallest_eigenvalues(diag, off, count)?;
    let tnorm = norm_inf(diag, off);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for (i, &lambda) in values.iter().enumerate() {
        // orthogonalize only within a numerical cluster
        let cluster: Vec<Vec<f64>> = values[..i]
            .iter()
            .zip(&vectors)
            .filter(|(mu, _)| (lambda - **mu).abs() <= 1e-3 * tnorm.max(1.0))
            .map(|(_, v)| v.clone())
            .collect();
        vectors.push(inverse_iteration(diag, off, lambda, &cluster));
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Second-difference matrix with Dirichlet ends: eigenvalues 2 - 2 cos(k pi / (n + 1)).
    fn dirichlet_laplacian(n: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn bisection_matches_closed_form() {
        let n = 50;
        let (d, e) = dirichlet_laplacian(n);
        let vals = smallest_eigenvalues(&d, &e, n).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "k = {k}: {v} vs {exact}");
        }
    }

    #[test]
    fn eigenpairs_have_small_residual_and_are_orthogonal() {
        let n = 200;
        let d: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let e: Vec<f64> = (0..n - 1).map(|i| 1.0 + 0.5 * (i as f64 * 0.11).cos()).collect();
        let (vals, vecs) = smallest_eigenpairs(&d, &e, 6).unwrap();
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for (l, v) in vals.iter().zip(&vecs) {
            assert!(residual(&d, &e, *l, v) < 1e-12);
        }
        for i in 0..vecs.len() {
            for j in 0..i {
                assert!(dot(&vecs[i], &vecs[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sturm_count_is_monotone() {
        let (d, e) = dirichlet_laplacian(30);
        let off2: Vec<f64> = e.iter().map(|b| b * b).collect();
        let mut last = 0;
        for i in 0..=100 {
            let c = sturm_count(&d, &off2, -0.5 + i as f64 * 0.05, 1e-300);
            assert!(c >= last);
            last = c;
        }
        assert_eq!(last, 30);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(smallest_eigenvalues(&[1.0, 2.0], &[], 1).is_err());
        assert!(smallest_eigenvalues(&[1.0], &[], 2).is_err());
        assert_eq!(smallest_eigenvalues(&[3.0], &[], 1).unwrap(), vec![3.0]);
    }
}
