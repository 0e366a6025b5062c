//! Smallest nonzero eigenpairs of a weighted complex.
//!
//! Both routes work on `A = M^{-1/2} S M^{-1/2}` with the constant mode
//! `M^{1/2} 1` removed explicitly, then refine each eigenvalue by the
//! energy-form Rayleigh quotient `u^T S u / u^T M u`.

use nalgebra::{DMatrix, SymmetricTridiagonal};

use super::lanczos::{lanczos_smallest, LanczosOptions};
use super::{graph_diameter, WeightedComplex};
use crate::error::{Error, Result};
use crate::tridiag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Complexes with at most this many vertices use the dense route.
    pub dense_threshold: usize,
    pub lanczos: LanczosOptions,
    /// Compute the graph diameter alongside the eigenpair.
    pub diameter: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 3000,
            lanczos: LanczosOptions::default(),
            diameter: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// `M`-normalized, `M`-orthogonal to constants.
    pub vector: Vec<f64>,
    /// `||S u - value M u||_{M^{-1}}`, an upper bound on the distance to the spectrum.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub lambda1: f64,
    /// `lambda_2 - lambda_1`; near zero on a degenerate first eigenspace.
    pub multiplicity_gap: f64,
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub diameter_estimate: Option<f64>,
    pub solver: SolverKind,
}

fn sqrt_masses(complex: &WeightedComplex) -> Vec<f64> {
    complex.masses.iter().map(|m| m.sqrt()).collect()
}

fn unit_constant(root: &[f64]) -> Vec<f64> {
    let norm = root.iter().map(|r| r * r).sum::<f64>().sqrt();
    root.iter().map(|r| r / norm).collect()
}

/// Back to pencil coordinates, refined and normalized.
fn finish(complex: &WeightedComplex, root: &[f64], v: &[f64]) -> Eigenpair {
    let mut u: Vec<f64> = v.iter().zip(root).map(|(x, r)| x / r).collect();
    let mean = complex.mass_mean(&u);
    u.iter_mut().for_each(|x| *x -= mean);
    let norm = complex.mass_norm2(&u).sqrt();
    u.iter_mut().for_each(|x| *x /= norm);
    tridiag::fix_sign(&mut u);
    let value = complex.energy(&u);
    let residual = complex.residual(value, &u);
    Eigenpair {
        value,
        vector: u,
        residual,
    }
}

fn dense_pairs(complex: &WeightedComplex, count: usize) -> Result<Vec<Eigenpair>> {
    let n = complex.vertex_count();
    let root = sqrt_masses(complex);
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (e, &c) in complex.edges.iter().zip(&complex.conductance) {
        let (i, j) = (e[0], e[1]);
        a[(i, i)] += c;
        a[(j, j)] += c;
        a[(i, j)] -= c;
        a[(j, i)] -= c;
    }
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] /= root[i] * root[j];
        }
    }
    // lift the constant mode above the spectrum
    let upper = (0..n)
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let q0 = unit_constant(&root);
    let lift = 2.0 * upper + 1.0;
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] += lift * q0[i] * q0[j];
        }
    }
    let (q, diag, off) = SymmetricTridiagonal::new(a).unpack();
    let (_, ys) = tridiag::smallest_eigenpairs(diag.as_slice(), off.as_slice(), count)?;
    Ok(ys
        .iter()
        .map(|y| {
            let v = &q * nalgebra::DVector::from_column_slice(y);
            finish(complex, &root, v.as_slice())
        })
        .collect())
}

fn lanczos_pairs(complex: &WeightedComplex, count: usize, options: &LanczosOptions) -> Result<Vec<Eigenpair>> {
    let root = sqrt_masses(complex);
    let apply = |v: &[f64]| -> Vec<f64> {
        let u: Vec<f64> = v.iter().zip(&root).map(|(x, r)| x / r).collect();
        complex
            .apply_stiffness(&u)
            .into_iter()
            .zip(&root)
            .map(|(s, r)| s / r)
            .collect()
    };
    let mut locked = vec![unit_constant(&root)];
    let mut pairs = Vec::with_capacity(count);
    for k in 0..count {
        let opts = LanczosOptions {
            salt: options.salt.wrapping_add(k as u64),
            ..options.clone()
        };
        let ritz = lanczos_smallest(complex.vertex_count(), &apply, &locked, &opts)?;
        pairs.push(finish(complex, &root, &ritz.vector));
        locked.push(ritz.vector);
    }
    Ok(pairs)
}

/// The `count` smallest eigenpairs of `-Δ_φ` orthogonal to constants, ascending.
pub fn smallest_nonzero_eigenpairs(
    complex: &WeightedComplex,
    count: usize,
    options: &SolverOptions,
) -> Result<(Vec<Eigenpair>, SolverKind)> {
    let n = complex.vertex_count();
    if count == 0 || count >= n {
        return Err(Error::InvalidInput(format!(
            "requested {count} nonzero eigenpairs from {n} vertices"
        )));
    }
    complex.ensure_connected()?;
    let (mut pairs, kind) = if n <= options.dense_threshold {
        (dense_pairs(complex, count)?, SolverKind::Dense)
    } else {
        (lanczos_pairs(complex, count, &options.lanczos)?, SolverKind::Lanczos)
    };
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok((pairs, kind))
}

/// First nonzero eigenvalue of `-Δ_φ` with eigenvector and residual.
pub fn lambda1_witten_with(complex: &WeightedComplex, options: &SolverOptions) -> Result<SpectralResult> {
    let (mut pairs, solver) = smallest_nonzero_eigenpairs(complex, 2, options)?;
    let second = pairs.pop().expect("two pairs requested");
    let first = pairs.pop().expect("two pairs requested");
    let diameter_estimate = options.diameter.then(|| graph_diameter(complex));
    Ok(SpectralResult {
        lambda1: first.value,
        multiplicity_gap: second.value - first.value,
        eigenvector: first.vector,
        residual: first.residual,
        diameter_estimate,
        solver,
    })
}

pub fn lambda1_witten(complex: &WeightedComplex) -> Result<SpectralResult> {
    lambda1_witten_with(complex, &SolverOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{apply_weight, build_icosphere, build_weighted_circle};
    use std::f64::consts::PI;

    fn circle_exact(n: usize, r: f64) -> f64 {
        let h = 2.0 * PI * r / n as f64;
        (2.0 - 2.0 * (2.0 * PI / n as f64).cos()) / (h * h)
    }

    #[test]
    fn flat_circle_matches_closed_form() {
        for &(n, r) in &[(64usize, 1.0), (200, 2.5)] {
            let c = build_weighted_circle(n, r, |_| 0.0).unwrap();
            let res = lambda1_witten(&c).unwrap();
            let exact = circle_exact(n, r);
            assert!(
                (res.lambda1 - exact).abs() <= 1e-11 * exact,
                "{} vs {exact}",
                res.lambda1
            );
            // the first circle eigenvalue is double
            assert!(res.multiplicity_gap.abs() <= 1e-9);
            assert_eq!(res.solver, SolverKind::Dense);
            assert!(res.residual < 1e-9);
        }
    }

    #[test]
    fn dense_and_lanczos_agree() {
        let sphere = build_icosphere(3).unwrap();
        let phi: Vec<f64> = sphere.vertices.iter().map(|v| 0.7 * v[2] + 0.2 * v[0] * v[1]).collect();
        let c = apply_weight(&sphere, &phi).unwrap();
        let dense = SolverOptions {
            diameter: false,
            ..Default::default()
        };
        let sparse = SolverOptions {
            dense_threshold: 0,
            ..dense.clone()
        };
        let (a, ka) = smallest_nonzero_eigenpairs(&c, 4, &dense).unwrap();
        let (b, kb) = smallest_nonzero_eigenpairs(&c, 4, &sparse).unwrap();
        assert_eq!((ka, kb), (SolverKind::Dense, SolverKind::Lanczos));
        for (x, y) in a.iter().zip(&b) {
            assert!(
                (x.value - y.value).abs() <= 1e-9 * x.value,
                "{} vs {}",
                x.value,
                y.value
            );
            assert!(x.residual < 1e-8 && y.residual < 1e-6);
        }
    }

    #[test]
    fn constant_shift_of_potential_is_invisible() {
        let sphere = build_icosphere(3).unwrap();
        let phi: Vec<f64> = sphere.vertices.iter().map(|v| 0.5 * v[2]).collect();
        let shifted: Vec<f64> = phi.iter().map(|p| p + 3.0).collect();
        for threshold in [3000, 0] {
            let opts = SolverOptions {
                dense_threshold: threshold,
                diameter: false,
                ..Default::default()
            };
            let a = lambda1_witten_with(&apply_weight(&sphere, &phi).unwrap(), &opts).unwrap();
            let b = lambda1_witten_with(&apply_weight(&sphere, &shifted).unwrap(), &opts).unwrap();
            assert!(
                (a.lambda1 - b.lambda1).abs() <= 1e-12 * a.lambda1,
                "{} vs {}",
                a.lambda1,
                b.lambda1
            );
        }
    }

    #[test]
    fn radius_scaling() {
        let a = lambda1_witten(&build_weighted_circle(128, 1.0, |_| 0.0).unwrap()).unwrap();
        let b = lambda1_witten(&build_weighted_circle(128, 3.0, |_| 0.0).unwrap()).unwrap();
        assert!((a.lambda1 - 9.0 * b.lambda1).abs() <= 1e-12 * a.lambda1);
    }

    #[test]
    fn eigenvector_is_normalized_and_mean_free() {
        let c = build_weighted_circle(100, 1.0, |p| 0.3 * p[0]).unwrap();
        let res = lambda1_witten(&c).unwrap();
        assert!((c.mass_norm2(&res.eigenvector) - 1.0).abs() < 1e-12);
        assert!(c.mass_mean(&res.eigenvector).abs() < 1e-12);
    }

    #[test]
    fn disconnected_complex_is_rejected() {
        let c = WeightedComplex::from_parts(
            "split",
            vec![
                [0.0; 3],
                [1.0, 0.0, 0.0],
                [2.0, 0.0, 0.0],
                [3.0, 0.0, 0.0],
                [4.0, 0.0, 0.0],
            ],
            vec![[0, 1], [1, 2], [3, 4]],
            vec![1.0; 3],
            vec![1.0; 5],
        )
        .unwrap();
        assert!(matches!(lambda1_witten(&c), Err(Error::Disconnected { components: 2 })));
    }
}
