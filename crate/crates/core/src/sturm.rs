//! The one-dimensional comparison operator `v'' - K x v'` on `(-d/2, d/2)`.
//!
//! The operator is symmetric in `L^2(w dx)` with `w(x) = exp(-K x^2 / 2)`,
//! so it is discretized in divergence form `-(w v')' = lambda w v` by finite
//! volumes: face conductances `w(x_face) / h`, lumped masses `w(x_node) h`.
//! The resulting pencil is symmetric tridiagonal by construction.

use serde::Serialize;

use crate::bounds::{sup_bound_closed, BoundInput};
use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::tridiag;

/// Largest admissible exponent `|K| (d/2)^2 / 2` of the weight.
pub const EXPONENT_GUARD: f64 = 700.0;

/// Default resolution of the coarse grid used for extrapolation.
pub const DEFAULT_CELLS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neumann" | "n" => Ok(Self::Neumann),
            "dirichlet" | "d" => Ok(Self::Dirichlet),
            other => Err(Error::InvalidInput(format!("unknown boundary condition '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OUProblem {
    pub k: f64,
    pub d: f64,
    pub m: usize,
    pub bc: BoundaryCondition,
}

impl OUProblem {
    pub fn new(k: f64, d: f64, m: usize, bc: BoundaryCondition) -> Result<Self> {
        if !k.is_finite() || !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need finite K and positive d, got K = {k}, d = {d}"
            )));
        }
        if m < 8 {
            return Err(Error::InvalidInput(format!("m = {m} cells is below the minimum of 8")));
        }
        Ok(Self { k, d, m, bc })
    }

    pub fn h(&self) -> f64 {
        self.d / self.m as f64
    }

    fn weight(&self, x: f64) -> f64 {
        (-0.5 * self.k * x * x).exp()
    }
}

/// Symmetric tridiagonal stiffness with a lumped (diagonal) mass.
///
/// Stiffness row `i` is `shunt[i] u_i + sum_j c_ij (u_i - u_j)`, so `diag`
/// is `shunt + adjacent conductances` and `off = -conductance`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalPencil {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
    /// Grounding to eliminated boundary values (zero for Neumann).
    pub shunt: Vec<f64>,
    /// Node positions.
    pub nodes: Vec<f64>,
}

impl TridiagonalPencil {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Stiffness times `u`, evaluated in difference form.
    pub fn apply_stiffness(&self, u: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out: Vec<f64> = (0..n).map(|i| self.shunt[i] * u[i]).collect();
        for i in 0..n - 1 {
            let flux = -self.off[i] * (u[i] - u[i + 1]);
            out[i] += flux;
            out[i + 1] -= flux;
        }
        out
    }

    /// `u^T S u` as a sum of squares.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let ground: f64 = self.shunt.iter().zip(u).map(|(s, x)| s * x * x).sum();
        let flux: f64 = self
            .off
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let du = u[i] - u[i + 1];
                -b * du * du
            })
            .sum();
        ground + flux
    }

    pub fn mass_norm2(&self, u: &[f64]) -> f64 {
        self.mass.iter().zip(u).map(|(m, x)| m * x * x).sum()
    }

    /// `M^{-1/2} S M^{-1/2}` as (diagonal, off-diagonal).
    pub fn symmetrized(&self) -> (Vec<f64>, Vec<f64>) {
        let a = self.diag.iter().zip(&self.mass).map(|(d, m)| d / m).collect();
        let b = self
            .off
            .iter()
            .enumerate()
            .map(|(i, o)| o / (self.mass[i] * self.mass[i + 1]).sqrt())
            .collect();
        (a, b)
    }

    /// `||S u - lambda M u||_{M^{-1}} / ||u||_M`.
    pub fn residual(&self, lambda: f64, u: &[f64]) -> f64 {
        let su = self.apply_stiffness(u);
        let r2: f64 = su
            .iter()
            .zip(u)
            .zip(&self.mass)
            .map(|((s, x), m)| {
                let r = s - lambda * m * x;
                r * r / m
            })
            .sum();
        (r2 / self.mass_norm2(u)).sqrt()
    }
}

fn exponent_guard(problem: &OUProblem) -> Result<()> {
    let half = 0.5 * problem.d;
    let exponent = problem.k.abs() * half * half / 2.0;
    if exponent > EXPONENT_GUARD {
        return Err(Error::MeasureUnderflow {
            exponent,
            limit: EXPONENT_GUARD,
        });
    }
    Ok(())
}

/// Finite-volume pencil for the comparison operator.
///
/// Neumann uses `m` cell-centred unknowns with no flux through the two end
/// faces. Dirichlet uses the `m - 1` interior vertices of the same grid, with
/// the two boundary values eliminated.
pub fn discretize_ou(problem: &OUProblem) -> Result<TridiagonalPencil> {
    exponent_guard(problem)?;
    let m = problem.m;
    let h = problem.h();
    let left = -0.5 * problem.d;

    let (nodes, faces): (Vec<f64>, Vec<f64>) = match problem.bc {
        BoundaryCondition::Neumann => (
            (0..m).map(|i| left + (i as f64 + 0.5) * h).collect(),
            (1..m).map(|i| left + i as f64 * h).collect(),
        ),
        BoundaryCondition::Dirichlet => (
            (1..m).map(|j| left + j as f64 * h).collect(),
            (0..m).map(|j| left + (j as f64 + 0.5) * h).collect(),
        ),
    };
    let conductance: Vec<f64> = faces.iter().map(|&x| problem.weight(x) / h).collect();
    let mass: Vec<f64> = nodes.iter().map(|&x| problem.weight(x) * h).collect();
    let n = nodes.len();

    let (inner, shunt) = match problem.bc {
        BoundaryCondition::Neumann => (conductance.clone(), vec![0.0; n]),
        BoundaryCondition::Dirichlet => {
            let mut shunt = vec![0.0; n];
            shunt[0] = conductance[0];
            shunt[n - 1] += conductance[m - 1];
            (conductance[1..m - 1].to_vec(), shunt)
        }
    };
    debug_assert_eq!(inner.len() + 1, n);

    let mut diag = shunt.clone();
    for (i, c) in inner.iter().enumerate() {
        diag[i] += c;
        diag[i + 1] += c;
    }
    let off = inner.iter().map(|c| -c).collect();
    Ok(TridiagonalPencil {
        diag,
        off,
        mass,
        shunt,
        nodes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub eigenvalues: Vec<f64>,
    /// Mass-normalized vectors in nodal coordinates.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub residual_norms: Vec<f64>,
}

/// Relative residual above which an eigenpair is rejected.
const RESIDUAL_TOL: f64 = 1e-9;

/// The `count` smallest generalized eigenpairs of `(S, M)`.
///
/// Brackets come from Sturm bisection on `M^{-1/2} S M^{-1/2}`, vectors from
/// inverse iteration, and each eigenvalue is then replaced by the Rayleigh
/// quotient evaluated as a sum of squares, which keeps the Neumann null value
/// at rounding level rather than `eps * ||S||`.
pub fn smallest_eigenvalues(pencil: &TridiagonalPencil, count: usize) -> Result<EigenSolution> {
    if count == 0 || count > pencil.dim() {
        return Err(Error::InvalidInput(format!(
            "count = {count} must be in 1..={}",
            pencil.dim()
        )));
    }
    let (a, b) = pencil.symmetrized();
    let tnorm = tridiag::norm_inf(&a, &b);
    let (values, vectors) = tridiag::smallest_eigenpairs(&a, &b, count)?;

    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors = Vec::with_capacity(count);
    let mut residual_norms = Vec::with_capacity(count);
    for (bisected, v) in values.into_iter().zip(vectors) {
        let mut u: Vec<f64> = v.iter().zip(&pencil.mass).map(|(x, m)| x / m.sqrt()).collect();
        let norm = pencil.mass_norm2(&u).sqrt();
        u.iter_mut().for_each(|x| *x /= norm);
        let rayleigh = pencil.energy(&u);
        let residual = pencil.residual(rayleigh, &u);
        if !(residual <= RESIDUAL_TOL * tnorm.max(1.0)) {
            return Err(Error::NonConvergence {
                iterations: 0,
                estimate: bisected,
                residual,
            });
        }
        eigenvalues.push(rayleigh);
        eigenvectors.push(u);
        residual_norms.push(residual);
    }
    Ok(EigenSolution {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
        residual_norms,
    })
}

/// Eigenvalue at two resolutions and the order-2 Richardson extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolated {
    pub coarse: f64,
    pub fine: f64,
    pub value: f64,
    /// Smallest Neumann eigenvalue on the fine grid (zero mode), if computed.
    pub null_value: Option<f64>,
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Neumann first nonzero eigenvalue on grids `m` and `2m`, extrapolated.
pub fn neumann_lambda1_with(k: f64, d: f64, m: usize) -> Result<Extrapolated> {
    let solve = |cells: usize| -> Result<(f64, f64)> {
        let p = OUProblem::new(k, d, cells, BoundaryCondition::Neumann)?;
        let sol = smallest_eigenvalues(&discretize_ou(&p)?, 2)?;
        Ok((sol.eigenvalues[0], sol.eigenvalues[1]))
    };
    let (_, coarse) = solve(m)?;
    let (null_value, fine) = solve(2 * m)?;
    if null_value.abs() > 1e-10 {
        return Err(Error::NonConvergence {
            iterations: 0,
            estimate: null_value,
            residual: null_value.abs(),
        });
    }
    Ok(Extrapolated {
        coarse,
        fine,
        value: richardson(coarse, fine),
        null_value: Some(null_value),
    })
}

/// Dirichlet smallest eigenvalue on grids `m` and `2m`, extrapolated.
pub fn dirichlet_lambda1_with(k: f64, d: f64, m: usize) -> Result<Extrapolated> {
    let solve = |cells: usize| -> Result<f64> {
        let p = OUProblem::new(k, d, cells, BoundaryCondition::Dirichlet)?;
        Ok(smallest_eigenvalues(&discretize_ou(&p)?, 1)?.eigenvalues[0])
    };
    let coarse = solve(m)?;
    let fine = solve(2 * m)?;
    Ok(Extrapolated {
        coarse,
        fine,
        value: richardson(coarse, fine),
        null_value: None,
    })
}

/// First nonzero Neumann eigenvalue of the comparison operator.
pub fn neumann_lambda1(k: f64, d: f64) -> Result<f64> {
    Ok(neumann_lambda1_with(k, d, DEFAULT_CELLS)?.value)
}

/// First Dirichlet eigenvalue of the comparison operator.
pub fn dirichlet_lambda1(k: f64, d: f64) -> Result<f64> {
    Ok(dirichlet_lambda1_with(k, d, DEFAULT_CELLS)?.value)
}

/// Check `lambda_1(L) >= sup_s {4 s (1 - s) pi^2 / d^2 + s K}`.
pub fn verify_comparison(k: f64, d: f64) -> VerificationReport {
    verify_comparison_with(k, d, DEFAULT_CELLS)
}

/// [`verify_comparison`] on grids `m` and `2m`. At `K = 0` equality is checked too.
pub fn verify_comparison_with(k: f64, d: f64, m: usize) -> VerificationReport {
    let case_id = format!("ou-comparison-K{k}-d{d:.6}");
    let base = VerificationReport::new(case_id).input("K", k).input("d", d);
    let bound_input = match BoundInput::new(k, d) {
        Ok(b) => b,
        Err(e) => return base.fail(e.to_string()),
    };
    let lambda = match neumann_lambda1_with(k, d, m) {
        Ok(l) => l,
        Err(e) => return base.fail(e.to_string()),
    };
    let bound = sup_bound_closed(&bound_input);
    let tol = 1e-5 * lambda.value.abs().max(1.0);
    let report = base
        .input("m", m as f64)
        .computed("lambda1_neumann", lambda.value)
        .computed("lambda1_coarse", lambda.coarse)
        .computed("lambda1_fine", lambda.fine)
        .computed("lambda0_neumann", lambda.null_value.unwrap_or(f64::NAN))
        .bound("sup_closed", bound)
        .margin("lambda1_minus_sup", lambda.value - bound, tol);
    if k == 0.0 {
        report.margin("equality_slack", tol - (lambda.value - bound).abs(), 0.0)
    } else {
        report
    }
}

/// `|lambda_Neu - K - lambda_Dir|` relative to `max(1, lambda_Neu)`.
pub fn verify_shift(k: f64, d: f64) -> VerificationReport {
    verify_shift_with(k, d, DEFAULT_CELLS)
}

pub fn verify_shift_with(k: f64, d: f64, m: usize) -> VerificationReport {
    let base = VerificationReport::new(format!("ou-shift-K{k}-d{d:.6}"))
        .input("K", k)
        .input("d", d)
        .input("m", m as f64);
    let neu = match neumann_lambda1_with(k, d, m) {
        Ok(v) => v.value,
        Err(e) => return base.fail(e.to_string()),
    };
    let dir = match dirichlet_lambda1_with(k, d, m) {
        Ok(v) => v.value,
        Err(e) => return base.fail(e.to_string()),
    };
    let scale = neu.abs().max(1.0);
    let defect = (neu - k - dir).abs();
    base.computed("lambda1_neumann", neu)
        .computed("lambda1_dirichlet", dir)
        .computed("shift_defect", defect)
        .margin("shift_defect_slack", 1e-4 * scale - defect, 0.0)
}
