//! Pointwise check of `Δ_f (f - n/2) = -2λ (f - n/2)` on the Gaussian
//! shrinking soliton `f = λ|x|²/2` in flat `R^n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::VerificationReport;

pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonPointCheck {
    pub n: usize,
    pub lambda: f64,
    pub sample_points: Vec<Vec<f64>>,
    /// Closed-form residuals.
    pub residuals: Vec<f64>,
    /// Residuals with `Δf` and `∇f` replaced by central differences.
    pub fd_residuals: Vec<f64>,
}

impl SolitonPointCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.abs()).fold(0.0, f64::max)
    }

    pub fn max_fd_residual(&self) -> f64 {
        self.fd_residuals.iter().map(|r| r.abs()).fold(0.0, f64::max)
    }

    pub fn report(&self, case_id: &str) -> VerificationReport {
        let exact = self.max_residual();
        let fd = self.max_fd_residual();
        VerificationReport::new(case_id)
            .input("n", self.n as f64)
            .input("lambda", self.lambda)
            .input("samples", self.sample_points.len() as f64)
            .input("fd_step", FD_STEP)
            .computed("max_analytic_residual", exact)
            .computed("max_fd_residual", fd)
            .margin("analytic_residual_slack", -exact, 0.0)
            .margin("fd_residual_slack", 1e-6 - fd, 0.0)
            .note("pointwise on flat R^n; the manifold is non-compact, so no spectral solve is attempted")
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `count` points uniform in the ball of the given radius in `R^n`, seeded.
pub fn sample_ball(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
        if norm2(&x) <= radius * radius {
            out.push(x);
        }
    }
    out
}

pub fn gaussian_soliton_check(n: usize, lambda: f64, sample_points: &[Vec<f64>]) -> Result<SolitonPointCheck> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be positive")));
    }
    if let Some(p) = sample_points.iter().find(|p| p.len() != n) {
        return Err(Error::InvalidInput(format!(
            "sample point of dimension {} in R^{n}",
            p.len()
        )));
    }
    let dim = n as f64;
    let f = |x: &[f64]| 0.5 * lambda * norm2(x);
    let mut residuals = Vec::with_capacity(sample_points.len());
    let mut fd_residuals = Vec::with_capacity(sample_points.len());
    for x in sample_points {
        // Δf = nλ and |∇f|² = λ²|x|²; the products round identically on
        // both sides, so the cancellation is exact
        let r2 = norm2(x);
        let fx = lambda * r2 / 2.0;
        let drift_laplacian = dim * lambda - lambda * (lambda * r2);
        residuals.push(drift_laplacian + (2.0 * lambda * fx - 2.0 * lambda * (dim / 2.0)));

        let h = FD_STEP;
        let f0 = f(x);
        let mut lap = 0.0;
        let mut grad2 = 0.0;
        let mut y = x.clone();
        for i in 0..n {
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            lap += (fp - 2.0 * f0 + fm) / (h * h);
            let g = (fp - fm) / (2.0 * h);
            grad2 += g * g;
        }
        fd_residuals.push(lap - grad2 + 2.0 * lambda * (f0 - 0.5 * dim));
    }
    Ok(SolitonPointCheck {
        n,
        lambda,
        sample_points: sample_points.to_vec(),
        residuals,
        fd_residuals,
    })
}
