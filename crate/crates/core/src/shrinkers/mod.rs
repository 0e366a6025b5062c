//! Self-shrinking plane curves of curve-shortening flow.
//!
//! Convention: arclength `s`, tangent `T = (cos θ, sin θ)`, left normal
//! `N = (-sin θ, cos θ)` and signed curvature `k = θ'`. The shrinker equation
//! `H = -λ x^⊥` with `H = k N` reads `k = -λ <x, N>`, so a counterclockwise
//! circle of radius `1/√λ` has `k = +λ r`.
//!
//! Along any solution `d k / d s = λ k <x, T>`, hence `k e^{-λ|x|²/2}` is a
//! first integral and curvature extrema sit at zeros of the radial velocity.

mod shooting;
mod soliton;
mod verify;

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{build_periodic_chain, witten_apply, WeightedComplex};

pub use shooting::{find_abresch_langer, AbreschLanger, ShootingConfig, ShootingStep};
pub use soliton::{gaussian_soliton_check, sample_ball, SolitonPointCheck};
pub use verify::{
    circle_diameter_report, k0_and_diameter, shrinker_identity_report, verify_diameter_values,
    verify_shrinker_diameter, CurvatureDiameter,
};

pub const CONVENTION: &str = "k = θ' with N = (-sin θ, cos θ); shrinker equation k = -λ<x, N>";

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkerCurve {
    pub lambda: f64,
    pub points: Vec<[f64; 2]>,
    /// Unwrapped tangent angles.
    pub angles: Vec<f64>,
    /// `k = -λ <x, N>` at each node.
    pub curvatures: Vec<f64>,
    pub s: Vec<f64>,
    pub h: f64,
    pub closed: bool,
    pub rotation_p: u32,
    pub petals_q: u32,
    /// Endpoint mismatch after one full period; zero for open arcs.
    pub closure_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl State {
    pub fn start(r0: f64) -> Self {
        Self {
            x: r0,
            y: 0.0,
            theta: PI / 2.0,
        }
    }

    pub fn curvature(&self, lambda: f64) -> f64 {
        lambda * (self.x * self.theta.sin() - self.y * self.theta.cos())
    }

    pub fn radial_velocity(&self) -> f64 {
        self.x * self.theta.cos() + self.y * self.theta.sin()
    }

    fn derivative(&self, lambda: f64) -> [f64; 3] {
        [self.theta.cos(), self.theta.sin(), self.curvature(lambda)]
    }

    fn offset(&self, d: [f64; 3], t: f64) -> Self {
        Self {
            x: self.x + t * d[0],
            y: self.y + t * d[1],
            theta: self.theta + t * d[2],
        }
    }

    /// One classical RK4 step of length `h`.
    pub fn rk4(&self, lambda: f64, h: f64) -> Self {
        let k1 = self.derivative(lambda);
        let k2 = self.offset(k1, h / 2.0).derivative(lambda);
        let k3 = self.offset(k2, h / 2.0).derivative(lambda);
        let k4 = self.offset(k3, h).derivative(lambda);
        let mut out = *self;
        out.x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        out.y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        out.theta += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
        out
    }
}

pub(crate) fn guard(lambda: f64, state: &State, h: f64) -> Result<()> {
    let k = state.curvature(lambda).abs();
    let limit = 1.0 / (10.0 * h);
    if k > limit || !k.is_finite() {
        return Err(Error::Resolution { curvature: k, limit });
    }
    Ok(())
}

/// Integrate until the tangent angle has advanced by `span`, landing on it
/// exactly with a partial final step. Returns all nodes and their arclengths.
pub fn integrate_to_angle(lambda: f64, r0: f64, span: f64, h: f64) -> Result<(Vec<State>, Vec<f64>)> {
    let start = State::start(r0);
    let target = start.theta + span;
    let mut states = vec![start];
    let mut s = vec![0.0];
    // k > 0 on every shrinker, so the angle advances at rate at least min k
    let max_steps = (1e8 as usize).max((span / (h * 1e-3)) as usize);
    for _ in 0..max_steps {
        let cur = *states.last().expect("non-empty");
        guard(lambda, &cur, h)?;
        let next = cur.rk4(lambda, h);
        if next.theta < target {
            states.push(next);
            s.push(s.last().expect("non-empty") + h);
            continue;
        }
        // Newton on the partial step length
        let mut tau = ((target - cur.theta) / cur.curvature(lambda).max(f64::MIN_POSITIVE)).clamp(0.0, h);
        let mut end = cur.rk4(lambda, tau);
        for _ in 0..12 {
            let g = end.theta - target;
            if g.abs() <= 4.0 * f64::EPSILON * target.abs() {
                break;
            }
            tau = (tau - g / end.curvature(lambda)).clamp(0.0, h);
            end = cur.rk4(lambda, tau);
        }
        if tau > 0.0 {
            states.push(end);
            s.push(s.last().expect("non-empty") + tau);
        }
        return Ok((states, s));
    }
    Err(Error::NonConvergence {
        iterations: max_steps,
        estimate: states.last().map(|st| st.theta).unwrap_or(f64::NAN),
        residual: f64::NAN,
    })
}

/// `steps` fixed RK4 steps from `(r0, 0)` with `θ = π/2`, plus the final state.
pub(crate) fn integrate_steps(lambda: f64, r0: f64, h: f64, steps: usize) -> Result<(Vec<State>, State)> {
    let mut states = Vec::with_capacity(steps);
    let mut cur = State::start(r0);
    for _ in 0..steps {
        guard(lambda, &cur, h)?;
        states.push(cur);
        cur = cur.rk4(lambda, h);
    }
    Ok((states, cur))
}

impl ShrinkerCurve {
    pub(crate) fn from_states(lambda: f64, states: &[State], s: Vec<f64>, h: f64) -> Self {
        Self {
            lambda,
            points: states.iter().map(|st| [st.x, st.y]).collect(),
            angles: states.iter().map(|st| st.theta).collect(),
            curvatures: states.iter().map(|st| st.curvature(lambda)).collect(),
            s,
            h,
            closed: false,
            rotation_p: 0,
            petals_q: 0,
            closure_residual: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total length; for a closed curve the period.
    pub fn length(&self) -> f64 {
        let last = self.s.last().copied().unwrap_or(0.0);
        if self.closed {
            last + self.h
        } else {
            last
        }
    }

    pub fn is_circle(&self) -> bool {
        self.closed && self.petals_q == 0
    }

    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[0].hypot(p[1])).collect()
    }

    /// `k e^{-λ|x|²/2}` at each node.
    pub fn first_integral(&self) -> Vec<f64> {
        self.points
            .iter()
            .zip(&self.curvatures)
            .map(|(p, k)| k * (-0.5 * self.lambda * (p[0] * p[0] + p[1] * p[1])).exp())
            .collect()
    }

    /// `(max - min) / |mean|` of the first integral.
    pub fn first_integral_variation(&self) -> f64 {
        let values = self.first_integral();
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        (hi - lo) / mean.abs()
    }

    /// Indices of nodes whose four neighbours lie on the uniform grid.
    fn stencil_nodes(&self) -> Vec<usize> {
        let n = self.len();
        if self.closed {
            return (0..n).collect();
        }
        // an open arc may end with one partial step
        let uniform = (1..n)
            .take_while(|&i| ((self.s[i] - self.s[i - 1]) - self.h).abs() <= 1e-12 * self.h)
            .count()
            + 1;
        (2..uniform.saturating_sub(2)).collect()
    }

    /// `θ_{j+1} - θ_j`, wrapping across the seam for closed curves.
    fn angle_increment(&self, j: usize) -> f64 {
        let n = self.len();
        if j + 1 < n {
            self.angles[j + 1] - self.angles[j]
        } else {
            self.angles[0] + 2.0 * PI * self.rotation_p.max(1) as f64 - self.angles[n - 1]
        }
    }

    /// `max |k_fd + λ <x, N>|` with `k_fd` the fourth-order central difference
    /// of the tangent angle: independent of the stored curvatures.
    pub fn shrinker_residual(&self) -> f64 {
        let n = self.len();
        let d = |j: isize| self.angle_increment(j.rem_euclid(n as isize) as usize);
        self.stencil_nodes()
            .into_iter()
            .map(|i| {
                let i = i as isize;
                let near = d(i) + d(i - 1);
                let far = d(i - 2) + near + d(i + 1);
                let k_fd = (8.0 * near - far) / (12.0 * self.h);
                let (p, t) = (self.points[i as usize], self.angles[i as usize]);
                let x_dot_n = -p[0] * t.sin() + p[1] * t.cos();
                (k_fd + self.lambda * x_dot_n).abs()
            })
            .fold(0.0, f64::max)
    }

    /// CSV `s,x,y,theta,k,phi` preceded by a `# closure_residual` comment line.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let phi = potential_phi(self);
        writeln!(out, "# closure_residual = {:e}", self.closure_residual)?;
        writeln!(out, "s,x,y,theta,k,phi")?;
        for (i, p) in self.points.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.s[i], p[0], p[1], self.angles[i], self.curvatures[i], phi[i]
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Circle of radius `1/√λ`, sampled counterclockwise from `(r, 0)`.
pub fn circle_shrinker(lambda: f64, n_points: usize) -> Result<ShrinkerCurve> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be positive")));
    }
    if n_points < 16 {
        return Err(Error::InvalidInput(format!(
            "circle needs at least 16 points, got {n_points}"
        )));
    }
    let r = 1.0 / lambda.sqrt();
    let h = 2.0 * PI * r / n_points as f64;
    let t: Vec<f64> = (0..n_points).map(|i| 2.0 * PI * i as f64 / n_points as f64).collect();
    Ok(ShrinkerCurve {
        lambda,
        points: t.iter().map(|a| [r * a.cos(), r * a.sin()]).collect(),
        angles: t.iter().map(|a| a + PI / 2.0).collect(),
        curvatures: vec![lambda * r; n_points],
        s: (0..n_points).map(|i| i as f64 * h).collect(),
        h,
        closed: true,
        rotation_p: 1,
        petals_q: 0,
        closure_residual: 0.0,
    })
}

/// Open arc from `(r0, 0)` heading in `+y`, until the tangent has turned by `span`.
pub fn integrate_shrinker(lambda: f64, r0: f64, span: f64, h: f64) -> Result<ShrinkerCurve> {
    if !(lambda > 0.0 && r0 > 0.0 && h > 0.0) {
        return Err(Error::InvalidInput("lambda, r0 and h must be positive".into()));
    }
    if h > 1e-3 * r0 {
        return Err(Error::InvalidInput(format!(
            "step h = {h} exceeds 1e-3 r0 = {}",
            1e-3 * r0
        )));
    }
    if !(span > 0.0 && span <= 8.0 * PI) {
        return Err(Error::InvalidInput(format!("span = {span} must lie in (0, 8π]")));
    }
    let (states, s) = integrate_to_angle(lambda, r0, span, h)?;
    Ok(ShrinkerCurve::from_states(lambda, &states, s, h))
}

/// `φ = λ|x|²/2 - 1/2` at each node. Differences below the rounding error of
/// the cancellation are flushed to zero.
pub fn potential_phi(curve: &ShrinkerCurve) -> Vec<f64> {
    curve
        .points
        .iter()
        .map(|p| {
            let a = 0.5 * curve.lambda * (p[0] * p[0] + p[1] * p[1]);
            let phi = a - 0.5;
            if phi.abs() <= 4.0 * f64::EPSILON * a.max(0.5) {
                0.0
            } else {
                phi
            }
        })
        .collect()
}

fn require_closed(curve: &ShrinkerCurve) -> Result<()> {
    if curve.closed {
        Ok(())
    } else {
        Err(Error::InvalidInput("identity residuals need a closed curve".into()))
    }
}

/// `max |k²/(2λ) + Δ|x|²/4 - 1/2|` with the periodic second difference.
pub fn mean_curvature_identity_residual(curve: &ShrinkerCurve) -> Result<f64> {
    require_closed(curve)?;
    let n = curve.len();
    let r2: Vec<f64> = curve.points.iter().map(|p| p[0] * p[0] + p[1] * p[1]).collect();
    let h2 = curve.h * curve.h;
    Ok((0..n)
        .map(|i| {
            let lap = (r2[(i + 1) % n] - 2.0 * r2[i] + r2[(i + n - 1) % n]) / h2;
            let k = curve.curvatures[i];
            (k * k / (2.0 * curve.lambda) + 0.25 * lap - 0.5).abs()
        })
        .fold(0.0, f64::max))
}

/// Periodic weighted chain on the samples with potential `φ`.
pub fn curve_complex(curve: &ShrinkerCurve) -> Result<WeightedComplex> {
    require_closed(curve)?;
    let points: Vec<[f64; 3]> = curve.points.iter().map(|p| [p[0], p[1], 0.0]).collect();
    build_periodic_chain(
        format!("shrinker-curve-n{}", curve.len()),
        &points,
        curve.h,
        &potential_phi(curve),
    )
}

/// `||Δ_φ φ + 2λ φ||_∞ / max(1, ||φ||_∞)` with the discrete `-Δ_φ = M^{-1} S`.
pub fn eigen_identity_residual(curve: &ShrinkerCurve) -> Result<f64> {
    let (defect, phi_max) = eigen_identity_defect(curve)?;
    Ok(defect / phi_max.max(1.0))
}

/// `(||Δ_φ φ + 2λ φ||_∞, ||φ||_∞)`.
pub fn eigen_identity_defect(curve: &ShrinkerCurve) -> Result<(f64, f64)> {
    let complex = curve_complex(curve)?;
    let phi = potential_phi(curve);
    let neg_lap = witten_apply(&complex, &phi)?;
    let defect = neg_lap
        .iter()
        .zip(&phi)
        .map(|(l, p)| (2.0 * curve.lambda * p - l).abs())
        .fold(0.0, f64::max);
    let phi_max = phi.iter().map(|p| p.abs()).fold(0.0, f64::max);
    Ok((defect, phi_max))
}

/// Rayleigh quotient of `φ` on the curve complex and the residual bound on
/// its distance to the spectrum.
pub fn phi_rayleigh(curve: &ShrinkerCurve) -> Result<(f64, f64)> {
    let complex = curve_complex(curve)?;
    let phi = potential_phi(curve);
    let rho = complex.energy(&phi) / complex.mass_norm2(&phi);
    Ok((rho, complex.residual(rho, &phi)))
}
