//! Abresch–Langer curves by shooting on the initial radius.
//!
//! Start at `(r0, 0)` with `θ = π/2`, a radial extremum. A closed curve with
//! `q` curvature periods and tangent turning `2πp` has its next radial
//! extremum after turning `πp/q`, so the closure functional is the radial
//! velocity `<x, T>` at that tangent advance. The circle `r0 = 1/√λ` is a
//! trivial root; dividing by `r_c - r0` removes it.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{integrate_steps, integrate_to_angle, ShrinkerCurve, State};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingConfig {
    pub r_lo: f64,
    pub r_hi: f64,
    /// Tangent-angle span of the fundamental arc, `πp/q`.
    pub angle_target: f64,
    pub tol_closure: f64,
    pub max_bisections: usize,
    /// RK4 step while shooting.
    pub step: f64,
    /// Nodes on the assembled closed curve.
    pub n_points: usize,
}

impl ShootingConfig {
    /// Defaults for `λ = 1`.
    pub fn new(p: u32, q: u32) -> Self {
        Self {
            r_lo: 0.2,
            r_hi: 1.0,
            angle_target: PI * p as f64 / q as f64,
            tol_closure: 1e-6,
            max_bisections: 200,
            step: 1e-4,
            n_points: 4096,
        }
    }

    /// Defaults rescaled to shrinker constant `lambda` (lengths scale by `1/√λ`).
    pub fn for_lambda(lambda: f64, p: u32, q: u32) -> Self {
        let scale = 1.0 / lambda.sqrt();
        let base = Self::new(p, q);
        Self {
            r_lo: base.r_lo * scale,
            r_hi: base.r_hi * scale,
            step: base.step * scale,
            ..base
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingStep {
    pub iteration: usize,
    pub r0: f64,
    /// Radial velocity at the target tangent advance.
    pub closure_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbreschLanger {
    pub curve: ShrinkerCurve,
    pub r0: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub length: f64,
    pub log: Vec<ShootingStep>,
}

impl AbreschLanger {
    /// One JSON object per bisection step.
    pub fn write_log(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for step in &self.log {
            writeln!(out, "{}", serde_json::to_string(step).expect("plain struct"))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct Shot {
    radial: f64,
    /// Sign of the normalized functional; `+` at the circle by continuity.
    sign: f64,
    end: State,
    arc_length: f64,
}

fn shoot(lambda: f64, r0: f64, config: &ShootingConfig) -> Result<Shot> {
    let rc = 1.0 / lambda.sqrt();
    let (states, s) = integrate_to_angle(lambda, r0, config.angle_target, config.step)?;
    let end = *states.last().expect("non-empty");
    let radial = end.radial_velocity();
    let normalized = if r0 == rc { 1.0 } else { radial / (rc - r0) };
    Ok(Shot {
        radial,
        sign: if normalized >= 0.0 { 1.0 } else { -1.0 },
        end,
        arc_length: *s.last().expect("non-empty"),
    })
}

/// Closed Abresch–Langer curve with rotation index `p` and `q` lobes.
pub fn find_abresch_langer(lambda: f64, p: u32, q: u32, config: &ShootingConfig) -> Result<AbreschLanger> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be positive")));
    }
    if p == 0 || q == 0 || gcd(p, q) != 1 {
        return Err(Error::InvalidInput(format!(
            "(p, q) = ({p}, {q}) must be coprime positive integers"
        )));
    }
    let ratio = p as f64 / q as f64;
    if !(ratio > 0.5 && ratio < SQRT_2 / 2.0) {
        return Err(Error::InvalidInput(format!("p/q = {ratio} lies outside (1/2, √2/2)")));
    }
    if (config.angle_target - PI * ratio).abs() > 1e-12 * PI {
        return Err(Error::InvalidInput(format!(
            "angle target {} does not equal πp/q = {}",
            config.angle_target,
            PI * ratio
        )));
    }
    if !(config.r_lo > 0.0 && config.r_lo < config.r_hi) {
        return Err(Error::InvalidInput(format!(
            "bracket ({}, {}) is not ordered",
            config.r_lo, config.r_hi
        )));
    }

    let mut lo = config.r_lo;
    let mut hi = config.r_hi;
    let lo_shot = shoot(lambda, lo, config)?;
    let hi_shot = shoot(lambda, hi, config)?;
    if lo_shot.sign == hi_shot.sign {
        return Err(Error::BracketFailure { r_lo: lo, r_hi: hi });
    }
    let lo_sign = lo_shot.sign;
    let mut log = Vec::new();
    let mut best = (lo, lo_shot);
    for iteration in 0..config.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let shot = shoot(lambda, mid, config)?;
        log.push(ShootingStep {
            iteration,
            r0: mid,
            closure_residual: shot.radial,
        });
        if shot.sign == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        let done = shot.radial == 0.0 || hi - lo <= 4.0 * f64::EPSILON * mid;
        best = (mid, shot);
        if done {
            break;
        }
    }
    let (r0, shot) = best;

    // integrate one full period on a uniform grid and measure the mismatch
    let length = 2.0 * q as f64 * shot.arc_length;
    let n = config.n_points;
    let h = length / n as f64;
    let (states, last) = integrate_steps(lambda, r0, h, n)?;
    let first = states[0];
    let closure_residual = (last.x - first.x)
        .hypot(last.y - first.y)
        .max((last.theta - first.theta - 2.0 * PI * p as f64).abs());
    if !(closure_residual <= config.tol_closure) {
        return Err(Error::NonConvergence {
            iterations: log.len(),
            estimate: r0,
            residual: closure_residual,
        });
    }
    let mut curve = ShrinkerCurve::from_states(lambda, &states, (0..n).map(|i| i as f64 * h).collect(), h);
    curve.closed = true;
    curve.rotation_p = p;
    curve.petals_q = q;
    curve.closure_residual = closure_residual;

    let r_max = shot.end.x.hypot(shot.end.y);
    let (r_min, r_max) = (r0.min(r_max), r0.max(r_max));
    Ok(AbreschLanger {
        curve,
        r0,
        r_min,
        r_max,
        k_min: lambda * r_min,
        k_max: lambda * r_max,
        length,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_ratios() {
        let cfg = ShootingConfig::new(1, 1);
        assert!(matches!(
            find_abresch_langer(1.0, 1, 1, &cfg),
            Err(Error::InvalidInput(_))
        ));
        assert!(find_abresch_langer(1.0, 1, 2, &ShootingConfig::new(1, 2)).is_err());
        assert!(find_abresch_langer(1.0, 4, 6, &ShootingConfig::new(4, 6)).is_err());
        // mismatched target
        assert!(find_abresch_langer(1.0, 2, 3, &ShootingConfig::new(3, 5)).is_err());
    }

    #[test]
    fn bracket_failure_is_reported() {
        let cfg = ShootingConfig {
            r_lo: 0.5,
            r_hi: 1.0,
            ..ShootingConfig::new(2, 3)
        };
        assert!(matches!(
            find_abresch_langer(1.0, 2, 3, &cfg),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn al23_closes() {
        let al = find_abresch_langer(1.0, 2, 3, &ShootingConfig::new(2, 3)).unwrap();
        let c = &al.curve;
        assert!(c.closure_residual <= 1e-6);
        assert!(al.k_min < 1.0 && 1.0 < al.k_max);
        assert!(c.shrinker_residual() <= 1e-6);
        assert!(c.first_integral_variation() <= 1e-6);
        // first integral links the curvature extrema
        let predicted = al.k_min * (0.5 * (al.r_max * al.r_max - al.r_min * al.r_min)).exp();
        assert!((predicted - al.k_max).abs() <= 1e-8 * al.k_max);
        let kmax = c.curvatures.iter().copied().fold(0.0, f64::max);
        assert!((kmax - al.k_max).abs() <= 1e-4 * al.k_max);
        assert!(!al.log.is_empty());
    }

    #[test]
    fn al23_regression_values() {
        let al = find_abresch_langer(1.0, 2, 3, &ShootingConfig::new(2, 3)).unwrap();
        assert!((al.r0 - 0.313180).abs() < 5e-7, "{}", al.r0);
        assert!((al.k_min - 0.313180).abs() < 5e-7);
        assert!((al.k_max - 1.933597).abs() < 5e-7, "{}", al.k_max);
        assert!((al.length - 14.935493).abs() < 5e-6, "{}", al.length);
    }

    #[test]
    fn scaling_in_lambda() {
        let one = find_abresch_langer(1.0, 2, 3, &ShootingConfig::new(2, 3)).unwrap();
        let four = find_abresch_langer(4.0, 2, 3, &ShootingConfig::for_lambda(4.0, 2, 3)).unwrap();
        assert_eq!(one.curve.len(), four.curve.len());
        for (a, b) in one.curve.points.iter().zip(&four.curve.points) {
            assert!((a[0] / 2.0 - b[0]).abs() <= 1e-6 && (a[1] / 2.0 - b[1]).abs() <= 1e-6);
        }
        assert!((four.k_max - 2.0 * one.k_max).abs() <= 1e-6);
    }

    #[test]
    fn shooting_log_is_json_lines() {
        let al = find_abresch_langer(1.0, 2, 3, &ShootingConfig::new(2, 3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        al.write_log(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), al.log.len());
        let first: ShootingStep = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first, al.log[0]);
    }
}
