//! Verification cases with analytically known curvature data.
//!
//! Circle of radius `r` with `φ = a cos θ`: `φ'' = -(a/r^2) cos θ` in arclength, so
//! `K = -|a|/r^2` and `d = π r`. Unit sphere with `φ = a z`: `∇²z = -z g`, so
//! `Ric + ∇²φ = (1 - a z) g ≥ (1 - |a|) g` and `d = π`.

use std::f64::consts::PI;

use super::{
    apply_weight, build_icosphere, build_weighted_circle, graph_diameter, smallest_nonzero_eigenpairs, SolverOptions,
};
use crate::bounds::{andrews_ni_bound, futaki_sano_bound, sup_bound_closed, BoundInput};
use crate::error::{Error, Result};
use crate::report::VerificationReport;

pub const DEFAULT_CIRCLE_VERTICES: usize = 1000;
pub const DEFAULT_SPHERE_SUBDIVISIONS: usize = 5;

const CONVENTION: &str = "-Δ_φ is realized as M^{-1} S";

fn quiet() -> SolverOptions {
    SolverOptions {
        diameter: false,
        ..SolverOptions::default()
    }
}

fn failed(id: String, err: Error) -> VerificationReport {
    VerificationReport::new(id).fail(err.to_string())
}

/// Flat circle: `λ₁ = 1/r²`, and equality in the bound at `K = 0`, `d = π r`.
pub fn circle_case(n: usize, radius: f64) -> VerificationReport {
    let id = format!("spectral-circle-n{n}-r{radius}");
    match circle_inner(n, radius, &id, 0.0) {
        Ok(r) => r,
        Err(e) => failed(id, e),
    }
}

/// Circle with `φ = a cos θ`; the bound is strict for `a ≠ 0`.
pub fn weighted_circle_case(n: usize, radius: f64, a: f64) -> VerificationReport {
    let id = format!("spectral-circle-n{n}-r{radius}-a{a}");
    match circle_inner(n, radius, &id, a) {
        Ok(r) => r,
        Err(e) => failed(id, e),
    }
}

fn circle_inner(n: usize, radius: f64, id: &str, a: f64) -> Result<VerificationReport> {
    let complex = build_weighted_circle(n, radius, |p| a * p[0] / radius)?;
    let (pairs, _) = smallest_nonzero_eigenpairs(&complex, 2, &quiet())?;
    let lambda1 = pairs[0].value;
    let k = -a.abs() / (radius * radius);
    let d = PI * radius;
    let bound = sup_bound_closed(&BoundInput::new(k, d)?);
    let mut report = VerificationReport::new(id)
        .input("n", n as f64)
        .input("radius", radius)
        .input("a", a)
        .input("K", k)
        .input("d", d)
        .computed("lambda1", lambda1)
        .computed("lambda2", pairs[1].value)
        .computed("residual", pairs[0].residual)
        .computed("graph_diameter", graph_diameter(&complex))
        .bound("sup_bound_closed", bound)
        .margin("lambda1_minus_sup", lambda1 - bound, 1e-4 * lambda1.max(1.0))
        .note(CONVENTION);
    if a == 0.0 {
        let exact = 1.0 / (radius * radius);
        let rel = (lambda1 - exact).abs() / exact;
        report = report
            .bound("continuum_lambda1", exact)
            .computed("relative_error", rel)
            .margin("relative_error_slack", 1e-4 - rel, 0.0)
            .margin("equality_slack", 1e-4 * lambda1.max(1.0) - (lambda1 - bound).abs(), 0.0);
    }
    Ok(report)
}

/// Unweighted unit sphere: `λ₁ = 2` with a three-fold eigenspace, next level 6.
pub fn sphere_case(subdivisions: usize) -> VerificationReport {
    let id = format!("spectral-sphere-s{subdivisions}");
    let inner = || -> Result<VerificationReport> {
        let complex = build_icosphere(subdivisions)?;
        let (pairs, _) = smallest_nonzero_eigenpairs(&complex, 4, &quiet())?;
        let l: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        let rel = (l[0] - 2.0).abs() / 2.0;
        let spread = (l[2] - l[0]) / 2.0;
        Ok(VerificationReport::new(id.clone())
            .input("subdivisions", subdivisions as f64)
            .input("vertices", complex.vertex_count() as f64)
            .computed("lambda1", l[0])
            .computed("lambda2", l[1])
            .computed("lambda3", l[2])
            .computed("lambda4", l[3])
            .computed("residual", pairs[0].residual)
            .computed("graph_diameter", graph_diameter(&complex))
            .bound("continuum_lambda1", 2.0)
            .bound("continuum_lambda4", 6.0)
            .margin("relative_error_slack", 1e-2 - rel, 0.0)
            .margin("cluster_spread_slack", 1e-2 - spread, 0.0)
            .margin("fourth_gap", l[3] / l[0] - 1.5, 0.0)
            .bound("sup_bound_closed", sup_bound_closed(&BoundInput::new(1.0, PI)?))
            .margin(
                "lambda1_minus_sup",
                l[0] - sup_bound_closed(&BoundInput::new(1.0, PI)?),
                1e-2,
            )
            .note(CONVENTION))
    };
    inner().unwrap_or_else(|e| failed(id.clone(), e))
}

/// Unit sphere with `φ = a z`, certified against `K = 1 - |a|`, `d = π`.
pub fn sphere_height_case(a: f64, subdivisions: usize) -> VerificationReport {
    let id = format!("spectral-sphere-height-s{subdivisions}-a{a}");
    let inner = || -> Result<VerificationReport> {
        if !(a.abs() < 1.0) {
            return Err(Error::InvalidInput(format!(
                "height coefficient {a} must satisfy |a| < 1"
            )));
        }
        let sphere = build_icosphere(subdivisions)?;
        let phi: Vec<f64> = sphere.vertices.iter().map(|v| a * v[2]).collect();
        let complex = apply_weight(&sphere, &phi)?;
        let (pairs, _) = smallest_nonzero_eigenpairs(&complex, 2, &quiet())?;
        let lambda1 = pairs[0].value;
        let input = BoundInput::new(1.0 - a.abs(), PI)?;
        let bound = sup_bound_closed(&input);
        let fs = futaki_sano_bound(&input);
        let an = andrews_ni_bound(&input);
        Ok(VerificationReport::new(id.clone())
            .input("a", a)
            .input("subdivisions", subdivisions as f64)
            .input("K", input.k)
            .input("d", input.d)
            .computed("lambda1", lambda1)
            .computed("lambda2", pairs[1].value)
            .computed("residual", pairs[0].residual)
            .computed("graph_diameter", graph_diameter(&complex))
            .bound("sup_bound_closed", bound)
            .bound("futaki_sano", fs)
            .bound("andrews_ni", an)
            .margin("lambda1_minus_sup", lambda1 - bound, 1e-2)
            .margin("sup_minus_futaki_sano", bound - fs, 0.0)
            .margin("sup_minus_andrews_ni", bound - an, 0.0)
            .note(CONVENTION)
            .note("diameter certified analytically as π; graph_diameter is informational"))
    };
    inner().unwrap_or_else(|e| failed(id.clone(), e))
}
