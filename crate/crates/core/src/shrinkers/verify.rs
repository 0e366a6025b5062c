//! Diameter certification and identity checks for closed shrinkers.

use std::f64::consts::PI;

use super::{
    eigen_identity_defect, mean_curvature_identity_residual, phi_rayleigh, potential_phi, ShrinkerCurve, CONVENTION,
};
use crate::bounds::{shrinker_diameter_bound, shrinker_diameter_bound_sup, ShrinkerBoundInput};
use crate::error::{Error, Result};
use crate::report::VerificationReport;

const SUP_GRID: usize = 100_000;
/// Slack allowed on `d >= bound`.
pub const DIAMETER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureDiameter {
    /// `max k²`, the squared second fundamental form bound.
    pub k0: f64,
    /// `L / 2`.
    pub d: f64,
    /// `λ - K0`.
    pub k: f64,
}

pub fn k0_and_diameter(curve: &ShrinkerCurve) -> Result<CurvatureDiameter> {
    if !curve.closed {
        return Err(Error::InvalidInput("diameter needs a closed curve".into()));
    }
    let k0 = curve.curvatures.iter().map(|k| k * k).fold(0.0, f64::max);
    Ok(CurvatureDiameter {
        k0,
        d: curve.length() / 2.0,
        k: curve.lambda - k0,
    })
}

/// Diameter report from raw values. Pass follows `d >= π/√(3λ/2 + K0/2)`;
/// the sharper supremum bound is recorded alongside.
pub fn verify_diameter_values(case_id: &str, lambda: f64, k0: f64, d: f64) -> VerificationReport {
    let inner = || -> Result<VerificationReport> {
        let input = ShrinkerBoundInput::new(lambda, k0)?;
        let half = shrinker_diameter_bound(&input)?;
        let (sup, s_star) = shrinker_diameter_bound_sup(&input, SUP_GRID);
        Ok(VerificationReport::new(case_id)
            .input("lambda", lambda)
            .input("K0", k0)
            .computed("d", d)
            .computed("K", input.curvature_bound())
            .bound("diameter_bound_half", half)
            .bound("diameter_bound_sup", sup)
            .bound("sup_s_star", s_star)
            .computed("sup_margin", d - sup)
            .computed("sup_holds", if d >= sup - DIAMETER_TOL { 1.0 } else { 0.0 })
            .margin("d_minus_bound_half", d - half, DIAMETER_TOL))
    };
    inner().unwrap_or_else(|e| VerificationReport::new(case_id).fail(e.to_string()))
}

/// Certify the diameter bound on a closed non-circular shrinker.
pub fn verify_shrinker_diameter(curve: &ShrinkerCurve) -> Result<VerificationReport> {
    if curve.is_circle() {
        return Err(Error::TrivialCase("the circle has φ = 0".into()));
    }
    let cd = k0_and_diameter(curve)?;
    let id = format!(
        "shrinker-diameter-al{}-{}-lambda{}",
        curve.rotation_p, curve.petals_q, curve.lambda
    );
    let report = verify_diameter_values(&id, curve.lambda, cd.k0, cd.d);
    // on a genuine shrinker the supremum bound is certified as well
    let sup_margin = report.computed.get("sup_margin").copied().unwrap_or(f64::NAN);
    Ok(report
        .input("n_points", curve.len() as f64)
        .margin("d_minus_bound_sup", sup_margin, DIAMETER_TOL)
        .note(CONVENTION)
        .note("d = L/2"))
}

/// The circle has φ = 0 and is excluded from the bound; report the inequality anyway.
pub fn circle_diameter_report(curve: &ShrinkerCurve) -> Result<VerificationReport> {
    if !curve.is_circle() {
        return Err(Error::InvalidInput("expected a circle shrinker".into()));
    }
    let cd = k0_and_diameter(curve)?;
    let lambda = curve.lambda;
    let radius = curve.radii().iter().sum::<f64>() / curve.len() as f64;
    let expected_radius = 1.0 / lambda.sqrt();
    let phi_max = potential_phi(curve).iter().map(|p| p.abs()).fold(0.0, f64::max);
    let residual = curve.shrinker_residual();
    Ok(
        verify_diameter_values(&format!("shrinker-circle-lambda{lambda}"), lambda, cd.k0, cd.d)
            .input("n_points", curve.len() as f64)
            .computed("radius", radius)
            .computed("shrinker_residual", residual)
            .computed("phi_max_abs", phi_max)
            .bound("circle_diameter", PI / lambda.sqrt())
            .margin("radius_error_slack", 1e-10 - (radius - expected_radius).abs(), 0.0)
            .margin("shrinker_residual_slack", 1e-12 - residual, 0.0)
            .margin("phi_zero_slack", 1e-14 - phi_max, 0.0)
            .note(CONVENTION)
            .note("trivial (φ = 0)"),
    )
}

/// Identity checks on a closed shrinker: closure, shrinker equation, first
/// integral, the mean-curvature identity and `Δ_φ φ = -2λ φ`.
pub fn shrinker_identity_report(case_id: &str, curve: &ShrinkerCurve) -> Result<VerificationReport> {
    let mc = mean_curvature_identity_residual(curve)?;
    let (defect, phi_max) = eigen_identity_defect(curve)?;
    let eigen = defect / phi_max.max(f64::MIN_POSITIVE);
    let (rho, rho_residual) = phi_rayleigh(curve)?;
    let target = 2.0 * curve.lambda;
    // distance from 2λ to the spectrum is at most |ρ - 2λ| + residual
    let membership = ((rho - target).abs() + rho_residual) / target;
    let first = curve.first_integral_variation();
    let shrinker = curve.shrinker_residual();
    Ok(VerificationReport::new(case_id)
        .input("lambda", curve.lambda)
        .input("n_points", curve.len() as f64)
        .input("p", curve.rotation_p as f64)
        .input("q", curve.petals_q as f64)
        .computed("length", curve.length())
        .computed("closure_residual", curve.closure_residual)
        .computed("shrinker_residual", shrinker)
        .computed("first_integral_variation", first)
        .computed("mean_curvature_identity_residual", mc)
        .computed("eigen_identity_relative", eigen)
        .computed("phi_rayleigh_quotient", rho)
        .computed("phi_rayleigh_residual", rho_residual)
        .margin("closure_slack", 1e-6 - curve.closure_residual, 0.0)
        .margin("shrinker_residual_slack", 1e-6 - shrinker, 0.0)
        .margin("first_integral_slack", 1e-6 - first, 0.0)
        .margin("mean_curvature_slack", 1e-4 - mc, 0.0)
        .margin("eigen_identity_slack", 5e-3 - eigen, 0.0)
        .margin("membership_slack", 5e-3 - membership, 0.0)
        .note(CONVENTION)
        .note("-Δ_φ is realized as M^{-1} S on the periodic sample chain"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shrinkers::circle_shrinker;

    #[test]
    fn synthetic_values() {
        let pass = verify_diameter_values("syn", 1.0, 0.0, 2.6);
        assert!(pass.pass);
        assert!((pass.bounds["diameter_bound_half"] - PI * (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // the sharper bound π√(12 - 8√2) ≈ 2.6026 is not met by d = 2.6
        assert!((pass.bounds["diameter_bound_sup"] - PI * (12.0 - 8.0 * 2.0f64.sqrt()).sqrt()).abs() < 1e-8);
        assert_eq!(pass.computed["sup_holds"], 0.0);
        let fail = verify_diameter_values("syn", 1.0, 0.0, 2.5);
        assert!(!fail.pass);
        assert!(!verify_diameter_values("bad", -1.0, 0.0, 2.5).pass);
    }

    #[test]
    fn circle_cases() {
        for lambda in [1.0, 4.0] {
            let c = circle_shrinker(lambda, 1000).unwrap();
            let cd = k0_and_diameter(&c).unwrap();
            assert!((cd.k0 - lambda).abs() < 1e-12);
            assert!((cd.d - PI / lambda.sqrt()).abs() < 1e-12);
            assert!(cd.k.abs() < 1e-12);
            assert!(matches!(verify_shrinker_diameter(&c), Err(Error::TrivialCase(_))));
            let rep = circle_diameter_report(&c).unwrap();
            assert!(rep.pass, "{:?}", rep.failing());
            assert!((rep.bounds["diameter_bound_half"] - PI / (2.0 * lambda).sqrt()).abs() < 1e-12);
        }
    }
}
