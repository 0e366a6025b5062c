//! Closed-form eigenvalue and diameter lower bounds.
//!
//! Everything here is a pure function of its inputs. The supremum over
//! `s in (0, 1)` of `4 s (1 - s) pi^2 / d^2 + s K` has a three-branch closed
//! form; [`sup_bound_grid`] is the brute-force scan used to check it.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};

/// Curvature lower bound `K` and diameter `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInput {
    pub k: f64,
    pub d: f64,
}

impl BoundInput {
    pub fn new(k: f64, d: f64) -> Result<Self> {
        if !k.is_finite() || !d.is_finite() {
            return Err(Error::InvalidInput(format!("K = {k}, d = {d} must be finite")));
        }
        if d <= 0.0 {
            return Err(Error::InvalidInput(format!("diameter d = {d} must be positive")));
        }
        Ok(Self { k, d })
    }

    /// `K d^2`, the scale-free quantity that selects the branch.
    pub fn kd2(&self) -> f64 {
        self.k * self.d * self.d
    }
}

/// Soliton constant `lambda` of `Ric + Hess f = lambda g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonInput {
    pub lambda: f64,
}

impl SolitonInput {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidInput(format!(
                "soliton constant {lambda} must be positive"
            )));
        }
        Ok(Self { lambda })
    }
}

/// Shrinker constant `lambda` and the squared second fundamental form bound `K0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShrinkerBoundInput {
    pub lambda: f64,
    pub k0: f64,
}

impl ShrinkerBoundInput {
    pub fn new(lambda: f64, k0: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidInput(format!(
                "shrinker constant {lambda} must be positive"
            )));
        }
        if !(k0.is_finite() && k0 >= 0.0) {
            return Err(Error::InvalidInput(format!("K0 = {k0} must be nonnegative")));
        }
        Ok(Self { lambda, k0 })
    }

    /// `K = lambda - K0`, the Bakry-Emery lower bound on a shrinker.
    pub fn curvature_bound(&self) -> f64 {
        self.lambda - self.k0
    }
}

/// The objective `4 s (1 - s) pi^2 / d^2 + s K` at one parameter value.
#[inline]
pub fn sup_objective(s: f64, input: &BoundInput) -> f64 {
    4.0 * s * (1.0 - s) * PI * PI / (input.d * input.d) + s * input.k
}

/// Which branch of the closed form is active, and where the supremum sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum SupBranch {
    /// `K d^2 < -4 pi^2`: value 0, approached as `s -> 0`, not attained.
    Vanishing,
    /// `|K d^2| <= 4 pi^2`: attained at the interior maximizer.
    Interior { s_star: f64 },
    /// `K d^2 > 4 pi^2`: value `K`, approached as `s -> 1`, not attained.
    Curvature,
}

impl SupBranch {
    pub fn attained(&self) -> bool {
        match self {
            SupBranch::Interior { s_star } => *s_star > 0.0 && *s_star < 1.0,
            _ => false,
        }
    }
}

pub fn sup_branch(input: &BoundInput) -> SupBranch {
    let kd2 = input.kd2();
    let edge = 4.0 * PI * PI;
    if kd2 < -edge {
        SupBranch::Vanishing
    } else if kd2 > edge {
        SupBranch::Curvature
    } else {
        // stationary point of the concave quadratic
        SupBranch::Interior {
            s_star: 0.5 + kd2 / (8.0 * PI * PI),
        }
    }
}

/// Interior-branch formula `(pi/d + K d/(4 pi))^2`, valid for `|K d^2| <= 4 pi^2`.
#[inline]
pub fn interior_branch_value(input: &BoundInput) -> f64 {
    let t = PI / input.d + input.k * input.d / (4.0 * PI);
    t * t
}

/// Least upper bound of the objective over the open interval `(0, 1)`.
pub fn sup_bound_closed(input: &BoundInput) -> f64 {
    match sup_branch(input) {
        SupBranch::Vanishing => 0.0,
        SupBranch::Interior { .. } => interior_branch_value(input),
        SupBranch::Curvature => input.k,
    }
}

/// Brute-force maximum of the objective on the uniform grid
/// `s_i = i / (grid_size + 1)`.
///
/// The interior nodes `i = 1..=grid_size` are scanned together with the two
/// closure nodes `i = 0` and `i = grid_size + 1`. The objective is continuous
/// on `[0, 1]`, so its supremum over the open interval is the maximum over the
/// closure; without the closure nodes the scan would sit `O(1/grid_size)`
/// below the supremum whenever it is not attained.
pub fn sup_bound_grid(input: &BoundInput, grid_size: usize) -> Result<f64> {
    if grid_size < 3 {
        return Err(Error::InvalidInput(format!(
            "grid_size = {grid_size} must be at least 3"
        )));
    }
    let denom = (grid_size + 1) as f64;
    let best = (0..=grid_size + 1)
        .map(|i| sup_objective(i as f64 / denom, input))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// Same scan restricted to the interior nodes, together with the maximizing node.
pub fn sup_bound_grid_interior(input: &BoundInput, grid_size: usize) -> Result<(f64, f64)> {
    if grid_size < 3 {
        return Err(Error::InvalidInput(format!(
            "grid_size = {grid_size} must be at least 3"
        )));
    }
    let denom = (grid_size + 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 1..=grid_size {
        let s = i as f64 / denom;
        let v = sup_objective(s, input);
        if v > best.0 {
            best = (v, s);
        }
    }
    Ok(best)
}

/// `pi^2/d^2 + 0.31 K`.
pub fn futaki_sano_bound(input: &BoundInput) -> f64 {
    PI * PI / (input.d * input.d) + 0.31 * input.k
}

/// `pi^2/d^2 + K/2`, the `s = 1/2` evaluation of the objective.
pub fn andrews_ni_bound(input: &BoundInput) -> f64 {
    PI * PI / (input.d * input.d) + 0.5 * input.k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonDiameterBounds {
    pub optimized: f64,
    pub futaki_sano: f64,
    pub andrews_ni: f64,
}

impl SolitonDiameterBounds {
    /// `optimized > andrews_ni > futaki_sano`.
    pub fn ordered(&self) -> bool {
        self.optimized > self.andrews_ni && self.andrews_ni > self.futaki_sano
    }
}

/// Diameter lower bounds for a nontrivial compact shrinking soliton.
pub fn soliton_diameter_bounds(input: &SolitonInput) -> SolitonDiameterBounds {
    let root = input.lambda.sqrt();
    SolitonDiameterBounds {
        optimized: 2.0 * (SQRT_2 - 1.0) * PI / root,
        futaki_sano: 10.0 * PI / (13.0 * root),
        andrews_ni: (2.0 / (3.0 * input.lambda)).sqrt() * PI,
    }
}

/// `4 s (1 - s) / (2 - s)`, the coefficient left after substituting the
/// soliton eigenvalue `2 lambda` into the objective with `K = lambda`.
#[inline]
pub fn soliton_ratio(s: f64) -> f64 {
    4.0 * s * (1.0 - s) / (2.0 - s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonOptimum {
    pub s_star: f64,
    pub g_max: f64,
}

pub fn soliton_optimal_s() -> SolitonOptimum {
    SolitonOptimum {
        s_star: 2.0 - SQRT_2,
        g_max: 12.0 - 8.0 * SQRT_2,
    }
}

/// Maximum of [`soliton_ratio`] over `i / (points + 1)`, `i = 1..=points`.
pub fn soliton_ratio_grid_max(points: usize) -> (f64, f64) {
    let denom = (points + 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 1..=points {
        let s = i as f64 / denom;
        let g = soliton_ratio(s);
        if g > best.0 {
            best = (g, s);
        }
    }
    best
}

/// `pi / sqrt(3 lambda / 2 + K0 / 2)`.
pub fn shrinker_diameter_bound(input: &ShrinkerBoundInput) -> Result<f64> {
    let denom = 1.5 * input.lambda + 0.5 * input.k0;
    if denom <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "3 lambda/2 + K0/2 = {denom} must be positive"
        )));
    }
    Ok(PI / denom.sqrt())
}

/// Diameter bound from `2 lambda >= 4 s (1 - s) pi^2 / d^2 + s K` at one `s`,
/// i.e. `d >= pi sqrt(4 s (1 - s) / (2 lambda - s K))` with `K = lambda - K0`.
pub fn shrinker_diameter_bound_at(input: &ShrinkerBoundInput, s: f64) -> f64 {
    let slack = 2.0 * input.lambda - s * input.curvature_bound();
    if slack <= 0.0 {
        return f64::INFINITY;
    }
    PI * (4.0 * s * (1.0 - s) / slack).sqrt()
}

/// Largest [`shrinker_diameter_bound_at`] over the grid `i / (grid_size + 1)`.
pub fn shrinker_diameter_bound_sup(input: &ShrinkerBoundInput, grid_size: usize) -> (f64, f64) {
    let denom = (grid_size + 1) as f64;
    let mut best = (0.0, 0.5);
    for i in 1..=grid_size {
        let s = i as f64 / denom;
        let b = shrinker_diameter_bound_at(input, s);
        if b > best.0 {
            best = (b, s);
        }
    }
    best
}

/// The three diameter constants in front of `pi / sqrt(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantLedger {
    pub optimized: f64,
    pub andrews_ni: f64,
    pub futaki_sano: f64,
}

impl ConstantLedger {
    pub fn ordered(&self) -> bool {
        self.optimized > self.andrews_ni && self.andrews_ni > self.futaki_sano
    }
}

pub fn constant_ledger() -> ConstantLedger {
    ConstantLedger {
        optimized: 2.0 * (SQRT_2 - 1.0),
        andrews_ni: (2.0f64 / 3.0).sqrt(),
        futaki_sano: 10.0 / 13.0,
    }
}

/// One node of the standard `(K, d)` sweep: `K` in `[k_min, k_max]`, `d` in `[d_min, d_max]`.
pub fn sweep_grid(k_range: (f64, f64), d_range: (f64, f64), counts: (usize, usize)) -> Vec<BoundInput> {
    let lin = |lo: f64, hi: f64, n: usize, i: usize| {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(counts.0 * counts.1);
    for i in 0..counts.0 {
        for j in 0..counts.1 {
            out.push(BoundInput {
                k: lin(k_range.0, k_range.1, counts.0, i),
                d: lin(d_range.0, d_range.1, counts.1, j),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn input(k: f64, d: f64) -> BoundInput {
        BoundInput::new(k, d).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(BoundInput::new(1.0, 0.0).is_err());
        assert!(BoundInput::new(f64::NAN, 1.0).is_err());
        assert!(BoundInput::new(1.0, f64::INFINITY).is_err());
        assert!(SolitonInput::new(0.0).is_err());
        assert!(ShrinkerBoundInput::new(1.0, -0.1).is_err());
        assert!(sup_bound_grid(&input(0.0, 1.0), 2).is_err());
    }

    #[test]
    fn grid_examples() {
        let v = sup_bound_grid(&input(0.0, PI), 1001).unwrap();
        assert!((v - 1.0).abs() < 1e-5);

        let v = sup_bound_grid(&input(-5.0, PI), 1001).unwrap();
        assert!((0.0..=1e-2).contains(&v));
        // interior-only scan sits below zero and approaches it under refinement
        let coarse = sup_bound_grid_interior(&input(-5.0, PI), 1001).unwrap().0;
        let fine = sup_bound_grid_interior(&input(-5.0, PI), 100_001).unwrap().0;
        assert!(coarse < fine && fine < 0.0 && fine > -1e-4);

        let v = sup_bound_grid(&input(1.0, PI), 10_001).unwrap();
        assert!((v - sup_bound_closed(&input(1.0, PI))).abs() < 1e-7);
    }

    #[test]
    fn closed_examples() {
        assert_eq!(sup_bound_closed(&input(0.0, PI)), 1.0);
        assert_eq!(sup_bound_closed(&input(-5.0, PI)), 0.0);
        // brute force at 10^6 nodes, frozen: 1.5625
        let oracle = sup_bound_grid(&input(1.0, PI), 1_000_000).unwrap();
        assert!((oracle - 1.5625).abs() < 1e-11);
        assert!((sup_bound_closed(&input(1.0, PI)) - 1.5625).abs() < 1e-14);
    }

    #[test]
    fn comparison_bound_examples() {
        assert!((futaki_sano_bound(&input(0.0, PI)) - 1.0).abs() < 1e-15);
        assert!((futaki_sano_bound(&input(1.0, PI)) - 1.31).abs() < 1e-15);
        assert!((futaki_sano_bound(&input(-1.0, PI)) - 0.69).abs() < 1e-15);
        assert!((andrews_ni_bound(&input(0.0, PI)) - 1.0).abs() < 1e-15);
        assert!((andrews_ni_bound(&input(1.0, PI)) - 1.5).abs() < 1e-15);
        let i = input(1.0, PI);
        assert_eq!(andrews_ni_bound(&i), sup_objective(0.5, &i));
    }

    #[test]
    fn soliton_examples() {
        let b1 = soliton_diameter_bounds(&SolitonInput::new(1.0).unwrap());
        assert!((b1.optimized - 2.602581).abs() < 1e-6);
        assert!((b1.futaki_sano - 2.416610).abs() < 1e-6);
        assert!(b1.ordered());
        let b4 = soliton_diameter_bounds(&SolitonInput::new(4.0).unwrap());
        assert!((b4.optimized - b1.optimized / 2.0).abs() < 1e-15);
        assert!((b4.futaki_sano - b1.futaki_sano / 2.0).abs() < 1e-15);
        assert!((b4.andrews_ni - b1.andrews_ni / 2.0).abs() < 1e-15);
    }

    #[test]
    fn soliton_optimum() {
        let opt = soliton_optimal_s();
        assert!((opt.s_star - 0.58578643).abs() < 1e-8);
        assert!((opt.g_max - 0.68629150).abs() < 1e-8);
        assert!((soliton_ratio(opt.s_star) - opt.g_max).abs() < 4.0 * f64::EPSILON);
        let (grid_max, at) = soliton_ratio_grid_max(1_000_000);
        assert!(grid_max <= opt.g_max + 1e-12);
        assert!((grid_max - opt.g_max).abs() <= 1e-12);
        assert!((at - opt.s_star).abs() < 1e-6);
    }

    #[test]
    fn shrinker_bound_examples() {
        let b = |l, k0| shrinker_diameter_bound(&ShrinkerBoundInput::new(l, k0).unwrap()).unwrap();
        assert!((b(1.0, 0.0) - PI * (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((b(1.0, 0.0) - 2.565100).abs() < 1e-6);
        assert!((b(1.0, 1.0) - PI / SQRT_2).abs() < 1e-14);
        assert!((b(1.0, 1.0) - 2.221441).abs() < 1e-6);
        assert!((b(2.0, 0.0) - PI / 3f64.sqrt()).abs() < 1e-14);
        for &(l, k0) in &[(1.0, 0.0), (1.0, 1.0), (2.0, 0.3), (0.5, 7.0)] {
            let inp = ShrinkerBoundInput::new(l, k0).unwrap();
            assert!((shrinker_diameter_bound_at(&inp, 0.5) - b(l, k0)).abs() < 1e-14);
            let (sup, _) = shrinker_diameter_bound_sup(&inp, 100_000);
            assert!(sup >= b(l, k0) - 1e-9);
        }
    }

    #[test]
    fn branch_continuity() {
        let edge = 4.0 * PI * PI;
        for &d in &[0.5, 1.0, PI, 7.0] {
            let up = BoundInput { k: edge / (d * d), d };
            assert!((interior_branch_value(&up) - up.k).abs() <= 1e-12 * up.k.abs().max(1.0));
            let down = BoundInput { k: -edge / (d * d), d };
            assert!(interior_branch_value(&down).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_ordering() {
        let c = constant_ledger();
        assert!(c.ordered());
        assert!((c.optimized - 0.828427).abs() < 1e-6);
        assert!((c.andrews_ni - 0.816496).abs() < 1e-6);
        assert!((c.futaki_sano - 0.769230).abs() < 1e-6);
    }

    #[test]
    fn futaki_sano_can_exceed_for_negative_curvature() {
        // reported, not asserted as a dominance failure
        let i = input(-1.0, PI);
        assert!(futaki_sano_bound(&i) > sup_bound_closed(&i));
        assert!((sup_bound_closed(&i) - 0.5625).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn closed_matches_grid(k in -10.0f64..10.0, d in 0.1f64..20.0) {
            let i = input(k, d);
            let closed = sup_bound_closed(&i);
            let grid = sup_bound_grid(&i, 20_000).unwrap();
            prop_assert!(grid <= closed + 1e-9 * closed.abs().max(1.0));
            prop_assert!(closed - grid <= 1e-6 * closed.abs().max(1.0));
        }

        #[test]
        fn dominance_and_sign(k in -10.0f64..10.0, d in 0.1f64..20.0) {
            let i = input(k, d);
            let closed = sup_bound_closed(&i);
            prop_assert!(closed >= 0.0);
            prop_assert!(closed >= andrews_ni_bound(&i) - 1e-12 * closed.abs().max(1.0));
            if k >= 0.0 {
                prop_assert!(closed >= futaki_sano_bound(&i) - 1e-12 * closed.max(1.0));
            }
        }

        #[test]
        fn monotone(k in -10.0f64..10.0, d in 0.1f64..20.0, dk in 0.0f64..1.0, dd in 0.0f64..1.0) {
            let base = sup_bound_closed(&input(k, d));
            let tol = 1e-12 * base.abs().max(1.0);
            prop_assert!(sup_bound_closed(&input(k + dk, d)) >= base - tol);
            if k >= 0.0 {
                prop_assert!(sup_bound_closed(&input(k, d + dd)) <= base + tol);
            }
        }

        #[test]
        fn soliton_scaling(lambda in 0.01f64..100.0, c in 0.01f64..100.0) {
            let a = soliton_diameter_bounds(&SolitonInput::new(lambda).unwrap());
            let b = soliton_diameter_bounds(&SolitonInput::new(c * lambda).unwrap());
            let r = c.sqrt();
            prop_assert!((b.optimized * r - a.optimized).abs() <= 1e-12 * a.optimized);
            prop_assert!((b.futaki_sano * r - a.futaki_sano).abs() <= 1e-12 * a.futaki_sano);
            prop_assert!((b.andrews_ni * r - a.andrews_ni).abs() <= 1e-12 * a.andrews_ni);
            prop_assert!(a.ordered());
        }
    }
}
