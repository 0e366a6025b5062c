//! The full certification suite behind `verify-all`.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;

use crate::bounds::{
    andrews_ni_bound, constant_ledger, futaki_sano_bound, interior_branch_value, soliton_diameter_bounds,
    soliton_optimal_s, soliton_ratio_grid_max, sup_bound_closed, sup_bound_grid, sweep_grid, BoundInput, SolitonInput,
};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{Summary, VerificationReport};
use crate::shrinkers::{
    circle_diameter_report, circle_shrinker, eigen_identity_residual, find_abresch_langer, gaussian_soliton_check,
    mean_curvature_identity_residual, sample_ball, shrinker_identity_report, verify_shrinker_diameter, ShootingConfig,
};
use crate::spectral::{
    apply_weight, build_icosphere, circle_case, lambda1_witten_with, sphere_case, sphere_height_case,
    weighted_circle_case, SolverOptions,
};
use crate::sturm::{dirichlet_lambda1_with, neumann_lambda1_with, verify_comparison_with, verify_shift_with};

fn key_kd(k: f64, d: f64) -> String {
    format!("K={k},d={d:.6}")
}

/// Closed form against the grid oracle on the `(K, d)` sweep, plus the
/// dominance of the closed form over the comparison bounds.
pub fn bounds_grid_case(config: &RunConfig) -> VerificationReport {
    let id = "bounds-closed-vs-grid";
    let grid = sweep_grid(config.k_range, config.d_range, config.grid_counts);
    let rows: Result<Vec<(f64, f64, f64, f64)>> = grid
        .par_iter()
        .map(|input| {
            let closed = sup_bound_closed(input);
            let oracle = sup_bound_grid(input, config.sup_grid)?;
            Ok((
                input.k,
                (closed - oracle).abs(),
                closed - andrews_ni_bound(input),
                closed - futaki_sano_bound(input),
            ))
        })
        .collect();
    let rows = match rows {
        Ok(r) => r,
        Err(e) => return VerificationReport::new(id).fail(e.to_string()),
    };
    let max_diff = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let min_an = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let min_fs_pos = rows
        .iter()
        .filter(|r| r.0 >= 0.0)
        .map(|r| r.3)
        .fold(f64::INFINITY, f64::min);
    let fs_exceed = rows.iter().filter(|r| r.0 < 0.0 && r.3 < 0.0).count();
    VerificationReport::new(id)
        .input("k_min", config.k_range.0)
        .input("k_max", config.k_range.1)
        .input("d_min", config.d_range.0)
        .input("d_max", config.d_range.1)
        .input("k_count", config.grid_counts.0 as f64)
        .input("d_count", config.grid_counts.1 as f64)
        .input("sup_grid", config.sup_grid as f64)
        .computed("max_closed_minus_grid", max_diff)
        .computed("min_sup_minus_andrews_ni", min_an)
        .computed("min_sup_minus_futaki_sano_k_nonneg", min_fs_pos)
        .computed("futaki_sano_exceeds_sup_k_negative", fs_exceed as f64)
        .margin("closed_vs_grid_slack", 1e-6 - max_diff, 0.0)
        .margin("sup_minus_andrews_ni", min_an, 1e-12)
        .margin("sup_minus_futaki_sano_k_nonneg", min_fs_pos, 1e-12)
        .note("for K < 0 the Futaki-Sano value is reported without a verdict")
}

/// The interior formula meets the outer branches at `K d² = ±4π²`.
pub fn branch_continuity_case() -> VerificationReport {
    let mut report = VerificationReport::new("bounds-branch-continuity");
    let mut worst = 0.0f64;
    for d in [0.5, 1.0, 2.0, PI, 5.0, 10.0] {
        for sign in [-1.0, 1.0] {
            let k = sign * 4.0 * PI * PI / (d * d);
            let input = BoundInput { k, d };
            let interior = interior_branch_value(&input);
            let outer = if sign < 0.0 { 0.0 } else { k };
            let scale = k.abs().max(1.0);
            let gap = (interior - outer).abs() / scale;
            worst = worst.max(gap);
            report = report.margin(
                &format!("{}_d={d:.6}", if sign < 0.0 { "lower" } else { "upper" }),
                1e-12 - gap,
                0.0,
            );
        }
    }
    report
        .computed("max_relative_gap", worst)
        .note("gaps are relative to max(1, |K|)")
}

/// Diameter constants and the soliton optimum of `4s(1-s)/(2-s)`.
pub fn constant_ledger_case() -> VerificationReport {
    let c = constant_ledger();
    let opt = soliton_optimal_s();
    let (g_grid, s_grid) = soliton_ratio_grid_max(10_000_000);
    let b = soliton_diameter_bounds(&SolitonInput { lambda: 1.0 });
    VerificationReport::new("bounds-constant-ledger")
        .computed("optimized", c.optimized)
        .computed("andrews_ni", c.andrews_ni)
        .computed("futaki_sano", c.futaki_sano)
        .computed("s_star", opt.s_star)
        .computed("g_max", opt.g_max)
        .computed("grid_g_max", g_grid)
        .computed("grid_s_star", s_grid)
        .bound("soliton_diameter_optimized", b.optimized)
        .bound("soliton_diameter_andrews_ni", b.andrews_ni)
        .bound("soliton_diameter_futaki_sano", b.futaki_sano)
        .margin("optimized_minus_andrews_ni", c.optimized - c.andrews_ni, 0.0)
        .margin("andrews_ni_minus_futaki_sano", c.andrews_ni - c.futaki_sano, 0.0)
        .margin("g_max_grid_slack", 1e-12 - (opt.g_max - g_grid).abs(), 0.0)
        .margin("s_star_grid_slack", 1e-6 - (opt.s_star - s_grid).abs(), 0.0)
}

/// Flat operator: both boundary conditions give `π²/d²` with order-2 convergence.
pub fn ou_exactness_case(d: f64, m: usize) -> VerificationReport {
    let id = format!("ou-exactness-d{d:.6}");
    let inner = || -> Result<VerificationReport> {
        let exact = PI * PI / (d * d);
        let neu = neumann_lambda1_with(0.0, d, m)?;
        let dir = dirichlet_lambda1_with(0.0, d, m)?;
        let mut report = VerificationReport::new(id.clone())
            .input("d", d)
            .input("m", m as f64)
            .bound("exact", exact);
        for (name, x) in [("neumann", neu), ("dirichlet", dir)] {
            let rel = (x.value - exact).abs() / exact;
            let ratio = (x.coarse - exact) / (x.fine - exact);
            report = report
                .computed(&format!("{name}_lambda1"), x.value)
                .computed(&format!("{name}_relative_error"), rel)
                .computed(&format!("{name}_convergence_ratio"), ratio)
                .margin(&format!("{name}_relative_error_slack"), 1e-6 - rel, 0.0)
                .margin(&format!("{name}_ratio_above"), ratio - 3.5, 0.0)
                .margin(&format!("{name}_ratio_below"), 4.5 - ratio, 0.0);
        }
        Ok(report)
    };
    inner().unwrap_or_else(|e| VerificationReport::new(id.clone()).fail(e.to_string()))
}

fn merge_grid(id: &str, reports: Vec<VerificationReport>, margin_key: &str) -> VerificationReport {
    let mut out = VerificationReport::new(id);
    for r in reports {
        let (k, d) = (r.inputs["K"], r.inputs["d"]);
        let key = key_kd(k, d);
        for note in &r.notes {
            out = out.note(format!("{key}: {note}"));
        }
        for (name, value) in &r.margins {
            let label = if name == margin_key {
                key.clone()
            } else {
                format!("{key}:{name}")
            };
            out = out.margin(&label, *value, r.tolerances[name]);
        }
    }
    out
}

pub fn ou_shift_grid_case(config: &RunConfig) -> VerificationReport {
    let points: Vec<(f64, f64)> = config
        .ou_k
        .iter()
        .flat_map(|&k| config.ou_d.iter().map(move |&d| (k, d)))
        .collect();
    let reports: Vec<VerificationReport> = points
        .par_iter()
        .map(|&(k, d)| verify_shift_with(k, d, config.ou_m))
        .collect();
    merge_grid("ou-shift-grid", reports, "shift_defect_slack").input("m", config.ou_m as f64)
}

pub fn ou_comparison_grid_case(config: &RunConfig) -> VerificationReport {
    let points: Vec<(f64, f64)> = config
        .ou_k
        .iter()
        .flat_map(|&k| config.ou_d.iter().map(move |&d| (k, d)))
        .collect();
    let reports: Vec<VerificationReport> = points
        .par_iter()
        .map(|&(k, d)| verify_comparison_with(k, d, config.ou_m))
        .collect();
    merge_grid("ou-comparison-grid", reports, "lambda1_minus_sup").input("m", config.ou_m as f64)
}

/// `λ₁` is unchanged when a constant is added to the potential.
pub fn weight_shift_case(subdivisions: usize, a: f64, shift: f64) -> VerificationReport {
    let id = format!("spectral-weight-shift-s{subdivisions}");
    let inner = || -> Result<VerificationReport> {
        let sphere = build_icosphere(subdivisions)?;
        let phi: Vec<f64> = sphere.vertices.iter().map(|v| a * v[2]).collect();
        let shifted: Vec<f64> = phi.iter().map(|p| p + shift).collect();
        let opts = SolverOptions {
            diameter: false,
            ..SolverOptions::default()
        };
        let l0 = lambda1_witten_with(&apply_weight(&sphere, &phi)?, &opts)?.lambda1;
        let l1 = lambda1_witten_with(&apply_weight(&sphere, &shifted)?, &opts)?.lambda1;
        let rel = (l0 - l1).abs() / l0;
        Ok(VerificationReport::new(id.clone())
            .input("a", a)
            .input("shift", shift)
            .computed("lambda1", l0)
            .computed("lambda1_shifted", l1)
            .computed("relative_difference", rel)
            .margin("invariance_slack", 1e-12 - rel, 0.0))
    };
    inner().unwrap_or_else(|e| VerificationReport::new(id.clone()).fail(e.to_string()))
}

pub fn shrinker_circle_case(lambda: f64, n: usize) -> VerificationReport {
    let id = format!("shrinker-circle-lambda{lambda}");
    circle_shrinker(lambda, n)
        .and_then(|c| circle_diameter_report(&c))
        .unwrap_or_else(|e| VerificationReport::new(id).fail(e.to_string()))
}

/// Identity checks on `AL(p, q)` with the order-2 trend against half the nodes,
/// followed by the diameter certification.
pub fn abresch_langer_cases(p: u32, q: u32, n_points: usize) -> Vec<VerificationReport> {
    let id = format!("shrinker-al{p}-{q}-identities");
    let diam_id = format!("shrinker-diameter-al{p}-{q}-lambda1");
    let inner = || -> Result<Vec<VerificationReport>> {
        let run = |n: usize| {
            find_abresch_langer(
                1.0,
                p,
                q,
                &ShootingConfig {
                    n_points: n,
                    ..ShootingConfig::new(p, q)
                },
            )
        };
        let al = run(n_points)?;
        let coarse = run(n_points / 2)?;
        let mc_ratio = mean_curvature_identity_residual(&coarse.curve)? / mean_curvature_identity_residual(&al.curve)?;
        let ei_ratio = eigen_identity_residual(&coarse.curve)? / eigen_identity_residual(&al.curve)?;
        let identities = shrinker_identity_report(&id, &al.curve)?
            .computed("r0", al.r0)
            .computed("k_min", al.k_min)
            .computed("k_max", al.k_max)
            .computed("r_max", al.r_max)
            .computed("bisections", al.log.len() as f64)
            .computed("mean_curvature_order_ratio", mc_ratio)
            .computed("eigen_identity_order_ratio", ei_ratio)
            .margin("mean_curvature_order_above", mc_ratio - 3.5, 0.0)
            .margin("mean_curvature_order_below", 4.5 - mc_ratio, 0.0)
            .margin("eigen_identity_order_above", ei_ratio - 3.5, 0.0)
            .margin("eigen_identity_order_below", 4.5 - ei_ratio, 0.0);
        Ok(vec![identities, verify_shrinker_diameter(&al.curve)?])
    };
    inner().unwrap_or_else(|e| {
        vec![
            VerificationReport::new(id.clone()).fail(e.to_string()),
            VerificationReport::new(diam_id.clone()).fail(e.to_string()),
        ]
    })
}

pub fn soliton_case(config: &RunConfig) -> VerificationReport {
    let id = format!("soliton-gaussian-n{}", config.soliton_n);
    let points = sample_ball(
        config.soliton_n,
        config.soliton_samples,
        config.soliton_radius,
        config.soliton_seed,
    );
    let mut worked = vec![vec![0.0; config.soliton_n]];
    if config.soliton_n == 2 {
        worked.extend([vec![1.0, 1.0], vec![2.0, 0.0]]);
    }
    worked.extend(points);
    gaussian_soliton_check(config.soliton_n, config.soliton_lambda, &worked)
        .map(|c| c.report(&id).input("radius", config.soliton_radius))
        .unwrap_or_else(|e| VerificationReport::new(id).fail(e.to_string()))
}

type Task<'a> = Box<dyn Fn() -> Vec<VerificationReport> + Send + Sync + 'a>;

/// Every case of the suite, sorted by case id.
pub fn run_suite(config: &RunConfig) -> Vec<VerificationReport> {
    let mut tasks: Vec<Task> = vec![
        Box::new(|| vec![bounds_grid_case(config)]),
        Box::new(|| vec![branch_continuity_case()]),
        Box::new(|| vec![constant_ledger_case()]),
        Box::new(|| vec![ou_shift_grid_case(config)]),
        Box::new(|| vec![ou_comparison_grid_case(config)]),
        Box::new(|| vec![weighted_circle_case(config.circle_n, 1.0, config.circle_a)]),
        Box::new(|| vec![sphere_case(config.sphere_subdivisions)]),
        Box::new(|| vec![weight_shift_case(config.sphere_subdivisions, 0.5, config.weight_shift)]),
        Box::new(|| vec![shrinker_circle_case(1.0, config.shrinker_circle_points)]),
        Box::new(|| vec![shrinker_circle_case(4.0, config.shrinker_circle_points)]),
        Box::new(|| abresch_langer_cases(config.al_p, config.al_q, config.al_points)),
        Box::new(|| vec![soliton_case(config)]),
    ];
    for &d in &config.ou_exact_d {
        tasks.push(Box::new(move || vec![ou_exactness_case(d, config.ou_m)]));
    }
    for &r in &config.circle_radii {
        tasks.push(Box::new(move || vec![circle_case(config.circle_n, r)]));
    }
    for &a in &config.sphere_heights {
        tasks.push(Box::new(move || {
            vec![sphere_height_case(a, config.sphere_subdivisions)]
        }));
    }
    let mut reports: Vec<VerificationReport> = tasks.par_iter().flat_map(|t| t()).collect();
    reports.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    reports
}

/// Write `<case_id>.json` per report and `summary.json`.
pub fn write_reports(dir: &Path, reports: &[VerificationReport]) -> Result<Summary> {
    std::fs::create_dir_all(dir)?;
    for r in reports {
        std::fs::write(dir.join(format!("{}.json", r.case_id)), r.to_json() + "\n")?;
    }
    let summary = Summary::from_reports(reports);
    std::fs::write(dir.join("summary.json"), summary.to_json() + "\n")?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_cases_pass() {
        assert!(branch_continuity_case().pass);
        let c = constant_ledger_case();
        assert!(c.pass, "{:?}", c.failing());
        let cfg = RunConfig {
            grid_counts: (5, 5),
            sup_grid: 100_000,
            ..RunConfig::default()
        };
        let g = bounds_grid_case(&cfg);
        assert!(g.computed["max_closed_minus_grid"] < 1e-6);
        assert!(soliton_case(&cfg).pass);
        assert!(ou_exactness_case(2.0, 400).margins["neumann_ratio_above"] > 0.0);
    }
}
