//! `witten-gap` command-line front end.
//!
//! Exit codes: 0 when every reported margin passes, 1 on a failing margin or
//! an internal error, 2 on invalid flags.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{
    andrews_ni_bound, futaki_sano_bound, soliton_diameter_bounds, sup_bound_closed, sup_branch, sweep_grid, BoundInput,
    SolitonInput, SupBranch,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::shrinkers::{
    circle_diameter_report, circle_shrinker, find_abresch_langer, shrinker_identity_report, verify_shrinker_diameter,
    ShootingConfig,
};
use crate::spectral::{
    apply_weight, build_icosphere, build_weighted_circle, circle_case, lambda1_witten_with, sphere_case,
    sphere_height_case, weighted_circle_case, SolverOptions, WeightedComplex,
};
use crate::sturm::{
    dirichlet_lambda1_with, neumann_lambda1_with, verify_comparison_with, verify_shift_with, BoundaryCondition,
};
use crate::suite::{run_suite, write_reports};

#[derive(Debug, Parser)]
#[command(
    name = "witten-gap",
    version,
    about = "Certify Witten-Laplacian eigenvalue and shrinker diameter bounds"
)]
struct Cli {
    /// Flat `key = value` run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form bounds, the soliton constants, or the (K, d) sweep as CSV.
    Bounds(BoundsArgs),
    /// The 1D comparison operator on (-d/2, d/2).
    Ou(OuArgs),
    /// Discrete Witten-Laplacian test cases.
    Spectral(SpectralArgs),
    /// Circle and Abresch-Langer shrinkers.
    Shrinker(ShrinkerArgs),
    /// Run the whole certification suite.
    VerifyAll(VerifyAllArgs),
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long = "K", allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Report the three soliton diameter bounds for `--lambda`.
    #[arg(long, requires = "lambda")]
    soliton: bool,
    /// Emit the configured (K, d) sweep as CSV.
    #[arg(long, conflicts_with_all = ["k", "d", "soliton"])]
    grid: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long, requires = "grid")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OuArgs {
    #[arg(long = "K", allow_hyphen_values = true)]
    k: f64,
    #[arg(long)]
    d: f64,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value = "neumann")]
    bc: BoundaryCondition,
    /// Check `λ^Neu - K = λ^Dir`.
    #[arg(long, conflicts_with = "verify")]
    check_shift: bool,
    /// Certify the Neumann `λ₁` against the closed-form supremum.
    #[arg(long)]
    verify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectralCase {
    Circle,
    WeightedCircle,
    Sphere,
    SphereHeight,
}

#[derive(Debug, Args)]
struct SpectralArgs {
    #[arg(long = "case", value_enum)]
    case: SpectralCase,
    /// Potential coefficient: `a cos θ` on circles, `a z` on spheres.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long)]
    subdivisions: Option<usize>,
    /// Write the mesh as OFF.
    #[arg(long)]
    export_mesh: Option<PathBuf>,
    /// Write the first eigenvector as CSV.
    #[arg(long)]
    export_eigenvector: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ShrinkerArgs {
    /// Abresch-Langer rotation index and lobe count.
    #[arg(long, num_args = 2, value_names = ["P", "Q"], conflicts_with = "circle")]
    al: Option<Vec<u32>>,
    /// The round circle of radius `1/√λ`.
    #[arg(long)]
    circle: bool,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    n: Option<usize>,
    /// Write the curve as CSV.
    #[arg(long)]
    export: Option<PathBuf>,
    /// Write the bisection log as JSON lines.
    #[arg(long, requires = "al")]
    log: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyAllArgs {
    #[arg(long, env = "WITTEN_GAP_OUT")]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::TrivialCase(_) => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Bounds(a) => cmd_bounds(a, &config),
        Command::Ou(a) => cmd_ou(a, &config),
        Command::Spectral(a) => cmd_spectral(a, &config),
        Command::Shrinker(a) => cmd_shrinker(a, &config),
        Command::VerifyAll(a) => cmd_verify_all(a, config),
    }
}

fn emit(report: &VerificationReport) -> bool {
    println!("{}", report.to_json());
    if !report.pass {
        eprintln!("failing margins in {}: {}", report.case_id, report.failing().join(", "));
    }
    report.pass
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn branch_name(branch: SupBranch) -> &'static str {
    match branch {
        SupBranch::Vanishing => "vanishing",
        SupBranch::Interior { .. } => "interior",
        SupBranch::Curvature => "curvature",
    }
}

fn cmd_bounds(a: BoundsArgs, config: &RunConfig) -> Outcome {
    if a.grid {
        let mut csv = String::from("K,d,Kd2,branch,sup_closed,futaki_sano,andrews_ni\n");
        for input in sweep_grid(config.k_range, config.d_range, config.grid_counts) {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                input.k,
                input.d,
                input.kd2(),
                branch_name(sup_branch(&input)),
                sup_bound_closed(&input),
                futaki_sano_bound(&input),
                andrews_ni_bound(&input)
            );
        }
        match a.out {
            Some(path) => std::fs::write(path, csv).map_err(Error::from)?,
            None => print!("{csv}"),
        }
        return Ok(true);
    }
    if a.soliton {
        let input = SolitonInput::new(a.lambda.expect("required by clap"))?;
        let b = soliton_diameter_bounds(&input);
        let report = VerificationReport::new(format!("bounds-soliton-lambda{}", input.lambda))
            .input("lambda", input.lambda)
            .bound("optimized", b.optimized)
            .bound("andrews_ni", b.andrews_ni)
            .bound("futaki_sano", b.futaki_sano)
            .computed("optimized_gt_andrews_ni", flag(b.optimized > b.andrews_ni))
            .computed("andrews_ni_gt_futaki_sano", flag(b.andrews_ni > b.futaki_sano))
            .margin("optimized_minus_andrews_ni", b.optimized - b.andrews_ni, 0.0)
            .margin("andrews_ni_minus_futaki_sano", b.andrews_ni - b.futaki_sano, 0.0);
        return Ok(emit(&report));
    }
    let (Some(k), Some(d)) = (a.k, a.d) else {
        return Err(Failure::Usage(
            "bounds needs --K and --d, --lambda with --soliton, or --grid".into(),
        ));
    };
    let input = BoundInput::new(k, d)?;
    let sup = sup_bound_closed(&input);
    let fs = futaki_sano_bound(&input);
    let an = andrews_ni_bound(&input);
    let mut report = VerificationReport::new(format!("bounds-K{k}-d{d:.6}"))
        .input("K", k)
        .input("d", d)
        .computed("Kd2", input.kd2())
        .bound("sup_closed", sup)
        .bound("futaki_sano", fs)
        .bound("andrews_ni", an)
        .computed("sup_ge_andrews_ni", flag(sup >= an))
        .computed("sup_ge_futaki_sano", flag(sup >= fs))
        .margin("sup_minus_andrews_ni", sup - an, 1e-12)
        .note(format!("branch: {}", branch_name(sup_branch(&input))));
    if let SupBranch::Interior { s_star } = sup_branch(&input) {
        report = report.computed("s_star", s_star);
    }
    if k >= 0.0 {
        report = report.margin("sup_minus_futaki_sano", sup - fs, 1e-12);
    }
    Ok(emit(&report))
}

fn cmd_ou(a: OuArgs, config: &RunConfig) -> Outcome {
    let m = a.m.unwrap_or(config.ou_m);
    BoundInput::new(a.k, a.d)?;
    let report = if a.check_shift {
        verify_shift_with(a.k, a.d, m)
    } else if a.verify {
        verify_comparison_with(a.k, a.d, m)
    } else {
        let x = match a.bc {
            BoundaryCondition::Neumann => neumann_lambda1_with(a.k, a.d, m)?,
            BoundaryCondition::Dirichlet => dirichlet_lambda1_with(a.k, a.d, m)?,
        };
        let bc = match a.bc {
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Dirichlet => "dirichlet",
        };
        VerificationReport::new(format!("ou-{bc}-K{}-d{:.6}", a.k, a.d))
            .input("K", a.k)
            .input("d", a.d)
            .input("m", m as f64)
            .computed("lambda1", x.value)
            .computed("lambda1_coarse", x.coarse)
            .computed("lambda1_fine", x.fine)
            .note(format!("boundary condition: {bc}"))
    };
    Ok(emit(&report))
}

fn spectral_complex(a: &SpectralArgs, config: &RunConfig) -> Result<WeightedComplex> {
    let coeff = a.a.unwrap_or(0.0);
    match a.case {
        SpectralCase::Circle | SpectralCase::WeightedCircle => {
            let r = a.r;
            build_weighted_circle(a.n.unwrap_or(config.circle_n), r, |p| coeff * p[0] / r)
        }
        SpectralCase::Sphere | SpectralCase::SphereHeight => {
            let sphere = build_icosphere(a.subdivisions.unwrap_or(config.sphere_subdivisions))?;
            let phi: Vec<f64> = sphere.vertices.iter().map(|v| coeff * v[2]).collect();
            apply_weight(&sphere, &phi)
        }
    }
}

fn cmd_spectral(a: SpectralArgs, config: &RunConfig) -> Outcome {
    let n = a.n.unwrap_or(config.circle_n);
    let sub = a.subdivisions.unwrap_or(config.sphere_subdivisions);
    let report = match a.case {
        SpectralCase::Circle if a.a.unwrap_or(0.0) == 0.0 => circle_case(n, a.r),
        SpectralCase::Circle => weighted_circle_case(n, a.r, a.a.unwrap_or(0.0)),
        SpectralCase::WeightedCircle => weighted_circle_case(n, a.r, a.a.unwrap_or(config.circle_a)),
        SpectralCase::Sphere => sphere_case(sub),
        SpectralCase::SphereHeight => {
            let Some(coeff) = a.a else {
                return Err(Failure::Usage("--case sphere-height needs --a".into()));
            };
            sphere_height_case(coeff, sub)
        }
    };
    if a.export_mesh.is_some() || a.export_eigenvector.is_some() {
        let effective = SpectralArgs {
            a: Some(match a.case {
                SpectralCase::WeightedCircle => a.a.unwrap_or(config.circle_a),
                _ => a.a.unwrap_or(0.0),
            }),
            ..a
        };
        let complex = spectral_complex(&effective, config)?;
        if let Some(path) = &effective.export_mesh {
            complex.write_off(path)?;
        }
        if let Some(path) = &effective.export_eigenvector {
            let opts = SolverOptions {
                diameter: false,
                ..SolverOptions::default()
            };
            let result = lambda1_witten_with(&complex, &opts)?;
            complex.write_eigenvector_csv(&result.eigenvector, path)?;
        }
    }
    Ok(emit(&report))
}

fn cmd_shrinker(a: ShrinkerArgs, config: &RunConfig) -> Outcome {
    if let Some(pq) = &a.al {
        let (p, q) = (pq[0], pq[1]);
        let shooting = ShootingConfig {
            n_points: a.n.unwrap_or(config.al_points),
            ..ShootingConfig::for_lambda(a.lambda, p, q)
        };
        let al = find_abresch_langer(a.lambda, p, q, &shooting)?;
        if let Some(path) = &a.export {
            al.curve.write_csv(path)?;
        }
        if let Some(path) = &a.log {
            al.write_log(path)?;
        }
        let identities = shrinker_identity_report(&format!("shrinker-al{p}-{q}-identities"), &al.curve)?
            .computed("r0", al.r0)
            .computed("k_min", al.k_min)
            .computed("k_max", al.k_max);
        let diameter = verify_shrinker_diameter(&al.curve)?;
        let reports = [identities, diameter];
        println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
        let mut pass = true;
        for r in &reports {
            if !r.pass {
                eprintln!("failing margins in {}: {}", r.case_id, r.failing().join(", "));
                pass = false;
            }
        }
        return Ok(pass);
    }
    if !a.circle {
        return Err(Failure::Usage("shrinker needs --al P Q or --circle".into()));
    }
    let curve = circle_shrinker(a.lambda, a.n.unwrap_or(config.shrinker_circle_points))?;
    if let Some(path) = &a.export {
        curve.write_csv(path)?;
    }
    Ok(emit(&circle_diameter_report(&curve)?))
}

fn cmd_verify_all(a: VerifyAllArgs, mut config: RunConfig) -> Outcome {
    if let Some(out) = a.out {
        config.out_dir = out;
    }
    config.validate()?;
    let reports = run_suite(&config);
    let summary = write_reports(&config.out_dir, &reports)?;
    println!("{}", summary.to_json());
    if let Some(first) = reports.iter().find(|r| !r.pass) {
        eprintln!("first failing case: {} ({})", first.case_id, first.failing().join(", "));
    }
    Ok(summary.all_pass)
}
