use proptest::prelude::*;

use witten_gap::config::RunConfig;
use witten_gap::report::VerificationReport;
use witten_gap::shrinkers::{circle_shrinker, integrate_shrinker, potential_phi};
use witten_gap::spectral::{build_weighted_circle, lambda1_witten_with, SolverOptions};
use witten_gap::sturm::{dirichlet_lambda1_with, neumann_lambda1_with, verify_comparison_with};

fn quiet() -> SolverOptions {
    SolverOptions {
        diameter: false,
        ..SolverOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ou_shift_holds_off_grid(k in -2.0f64..5.0, d in 0.5f64..5.0) {
        let neu = neumann_lambda1_with(k, d, 400).unwrap().value;
        let dir = dirichlet_lambda1_with(k, d, 400).unwrap().value;
        prop_assert!((neu - k - dir).abs() <= 1e-4 * neu.abs().max(1.0));
        prop_assert!(verify_comparison_with(k, d, 400).pass);
    }

    #[test]
    fn circle_stiffness_is_positive_and_kills_constants(
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
        seed in proptest::collection::vec(-1.0f64..1.0, 64),
    ) {
        let c = build_weighted_circle(64, 1.0, |p| a * p[0] + b * p[1]).unwrap();
        let ones = vec![1.0; 64];
        prop_assert!(c.apply_stiffness(&ones).iter().all(|v| *v == 0.0));
        prop_assert!(c.energy(&seed) >= 0.0);
        // symmetric: <S u, v> = <u, S v>
        let v: Vec<f64> = seed.iter().rev().copied().collect();
        let lhs: f64 = c.apply_stiffness(&seed).iter().zip(&v).map(|(x, y)| x * y).sum();
        let rhs: f64 = seed.iter().zip(&c.apply_stiffness(&v)).map(|(x, y)| x * y).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn weight_shift_and_radius_scaling(a in -1.0f64..1.0, shift in -10.0f64..10.0, r in 0.5f64..4.0) {
        let base = build_weighted_circle(128, 1.0, |p| a * p[0]).unwrap();
        let moved = build_weighted_circle(128, 1.0, |p| a * p[0] + shift).unwrap();
        let l0 = lambda1_witten_with(&base, &quiet()).unwrap().lambda1;
        let l1 = lambda1_witten_with(&moved, &quiet()).unwrap().lambda1;
        prop_assert!((l0 - l1).abs() <= 1e-12 * l0);
        let flat = lambda1_witten_with(&build_weighted_circle(128, 1.0, |_| 0.0).unwrap(), &quiet()).unwrap();
        let scaled = lambda1_witten_with(&build_weighted_circle(128, r, |_| 0.0).unwrap(), &quiet()).unwrap();
        prop_assert!((scaled.lambda1 * r * r - flat.lambda1).abs() <= 1e-6 * flat.lambda1);
    }

    #[test]
    fn circle_shrinkers_are_exact(lambda in 0.1f64..10.0) {
        let c = circle_shrinker(lambda, 256).unwrap();
        prop_assert!(c.shrinker_residual() <= 1e-8);
        prop_assert!(potential_phi(&c).iter().all(|p| p.abs() <= 1e-14));
    }

    #[test]
    fn open_arcs_conserve_the_first_integral(r0 in 0.3f64..0.95, lambda in 0.5f64..2.0) {
        let scale = 1.0 / lambda.sqrt();
        let arc = integrate_shrinker(lambda, r0 * scale, std::f64::consts::PI, 2e-4 * scale).unwrap();
        let w = arc.first_integral();
        let w0 = w[0];
        prop_assert!(w.iter().all(|x| (x - w0).abs() <= 1e-6 * w0.abs()));
        // potential recomputed independently from the stored points
        for (p, phi) in arc.points.iter().zip(potential_phi(&arc)) {
            let direct = lambda * (p[0] * p[0] + p[1] * p[1]) / 2.0 - 0.5;
            prop_assert!((phi - direct).abs() <= 1e-14);
        }
    }

    #[test]
    fn report_pass_tracks_margins(margins in proptest::collection::vec((-1.0f64..1.0, 0.0f64..0.5), 1..8)) {
        let mut r = VerificationReport::new("p");
        for (i, (m, t)) in margins.iter().enumerate() {
            r = r.margin(&format!("m{i}"), *m, *t);
        }
        prop_assert_eq!(r.pass, margins.iter().all(|(m, t)| *m >= -*t));
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), r.to_json());
    }

    #[test]
    fn config_lists_round_trip(values in proptest::collection::vec(0.01f64..100.0, 1..6)) {
        let text: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        let mut c = RunConfig::default();
        c.set("ou_d", &text.join(", ")).unwrap();
        prop_assert_eq!(&c.ou_d, &values);
        prop_assert!(c.validate().is_ok());
    }
}
