use mdx_core::fisher::{fisher_metric, RegulatedFamily};
use mdx_core::geometry::{geodesic, geodesic_distance};
use mdx_core::maxent::{constraint_values, solve_multipliers, ConstraintTargets};
use mdx_core::model::{h_beta, ln_h_beta, score, DistributionParams, ModelParams, Momentum};
use mdx_core::numerics::{digamma_fn, gamma_fn, integrate, Domain, QuadratureSpec};
use mdx_core::relativity::{h_rel, l_rel, legendre_numeric, RelativisticParams};
use mdx_core::verify::seed_from_env;
use mdx_core::Error;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed_from_env()),
        failure_persistence: None,
        ..Config::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b.abs().max(f64::MIN_POSITIVE)).abs()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn quadrature_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0, hi in 0.5f64..4.0) {
        let spec = QuadratureSpec::default().with_tolerances(1e-13, 1e-15);
        let f = |x: f64| (-x * x).exp();
        let g = |x: f64| x.cos() / (1.0 + x);
        let both = integrate(|x| a * f(x) + b * g(x), Domain::finite(0.0, hi), &spec).unwrap();
        let parts = a * integrate(f, Domain::finite(0.0, hi), &spec).unwrap()
            + b * integrate(g, Domain::finite(0.0, hi), &spec).unwrap();
        prop_assert!((both - parts).abs() <= 1e-11 * (1.0 + both.abs()));
    }

    #[test]
    fn gamma_and_digamma_recurrences(x in 0.05f64..40.0) {
        prop_assert!(rel(gamma_fn(x + 1.0).unwrap(), x * gamma_fn(x).unwrap()) < 1e-12);
        let gap = digamma_fn(x + 1.0).unwrap() - digamma_fn(x).unwrap() - 1.0 / x;
        prop_assert!(gap.abs() < 1e-12 * (1.0 + 1.0 / x));
    }

    #[test]
    fn h_beta_is_even_in_momentum(p in 0.0f64..3.0, beta in 0.2f64..5.0, m in 0.3f64..3.0, lambda in 0.3f64..2.0) {
        let params = ModelParams::new(m, lambda).unwrap();
        prop_assert_eq!(
            h_beta(Momentum(p), beta, &params).unwrap(),
            h_beta(Momentum(-p), beta, &params).unwrap()
        );
    }

    #[test]
    fn score_matches_finite_difference(p in -3.0f64..3.0, beta in 0.5f64..4.0) {
        let params = ModelParams::new(1.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let h = 1e-5 * beta;
        let ln = |b: f64| ln_h_beta(Momentum(p), b, &params).unwrap();
        let fd = (ln(beta + h) - ln(beta - h)) / (2.0 * h);
        let exact = score(Momentum(p), beta, &params).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()));
    }

    #[test]
    fn geodesic_distance_properties(u1 in -6.0f64..6.0, u2 in -6.0f64..6.0, mu in -4.0f64..4.0) {
        let (b1, b2) = (u1.exp(), u2.exp());
        let d = geodesic_distance(b1, b2).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d, geodesic_distance(b2, b1).unwrap());
        prop_assert!((d - (u1 - u2).abs()).abs() < 1e-13 * (1.0 + d));
        let end = geodesic(b1, mu).unwrap();
        prop_assert!((geodesic_distance(b1, end).unwrap() - mu.abs()).abs() < 1e-12);
    }

    #[test]
    fn fenchel_young_inequality(p in -20.0f64..20.0, f in -0.999f64..0.999) {
        let rp = RelativisticParams::new(1.0, 1.0).unwrap();
        let v = f * rp.c();
        prop_assert!(v * p <= h_rel(p, &rp) + l_rel(v, &rp).unwrap() + 1e-12 * (1.0 + p.abs()));
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn maxent_round_trip(nu in 3.2f64..15.0, gamma in 0.1f64..6.0) {
        let dist = DistributionParams::normalized(nu, gamma).unwrap();
        let t = constraint_values(&dist).unwrap();
        let s = solve_multipliers(&ConstraintTargets::new(t.c1, t.c2).unwrap()).unwrap();
        let back = constraint_values(&s.distribution().unwrap()).unwrap();
        prop_assert!((back.c1 - t.c1).abs() <= 1e-9 * t.c1.abs().max(1.0));
        prop_assert!((back.c2 - t.c2).abs() <= 1e-9);
    }

    #[test]
    fn feasibility_boundary(c1 in 0.05f64..20.0, delta in 1e-3f64..0.5, above in any::<bool>()) {
        let c2 = -c1.ln() / 2.0 + if above { delta } else { -delta };
        let targets = ConstraintTargets::new(c1, c2).unwrap();
        match solve_multipliers(&targets) {
            Ok(_) => prop_assert!(above),
            Err(Error::Infeasible(_)) => prop_assert!(!above),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn scale_covariance(nu in 3.5f64..10.0, gamma in 0.3f64..3.0, ln_a in -1.5f64..1.5) {
        let a = ln_a.exp();
        let t = constraint_values(&DistributionParams::normalized(nu, gamma).unwrap()).unwrap();
        let base = solve_multipliers(&ConstraintTargets::new(t.c1, t.c2).unwrap()).unwrap();
        let scaled = solve_multipliers(&ConstraintTargets::new(t.c1 / (a * a), t.c2 + ln_a).unwrap()).unwrap();
        prop_assert!(rel(scaled.gamma, base.gamma * a * a) < 1e-8);
        prop_assert!(rel(scaled.nu, base.nu) < 1e-8);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn fisher_depends_on_dimensionless_cutoff_only(
        m in 0.3f64..3.0,
        lambda in 0.3f64..2.0,
        beta in 0.2f64..5.0,
        q in 0.5f64..20.0,
    ) {
        let spec = QuadratureSpec::default();
        let reference = ModelParams::new(1.0, 1.0).unwrap();
        let base = fisher_metric(&RegulatedFamily::at_q(reference, 1.0, q).unwrap(), &spec).unwrap().1;
        let params = ModelParams::new(m, lambda).unwrap();
        let other = fisher_metric(&RegulatedFamily::at_q(params, beta, q).unwrap(), &spec).unwrap().1;
        prop_assert!(rel(other, base) < 1e-10);
    }

    #[test]
    fn legendre_matches_lagrangian(f in -0.99f64..0.99, c in 0.5f64..3.0, m in 0.3f64..3.0) {
        let rp = RelativisticParams::new(m, c).unwrap();
        let v = f * c;
        let r = legendre_numeric(v, &rp, 1e-10).unwrap();
        let l = l_rel(v, &rp).unwrap();
        prop_assert!((r.value - l).abs() <= 1e-8 * (1.0 + l.abs()));
    }
}
