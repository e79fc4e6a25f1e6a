//! The verification suite behind `mdx verify`. Every check is evaluated
//! even when earlier ones fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::averaging::{average_h, converges};
use crate::config::RunConfig;
use crate::error::Result;
use crate::fisher::{centered_score_variance, fisher_routes, fisher_scan, fisher_metric, regulated_moments, RegulatedFamily};
use crate::geometry::{geodesic_distance, geodesic_residual, path_length};
use crate::maxent::{
    ablation_report, constraint_values, constraint_values_quadrature, entropy, entropy_quadrature, grid_maxent,
    solve_multipliers, AblationCandidate, ConstraintTargets, GridSpec, Verdict,
};
use crate::model::{ln_h_beta, DistributionParams, ModelParams, Momentum};
use crate::numerics::QuadratureSpec;
use crate::relativity::{
    h_rel, inverse_legendre_numeric, l_rel, legendre_numeric, momentum_for_velocity, RelativisticParams,
};
use crate::report::{Check, Provenance, VerificationReport};

pub const DEFAULT_SEED: u64 = 42;

/// Grid used for the discretized maximum-entropy comparison. It is wide
/// enough that the closed-form tail mass outside it is below 1e-6.
pub const ORACLE_GRID: (f64, f64, usize) = (0.05, 100.0, 40_000);

/// Seed from `MDX_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("MDX_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

struct Suite {
    checks: Vec<Check>,
    loosen: f64,
}

impl Suite {
    /// Quadrature-limited tolerance: the pinned value, or ten times the
    /// configured relative tolerance when that is looser.
    fn tol(&self, pinned: f64) -> f64 {
        pinned.max(self.loosen)
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn compare(&mut self, module: &str, name: &str, measured: Result<f64>, expected: f64, tol: f64, prov: Provenance) {
        let c = match measured {
            Ok(m) => Check::compare(module, name, m, expected, tol, prov),
            Err(e) => Check::errored(module, name, expected, prov, &e),
        };
        self.push(c);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b.abs().max(a.abs())).abs()
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn run_verification(config: &RunConfig, seed: u64) -> VerificationReport {
    let mut suite = Suite {
        checks: Vec::new(),
        loosen: 10.0 * config.quadrature.rel_tol,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    model_checks(&mut suite, config);
    maxent_checks(&mut suite, config, &mut rng);
    averaging_checks(&mut suite, config);
    fisher_checks(&mut suite, config, &mut rng);
    geometry_checks(&mut suite, config, &mut rng);
    relativity_checks(&mut suite, config);
    ablation_checks(&mut suite);
    VerificationReport::new(config.clone(), seed, suite.checks)
}

fn model_checks(s: &mut Suite, config: &RunConfig) {
    let tol = s.tol(1e-9);
    s.compare(
        "model",
        "normalization",
        config.dist.total_mass_quadrature(&config.quadrature),
        1.0,
        tol,
        Provenance::Paper,
    );
    s.compare(
        "model",
        "light_speed_squared",
        Ok(config.model.c_squared()),
        2.0 * config.model.lambda().powi(2),
        1e-15 * config.model.c_squared(),
        Provenance::Paper,
    );
}

fn maxent_checks(s: &mut Suite, config: &RunConfig, rng: &mut ChaCha8Rng) {
    let spec = &config.quadrature;
    let tol = s.tol(1e-8);
    let dist = &config.dist;

    // Closed-form constraint values against direct quadrature.
    match (constraint_values(dist), constraint_values_quadrature(dist, spec)) {
        (Ok(closed), Ok(quad)) => {
            s.push(Check::compare("maxent", "constraint_c1_quadrature", quad.c1, closed.c1, tol, Provenance::Derived));
            s.push(Check::compare("maxent", "constraint_c2_quadrature", quad.c2, closed.c2, tol, Provenance::Derived));
        }
        (Err(e), _) | (_, Err(e)) => {
            s.push(Check::errored("maxent", "constraint_values", f64::NAN, Provenance::Derived, &e));
        }
    }
    let reference = constraint_values(&DistributionParams::reference());
    s.compare("maxent", "reference_c1", reference.clone().map(|v| v.c1), 1.5, 1e-8, Provenance::Derived);
    s.compare(
        "maxent",
        "reference_c2",
        reference.clone().map(|v| v.c2),
        -0.018_244_987,
        1e-8,
        Provenance::Derived,
    );

    // Inversion from the rounded reference targets.
    let inverted = ConstraintTargets::new(1.5, -0.018_245_0).and_then(|t| solve_multipliers(&t));
    s.compare("maxent", "inversion_nu", inverted.clone().map(|r| r.nu), 4.0, 1e-6, Provenance::Paper);
    s.compare("maxent", "inversion_gamma", inverted.clone().map(|r| r.gamma), 1.0, 1e-6, Provenance::Paper);
    s.compare(
        "maxent",
        "inversion_c3",
        inverted.clone().map(|r| r.c3),
        2.0 / std::f64::consts::PI.sqrt(),
        1e-6,
        Provenance::Paper,
    );

    // Round trip of the configured density through its own constraints.
    let round_trip = constraint_values(dist)
        .and_then(|v| ConstraintTargets::new(v.c1, v.c2))
        .and_then(|t| solve_multipliers(&t));
    match round_trip {
        Ok(r) => {
            let gap = rel(r.nu, dist.nu()).max(rel(r.gamma, dist.gamma())).max(rel(r.c3, dist.c3()));
            s.push(Check::compare("maxent", "round_trip_relative_gap", gap, 0.0, 1e-8, Provenance::Derived));
        }
        Err(e) => s.push(Check::errored("maxent", "round_trip_relative_gap", 0.0, Provenance::Derived, &e)),
    }

    s.compare(
        "maxent",
        "entropy_quadrature",
        entropy_quadrature(dist, spec),
        entropy(dist).unwrap_or(f64::NAN),
        s.tol(1e-8),
        Provenance::Derived,
    );

    // Infeasible targets must be refused.
    let refused = ConstraintTargets::new(1.0, -2.0).map(|t| solve_multipliers(&t).is_err());
    s.compare("maxent", "infeasible_targets_refused", refused.map(flag), 1.0, 0.0, Provenance::Trivial);

    grid_checks(s, rng);
}

fn grid_checks(s: &mut Suite, rng: &mut ChaCha8Rng) {
    let reference = match constraint_values(&DistributionParams::reference()).and_then(|v| ConstraintTargets::new(v.c1, v.c2)) {
        Ok(t) => t,
        Err(e) => {
            s.push(Check::errored("maxent", "grid_oracle", 0.0, Provenance::Derived, &e));
            return;
        }
    };
    let (lo, hi, n) = ORACLE_GRID;
    let result = GridSpec::new(lo, hi, n).and_then(|g| grid_maxent(&reference, &g));
    let r = match result {
        Ok(r) => r,
        Err(e) => {
            s.push(Check::errored("maxent", "grid_oracle", 0.0, Provenance::Derived, &e));
            return;
        }
    };
    let detail = format!("grid [{lo}, {hi}] with {n} points, closed-form tail mass {:e}", r.tail_mass);
    s.push(Check::compare("maxent", "grid_sup_error", r.sup_error_vs_closed_form, 0.0, 1e-3, Provenance::Derived).with_detail(detail));
    s.push(Check::compare("maxent", "grid_gamma", r.dual_multipliers.gamma, 1.0, 1e-2, Provenance::Derived));
    s.push(Check::compare("maxent", "grid_nu", r.dual_multipliers.nu, 4.0, 1e-2, Provenance::Derived));
    let worst = r.residuals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    s.push(Check::compare("maxent", "grid_constraint_residual", worst, 0.0, 1e-10, Provenance::Trivial));
    s.push(Check::compare("maxent", "grid_tail_mass", r.tail_mass, 0.0, crate::maxent::grid::TAIL_MASS_LIMIT, Provenance::Derived));

    // Constraint-preserving perturbations never raise the entropy.
    let base = r.discrete_entropy(&r.density);
    let mut raised = 0usize;
    for _ in 0..20 {
        let delta: Vec<f64> = (0..r.grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        match r.perturb(&delta, 0.05) {
            Ok(p) if r.discrete_entropy(&p) <= base => {}
            _ => raised += 1,
        }
    }
    s.push(Check::compare("maxent", "grid_perturbations_raising_entropy", raised as f64, 0.0, 0.0, Provenance::Derived));
}

fn averaging_checks(s: &mut Suite, config: &RunConfig) {
    let (params, dist, spec) = (&config.model, &config.dist, &config.quadrature);
    // Momentum at which the average stops existing: p² = 2mλ²γ.
    let p_edge = (2.0 * params.energy_scale() * dist.gamma()).sqrt();
    let tol = s.tol(1e-8);

    let mut worst = 0.0f64;
    let mut error = None;
    for f in [0.0, 0.2, 0.4, 0.6, 0.8] {
        match average_h(Momentum(f * p_edge), params, dist, spec) {
            Ok(r) => match r.max_relative_spread() {
                Some(spread) => worst = worst.max(spread),
                None => worst = f64::INFINITY,
            },
            Err(e) => error = Some(e),
        }
    }
    match error {
        Some(e) => s.push(Check::errored("averaging", "three_route_spread", 0.0, Provenance::Derived, &e)),
        None => s.push(Check::compare("averaging", "three_route_spread", worst, 0.0, tol, Provenance::Derived)),
    }

    for (name, f) in [("sqrt_form_at_rest", 0.0), ("sqrt_form_at_0.6_edge", 0.6)] {
        match average_h(Momentum(f * p_edge), params, dist, spec) {
            Ok(r) => {
                // Both sides are closed forms, so the tolerance is not loosened.
                let measured = r.analytic_gamma.unwrap_or(f64::NAN);
                let expected = r.sqrt_dispersion;
                let tol = 1e-12 * expected;
                if (measured - expected).abs() <= tol {
                    s.push(Check::compare("averaging", name, measured, expected, tol, Provenance::Paper));
                } else {
                    s.push(Check::finding(
                        "averaging",
                        name,
                        measured,
                        expected,
                        format!(
                            "the Gamma-function average at p = {} is {measured} while the square-root dispersion \
                             gives {expected}; the average behaves like (1 - p^2/(2 m lambda^2 gamma))^(-(nu-3)/2)",
                            r.p
                        ),
                    ));
                }
            }
            Err(e) => s.push(Check::errored("averaging", name, f64::NAN, Provenance::Paper, &e)),
        }
    }

    let inside = converges(Momentum(p_edge * (1.0 - 1e-3)), params, dist);
    let outside = converges(Momentum(p_edge * (1.0 + 1e-3)), params, dist);
    let at_edge = converges(Momentum(p_edge), params, dist);
    let expect_inside = dist.nu() > 3.0;
    s.push(Check::compare("averaging", "convergent_below_edge", flag(inside), flag(expect_inside), 0.0, Provenance::Derived));
    s.push(Check::compare("averaging", "divergent_at_edge", flag(at_edge), 0.0, 0.0, Provenance::Derived));
    s.push(Check::compare("averaging", "divergent_above_edge", flag(outside), 0.0, 0.0, Provenance::Derived));
}

fn fisher_checks(s: &mut Suite, config: &RunConfig, rng: &mut ChaCha8Rng) {
    let params = &config.model;
    let spec = &config.quadrature;
    let root = params.energy_scale().sqrt();

    let mut worst = 0.0f64;
    let mut error = None;
    for _ in 0..10 {
        let beta = rng.random_range(0.2..5.0);
        let q = rng.random_range(0.5..25.0);
        match RegulatedFamily::new(*params, beta, q * beta * root).and_then(|f| fisher_routes(&f, spec)) {
            Ok((a, b)) => worst = worst.max(rel(a, b)),
            Err(e) => error = Some(e),
        }
    }
    match error {
        Some(e) => s.push(Check::errored("fisher", "route_agreement", 0.0, Provenance::Derived, &e)),
        None => s.push(Check::compare("fisher", "route_agreement", worst, 0.0, 1e-10, Provenance::Derived)),
    }

    // Multiplying H_β by β³ + 1 adds a constant to the log-weight and to the
    // score.
    let beta: f64 = 1.3;
    let cutoff = 4.0 * beta * root;
    let tight = QuadratureSpec {
        rel_tol: 1e-13,
        abs_tol: f64::MIN_POSITIVE,
        max_subdivisions: 4000,
    };
    let curvature = 1.0 / (params.energy_scale() * beta.powi(3));
    let factor = beta.powi(3) + 1.0;
    let plain = centered_score_variance(
        |p| ln_h_beta(Momentum(p), beta, params).unwrap_or(f64::NAN),
        |p| 2.0 / beta - p * p * curvature,
        cutoff,
        &tight,
    );
    let rescaled = centered_score_variance(
        |p| ln_h_beta(Momentum(p), beta, params).unwrap_or(f64::NAN) + factor.ln(),
        |p| 2.0 / beta - p * p * curvature + 3.0 * beta * beta / factor,
        cutoff,
        &tight,
    );
    match (plain, rescaled) {
        (Ok(a), Ok(b)) => s.push(Check::compare("fisher", "normalization_invariance", rel(b, a), 0.0, 1e-10, Provenance::Paper)),
        (Err(e), _) | (_, Err(e)) => s.push(Check::errored("fisher", "normalization_invariance", 0.0, Provenance::Paper, &e)),
    }

    // Equivalent tuples share Q and hence g β².
    let mut spread = 0.0f64;
    let mut error = None;
    let q = 7.5;
    let mut first = None;
    for _ in 0..10 {
        let m = rng.random_range(0.3..3.0);
        let lambda = rng.random_range(0.3..2.0);
        let beta = rng.random_range(0.2..5.0);
        let result = ModelParams::new(m, lambda).and_then(|p| {
            let fam = RegulatedFamily::at_q(p, beta, q)?;
            fisher_metric(&fam, spec).map(|(_, gb2)| gb2)
        });
        match result {
            Ok(v) => {
                let f = *first.get_or_insert(v);
                spread = spread.max(rel(v, f));
            }
            Err(e) => error = Some(e),
        }
    }
    match error {
        Some(e) => s.push(Check::errored("fisher", "scale_collapse", 0.0, Provenance::Derived, &e)),
        None => s.push(Check::compare("fisher", "scale_collapse", spread, 0.0, 1e-10, Provenance::Derived)),
    }

    let scans = (fisher_scan(1.0, params, &config.fisher_q_grid, spec), fisher_scan(2.5, params, &config.fisher_q_grid, spec));
    match scans {
        (Ok(a), Ok(b)) => {
            s.push(
                Check::compare("fisher", "limit_constant", a.limit_c, 4.0, 1e-3, Provenance::Derived)
                    .with_detail(format!("fitted 1/Q^2 coefficient {}", a.coefficient)),
            );
            s.push(Check::compare("fisher", "limit_beta_independence", (a.limit_c - b.limit_c).abs(), 0.0, 1e-10, Provenance::Derived));
        }
        (Err(e), _) | (_, Err(e)) => s.push(Check::errored("fisher", "limit_constant", 4.0, Provenance::Derived, &e)),
    }

    match (regulated_moments(10.0), regulated_moments(26.0)) {
        (Ok(lo), Ok(hi)) => s.push(Check::finding(
            "fisher",
            "regulated_moments_not_constant",
            hi.c1,
            lo.c1,
            format!(
                "C1 grows from {} at Q = 10 to {} at Q = 26 and C2 from {:e} to {:e}, tracking Q^2 and Q^4; \
                 only C2 - C1^2 settles ({} to {})",
                lo.c1, hi.c1, lo.c2, hi.c2, lo.var, hi.var
            ),
        )),
        (Err(e), _) | (_, Err(e)) => s.push(Check::errored("fisher", "regulated_moments_not_constant", f64::NAN, Provenance::Paper, &e)),
    }
}

fn geometry_checks(s: &mut Suite, config: &RunConfig, rng: &mut ChaCha8Rng) {
    let mut scale_gap = 0.0f64;
    let mut additivity_gap = 0.0f64;
    let d = |a: f64, b: f64| geodesic_distance(a, b).unwrap_or(f64::NAN);
    for _ in 0..50 {
        let mut b: [f64; 3] = [0.0; 3];
        for x in &mut b {
            *x = (rng.random_range(-4.0f64..4.0)).exp();
        }
        let a = (rng.random_range(-5.0f64..5.0)).exp();
        scale_gap = scale_gap.max((d(a * b[0], a * b[1]) - d(b[0], b[1])).abs());
        b.sort_by(f64::total_cmp);
        additivity_gap = additivity_gap.max((d(b[0], b[1]) + d(b[1], b[2]) - d(b[0], b[2])).abs());
    }
    s.push(Check::compare("geometry", "scale_invariance", scale_gap, 0.0, 1e-12, Provenance::Paper));
    s.push(Check::compare("geometry", "additivity", additivity_gap, 0.0, 1e-12, Provenance::Trivial));

    let (b1, b2) = (0.3, 5.0);
    let length = path_length(|t| b1 + (b2 - b1) * t * t, |t| 2.0 * (b2 - b1) * t, 0.0, 1.0, &config.quadrature.with_tolerances(1e-12, 1e-14));
    s.compare("geometry", "path_length", length, d(b1, b2), 1e-8, Provenance::Derived);

    let ratio = geodesic_residual(1.0, 0.7, 1e-2)
        .and_then(|r1| Ok(r1 / geodesic_residual(1.0, 0.7, 5e-3)?));
    s.compare("geometry", "geodesic_residual_order", ratio, 4.0, 0.5, Provenance::Derived);
}

fn relativity_checks(s: &mut Suite, config: &RunConfig) {
    let rp = RelativisticParams::from(&config.model);
    let c = rp.c();

    let mut worst = 0.0f64;
    let mut argmax_gap = 0.0f64;
    let mut error = None;
    for f in [0.0, 0.3, 0.6, 0.9, 0.99] {
        let v = f * c;
        match legendre_numeric(v, &rp, 1e-10).and_then(|r| Ok((r, l_rel(v, &rp)?, momentum_for_velocity(v, &rp)?))) {
            Ok((r, l, p)) => {
                worst = worst.max((r.value - l).abs());
                argmax_gap = argmax_gap.max((r.argmax_p - p).abs() / (1.0 + p.abs()));
            }
            Err(e) => error = Some(e),
        }
    }
    match error {
        Some(e) => s.push(Check::errored("relativity", "legendre_matches_lagrangian", 0.0, Provenance::Paper, &e)),
        None => {
            s.push(Check::compare("relativity", "legendre_matches_lagrangian", worst, 0.0, 1e-8, Provenance::Paper));
            s.push(Check::compare("relativity", "legendre_argmax_momentum", argmax_gap, 0.0, 1e-5, Provenance::Derived));
        }
    }

    let mut worst = 0.0f64;
    let mut error = None;
    for i in 0..=20 {
        let p = -10.0 + i as f64;
        match inverse_legendre_numeric(p, &rp, 1e-10) {
            Ok(r) => worst = worst.max((r.value - h_rel(p, &rp)).abs()),
            Err(e) => error = Some(e),
        }
    }
    match error {
        Some(e) => s.push(Check::errored("relativity", "double_transform", 0.0, Provenance::Derived, &e)),
        None => s.push(Check::compare("relativity", "double_transform", worst, 0.0, 1e-8, Provenance::Derived)),
    }

    let mut shell = 0.0f64;
    for i in 0..=40 {
        let p = -20.0 + i as f64;
        let h = h_rel(p, &rp);
        let mc2 = rp.rest_energy();
        shell = shell.max(((h * h - p * p * c * c) - mc2 * mc2).abs() / (h * h));
    }
    s.push(Check::compare("relativity", "mass_shell", shell, 0.0, 1e-14, Provenance::Trivial));

    // H − mc² − p²/(2m) ≈ a p⁴ with a = −1/(8m³c²).
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=8 {
        let p = 0.01 + 0.005 * i as f64;
        let y = h_rel(p, &rp) - rp.rest_energy() - p * p / (2.0 * rp.m());
        num += y * p.powi(4);
        den += p.powi(8);
    }
    let expected = -1.0 / (8.0 * rp.m().powi(3) * c * c);
    s.push(Check::compare(
        "relativity",
        "nonrelativistic_quartic",
        num / den,
        expected,
        0.05 * expected.abs(),
        Provenance::Derived,
    ));
}

fn ablation_checks(s: &mut Suite) {
    let report = |c: AblationCandidate| ablation_report(c.id());
    match report(AblationCandidate::Beta2ForInvBeta2) {
        Ok(f) => {
            let e = &f.evidence[0];
            s.push(
                Check::compare("ablation", "square_family_average_converges", flag(f.average_converges), 0.0, 0.0, Provenance::Paper)
                    .with_detail(format!(
                        "probe at p = {}: ln(rho H) at beta = 1e-3 is {:e}; {}",
                        f.probe_momentum, e.ln_average_integrand_small, f.note
                    )),
            );
            if f.scale_closed {
                s.push(Check::finding(
                    "ablation",
                    "square_family_scale_closed",
                    1.0,
                    0.0,
                    "beta -> a beta maps beta^(-nu) exp(-gamma beta^2) onto the same family with gamma a^(-2), \
                     exactly as it does for the 1/beta^2 family, so the substitution does not by itself break \
                     scale covariance; the first-moment and fourth-moment families behave the same way",
                ));
            }
        }
        Err(e) => s.push(Check::errored("ablation", "square_family_average_converges", 0.0, Provenance::Paper, &e)),
    }
    for (name, c) in [
        ("ln_beta_only_normalizable", AblationCandidate::LnBetaOnly),
        ("inv_beta2_only_normalizable", AblationCandidate::InvBeta2Only),
    ] {
        match report(c) {
            Ok(f) => s.push(
                Check::compare("ablation", name, flag(f.normalizable != Verdict::No), 0.0, 0.0, Provenance::Paper)
                    .with_detail(f.note.clone()),
            ),
            Err(e) => s.push(Check::errored("ablation", name, 0.0, Provenance::Paper, &e)),
        }
    }
    match report(AblationCandidate::InvBeta2Only) {
        Ok(f) => {
            let large = f.evidence.iter().map(|e| e.ln_density_large.exp()).fold(0.0f64, f64::max);
            s.push(Check::finding(
                "ablation",
                "inv_beta2_only_no_delta_collapse",
                large,
                0.0,
                "exp(-gamma/beta^2) tends to 1 rather than concentrating: the family is flat at large beta and \
                 not normalizable, in tension with a collapse onto a delta function",
            ));
        }
        Err(e) => s.push(Check::errored("ablation", "inv_beta2_only_no_delta_collapse", 0.0, Provenance::Paper, &e)),
    }
}
