//! Cutoff-regulated Fisher information of the family `H_β(p)` on
//! `p ∈ [−Λ, Λ]`.
//!
//! With `q = p/(β√(mλ²))` the score is `A = 2/β − q²/β`, so
//! `g β² = Var(q²)` under the weight `e^(q²/2)` on `[−Q, Q]`. The raw ratios
//! `C₁ ≈ Q²` and `C₂ ≈ Q⁴` grow without bound; only the variance settles.
//! Every weight is rescaled by `e^(−Q²/2)` so nothing overflows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ln_h_beta, ModelParams, Momentum};
use crate::numerics::{extrapolate_limit, integrate, Domain, LimitFit, LimitModel, QuadratureSpec};

/// Largest Q accepted by [`fisher_scan`].
pub const MAX_SCAN_Q: f64 = 26.0;

/// Relative tolerance for agreement of the two metric routes.
pub const ROUTE_TOL: f64 = 1e-10;

/// Default extrapolation grid.
pub const DEFAULT_Q_GRID: [f64; 5] = [10.0, 14.0, 18.0, 22.0, 26.0];

fn internal_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-13,
        abs_tol: f64::MIN_POSITIVE,
        max_subdivisions: 4000,
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("cutoff Q must be positive and finite, got {q}")))
    }
}

/// Regulated ratios at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegulatedMoments {
    pub q: f64,
    /// `⟨q²⟩`
    pub c1: f64,
    /// `⟨q⁴⟩`
    pub c2: f64,
    /// `⟨(q² − ⟨q²⟩)²⟩`
    pub var: f64,
}

/// All three ratios from integrals over `[0, Q]`; the weight is even so
/// the half-line suffices. The variance is taken about the mean rather than
/// as `C₂ − C₁²`, which loses most digits once `Q` is large.
pub fn regulated_moments(q: f64) -> Result<RegulatedMoments> {
    check_q(q)?;
    let spec = internal_spec();
    let half_q2 = 0.5 * q * q;
    let w = move |x: f64| (0.5 * x * x - half_q2).exp();
    let dom = Domain::finite(0.0, q);
    let i0 = integrate(w, dom, &spec)?;
    let c1 = integrate(|x| w(x) * x * x, dom, &spec)? / i0;
    let c2 = integrate(|x| w(x) * x.powi(4), dom, &spec)? / i0;
    let var = integrate(
        |x| {
            let d = x * x - c1;
            w(x) * d * d
        },
        dom,
        &spec,
    )? / i0;
    Ok(RegulatedMoments { q, c1, c2, var })
}

/// `C_n(Q) = ∫ q^(2n) e^(q²/2) / ∫ e^(q²/2)` over `[−Q, Q]`, for n = 0, 1, 2.
pub fn regulated_moment(n: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    match n {
        0 => Ok(1.0),
        1 => Ok(regulated_moments(q)?.c1),
        2 => Ok(regulated_moments(q)?.c2),
        _ => Err(Error::domain(format!("moment order must be 0, 1 or 2, got {n}"))),
    }
}

/// `C₂(Q) − C₁(Q)²`, evaluated in centered form.
pub fn var_q2(q: f64) -> Result<f64> {
    Ok(regulated_moments(q)?.var)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegulatedFamily {
    pub params: ModelParams,
    pub beta: f64,
    pub cutoff_lambda: f64,
    pub q_cutoff: f64,
}

impl RegulatedFamily {
    pub fn new(params: ModelParams, beta: f64, cutoff_lambda: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!("beta must be positive, got {beta}")));
        }
        if !(cutoff_lambda > 0.0 && cutoff_lambda.is_finite()) {
            return Err(Error::domain(format!("cutoff must be positive and finite, got {cutoff_lambda}")));
        }
        let q_cutoff = cutoff_lambda / (beta * params.energy_scale().sqrt());
        Ok(Self {
            params,
            beta,
            cutoff_lambda,
            q_cutoff,
        })
    }

    /// The family whose cutoff corresponds to `q`.
    pub fn at_q(params: ModelParams, beta: f64, q: f64) -> Result<Self> {
        check_q(q)?;
        let mut fam = Self::new(params, beta, q * beta * params.energy_scale().sqrt())?;
        fam.q_cutoff = q;
        Ok(fam)
    }
}

/// Variance of `score(p)` under the density proportional to
/// `exp(ln_weight(p))` on `[−cutoff, cutoff]`, by direct quadrature.
/// Any additive constant in `ln_weight` or `score` drops out.
pub fn centered_score_variance<W, S>(ln_weight: W, score: S, cutoff: f64, spec: &QuadratureSpec) -> Result<f64>
where
    W: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    let shift = [-cutoff, 0.0, cutoff]
        .iter()
        .map(|&p| ln_weight(p))
        .fold(f64::NEG_INFINITY, f64::max);
    let w = |p: f64| (ln_weight(p) - shift).exp();
    let halves = [Domain::finite(-cutoff, 0.0), Domain::finite(0.0, cutoff)];
    let over = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let mut total = 0.0;
        for d in halves {
            total += integrate(f, d, spec)?;
        }
        Ok(total)
    };
    let z = over(&|p| w(p))?;
    let mean = over(&|p| w(p) * score(p))? / z;
    over(&|p| {
        let d = score(p) - mean;
        w(p) * d * d
    })
    .map(|v| v / z)
}

/// Both evaluations of `g_ββ`: route (i) integrates the centered score in
/// `p`, route (ii) is `var_q2(Q)/β²`.
pub fn fisher_routes(fam: &RegulatedFamily, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let tight = QuadratureSpec {
        rel_tol: spec.rel_tol.min(1e-13),
        abs_tol: f64::MIN_POSITIVE,
        max_subdivisions: spec.max_subdivisions.max(4000),
    };
    let params = &fam.params;
    let beta = fam.beta;
    // Only the p-dependent part of the score, −p²/(mλ²β³), is passed: the
    // constant 2/β drops out of the variance but would swamp it in rounding
    // when the cutoff is small.
    let curvature = 1.0 / (params.energy_scale() * beta.powi(3));
    let direct = centered_score_variance(
        |p| ln_h_beta(Momentum(p), beta, params).unwrap_or(f64::NAN),
        |p| -p * p * curvature,
        fam.cutoff_lambda,
        &tight,
    )?;
    let identity = var_q2(fam.q_cutoff)? / (beta * beta);
    Ok((direct, identity))
}

/// `g_ββ` and `g_ββ β²` from route (ii), after checking that the two
/// routes of [`fisher_routes`] agree within [`ROUTE_TOL`].
pub fn fisher_metric(fam: &RegulatedFamily, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let (direct, identity) = fisher_routes(fam, spec)?;
    let scale = direct.abs().max(identity.abs());
    if scale > 0.0 && (direct - identity).abs() > ROUTE_TOL * scale {
        return Err(Error::RouteMismatch {
            what: "fisher metric",
            first: direct,
            second: identity,
        });
    }
    Ok((identity, identity * fam.beta * fam.beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherPoint {
    pub q: f64,
    pub c1_moment: f64,
    pub c2_moment: f64,
    pub var_q2: f64,
    pub g_beta2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffScan {
    pub beta: f64,
    pub points: Vec<FisherPoint>,
    pub fit: LimitFit,
    /// Extrapolated `lim g β²`.
    pub limit_c: f64,
    /// Fitted `1/Q²` coefficient.
    pub coefficient: f64,
}

/// Model used to extrapolate `g β²` in `1/Q²`.
pub const SCAN_MODEL: LimitModel = LimitModel::InverseSquareQuartic;

pub fn fisher_point(params: &ModelParams, beta: f64, q: f64, spec: &QuadratureSpec) -> Result<FisherPoint> {
    let fam = RegulatedFamily::at_q(*params, beta, q)?;
    let (_, g_beta2) = fisher_metric(&fam, spec)?;
    let m = regulated_moments(q)?;
    Ok(FisherPoint {
        q,
        c1_moment: m.c1,
        c2_moment: m.c2,
        var_q2: m.var,
        g_beta2,
    })
}

pub fn fisher_scan(beta: f64, params: &ModelParams, q_grid: &[f64], spec: &QuadratureSpec) -> Result<CutoffScan> {
    if let Some(&q) = q_grid.iter().find(|&&q| q > MAX_SCAN_Q) {
        return Err(Error::domain(format!(
            "cutoff Q = {q} exceeds {MAX_SCAN_Q}, beyond which the regulated integrals lose precision"
        )));
    }
    if q_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("q grid must be strictly increasing".into()));
    }
    let points = std::thread::scope(|s| {
        let handles: Vec<_> = q_grid
            .iter()
            .map(|&q| s.spawn(move || fisher_point(params, beta, q, spec)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fisher worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.q, p.g_beta2)).collect();
    let fit = extrapolate_limit(&pairs, SCAN_MODEL)?;
    Ok(CutoffScan {
        beta,
        points,
        limit_c: fit.limit,
        coefficient: fit.coefficient,
        fit,
    })
}
