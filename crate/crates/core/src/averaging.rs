//! Ensemble average `⟨H⟩ = 2∫₀^∞ ρ(β) H_β(p) dβ`, evaluated three ways: by
//! quadrature in β, by quadrature after `ξ = 1/β²`, and through the Gamma
//! function. The square-root dispersion `√(2λ²p² + 4λ⁴m²)` is reported next
//! to them so any mismatch is visible.
//!
//! With `s = p²/(2mλ²)` the ξ-integrand is `ξ^((ν−5)/2) e^(−(γ−s)ξ)`, so the
//! average exists only for `s < γ` and `ν > 3`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{DistributionParams, ModelParams, Momentum};
use crate::numerics::{
    integrate, integrate_positive_axis, ln_gamma, probe_upper_tail, Domain, ProbeLimits, QuadratureSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageResult {
    pub p: f64,
    pub numeric_beta: Option<f64>,
    pub numeric_xi: Option<f64>,
    pub analytic_gamma: Option<f64>,
    /// `√(2λ²p² + 4λ⁴m²)`, always reported.
    #[serde(rename = "eq5_value")]
    pub sqrt_dispersion: f64,
    pub convergent: bool,
}

impl AverageResult {
    /// Largest pairwise relative gap among the three evaluations of the
    /// average, when all are present.
    pub fn max_relative_spread(&self) -> Option<f64> {
        let (a, b, c) = (self.numeric_beta?, self.numeric_xi?, self.analytic_gamma?);
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        Some(rel(a, c).max(rel(b, c)).max(rel(a, b)))
    }
}

/// `s = p²/(2mλ²)`, the growth rate the momentum adds to the ξ exponent.
fn momentum_rate(p: Momentum, params: &ModelParams) -> f64 {
    p.0 * p.0 / (2.0 * params.energy_scale())
}

/// Whether the average exists: `s < γ` strictly and `ν > 3`. Rates within
/// a few ulps of `γ` count as the boundary, since `λ` itself carries
/// rounding (for `λ = 1/√2`, `p = 1` gives `s = 1 − 2ε`).
pub fn converges(p: Momentum, params: &ModelParams, dist: &DistributionParams) -> bool {
    momentum_rate(p, params) < dist.gamma() * (1.0 - 4.0 * f64::EPSILON) && dist.nu() > 3.0
}

/// `√(2λ²p² + 4λ⁴m²)`
pub fn sqrt_dispersion(p: Momentum, params: &ModelParams) -> f64 {
    let l2 = params.lambda() * params.lambda();
    (p.0 * p.0 * 2.0 * l2 + params.m() * params.m() * 4.0 * l2 * l2).sqrt()
}

/// `C₃ mλ² Γ((ν−3)/2) (γ − s)^(−(ν−3)/2)`; for the reference density this is
/// `2mλ² (1 − p²/(2mλ²))^(−1/2)`.
pub fn analytic_average(p: Momentum, params: &ModelParams, dist: &DistributionParams) -> Result<f64> {
    let a = dist.gamma() - momentum_rate(p, params);
    let order = 0.5 * (dist.nu() - 3.0);
    let ln_value = (dist.c3() * params.energy_scale()).ln() + ln_gamma(order)? - order * a.ln();
    Ok(ln_value.exp())
}

/// `2∫₀^∞ ρ H_β dβ` with the product formed in the log domain.
pub fn beta_quadrature(
    p: Momentum,
    params: &ModelParams,
    dist: &DistributionParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let a = dist.gamma() - momentum_rate(p, params);
    let ln_prefactor = (dist.c3() * params.energy_scale()).ln();
    let power = 2.0 - dist.nu();
    let integrand = |b: f64| {
        if b == 0.0 {
            return 0.0;
        }
        (ln_prefactor + power * b.ln() - a / (b * b)).exp()
    };
    Ok(2.0 * integrate_positive_axis(integrand, spec)?)
}

fn xi_integrand(p: Momentum, params: &ModelParams, dist: &DistributionParams) -> impl Fn(f64) -> f64 {
    let a = dist.gamma() - momentum_rate(p, params);
    let ln_prefactor = (dist.c3() * params.energy_scale()).ln();
    let power = 0.5 * (dist.nu() - 5.0);
    move |xi: f64| {
        if xi == 0.0 {
            return if power < 0.0 { f64::INFINITY } else { 0.0 };
        }
        (ln_prefactor + power * xi.ln() - a * xi).exp()
    }
}

/// `C₃ mλ² ∫₀^∞ ξ^((ν−5)/2) e^(−(γ−s)ξ) dξ` on the compactified half-line.
pub fn xi_quadrature(
    p: Momentum,
    params: &ModelParams,
    dist: &DistributionParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate(xi_integrand(p, params, dist), Domain::from(0.0), spec)
}

/// Numerical check of divergence: integrates the ξ-integrand over growing
/// windows `[1, 1 + 2^k]` and reports whether the partial sums keep growing.
pub fn xi_integrand_diverges(p: Momentum, params: &ModelParams, dist: &DistributionParams) -> bool {
    probe_upper_tail(&xi_integrand(p, params, dist), 1.0, ProbeLimits::default()).diverges
}

pub fn average_h(
    p: Momentum,
    params: &ModelParams,
    dist: &DistributionParams,
    spec: &QuadratureSpec,
) -> Result<AverageResult> {
    spec.validate()?;
    let mut result = AverageResult {
        p: p.0,
        numeric_beta: None,
        numeric_xi: None,
        analytic_gamma: None,
        sqrt_dispersion: sqrt_dispersion(p, params),
        convergent: false,
    };
    if !converges(p, params, dist) {
        return Ok(result);
    }
    let numeric = beta_quadrature(p, params, dist, spec).and_then(|beta| {
        let xi = xi_quadrature(p, params, dist, spec)?;
        Ok((beta, xi))
    });
    if let Ok((beta, xi)) = numeric {
        result.numeric_beta = Some(beta);
        result.numeric_xi = Some(xi);
        result.analytic_gamma = Some(analytic_average(p, params, dist)?);
        result.convergent = true;
    }
    Ok(result)
}

/// One [`AverageResult`] per momentum, in input order.
pub fn dispersion_scan(
    p_grid: &[f64],
    params: &ModelParams,
    dist: &DistributionParams,
    spec: &QuadratureSpec,
) -> Result<Vec<AverageResult>> {
    p_grid
        .iter()
        .map(|&p| average_h(Momentum(p), params, dist, spec))
        .collect()
}
