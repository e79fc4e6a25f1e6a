//! The multiplicative Hamiltonian family `H_β(p) = mλ²β² exp(p² / (2mλ²β²))`,
//! the fluctuation density `ρ(β) = C₃ |β|^(−ν) exp(−γ/β²)` and the score
//! `∂_β ln H_β`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_positive_axis, ln_gamma, QuadratureSpec};

/// Exponents above this are refused by [`h_beta`]; combine factors in the
/// log domain instead.
pub const OVERFLOW_GUARD: f64 = 700.0;

/// Mass and velocity scale of the Hamiltonian family. The light speed is
/// derived, `c² = 2λ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelParams", into = "RawModelParams")]
pub struct ModelParams {
    m: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct RawModelParams {
    m: f64,
    lambda: f64,
}

impl TryFrom<RawModelParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawModelParams) -> Result<Self> {
        ModelParams::new(raw.m, raw.lambda)
    }
}

impl From<ModelParams> for RawModelParams {
    fn from(p: ModelParams) -> Self {
        RawModelParams { m: p.m, lambda: p.lambda }
    }
}

impl ModelParams {
    pub fn new(m: f64, lambda: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParams(format!("mass must be positive, got {m}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { m, lambda })
    }

    /// Parameters with `c = 1`: `λ = 1/√2`.
    pub fn unit_light_speed(m: f64) -> Result<Self> {
        Self::new(m, std::f64::consts::FRAC_1_SQRT_2)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `mλ²`, the energy scale of the family.
    pub fn energy_scale(&self) -> f64 {
        self.m * self.lambda * self.lambda
    }

    pub fn c_squared(&self) -> f64 {
        2.0 * self.lambda * self.lambda
    }

    pub fn c(&self) -> f64 {
        self.c_squared().sqrt()
    }

    /// Rest energy `2mλ² = mc²`.
    pub fn rest_energy(&self) -> f64 {
        2.0 * self.energy_scale()
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::unit_light_speed(1.0).expect("valid defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Momentum(pub f64);

impl From<f64> for Momentum {
    fn from(p: f64) -> Self {
        Momentum(p)
    }
}

/// Density `ρ(β) = C₃ |β|^(−ν) exp(−γ/β²)` on the real line.
///
/// Construction checks `ν > 1`, `γ > 0` and that the density integrates to
/// one over ℝ within `1e-9`, using quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistributionParams", into = "RawDistributionParams")]
pub struct DistributionParams {
    nu: f64,
    gamma: f64,
    c3: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDistributionParams {
    nu: f64,
    gamma: f64,
    c3: f64,
}

impl TryFrom<RawDistributionParams> for DistributionParams {
    type Error = Error;
    fn try_from(raw: RawDistributionParams) -> Result<Self> {
        DistributionParams::new(raw.nu, raw.gamma, raw.c3)
    }
}

impl From<DistributionParams> for RawDistributionParams {
    fn from(d: DistributionParams) -> Self {
        RawDistributionParams {
            nu: d.nu,
            gamma: d.gamma,
            c3: d.c3,
        }
    }
}

pub const NORMALIZATION_TOL: f64 = 1e-9;

/// `ln` of the integral of `|β|^(−ν) exp(−γ/β²)` over ℝ, which is
/// `Γ(k) γ^(−k)` with `k = (ν − 1)/2`.
fn ln_unnormalized_mass(nu: f64, gamma: f64) -> Result<f64> {
    let k = 0.5 * (nu - 1.0);
    Ok(ln_gamma(k)? - k * gamma.ln())
}

impl DistributionParams {
    pub fn new(nu: f64, gamma: f64, c3: f64) -> Result<Self> {
        let dist = Self::unchecked(nu, gamma, c3)?;
        let mass = dist.total_mass_quadrature(&QuadratureSpec::default())?;
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidParams(format!(
                "density with (nu, gamma, c3) = ({nu}, {gamma}, {c3}) integrates to {mass}, not 1"
            )));
        }
        Ok(dist)
    }

    /// Member of the family with `C₃ = γ^k / Γ(k)` chosen so the density is
    /// normalized.
    pub fn normalized(nu: f64, gamma: f64) -> Result<Self> {
        Self::check_exponents(nu, gamma)?;
        let c3 = (-ln_unnormalized_mass(nu, gamma)?).exp();
        Self::new(nu, gamma, c3)
    }

    /// The density `2/√π · e^(−1/β²)/β⁴`.
    pub fn reference() -> Self {
        Self {
            nu: 4.0,
            gamma: 1.0,
            c3: 2.0 / PI.sqrt(),
        }
    }

    fn check_exponents(nu: f64, gamma: f64) -> Result<()> {
        if !(nu > 1.0 && nu.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "nu must exceed 1 for normalizability at infinity, got {nu}"
            )));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma must be positive for normalizability at zero, got {gamma}"
            )));
        }
        Ok(())
    }

    fn unchecked(nu: f64, gamma: f64, c3: f64) -> Result<Self> {
        Self::check_exponents(nu, gamma)?;
        if !(c3 > 0.0 && c3.is_finite()) {
            return Err(Error::InvalidParams(format!("c3 must be positive, got {c3}")));
        }
        Ok(Self { nu, gamma, c3 })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    /// Gamma-distribution shape `k = (ν − 1)/2` of `ξ = 1/β²`.
    pub fn shape(&self) -> f64 {
        0.5 * (self.nu - 1.0)
    }

    /// `ln ρ(β)`, with `ln ρ(0) = −∞`.
    pub fn ln_density(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            return f64::NEG_INFINITY;
        }
        let b = beta.abs();
        self.c3.ln() - self.nu * b.ln() - self.gamma / (b * b)
    }

    /// `ρ(β)` extended continuously by `ρ(0) = 0`.
    pub fn density(&self, beta: f64) -> f64 {
        self.ln_density(beta).exp()
    }

    /// `2 ∫₀^∞ ρ dβ` by quadrature.
    pub fn total_mass_quadrature(&self, spec: &QuadratureSpec) -> Result<f64> {
        Ok(2.0 * integrate_positive_axis(|b| self.density(b), spec)?)
    }

    /// `C₃ Γ(k) γ^(−k)`.
    pub fn total_mass_closed_form(&self) -> Result<f64> {
        Ok((self.c3.ln() + ln_unnormalized_mass(self.nu, self.gamma)?).exp())
    }
}

impl Default for DistributionParams {
    fn default() -> Self {
        Self::reference()
    }
}

fn check_beta_nonzero(beta: f64) -> Result<()> {
    if beta == 0.0 || !beta.is_finite() {
        Err(Error::domain(format!("beta must be finite and non-zero, got {beta}")))
    } else {
        Ok(())
    }
}

/// Exponent `p² / (2mλ²β²)` of the Hamiltonian.
pub fn h_beta_exponent(p: Momentum, beta: f64, params: &ModelParams) -> f64 {
    p.0 * p.0 / (2.0 * params.energy_scale() * beta * beta)
}

/// `ln H_β(p)`; finite wherever `β ≠ 0`.
pub fn ln_h_beta(p: Momentum, beta: f64, params: &ModelParams) -> Result<f64> {
    check_beta_nonzero(beta)?;
    Ok((params.energy_scale() * beta * beta).ln() + h_beta_exponent(p, beta, params))
}

pub fn h_beta(p: Momentum, beta: f64, params: &ModelParams) -> Result<f64> {
    check_beta_nonzero(beta)?;
    let exponent = h_beta_exponent(p, beta, params);
    if exponent > OVERFLOW_GUARD {
        return Err(Error::OverflowGuard {
            exponent,
            bound: OVERFLOW_GUARD,
        });
    }
    Ok(params.energy_scale() * beta * beta * exponent.exp())
}

/// `ρ(β)`. Zero is rejected; use [`DistributionParams::density`] for the
/// continuous extension.
pub fn rho(beta: f64, dist: &DistributionParams) -> Result<f64> {
    check_beta_nonzero(beta)?;
    Ok(dist.density(beta))
}

/// Score `A = ∂_β ln H_β = 2/β − p²/(mλ²β³)`.
pub fn score(p: Momentum, beta: f64, params: &ModelParams) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!("score requires beta > 0, got {beta}")));
    }
    Ok(2.0 / beta - p.0 * p.0 / (params.energy_scale() * beta.powi(3)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ModelParams {
        ModelParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(h_beta(Momentum(0.0), 1.0, &unit()).unwrap(), 1.0);
        let h = h_beta(Momentum(1.0), 1.0, &unit()).unwrap();
        assert!((h - 0.5f64.exp()).abs() < 1e-15);
        assert!((h - 1.648_721_3).abs() < 1e-7);
        assert_eq!(
            h_beta(Momentum(1.0), -1.0, &unit()).unwrap(),
            h_beta(Momentum(1.0), 1.0, &unit()).unwrap()
        );
    }

    #[test]
    fn hamiltonian_errors() {
        assert!(matches!(h_beta(Momentum(1.0), 0.0, &unit()), Err(Error::Domain(_))));
        let err = h_beta(Momentum(1.0), 0.01, &unit()).unwrap_err();
        assert!(matches!(err, Error::OverflowGuard { .. }));
        // the log-domain form is still available
        assert!((ln_h_beta(Momentum(1.0), 0.01, &unit()).unwrap() - (1e-4f64.ln() + 5000.0)).abs() < 1e-9);
    }

    #[test]
    fn hamiltonian_asymptotics() {
        let params = unit();
        // β → 0 blows up for p ≠ 0; β → ∞ approaches mλ²β²
        assert!(ln_h_beta(Momentum(0.5), 1e-3, &params).unwrap() > 100.0);
        let big = h_beta(Momentum(0.5), 1e3, &params).unwrap();
        assert!((big / 1e6 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rho_examples() {
        let dist = DistributionParams::reference();
        let v = rho(1.0, &dist).unwrap();
        assert!((v - 2.0 / PI.sqrt() * (-1.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.415_107_5).abs() < 1e-7);
        assert!(dist.density(1e-3) == 0.0);
        assert_eq!(dist.density(0.0), 0.0);
        assert!(rho(0.0, &dist).is_err());
        assert_eq!(rho(-0.7, &dist).unwrap(), rho(0.7, &dist).unwrap());
    }

    #[test]
    fn reference_density_is_normalized() {
        let mass = DistributionParams::reference()
            .total_mass_quadrature(&QuadratureSpec::default())
            .unwrap();
        assert!((mass - 1.0).abs() < 1e-9, "{mass}");
        assert!(DistributionParams::new(4.0, 1.0, 2.0 / PI.sqrt()).is_ok());
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(DistributionParams::new(0.5, 1.0, 1.0).is_err());
        assert!(DistributionParams::new(4.0, 0.0, 1.0).is_err());
        assert!(DistributionParams::new(4.0, 1.0, 1.0).is_err()); // not normalized
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn normalized_constructor() {
        let d = DistributionParams::normalized(4.0, 1.0).unwrap();
        assert!((d.c3() - 2.0 / PI.sqrt()).abs() < 1e-14);
        let d = DistributionParams::normalized(1.5, 0.3).unwrap();
        assert!((d.total_mass_closed_form().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn light_speed_is_derived() {
        let p = ModelParams::default();
        assert!((p.c() - 1.0).abs() < 1e-15);
        assert!((p.c_squared() - 2.0 * p.lambda() * p.lambda()).abs() == 0.0);
        assert!((p.rest_energy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn score_examples() {
        assert_eq!(score(Momentum(0.0), 1.0, &unit()).unwrap(), 2.0);
        assert!(score(Momentum(2f64.sqrt()), 1.0, &unit()).unwrap().abs() < 1e-15);
        assert!((score(Momentum(1.0), 2.0, &unit()).unwrap() - 0.875).abs() < 1e-15);
        assert!(score(Momentum(1.0), 0.0, &unit()).is_err());
        assert!(score(Momentum(1.0), -1.0, &unit()).is_err());
    }

    #[test]
    fn serde_validates() {
        let ok: ModelParams = serde_json::from_str(r#"{"m": 1.0, "lambda": 2.0}"#).unwrap();
        assert_eq!(ok.lambda(), 2.0);
        assert!(serde_json::from_str::<ModelParams>(r#"{"m": -1.0, "lambda": 2.0}"#).is_err());
        assert!(serde_json::from_str::<DistributionParams>(r#"{"nu": 0.5, "gamma": 1.0, "c3": 1.0}"#).is_err());
    }
}
