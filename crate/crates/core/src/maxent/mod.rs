//! Maximum-entropy inference of the fluctuation density.
//!
//! Under `ξ = 1/β²` the family `C₃|β|^(−ν)e^(−γ/β²)` becomes a Gamma
//! distribution with shape `k = (ν−1)/2` and rate `γ`, so
//! `⟨1/β²⟩ = k/γ` and `⟨ln|β|⟩ = −(ψ(k) − ln γ)/2`. Eliminating `γ` leaves one
//! monotone equation `ψ(k) − ln k = −2c₂ − ln c₁`, which has a root exactly
//! when `ln c₁ + 2c₂ > 0`.
//!
//! Integrals over the real line are taken as twice the integral over
//! `(0, ∞)`, and `ln β` is read as `ln|β|`.

pub mod ablation;
pub mod grid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DistributionParams;
use crate::numerics::{digamma_fn, digamma_minus_ln, find_root, integrate_positive_axis, ln_gamma, QuadratureSpec, RootSpec};

pub use ablation::{ablation_report, AblationCandidate, AblationFinding, Verdict};
pub use grid::{grid_maxent, DualMultipliers, GridMaxEntResult, GridSpec};

/// Targets for `⟨1/β²⟩` and `⟨ln|β|⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintTargets {
    pub c1: f64,
    pub c2: f64,
}

impl ConstraintTargets {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 > 0.0 && c1.is_finite()) || !c2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "targets need c1 > 0 and finite c2, got ({c1}, {c2})"
            )));
        }
        Ok(Self { c1, c2 })
    }

    /// `ln c₁ + 2c₂`; the targets are attainable iff this is positive.
    pub fn feasibility_margin(&self) -> f64 {
        self.c1.ln() + 2.0 * self.c2
    }

    pub fn is_feasible(&self) -> bool {
        self.feasibility_margin() > 0.0
    }

    fn require_feasible(&self) -> Result<()> {
        if self.is_feasible() {
            Ok(())
        } else {
            Err(Error::Infeasible(format!(
                "ln(c1) + 2 c2 = {} must be positive for (c1, c2) = ({}, {})",
                self.feasibility_margin(),
                self.c1,
                self.c2
            )))
        }
    }
}

/// Raw constraint integrals of a (possibly unnormalized) family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintValues {
    pub norm: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Closed forms: `norm = C₃Γ(k)γ^(−k)`, `c₁ = norm·k/γ`,
/// `c₂ = −norm·(ψ(k) − ln γ)/2`.
pub fn constraint_values(dist: &DistributionParams) -> Result<ConstraintValues> {
    let k = dist.shape();
    let gamma = dist.gamma();
    let norm = (dist.c3().ln() + ln_gamma(k)? - k * gamma.ln()).exp();
    Ok(ConstraintValues {
        norm,
        c1: norm * k / gamma,
        c2: -norm * (digamma_fn(k)? - gamma.ln()) / 2.0,
    })
}

/// The same three integrals by direct quadrature in β.
pub fn constraint_values_quadrature(dist: &DistributionParams, spec: &QuadratureSpec) -> Result<ConstraintValues> {
    let norm = 2.0 * integrate_positive_axis(|b| dist.density(b), spec)?;
    let c1 = 2.0 * integrate_positive_axis(|b| if b == 0.0 { 0.0 } else { dist.density(b) / (b * b) }, spec)?;
    let c2 = 2.0 * integrate_positive_axis(|b| if b == 0.0 { 0.0 } else { dist.density(b) * b.ln() }, spec)?;
    Ok(ConstraintValues { norm, c1, c2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSolution {
    pub nu: f64,
    pub gamma: f64,
    pub c3: f64,
    pub shape_k: f64,
    /// Residuals of the `⟨1/β²⟩` and `⟨ln|β|⟩` equations.
    pub residuals: (f64, f64),
}

impl MultiplierSolution {
    pub fn distribution(&self) -> Result<DistributionParams> {
        DistributionParams::new(self.nu, self.gamma, self.c3)
    }

    /// Normalization multiplier `α`, from `C₃ = e^(−1−α)`.
    pub fn alpha(&self) -> f64 {
        -1.0 - self.c3.ln()
    }
}

const SHAPE_SEARCH_STEPS: usize = 2000;

pub fn solve_multipliers(targets: &ConstraintTargets) -> Result<MultiplierSolution> {
    targets.require_feasible()?;
    let rhs = -2.0 * targets.c2 - targets.c1.ln();
    let g = |k: f64| digamma_minus_ln(k).map(|h| h - rhs).unwrap_or(f64::NAN);

    // g is increasing from −∞ to −rhs > 0: widen [lo, hi] geometrically.
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let mut steps = 0;
    while g(lo) > 0.0 {
        lo *= 0.5;
        steps += 1;
        if steps > SHAPE_SEARCH_STEPS || lo == 0.0 {
            return Err(Error::non_convergence("solve_multipliers", "no lower bracket for the shape"));
        }
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > SHAPE_SEARCH_STEPS || !hi.is_finite() {
            return Err(Error::non_convergence("solve_multipliers", "no upper bracket for the shape"));
        }
    }
    let k = if lo == hi {
        lo
    } else {
        let spec = RootSpec {
            tol: 1e-15,
            max_iter: 400,
            bracket: (lo, hi),
        };
        find_root(g, &spec)?
    };

    let gamma = k / targets.c1;
    let nu = 2.0 * k + 1.0;
    let c3 = (k * gamma.ln() - ln_gamma(k)?).exp();
    if !(c3 > 0.0 && c3.is_finite()) {
        return Err(Error::non_convergence(
            "solve_multipliers",
            format!("normalization constant out of range for shape {k}"),
        ));
    }

    let dist = DistributionParams::new(nu, gamma, c3)?;
    let values = constraint_values(&dist)?;
    Ok(MultiplierSolution {
        nu,
        gamma,
        c3,
        shape_k: k,
        residuals: (values.c1 - targets.c1, values.c2 - targets.c2),
    })
}

/// Differential entropy `−∫ρ ln ρ` of a normalized member, in closed form
/// `−ln C₃ + ν c₂ + γ c₁`.
pub fn entropy(dist: &DistributionParams) -> Result<f64> {
    let v = constraint_values(dist)?;
    Ok(-dist.c3().ln() * v.norm + dist.nu() * v.c2 + dist.gamma() * v.c1)
}

pub fn entropy_quadrature(dist: &DistributionParams, spec: &QuadratureSpec) -> Result<f64> {
    let integrand = |b: f64| {
        let ln_rho = dist.ln_density(b);
        if ln_rho == f64::NEG_INFINITY {
            0.0
        } else {
            -ln_rho.exp() * ln_rho
        }
    };
    Ok(2.0 * integrate_positive_axis(integrand, spec)?)
}
