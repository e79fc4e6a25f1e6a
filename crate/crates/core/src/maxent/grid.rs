//! Discretized maximum-entropy oracle.
//!
//! Maximizes the trapezoid-rule entropy of a density sampled on
//! `[β_min, β_max]` (mirrored to negative β) subject to normalization,
//! `⟨1/β²⟩ = c₁` and `⟨ln β⟩ = c₂`. The dual is minimized by damped Newton
//! iteration on the exponents `(γ, ν)`; the normalization multiplier `α` is
//! eliminated through the log-partition function. Nothing here uses the
//! Gamma-function closed forms except the final comparison.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::{solve_multipliers, ConstraintTargets};
use crate::error::{Error, Result};
use crate::numerics::{integrate, Domain, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub beta_min: f64,
    pub beta_max: f64,
    pub n: usize,
}

pub const MIN_GRID_POINTS: usize = 200;

/// Closed-form mass outside the grid above which the comparison with the
/// closed form is dominated by truncation.
pub const TAIL_MASS_LIMIT: f64 = 1e-6;

impl GridSpec {
    pub fn new(beta_min: f64, beta_max: f64, n: usize) -> Result<Self> {
        if !(beta_min > 0.0) || !(beta_max > beta_min) || !beta_max.is_finite() {
            return Err(Error::InvalidParams(format!(
                "grid needs 0 < beta_min < beta_max < inf, got [{beta_min}, {beta_max}]"
            )));
        }
        if n < MIN_GRID_POINTS {
            return Err(Error::InvalidParams(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n}"
            )));
        }
        Ok(Self { beta_min, beta_max, n })
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.beta_max - self.beta_min) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.beta_min + h * i as f64).collect()
    }

    /// Trapezoid weights, doubled for the mirrored half of the line.
    pub fn weights(&self) -> Vec<f64> {
        let h = (self.beta_max - self.beta_min) / (self.n - 1) as f64;
        let mut w = vec![2.0 * h; self.n];
        w[0] = h;
        w[self.n - 1] = h;
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualMultipliers {
    pub alpha: f64,
    pub gamma: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMaxEntResult {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub density: Vec<f64>,
    pub dual_multipliers: DualMultipliers,
    pub sup_error_vs_closed_form: f64,
    /// Closed-form probability outside `±[β_min, β_max]`.
    pub tail_mass: f64,
    /// Residuals of normalization, `⟨1/β²⟩` and `⟨ln β⟩` on the grid.
    pub residuals: [f64; 3],
    pub entropy: f64,
    pub iterations: usize,
}

impl GridMaxEntResult {
    /// Whether the closed-form tail mass is below [`TAIL_MASS_LIMIT`].
    pub fn truncation_controlled(&self) -> bool {
        self.tail_mass < TAIL_MASS_LIMIT
    }

    /// Discrete entropy `−Σ wᵢ ρᵢ ln ρᵢ` of a density on this grid.
    pub fn discrete_entropy(&self, density: &[f64]) -> f64 {
        discrete_entropy(&self.weights, density)
    }

    /// Discrete constraint values `(Σwρ, Σwρ/β², Σwρ ln β)`.
    pub fn discrete_constraints(&self, density: &[f64]) -> [f64; 3] {
        moments(&self.grid, &self.weights, density)
    }

    /// `ρ(1 + ε δ̃)`, where `δ̃` is `perturbation` with its components along
    /// the three constraint functions removed (in the `wρ` inner product),
    /// so the result satisfies the discrete constraints exactly. `ε` is
    /// chosen so the largest relative change equals `amplitude`.
    pub fn perturb(&self, perturbation: &[f64], amplitude: f64) -> Result<Vec<f64>> {
        if perturbation.len() != self.grid.len() {
            return Err(Error::InvalidParams("perturbation length must match the grid".into()));
        }
        if !(amplitude > 0.0 && amplitude < 1.0) {
            return Err(Error::InvalidParams("amplitude must lie in (0, 1)".into()));
        }
        let basis = |b: f64| Vector3::new(1.0, 1.0 / (b * b), b.ln());
        let mut gram = Matrix3::zeros();
        let mut rhs = Vector3::zeros();
        for ((&b, &w), (&rho, &d)) in self.grid.iter().zip(&self.weights).zip(self.density.iter().zip(perturbation)) {
            let g = basis(b);
            gram += w * rho * g * g.transpose();
            rhs += w * rho * d * g;
        }
        let coef = gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::non_convergence("perturb", "singular constraint Gram matrix"))?;
        let projected: Vec<f64> = self
            .grid
            .iter()
            .zip(perturbation)
            .map(|(&b, &d)| d - coef.dot(&basis(b)))
            .collect();
        let peak = projected.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return Ok(self.density.clone());
        }
        let eps = amplitude / peak;
        Ok(self
            .density
            .iter()
            .zip(&projected)
            .map(|(&rho, &d)| rho * (1.0 + eps * d))
            .collect())
    }
}

fn discrete_entropy(weights: &[f64], density: &[f64]) -> f64 {
    weights
        .iter()
        .zip(density)
        .filter(|(_, &r)| r > 0.0)
        .map(|(&w, &r)| -w * r * r.ln())
        .sum()
}

fn moments(grid: &[f64], weights: &[f64], density: &[f64]) -> [f64; 3] {
    let mut m = [0.0; 3];
    for ((&b, &w), &r) in grid.iter().zip(weights).zip(density) {
        m[0] += w * r;
        m[1] += w * r / (b * b);
        m[2] += w * r * b.ln();
    }
    m
}

const MAX_NEWTON: usize = 200;
const GRADIENT_TOL: f64 = 1e-13;
const VALUE_NOISE: f64 = 1e-12;

struct Dual<'a> {
    features: &'a [(f64, f64)],
    ln_weights: &'a [f64],
    target: Vector2<f64>,
}

struct DualState {
    value: f64,
    ln_z: f64,
    gradient: Vector2<f64>,
    hessian: Matrix2<f64>,
}

impl Dual<'_> {
    /// Dual objective `ln Z(θ) + θ·c`, with gradient `c − ⟨f⟩` and the
    /// covariance of the features as Hessian.
    fn evaluate(&self, theta: Vector2<f64>) -> DualState {
        let log_terms: Vec<f64> = self
            .features
            .iter()
            .zip(self.ln_weights)
            .map(|(&(f1, f2), &lw)| lw - theta[0] * f1 - theta[1] * f2)
            .collect();
        let shift = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        let mut mean = Vector2::zeros();
        for (&(f1, f2), &lt) in self.features.iter().zip(&log_terms) {
            let p = (lt - shift).exp();
            z += p;
            mean += p * Vector2::new(f1, f2);
        }
        mean /= z;
        let mut cov = Matrix2::zeros();
        for (&(f1, f2), &lt) in self.features.iter().zip(&log_terms) {
            let p = (lt - shift).exp() / z;
            let d = Vector2::new(f1, f2) - mean;
            cov += p * d * d.transpose();
        }
        let ln_z = z.ln() + shift;
        DualState {
            value: ln_z + theta.dot(&self.target),
            ln_z,
            gradient: self.target - mean,
            hessian: cov,
        }
    }
}

pub fn grid_maxent(targets: &ConstraintTargets, grid_spec: &GridSpec) -> Result<GridMaxEntResult> {
    let grid_spec = GridSpec::new(grid_spec.beta_min, grid_spec.beta_max, grid_spec.n)?;
    if !targets.is_feasible() {
        return Err(Error::Infeasible(format!(
            "ln(c1) + 2 c2 = {} must be positive",
            targets.feasibility_margin()
        )));
    }
    let grid = grid_spec.points();
    let weights = grid_spec.weights();
    let features: Vec<(f64, f64)> = grid.iter().map(|&b| (1.0 / (b * b), b.ln())).collect();
    let ln_weights: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    let dual = Dual {
        features: &features,
        ln_weights: &ln_weights,
        target: Vector2::new(targets.c1, targets.c2),
    };

    let mut theta = Vector2::new(1.0, 4.0);
    let mut state = dual.evaluate(theta);
    let mut iterations = 0;
    while state.gradient.amax() > GRADIENT_TOL * (1.0 + targets.c1.abs().max(targets.c2.abs())) {
        if iterations >= MAX_NEWTON {
            return Err(Error::non_convergence(
                "grid_maxent",
                format!("dual gradient {:e} after {MAX_NEWTON} Newton steps", state.gradient.amax()),
            ));
        }
        iterations += 1;
        // `gradient` is ∇D; the Newton direction is −H⁻¹∇D.
        let step = -state.hessian.lu().solve(&state.gradient).ok_or_else(|| {
            Error::Infeasible("constraint features are degenerate on this grid".into())
        })?;
        let slope = state.gradient.dot(&step);
        if -slope <= VALUE_NOISE * (1.0 + state.value.abs()) {
            // The predicted decrease is below the rounding noise of the dual
            // value, so line search is blind; take pure Newton steps while
            // they still reduce the gradient.
            let next = dual.evaluate(theta + step);
            if next.gradient.amax() < state.gradient.amax() {
                theta += step;
                state = next;
                continue;
            }
            return finish(targets, &grid_spec, grid, weights, &features, theta, state.ln_z, iterations);
        }
        let mut t = 1.0;
        loop {
            let candidate = theta + t * step;
            let next = dual.evaluate(candidate);
            if next.value.is_finite() && next.value <= state.value + 1e-4 * t * slope.min(0.0) {
                theta = candidate;
                state = next;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                // No further decrease representable: accept the current point.
                return finish(targets, &grid_spec, grid, weights, &features, theta, state.ln_z, iterations);
            }
        }
    }
    finish(targets, &grid_spec, grid, weights, &features, theta, state.ln_z, iterations)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    targets: &ConstraintTargets,
    grid_spec: &GridSpec,
    grid: Vec<f64>,
    weights: Vec<f64>,
    features: &[(f64, f64)],
    theta: Vector2<f64>,
    ln_z: f64,
    iterations: usize,
) -> Result<GridMaxEntResult> {
    // ln Z includes ln w; the density itself excludes it.
    let density: Vec<f64> = features
        .iter()
        .map(|&(f1, f2)| (-theta[0] * f1 - theta[1] * f2 - ln_z).exp())
        .collect();
    // With ρ = exp(−1 − α − γ/β² − ν ln β) the factor e^(−1−α) equals 1/Z.
    let alpha = ln_z - 1.0;

    let m = moments(&grid, &weights, &density);
    let residuals = [m[0] - 1.0, m[1] - targets.c1, m[2] - targets.c2];

    let closed = solve_multipliers(targets)?.distribution()?;
    let sup_error_vs_closed_form = grid
        .iter()
        .zip(&density)
        .map(|(&b, &r)| (r - closed.density(b)).abs())
        .fold(0.0, f64::max);
    let spec = QuadratureSpec::default();
    let inside = 2.0 * integrate(|b| closed.density(b), Domain::finite(grid_spec.beta_min, grid_spec.beta_max), &spec)?;
    let tail_mass = (1.0 - inside).max(0.0);

    Ok(GridMaxEntResult {
        entropy: discrete_entropy(&weights, &density),
        grid,
        weights,
        density,
        dual_multipliers: DualMultipliers {
            alpha,
            gamma: theta[0],
            nu: theta[1],
        },
        sup_error_vs_closed_form,
        tail_mass,
        residuals,
        iterations,
    })
}
