//! Square-root kinematics `H = √(p²c² + m²c⁴)`, its velocity and its
//! Lagrangian, with the Legendre transform checked numerically in both
//! directions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::maximize_1d;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativisticParams {
    m: f64,
    c: f64,
}

impl RelativisticParams {
    pub fn new(m: f64, c: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) || !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "relativistic parameters need m > 0 and c > 0, got m = {m}, c = {c}"
            )));
        }
        Ok(Self { m, c })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }
}

/// `c² = 2λ²`.
impl From<&ModelParams> for RelativisticParams {
    fn from(p: &ModelParams) -> Self {
        Self { m: p.m(), c: p.c() }
    }
}

pub fn h_rel(p: f64, rp: &RelativisticParams) -> f64 {
    let mc2 = rp.rest_energy();
    (p * rp.c).hypot(mc2)
}

/// `∂H/∂p = pc²/H`
pub fn velocity(p: f64, rp: &RelativisticParams) -> f64 {
    p * rp.c * rp.c / h_rel(p, rp)
}

/// Momentum with the given velocity, `mv/√(1 − v²/c²)`.
pub fn momentum_for_velocity(v: f64, rp: &RelativisticParams) -> Result<f64> {
    Ok(rp.m * v / lorentz_root(v, rp)?)
}

fn lorentz_root(v: f64, rp: &RelativisticParams) -> Result<f64> {
    if !(v.abs() < rp.c) {
        return Err(Error::domain(format!("|v| must be below c = {}, got {v}", rp.c)));
    }
    let r = v / rp.c;
    Ok(((1.0 - r) * (1.0 + r)).sqrt())
}

/// `−mc²√(1 − v²/c²)`
pub fn l_rel(v: f64, rp: &RelativisticParams) -> Result<f64> {
    Ok(-rp.rest_energy() * lorentz_root(v, rp)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendrePoint {
    pub v: f64,
    pub value: f64,
    pub argmax_p: f64,
}

/// `sup_p (vp − H(p))` by bracketed maximization over
/// `|p| ≤ 2m|v|/√(1 − v²/c²) + 1`.
pub fn legendre_numeric(v: f64, rp: &RelativisticParams, tol: f64) -> Result<LegendrePoint> {
    let root = lorentz_root(v, rp)?;
    let bound = 2.0 * rp.m * v.abs() / root + 1.0;
    let xtol = tol.min(1e-10).max(f64::EPSILON);
    let (argmax_p, value) = maximize_1d(|p| v * p - h_rel(p, rp), (-bound, bound), xtol)?;
    Ok(LegendrePoint { v, value, argmax_p })
}

/// `sup_v (pv − L(v))` over `|v| < c`, which should give back `H(p)`.
pub fn inverse_legendre_numeric(p: f64, rp: &RelativisticParams, tol: f64) -> Result<LegendrePoint> {
    let edge = rp.c * (1.0 - f64::EPSILON);
    let xtol = tol.min(1e-12).max(f64::EPSILON) * rp.c;
    let (argmax_v, value) = maximize_1d(
        |v| p * v - l_rel(v, rp).unwrap_or(f64::INFINITY),
        (-edge, edge),
        xtol,
    )?;
    Ok(LegendrePoint {
        v: argmax_v,
        value,
        argmax_p: p,
    })
}
