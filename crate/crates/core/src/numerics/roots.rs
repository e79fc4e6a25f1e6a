//! Bracketing root finder (Brent's method with bisection fallback).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSpec {
    pub tol: f64,
    pub max_iter: usize,
    pub bracket: (f64, f64),
}

impl RootSpec {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            bracket: (lower, upper),
        }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.bracket;
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidParams(format!(
                "bracket must be finite with lower < upper, got [{a}, {b}]"
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Finds `x` in the bracket with `|g(x)| <= tol` or a final bracket no wider
/// than `tol`.
pub fn find_root<G: Fn(f64) -> f64>(g: G, spec: &RootSpec) -> Result<f64> {
    spec.validate()?;
    let (mut a, mut b) = spec.bracket;
    let mut fa = g(a);
    let mut fb = g(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoBracket {
            lower: a,
            upper: b,
            f_lower: fa,
            f_upper: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..spec.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.tol;
        let half = 0.5 * (c - b);
        if fb.abs() <= spec.tol || half.abs() <= tol1 {
            return Ok(b);
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, or secant when a == c.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * half * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(half) };
        fb = g(b);
        if !fb.is_finite() {
            return Err(Error::non_convergence("find_root", format!("g({b}) is not finite")));
        }
    }

    Err(Error::non_convergence(
        "find_root",
        format!("no convergence after {} iterations", spec.max_iter),
    ))
}
