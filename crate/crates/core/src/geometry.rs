//! The one-dimensional manifold of `β > 0` with line element `ds² = dβ²/β²`.
//! In `u = ln β` the metric is flat, geodesics are `β₀e^μ` and distances
//! are coordinate gaps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, Domain, QuadratureSpec};

fn check_positive(name: &str, beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {beta}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldPoint {
    beta: f64,
    u: f64,
}

impl ManifoldPoint {
    pub fn from_beta(beta: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        Ok(Self { beta, u: beta.ln() })
    }

    pub fn from_u(u: f64) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::domain(format!("u must be finite, got {u}")));
        }
        Self::from_beta(u.exp())
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn u(&self) -> f64 {
        self.u
    }
}

/// Overall factor of the metric: 1 for the normalized form, or the
/// extrapolated Fisher constant `C` for the raw one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricScale(pub f64);

impl MetricScale {
    pub const NORMALIZED: MetricScale = MetricScale(1.0);

    pub fn raw(c: f64) -> Result<Self> {
        if c > 0.0 && c.is_finite() {
            Ok(MetricScale(c))
        } else {
            Err(Error::InvalidParams(format!("metric constant must be positive, got {c}")))
        }
    }

    pub fn line_element(&self, beta: f64, dbeta: f64) -> Result<f64> {
        Ok(self.0 * line_element(beta, dbeta)?)
    }

    pub fn distance(&self, beta1: f64, beta2: f64) -> Result<f64> {
        Ok(self.0.sqrt() * geodesic_distance(beta1, beta2)?)
    }
}

/// `dβ²/β²`
pub fn line_element(beta: f64, dbeta: f64) -> Result<f64> {
    check_positive("beta", beta)?;
    let r = dbeta / beta;
    Ok(r * r)
}

/// `β₀ e^μ`
pub fn geodesic(beta0: f64, mu: f64) -> Result<f64> {
    check_positive("beta0", beta0)?;
    Ok(beta0 * mu.exp())
}

/// `|ln(β₂/β₁)|`
pub fn geodesic_distance(beta1: f64, beta2: f64) -> Result<f64> {
    check_positive("beta1", beta1)?;
    check_positive("beta2", beta2)?;
    Ok((beta2.ln() - beta1.ln()).abs())
}

/// Length `∫ |β'(t)|/β(t) dt` of a parametrized path in the normalized
/// metric.
pub fn path_length<B, D>(beta_of_t: B, dbeta_dt: D, t0: f64, t1: f64, spec: &QuadratureSpec) -> Result<f64>
where
    B: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    integrate(|t| dbeta_dt(t).abs() / beta_of_t(t), Domain::finite(t0, t1), spec)
}

/// Central-difference residual `β'' − (β')²/β` of the geodesic equation
/// along `β₀e^μ`, with step `h`.
pub fn geodesic_residual(beta0: f64, mu: f64, h: f64) -> Result<f64> {
    let (lo, mid, hi) = (geodesic(beta0, mu - h)?, geodesic(beta0, mu)?, geodesic(beta0, mu + h)?);
    let first = (hi - lo) / (2.0 * h);
    let second = (hi - 2.0 * mid + lo) / (h * h);
    Ok(second - first * first / mid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateRow {
    pub u: f64,
    pub beta: f64,
}

/// `(u, e^u)` for each grid value, in input order.
pub fn figure2_data(u_grid: &[f64]) -> Vec<CoordinateRow> {
    u_grid.iter().map(|&u| CoordinateRow { u, beta: u.exp() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn point_round_trip() {
        for b in [1e-3, 0.5, 1.0, 7.0, 1e4] {
            let p = ManifoldPoint::from_beta(b).unwrap();
            assert_eq!(p.u(), b.ln());
            assert!((p.u().exp() - b).abs() <= 1e-15 * b);
            let q = ManifoldPoint::from_u(p.u()).unwrap();
            assert!((q.beta() - b).abs() <= 2e-15 * b);
        }
        assert!(ManifoldPoint::from_beta(0.0).is_err());
        assert!(ManifoldPoint::from_beta(-1.0).is_err());
    }

    #[test]
    fn line_elements() {
        assert!((line_element(1.0, 0.1).unwrap() - 0.01).abs() < 1e-15);
        assert!((line_element(2.0, 0.2).unwrap() - 0.01).abs() < 1e-15);
        assert!((line_element(0.5, 0.1).unwrap() - 0.04).abs() < 1e-15);
        assert!(line_element(0.0, 0.1).is_err());
    }

    #[test]
    fn geodesics() {
        assert_eq!(geodesic(1.0, 0.0).unwrap(), 1.0);
        assert!((geodesic(1.0, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        assert!((geodesic(3.0, -(3f64.ln())).unwrap() - 1.0).abs() < 1e-15);
        assert!(geodesic(-1.0, 0.0).is_err());
    }

    #[test]
    fn distances() {
        assert!((geodesic_distance(1.0, E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(geodesic_distance(2.5, 2.5).unwrap(), 0.0);
        assert!((geodesic_distance(2.0, 8.0).unwrap() - 1.386_294_4).abs() < 1e-7);
        assert!(geodesic_distance(1.0, 0.0).is_err());
    }

    #[test]
    fn raw_metric_scale() {
        let raw = MetricScale::raw(4.0).unwrap();
        assert!((raw.distance(2.0, 8.0).unwrap() - 2.0 * 4f64.ln()).abs() < 1e-14);
        assert!((raw.line_element(1.0, 0.1).unwrap() - 0.04).abs() < 1e-15);
        assert_eq!(MetricScale::NORMALIZED.distance(1.0, E).unwrap(), geodesic_distance(1.0, E).unwrap());
        assert!(MetricScale::raw(0.0).is_err());
    }

    #[test]
    fn straight_path_length() {
        let (b1, b2) = (0.3, 5.0);
        let len = path_length(|t| b1 + (b2 - b1) * t, |_| b2 - b1, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((len - geodesic_distance(b1, b2).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn residual_is_second_order() {
        let r1 = geodesic_residual(1.5, 0.4, 1e-2).unwrap().abs();
        let r2 = geodesic_residual(1.5, 0.4, 5e-3).unwrap().abs();
        let ratio = r1 / r2;
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn coordinate_table() {
        assert_eq!(figure2_data(&[0.0]), vec![CoordinateRow { u: 0.0, beta: 1.0 }]);
        let rows = figure2_data(&[-1.0, 0.0, 1.0]);
        assert!((rows[0].beta - 1.0 / E).abs() < 1e-15);
        assert!((rows[2].beta - E).abs() < 1e-15);
        let grid: Vec<f64> = (0..100).map(|i| -3.0 + 6.0 * i as f64 / 99.0).collect();
        let rows = figure2_data(&grid);
        assert_eq!(rows.len(), 100);
        assert!(rows.windows(2).all(|w| w[1].beta > w[0].beta));
    }
}
