//! Least-squares extrapolation of `value(q)` to `q → ∞` in powers of `1/q²`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitModel {
    /// `L + a/q²`
    InverseSquare,
    /// `L + a/q² + b/q⁴`
    InverseSquareQuartic,
}

impl LimitModel {
    fn terms(self) -> usize {
        match self {
            LimitModel::InverseSquare => 2,
            LimitModel::InverseSquareQuartic => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitFit {
    pub model: LimitModel,
    pub limit: f64,
    /// Coefficient of `1/q²`.
    pub coefficient: f64,
    /// Coefficient of `1/q⁴`; zero for [`LimitModel::InverseSquare`].
    pub quartic_coefficient: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

pub fn extrapolate_limit(pairs: &[(f64, f64)], model: LimitModel) -> Result<LimitFit> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 (q, value) pairs, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|&(q, v)| !(q > 0.0) || !q.is_finite() || !v.is_finite()) {
        return Err(Error::InvalidParams("q must be positive and values finite".into()));
    }
    if pairs.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParams("q must be strictly increasing".into()));
    }

    // Columns in the scaled variable x = (q0/q)², which lies in (0, 1].
    let q0 = pairs[0].0;
    let n = pairs.len();
    let terms = model.terms();
    let design = DMatrix::from_fn(n, terms, |i, j| ((q0 / pairs[i].0).powi(2)).powi(j as i32));
    let rhs = DVector::from_iterator(n, pairs.iter().map(|&(_, v)| v));

    let solution = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::non_convergence("extrapolate_limit", e.to_string()))?;

    let fitted = &design * &solution;
    let residual = ((&rhs - fitted).norm_squared() / n as f64).sqrt();

    let scale = q0 * q0;
    Ok(LimitFit {
        model,
        limit: solution[0],
        coefficient: solution[1] * scale,
        quartic_coefficient: if terms > 2 { solution[2] * scale * scale } else { 0.0 },
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_model() {
        let pairs: Vec<_> = [10.0, 14.0, 18.0, 22.0, 26.0]
            .iter()
            .map(|&q: &f64| (q, 4.0 + 8.0 / (q * q)))
            .collect();
        let fit = extrapolate_limit(&pairs, LimitModel::InverseSquare).unwrap();
        assert!((fit.limit - 4.0).abs() < 1e-12);
        assert!((fit.coefficient - 8.0).abs() < 1e-10);
        assert!(fit.residual < 1e-13);

        let quartic = extrapolate_limit(&pairs, LimitModel::InverseSquareQuartic).unwrap();
        assert!((quartic.limit - 4.0).abs() < 1e-12);
        assert!((quartic.coefficient - 8.0).abs() < 1e-9);
        assert!(quartic.quartic_coefficient.abs() < 1e-6);
    }

    #[test]
    fn recovers_quartic_model() {
        let pairs: Vec<_> = (0..6)
            .map(|i| {
                let q = 5.0 + 3.0 * i as f64;
                (q, -1.5 + 2.0 / (q * q) + 60.0 / q.powi(4))
            })
            .collect();
        let fit = extrapolate_limit(&pairs, LimitModel::InverseSquareQuartic).unwrap();
        assert!((fit.limit + 1.5).abs() < 1e-12);
        assert!((fit.coefficient - 2.0).abs() < 1e-9);
        assert!((fit.quartic_coefficient - 60.0).abs() < 1e-6);
    }

    #[test]
    fn constant_data() {
        let pairs = [(1.0, 7.0), (2.0, 7.0), (3.0, 7.0)];
        let fit = extrapolate_limit(&pairs, LimitModel::InverseSquare).unwrap();
        assert!((fit.limit - 7.0).abs() < 1e-12);
        assert!(fit.coefficient.abs() < 1e-12);
    }

    #[test]
    fn needs_three_points() {
        let err = extrapolate_limit(&[(1.0, 1.0), (2.0, 1.0)], LimitModel::InverseSquare).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
        assert!(matches!(
            extrapolate_limit(&[(1.0, 1.0)], LimitModel::InverseSquare),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn rejects_unordered_q() {
        let pairs = [(1.0, 1.0), (3.0, 1.0), (2.0, 1.0)];
        assert!(extrapolate_limit(&pairs, LimitModel::InverseSquare).is_err());
    }
}
