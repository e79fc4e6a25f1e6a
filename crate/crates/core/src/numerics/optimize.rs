//! One-dimensional maximization of unimodal functions (Brent's method:
//! golden-section steps with parabolic interpolation when it behaves).

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - √5) / 2
const MAX_ITER: usize = 500;

/// Maximizer of `f` on `bracket`, located to within `tol`. Returns
/// `(argmax, f(argmax))`.
pub fn maximize_1d<F: Fn(f64) -> f64>(f: F, bracket: (f64, f64), tol: f64) -> Result<(f64, f64)> {
    let (lo, hi) = bracket;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidParams(format!(
            "bracket must be finite with lower < upper, got [{lo}, {hi}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tol must be positive, got {tol}")));
    }

    let cost = |x: f64| -f(x);
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = cost(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..MAX_ITER {
        let mid = 0.5 * (a + b);
        let tol1 = (f64::EPSILON.sqrt() * x.abs()).min(tol / 3.0) + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, -fx));
        }

        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(mid - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { a - x } else { b - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = cost(u);
        if !fu.is_finite() {
            return Err(Error::non_convergence("maximize_1d", format!("f({u}) is not finite")));
        }

        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    Err(Error::non_convergence(
        "maximize_1d",
        format!("no convergence after {MAX_ITER} iterations"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let (x, fx) = maximize_1d(|x| -(x - 1.0) * (x - 1.0), (0.0, 2.0), 1e-10).unwrap();
        assert!((x - 1.0).abs() < 1e-9);
        assert!(fx.abs() < 1e-18);
    }

    #[test]
    fn relativistic_conjugate() {
        let (p, value) = maximize_1d(|p: f64| 0.6 * p - (p * p + 1.0).sqrt(), (-5.0, 5.0), 1e-10).unwrap();
        assert!((p - 0.75).abs() < 1e-8, "{p}");
        assert!((value + 0.8).abs() < 1e-14);
    }

    #[test]
    fn kink_at_zero() {
        let (x, fx) = maximize_1d(|x: f64| -x.abs(), (-1.0, 1.0), 1e-10).unwrap();
        assert!(x.abs() < 1e-9);
        assert!(fx.abs() < 1e-9);
    }

    #[test]
    fn maximum_on_boundary() {
        let (x, _) = maximize_1d(|x| x, (0.0, 1.0), 1e-10).unwrap();
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(maximize_1d(|x| x, (1.0, 0.0), 1e-8).is_err());
        assert!(maximize_1d(|x| x, (0.0, 1.0), 0.0).is_err());
    }
}
