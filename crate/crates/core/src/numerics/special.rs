//! Gamma and digamma on the positive real axis.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_741_780_329_736_4;

fn check_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} requires a finite x > 0, got {x}")))
    }
}

fn lanczos_sum(z: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, &c)| acc + c / (z + (i + 1) as f64))
}

/// Γ(x) for x > 0. Overflows to `+inf` above x ≈ 171.6.
pub fn gamma_fn(x: f64) -> Result<f64> {
    check_positive(x, "gamma")?;
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // Split the power so t^(z + 1/2) does not overflow before Γ itself does.
    let half_power = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half_power * (half_power * (-t).exp()) * lanczos_sum(z)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive(x, "ln_gamma")?;
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x < 15.0 {
        return gamma_unchecked(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// ψ(x) = d/dx ln Γ(x) for x > 0.
pub fn digamma_fn(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    let (shift, y) = shift_up(x);
    Ok(y.ln() + asymptotic_tail(y) - shift)
}

/// ψ(x) − ln x, evaluated without the cancellation that the direct
/// difference suffers for large x. Strictly increasing from −∞ to 0⁻.
pub fn digamma_minus_ln(x: f64) -> Result<f64> {
    check_positive(x, "digamma_minus_ln")?;
    if x >= ASYMPTOTIC_START {
        return Ok(asymptotic_tail(x));
    }
    let (shift, y) = shift_up(x);
    Ok((y / x).ln() + asymptotic_tail(y) - shift)
}

const ASYMPTOTIC_START: f64 = 10.0;

/// Uses ψ(x) = ψ(x + 1) − 1/x until the argument reaches the asymptotic
/// regime. Returns the accumulated `Σ 1/(x + j)` and the shifted argument.
fn shift_up(mut x: f64) -> (f64, f64) {
    let mut shift = 0.0;
    while x < ASYMPTOTIC_START {
        shift += 1.0 / x;
        x += 1.0;
    }
    (shift, x)
}

/// ψ(x) − ln x = −1/(2x) − Σ B₂ₙ / (2n x²ⁿ), truncated after x⁻¹⁴.
fn asymptotic_tail(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    -0.5 / x - series
}
