//! What happens to the maximum-entropy family when the constraint set is
//! changed. Each candidate fixes the family `β^(−ν) e^(−γ φ(β))` (or a
//! degenerate version of it); a few representative multiplier choices are
//! then probed numerically for normalizability, for convergence of the
//! ensemble average at a probe momentum, and for closure under `β → aβ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ln_h_beta, ModelParams, Momentum};
use crate::numerics::{probe_toward, probe_upper_tail, ProbeLimits, TailProbe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationCandidate {
    /// `⟨β²⟩` in place of `⟨1/β²⟩`.
    Beta2ForInvBeta2,
    /// `⟨ln β⟩` with no scale constraint.
    LnBetaOnly,
    /// `⟨1/β²⟩` with no location constraint.
    InvBeta2Only,
    /// `⟨β⟩` in place of `⟨1/β²⟩`.
    BetaFirstMoment,
    /// `⟨β⁴⟩` in place of `⟨1/β²⟩`.
    FourthMoment,
}

impl AblationCandidate {
    pub const ALL: [AblationCandidate; 5] = [
        AblationCandidate::Beta2ForInvBeta2,
        AblationCandidate::LnBetaOnly,
        AblationCandidate::InvBeta2Only,
        AblationCandidate::BetaFirstMoment,
        AblationCandidate::FourthMoment,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AblationCandidate::Beta2ForInvBeta2 => "beta2-for-inv-beta2",
            AblationCandidate::LnBetaOnly => "ln-beta-only",
            AblationCandidate::InvBeta2Only => "inv-beta2-only",
            AblationCandidate::BetaFirstMoment => "beta-first-moment",
            AblationCandidate::FourthMoment => "fourth-moment",
        }
    }

    fn family(self) -> Family {
        use AblationCandidate::*;
        match self {
            Beta2ForInvBeta2 => Family {
                description: "beta^(-nu) exp(-gamma beta^2)",
                log_power: true,
                scale_power: Some(2.0),
                members: &[(-2.0, 1.0), (0.0, 1.0), (0.5, 1.0), (2.0, 1.0), (4.0, 1.0)],
            },
            LnBetaOnly => Family {
                description: "beta^(-nu)",
                log_power: true,
                scale_power: None,
                members: &[(0.5, 0.0), (1.0, 0.0), (2.0, 0.0), (4.0, 0.0)],
            },
            InvBeta2Only => Family {
                description: "exp(-gamma / beta^2)",
                log_power: false,
                scale_power: Some(-2.0),
                members: &[(0.0, 0.5), (0.0, 1.0), (0.0, 2.0)],
            },
            BetaFirstMoment => Family {
                description: "beta^(-nu) exp(-gamma beta)",
                log_power: true,
                scale_power: Some(1.0),
                members: &[(-1.0, 1.0), (0.5, 1.0), (2.0, 1.0), (4.0, 1.0)],
            },
            FourthMoment => Family {
                description: "beta^(-nu) exp(-gamma beta^4)",
                log_power: true,
                scale_power: Some(4.0),
                members: &[(-1.0, 1.0), (0.5, 1.0), (2.0, 1.0), (4.0, 1.0)],
            },
        }
    }
}

impl fmt::Display for AblationCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AblationCandidate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let found = match s {
            "beta2-for-inv-beta2" | "β²-for-1/β²" => AblationCandidate::Beta2ForInvBeta2,
            "ln-beta-only" | "lnβ-only" => AblationCandidate::LnBetaOnly,
            "inv-beta2-only" | "1/β²-only" => AblationCandidate::InvBeta2Only,
            "beta-first-moment" | "β-first-moment" => AblationCandidate::BetaFirstMoment,
            "fourth-moment" => AblationCandidate::FourthMoment,
            other => return Err(Error::UnknownCandidate(other.to_string())),
        };
        Ok(found)
    }
}

struct Family {
    description: &'static str,
    /// Whether the `β^(−ν)` factor is present.
    log_power: bool,
    /// `d` in `φ(β) = β^d`, if the family carries an exponential factor.
    scale_power: Option<f64>,
    /// Representative `(ν, γ)` pairs.
    members: &'static [(f64, f64)],
}

impl Family {
    fn ln_density(&self, nu: f64, gamma: f64, beta: f64) -> f64 {
        let mut v = 0.0;
        if self.log_power {
            v -= nu * beta.ln();
        }
        if let Some(d) = self.scale_power {
            v -= gamma * beta.powf(d);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    /// Holds for some multiplier values only.
    Conditional,
}

/// Outcome of a tail probe, trimmed for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub diverges: bool,
    pub last_edge: f64,
    pub last_partial: f64,
}

impl From<&TailProbe> for TailSummary {
    fn from(p: &TailProbe) -> Self {
        TailSummary {
            diverges: p.diverges,
            last_edge: p.edges.last().copied().unwrap_or(f64::NAN),
            last_partial: p.partials.last().copied().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberEvidence {
    pub nu: f64,
    pub gamma: f64,
    pub density_at_zero: TailSummary,
    pub density_at_infinity: TailSummary,
    pub average_at_zero: TailSummary,
    pub average_at_infinity: TailSummary,
    /// `ln` of the density at β = 10⁻³ and β = 10³.
    pub ln_density_small: f64,
    pub ln_density_large: f64,
    /// `ln(ρ H_β)` at β = 10⁻³ and β = 10³ for the probe momentum.
    pub ln_average_integrand_small: f64,
    pub ln_average_integrand_large: f64,
    pub normalizable: bool,
    pub average_converges: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationFinding {
    pub candidate: AblationCandidate,
    pub family: String,
    pub probe_momentum: f64,
    pub normalizable: Verdict,
    /// Whether some normalizable member has a finite ensemble average.
    pub average_converges: bool,
    /// Whether `β → aβ` maps every probed member onto another member.
    pub scale_closed: bool,
    pub evidence: Vec<MemberEvidence>,
    pub note: String,
}

/// Probe momentum and model used by [`ablation_report`].
pub const PROBE_MOMENTUM: f64 = 0.1;

fn exp_or_zero(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v.exp()
    }
}

pub fn ablation_report(candidate: &str) -> Result<AblationFinding> {
    let candidate: AblationCandidate = candidate.parse()?;
    diagnose(candidate, Momentum(PROBE_MOMENTUM), &ModelParams::default())
}

pub fn diagnose(candidate: AblationCandidate, p: Momentum, params: &ModelParams) -> Result<AblationFinding> {
    let family = candidate.family();
    let limits = ProbeLimits::default();
    let mut evidence = Vec::with_capacity(family.members.len());

    for &(nu, gamma) in family.members {
        let density = |b: f64| exp_or_zero(family.ln_density(nu, gamma, b));
        let ln_avg = |b: f64| family.ln_density(nu, gamma, b) + ln_h_beta(p, b, params).unwrap_or(f64::INFINITY);
        let average = |b: f64| exp_or_zero(ln_avg(b));

        let d0 = probe_toward(&density, 1.0, 0.0, limits);
        let dinf = probe_upper_tail(&density, 1.0, limits);
        let a0 = probe_toward(&average, 1.0, 0.0, limits);
        let ainf = probe_upper_tail(&average, 1.0, limits);

        let normalizable = !d0.diverges && !dinf.diverges;
        evidence.push(MemberEvidence {
            nu,
            gamma,
            density_at_zero: (&d0).into(),
            density_at_infinity: (&dinf).into(),
            average_at_zero: (&a0).into(),
            average_at_infinity: (&ainf).into(),
            ln_density_small: family.ln_density(nu, gamma, 1e-3),
            ln_density_large: family.ln_density(nu, gamma, 1e3),
            ln_average_integrand_small: ln_avg(1e-3),
            ln_average_integrand_large: ln_avg(1e3),
            normalizable,
            average_converges: normalizable && !a0.diverges && !ainf.diverges,
        });
    }

    let normalizable_count = evidence.iter().filter(|e| e.normalizable).count();
    let normalizable = match normalizable_count {
        0 => Verdict::No,
        n if n == evidence.len() => Verdict::Yes,
        _ => Verdict::Conditional,
    };
    let average_converges = evidence.iter().any(|e| e.average_converges);
    let scale_closed = family
        .members
        .iter()
        .all(|&(nu, gamma)| scale_maps_into_family(&family, nu, gamma, 2.0));

    let note = match candidate {
        AblationCandidate::InvBeta2Only => {
            "density tends to a non-zero constant as beta grows, so the family is not normalizable; \
             no concentration onto a single point is observed, which is in tension with the \
             expected collapse of this family"
        }
        AblationCandidate::LnBetaOnly => {
            "a pure power law diverges at zero (nu >= 1) or at infinity (nu <= 1) for every exponent"
        }
        AblationCandidate::Beta2ForInvBeta2
        | AblationCandidate::BetaFirstMoment
        | AblationCandidate::FourthMoment => {
            "normalizable only for nu < 1; nothing suppresses exp(p^2 / (2 m lambda^2 beta^2)) as \
             beta -> 0, so the ensemble average diverges for any p != 0. The family itself is closed \
             under beta -> a beta with rescaled gamma"
        }
    };

    Ok(AblationFinding {
        candidate,
        family: family.description.to_string(),
        probe_momentum: p.0,
        normalizable,
        average_converges,
        scale_closed,
        evidence,
        note: note.to_string(),
    })
}

/// Checks that `ρ(β/a)/a` equals a member of the family up to a constant
/// factor: `ln ρ(β/a) − ln ρ'(β)` must not depend on β.
fn scale_maps_into_family(family: &Family, nu: f64, gamma: f64, a: f64) -> bool {
    let gamma_scaled = match family.scale_power {
        Some(d) => gamma * a.powf(-d),
        None => gamma,
    };
    let offsets: Vec<f64> = [0.1, 0.3, 1.0, 3.0, 10.0]
        .iter()
        .map(|&b| family.ln_density(nu, gamma, b / a) - family.ln_density(nu, gamma_scaled, b))
        .collect();
    offsets.iter().all(|o| (o - offsets[0]).abs() < 1e-9 * (1.0 + offsets[0].abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_identifiers() {
        for c in AblationCandidate::ALL {
            assert_eq!(c.id().parse::<AblationCandidate>().unwrap(), c);
        }
        assert_eq!("β²-for-1/β²".parse::<AblationCandidate>().unwrap(), AblationCandidate::Beta2ForInvBeta2);
        assert!(matches!(
            "sixth-moment".parse::<AblationCandidate>(),
            Err(Error::UnknownCandidate(_))
        ));
        assert!(ablation_report("nope").is_err());
    }

    #[test]
    fn square_family_average_diverges() {
        let f = ablation_report("beta2-for-inv-beta2").unwrap();
        assert!(!f.average_converges);
        assert_eq!(f.normalizable, Verdict::Conditional);
        for e in &f.evidence {
            assert!(e.average_at_zero.diverges, "nu = {}", e.nu);
            assert!(e.ln_average_integrand_small > 1e3);
        }
    }

    #[test]
    fn power_law_never_normalizable() {
        let f = ablation_report("ln-beta-only").unwrap();
        assert_eq!(f.normalizable, Verdict::No);
        for e in &f.evidence {
            assert!(e.density_at_zero.diverges || e.density_at_infinity.diverges);
        }
    }

    #[test]
    fn inverse_square_only_not_normalizable() {
        let f = ablation_report("inv-beta2-only").unwrap();
        assert_eq!(f.normalizable, Verdict::No);
        for e in &f.evidence {
            assert!(e.density_at_infinity.diverges);
            assert!(!e.density_at_zero.diverges);
            // density → 1 at large β
            assert!(e.ln_density_large.abs() < 1e-5);
        }
    }

    #[test]
    fn substituted_moments() {
        for id in ["beta-first-moment", "fourth-moment"] {
            let f = ablation_report(id).unwrap();
            assert_eq!(f.normalizable, Verdict::Conditional, "{id}");
            assert!(!f.average_converges, "{id}");
            assert!(f.scale_closed);
        }
    }

    #[test]
    fn reference_pair_behaves() {
        // sanity check of the probe itself on the β^(−4) e^(−1/β²) family
        let limits = ProbeLimits::default();
        let params = ModelParams::default();
        let density = |b: f64| (-4.0 * b.ln() - 1.0 / (b * b)).exp();
        let avg = |b: f64| (-4.0 * b.ln() - 1.0 / (b * b) + ln_h_beta(Momentum(0.1), b, &params).unwrap()).exp();
        assert!(!probe_toward(&density, 1.0, 0.0, limits).diverges);
        assert!(!probe_upper_tail(&density, 1.0, limits).diverges);
        assert!(!probe_toward(&avg, 1.0, 0.0, limits).diverges);
        assert!(!probe_upper_tail(&avg, 1.0, limits).diverges);
    }
}
