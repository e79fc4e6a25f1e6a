//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite intervals.
//!
//! The workhorse is a globally adaptive 21-point Gauss–Kronrod rule: the
//! interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol * |I|)`. Semi-infinite domains
//! `[a, ∞)` are compactified with `x = a + t / (1 - t)`.
//!
//! When an integral fails to converge the routine probes the offending
//! tail by integrating over geometrically growing panels; partial sums that
//! keep growing are reported as [`Error::DivergenceDetected`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and work limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidParams(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::InvalidParams(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParams("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    /// Same limits with both tolerances replaced.
    pub fn with_tolerances(self, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..self
        }
    }
}

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite { lower: f64, upper: f64 },
    /// `[lower, ∞)`
    SemiInfinite { lower: f64 },
}

impl Domain {
    pub fn finite(lower: f64, upper: f64) -> Self {
        Domain::Finite { lower, upper }
    }

    pub fn from(lower: f64) -> Self {
        Domain::SemiInfinite { lower }
    }
}

/// Value and error estimate of a converged integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

/// Integrates `f` over `domain`.
pub fn integrate<F>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_estimate(f, domain, spec).map(|e| e.value)
}

/// Like [`integrate`] but also returns the error estimate and the number of
/// subintervals used.
pub fn integrate_estimate<F>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    match domain {
        Domain::Finite { lower, upper } => {
            if !lower.is_finite() || !upper.is_finite() {
                return Err(Error::domain("finite domain needs finite endpoints"));
            }
            if lower == upper {
                return Ok(Estimate {
                    value: 0.0,
                    abs_error: 0.0,
                    subdivisions: 0,
                });
            }
            if lower > upper {
                return integrate_estimate(f, Domain::finite(upper, lower), spec).map(|e| Estimate {
                    value: -e.value,
                    ..e
                });
            }
            adaptive(&f, lower, upper, spec).map_err(|err| {
                let mid = 0.5 * (lower + upper);
                let probe = ProbeLimits::from_spec(spec);
                let diverges = probe_toward(&f, mid, lower, probe).diverges
                    || probe_toward(&f, mid, upper, probe).diverges;
                if diverges {
                    Error::DivergenceDetected(format!(
                        "partial integrals grow without bound near an endpoint of [{lower}, {upper}]"
                    ))
                } else {
                    err
                }
            })
        }
        Domain::SemiInfinite { lower } => {
            if !lower.is_finite() {
                return Err(Error::domain("semi-infinite domain needs a finite lower bound"));
            }
            let mapped = |t: f64| {
                let s = 1.0 - t;
                f(lower + t / s) / (s * s)
            };
            adaptive(&mapped, 0.0, 1.0, spec).map_err(|err| {
                let probe = probe_upper_tail(&f, lower, ProbeLimits::from_spec(spec));
                if probe.diverges {
                    Error::DivergenceDetected(format!(
                        "partial integrals over [{lower}, R] keep growing up to R = {:e} (last value {:e})",
                        probe.edges.last().copied().unwrap_or(lower),
                        probe.partials.last().copied().unwrap_or(f64::NAN),
                    ))
                } else {
                    err
                }
            })
        }
    }
}

/// Integral over `(0, ∞)` of a function that may be singular or slowly
/// decaying at either end: `[0, 1]` directly and `[1, ∞)` through
/// `x = e^y`, which turns power-law tails into exponential ones.
pub fn integrate_positive_axis<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let head = integrate(&f, Domain::finite(0.0, 1.0), spec)?;
    let tail = integrate(
        |y: f64| {
            let x = y.exp();
            if x.is_infinite() {
                0.0
            } else {
                f(x) * x
            }
        },
        Domain::from(0.0),
        spec,
    )?;
    Ok(head + tail)
}

// 21-point Kronrod abscissae on [-1, 1] (non-negative half), with the 10-point
// Gauss rule embedded at the odd indices.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, lower: f64, upper: f64) -> Panel {
    let center = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);

    let f_center = f(center);
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut values = [(0.0, 0.0); 10];

    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let fl = f(center - dx);
        let fr = f(center + dx);
        values[j] = (fl, fr);
        kronrod += WGK[j] * (fl + fr);
        abs_sum += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fr);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for (j, &(fl, fr)) in values.iter().enumerate() {
        asc += WGK[j] * ((fl - mean).abs() + (fr - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();

    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Panel {
        lower,
        upper,
        value,
        error,
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, lower: f64, upper: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let first = gauss_kronrod_21(f, lower, upper);
    if !first.value.is_finite() || !first.error.is_finite() {
        return Err(Error::non_convergence("integrate", "integrand is not finite on the domain"));
    }

    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut error = first.error;
    heap.push(first);

    loop {
        if error <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            break;
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::non_convergence(
                "integrate",
                format!(
                    "error estimate {error:e} above tolerance after {} subdivisions",
                    heap.len()
                ),
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lower + worst.upper);
        if mid <= worst.lower || mid >= worst.upper {
            return Err(Error::non_convergence(
                "integrate",
                format!("interval [{}, {}] cannot be bisected further", worst.lower, worst.upper),
            ));
        }
        let left = gauss_kronrod_21(f, worst.lower, mid);
        let right = gauss_kronrod_21(f, mid, worst.upper);
        if !left.value.is_finite() || !right.value.is_finite() {
            return Err(Error::non_convergence("integrate", "integrand is not finite on the domain"));
        }
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let panels = heap.into_vec();
    let value = panels.iter().map(|p| p.value).sum();
    let abs_error = panels.iter().map(|p| p.error).sum();
    Ok(Estimate {
        value,
        abs_error,
        subdivisions: panels.len(),
    })
}

/// Evidence from integrating over a sequence of panels approaching an edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailProbe {
    /// Outer edge of each successive window.
    pub edges: Vec<f64>,
    /// Cumulative integral up to each edge.
    pub partials: Vec<f64>,
    pub diverges: bool,
}

/// Limits for [`probe_upper_tail`] and [`probe_toward`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeLimits {
    pub panels: usize,
    /// Divergence is declared when the last panel still contributes more
    /// than this fraction of the cumulative integral.
    pub growth_ratio: f64,
    pub spec: QuadratureSpec,
}

impl Default for ProbeLimits {
    fn default() -> Self {
        Self::from_spec(&QuadratureSpec::default())
    }
}

impl ProbeLimits {
    pub fn from_spec(spec: &QuadratureSpec) -> Self {
        Self {
            panels: 48,
            growth_ratio: 1e-3,
            spec: QuadratureSpec {
                rel_tol: spec.rel_tol.max(1e-8),
                abs_tol: spec.abs_tol,
                max_subdivisions: spec.max_subdivisions.min(200),
            },
        }
    }
}

/// Integrates `f` over `[start, start + 1], [start + 1, start + 2], ...,
/// [start + 2^(k-1), start + 2^k]`, tracking the cumulative sum.
pub fn probe_upper_tail<F: Fn(f64) -> f64>(f: &F, start: f64, limits: ProbeLimits) -> TailProbe {
    let edges: Vec<f64> = (0..limits.panels).map(|k| start + 2f64.powi(k as i32)).collect();
    run_probe(f, start, &edges, limits)
}

/// Integrates `f` over windows that shrink geometrically from `start` toward
/// the finite point `edge`.
pub fn probe_toward<F: Fn(f64) -> f64>(f: &F, start: f64, edge: f64, limits: ProbeLimits) -> TailProbe {
    let span = start - edge;
    let edges: Vec<f64> = (1..=limits.panels)
        .map(|k| edge + span * 0.5f64.powi(k as i32))
        .collect();
    run_probe(f, start, &edges, limits)
}

fn run_probe<F: Fn(f64) -> f64>(f: &F, start: f64, edges: &[f64], limits: ProbeLimits) -> TailProbe {
    let mut partials = Vec::with_capacity(edges.len());
    let mut total = 0.0;
    let mut last_increment = 0.0;
    let mut previous = start;
    for &edge in edges {
        // Accumulated with positive orientation regardless of direction.
        let (a, b) = if edge >= previous { (previous, edge) } else { (edge, previous) };
        let increment = match adaptive(f, a, b, &limits.spec) {
            Ok(e) => e.value,
            Err(_) => f64::INFINITY,
        };
        last_increment = increment;
        total += increment;
        partials.push(total);
        previous = edge;
        if !total.is_finite() {
            break;
        }
    }
    let diverges = !total.is_finite()
        || (total != 0.0 && last_increment.abs() > limits.growth_ratio * total.abs());
    TailProbe {
        edges: edges[..partials.len()].to_vec(),
        partials,
        diverges,
    }
}
