//! C ABI over `mdx-core`.
//!
//! Every fallible call returns an [`MdxStatus`] and writes results through
//! out-pointers. The message of the most recent failure on the calling
//! thread is available from [`mdx_last_error_message`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};
use mdx_core::averaging::average_h;
use mdx_core::config::RunConfig;
use mdx_core::fisher::{fisher_metric, fisher_scan, RegulatedFamily};
use mdx_core::geometry::{geodesic, geodesic_distance};
use mdx_core::maxent::{solve_multipliers, ConstraintTargets};
use mdx_core::model::{DistributionParams, ModelParams, Momentum};
use mdx_core::numerics::QuadratureSpec;
use mdx_core::relativity::{legendre_numeric, RelativisticParams};
use mdx_core::verify::run_verification;
use mdx_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdxStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    InvalidParams = 3,
    NonConvergence = 4,
    Divergence = 5,
    NoBracket = 6,
    InsufficientData = 7,
    Infeasible = 8,
    OverflowGuard = 9,
    UnknownCandidate = 10,
    RouteMismatch = 11,
    InvalidUtf8 = 12,
    Panic = 13,
}

impl From<&Error> for MdxStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => MdxStatus::Domain,
            Error::InvalidParams(_) => MdxStatus::InvalidParams,
            Error::NonConvergence { .. } => MdxStatus::NonConvergence,
            Error::DivergenceDetected(_) => MdxStatus::Divergence,
            Error::NoBracket { .. } => MdxStatus::NoBracket,
            Error::InsufficientData(_) => MdxStatus::InsufficientData,
            Error::Infeasible(_) => MdxStatus::Infeasible,
            Error::OverflowGuard { .. } => MdxStatus::OverflowGuard,
            Error::UnknownCandidate(_) => MdxStatus::UnknownCandidate,
            Error::RouteMismatch { .. } => MdxStatus::RouteMismatch,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: MdxStatus, message: impl Into<String>) -> MdxStatus {
    set_last_error(message.into());
    status
}

/// Runs `body`, turning errors and panics into status codes.
fn guarded<F>(body: F) -> MdxStatus
where
    F: FnOnce() -> Result<(), MdxError>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MdxStatus::Ok,
        Ok(Err(MdxError(status, message))) => fail(status, message),
        Err(_) => fail(MdxStatus::Panic, "panic inside mdx"),
    }
}

struct MdxError(MdxStatus, String);

impl From<Error> for MdxError {
    fn from(e: Error) -> Self {
        MdxError(MdxStatus::from(&e), e.to_string())
    }
}

fn null(name: &str) -> MdxError {
    MdxError(MdxStatus::NullPointer, format!("{name} is null"))
}

/// Writes `value` through `out`, which must be non-null.
unsafe fn store<T>(out: *mut T, name: &str, value: T) -> Result<(), MdxError> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Model parameters together with a fluctuation density. Opaque to C.
pub struct MdxModel {
    params: ModelParams,
    dist: DistributionParams,
}

/// Creates a model with mass `m` and velocity scale `lambda` and the
/// reference density. Returns null on invalid parameters.
#[no_mangle]
pub extern "C" fn mdx_model_new(m: f64, lambda: f64) -> *mut MdxModel {
    match ModelParams::new(m, lambda) {
        Ok(params) => Box::into_raw(Box::new(MdxModel {
            params,
            dist: DistributionParams::reference(),
        })),
        Err(e) => {
            set_last_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `model` must be null or a pointer from [`mdx_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mdx_model_free(model: *mut MdxModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Replaces the density. `c3 <= 0` selects the normalizing constant.
///
/// # Safety
/// `model` must be a live pointer from [`mdx_model_new`].
#[no_mangle]
pub unsafe extern "C" fn mdx_model_set_distribution(model: *mut MdxModel, nu: f64, gamma: f64, c3: f64) -> MdxStatus {
    guarded(|| {
        let model = model.as_mut().ok_or_else(|| null("model"))?;
        model.dist = if c3 > 0.0 {
            DistributionParams::new(nu, gamma, c3)?
        } else {
            DistributionParams::normalized(nu, gamma)?
        };
        Ok(())
    })
}

/// # Safety
/// `model` must be a live pointer from [`mdx_model_new`]; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_model_c(model: *const MdxModel, out: *mut f64) -> MdxStatus {
    guarded(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        store(out, "out", model.params.c())
    })
}

/// Averages that do not exist are NaN and `convergent` is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MdxAverage {
    pub p: f64,
    pub numeric_beta: f64,
    pub numeric_xi: f64,
    pub analytic_gamma: f64,
    pub sqrt_dispersion: f64,
    pub convergent: bool,
}

/// # Safety
/// `model` must be a live pointer from [`mdx_model_new`]; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_average(model: *const MdxModel, p: f64, out: *mut MdxAverage) -> MdxStatus {
    guarded(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let r = average_h(Momentum(p), &model.params, &model.dist, &QuadratureSpec::default())?;
        store(
            out,
            "out",
            MdxAverage {
                p: r.p,
                numeric_beta: r.numeric_beta.unwrap_or(f64::NAN),
                numeric_xi: r.numeric_xi.unwrap_or(f64::NAN),
                analytic_gamma: r.analytic_gamma.unwrap_or(f64::NAN),
                sqrt_dispersion: r.sqrt_dispersion,
                convergent: r.convergent,
            },
        )
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MdxMultipliers {
    pub nu: f64,
    pub gamma: f64,
    pub c3: f64,
    pub shape_k: f64,
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_solve_multipliers(c1: f64, c2: f64, out: *mut MdxMultipliers) -> MdxStatus {
    guarded(|| {
        let s = solve_multipliers(&ConstraintTargets::new(c1, c2)?)?;
        store(
            out,
            "out",
            MdxMultipliers {
                nu: s.nu,
                gamma: s.gamma,
                c3: s.c3,
                shape_k: s.shape_k,
            },
        )
    })
}

/// `g_ββ` and `g_ββ β²` at cutoff `cutoff`.
///
/// # Safety
/// `model` must be a live pointer from [`mdx_model_new`]; both outputs must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_fisher_metric(
    model: *const MdxModel,
    beta: f64,
    cutoff: f64,
    out_g: *mut f64,
    out_g_beta2: *mut f64,
) -> MdxStatus {
    guarded(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let fam = RegulatedFamily::new(model.params, beta, cutoff)?;
        let (g, gb2) = fisher_metric(&fam, &QuadratureSpec::default())?;
        store(out_g, "out_g", g)?;
        store(out_g_beta2, "out_g_beta2", gb2)
    })
}

/// Extrapolated `lim g β²` from the `n` cutoffs in `q_grid`.
///
/// # Safety
/// `model` must be a live pointer from [`mdx_model_new`]; `q_grid` must
/// point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_fisher_limit(
    model: *const MdxModel,
    beta: f64,
    q_grid: *const f64,
    n: size_t,
    out: *mut f64,
) -> MdxStatus {
    guarded(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if q_grid.is_null() {
            return Err(null("q_grid"));
        }
        let grid = std::slice::from_raw_parts(q_grid, n);
        let scan = fisher_scan(beta, &model.params, grid, &QuadratureSpec::default())?;
        store(out, "out", scan.limit_c)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_geodesic(beta0: f64, mu: f64, out: *mut f64) -> MdxStatus {
    guarded(|| store(out, "out", geodesic(beta0, mu)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_geodesic_distance(beta1: f64, beta2: f64, out: *mut f64) -> MdxStatus {
    guarded(|| store(out, "out", geodesic_distance(beta1, beta2)?))
}

/// Numerical `sup_p (vp − H(p))` with `c² = 2λ²`; the maximizing momentum
/// goes to `out_p` when it is non-null.
///
/// # Safety
/// `model` must be a live pointer from [`mdx_model_new`]; `out_value` must
/// be writable; `out_p` may be null.
#[no_mangle]
pub unsafe extern "C" fn mdx_legendre(
    model: *const MdxModel,
    v: f64,
    tol: f64,
    out_value: *mut f64,
    out_p: *mut f64,
) -> MdxStatus {
    guarded(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let r = legendre_numeric(v, &RelativisticParams::from(&model.params), tol)?;
        store(out_value, "out_value", r.value)?;
        if !out_p.is_null() {
            out_p.write(r.argmax_p);
        }
        Ok(())
    })
}

/// Runs the verification suite and returns the JSON report through
/// `out_json`; free it with [`mdx_string_free`]. `config_json` may be null
/// for the defaults. `out_failed` receives the number of failed checks.
///
/// # Safety
/// `config_json` must be null or a NUL-terminated string; the outputs must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_verify_json(
    config_json: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
    out_failed: *mut size_t,
) -> MdxStatus {
    guarded(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let config = if config_json.is_null() {
            RunConfig::default()
        } else {
            let text = CStr::from_ptr(config_json)
                .to_str()
                .map_err(|e| MdxError(MdxStatus::InvalidUtf8, e.to_string()))?;
            RunConfig::from_json(text)?
        };
        let report = run_verification(&config, seed);
        let json = CString::new(report.to_json()).map_err(|e| MdxError(MdxStatus::InvalidUtf8, e.to_string()))?;
        store(out_failed, "out_failed", report.summary.failed)?;
        out_json.write(json.into_raw());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mdx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mdx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn mdx_status_name(status: MdxStatus) -> *const c_char {
    let s: &'static CStr = match status {
        MdxStatus::Ok => c"ok",
        MdxStatus::NullPointer => c"null pointer",
        MdxStatus::Domain => c"domain error",
        MdxStatus::InvalidParams => c"invalid parameters",
        MdxStatus::NonConvergence => c"no convergence",
        MdxStatus::Divergence => c"divergent integral",
        MdxStatus::NoBracket => c"root not bracketed",
        MdxStatus::InsufficientData => c"insufficient data",
        MdxStatus::Infeasible => c"infeasible constraints",
        MdxStatus::OverflowGuard => c"overflow guard",
        MdxStatus::UnknownCandidate => c"unknown candidate",
        MdxStatus::RouteMismatch => c"route mismatch",
        MdxStatus::InvalidUtf8 => c"invalid utf-8",
        MdxStatus::Panic => c"panic",
    };
    s.as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_lifecycle() {
        let m = mdx_model_new(1.0, std::f64::consts::FRAC_1_SQRT_2);
        assert!(!m.is_null());
        let mut c = 0.0;
        unsafe {
            assert_eq!(mdx_model_c(m, &mut c), MdxStatus::Ok);
            assert!((c - 1.0).abs() < 1e-15);
            assert_eq!(mdx_model_set_distribution(m, 0.5, 1.0, 0.0), MdxStatus::InvalidParams);
            assert_eq!(mdx_model_set_distribution(m, 6.0, 2.0, 0.0), MdxStatus::Ok);
            mdx_model_free(m);
            mdx_model_free(ptr::null_mut());
        }
        assert!(mdx_model_new(-1.0, 1.0).is_null());
        assert!(!mdx_last_error_message().is_null());
    }

    #[test]
    fn null_outputs_are_reported() {
        unsafe {
            assert_eq!(mdx_geodesic(1.0, 0.0, ptr::null_mut()), MdxStatus::NullPointer);
            assert_eq!(mdx_average(ptr::null(), 0.0, ptr::null_mut()), MdxStatus::NullPointer);
        }
    }

    #[test]
    fn status_names_are_distinct() {
        let a = unsafe { CStr::from_ptr(mdx_status_name(MdxStatus::Ok)) };
        let b = unsafe { CStr::from_ptr(mdx_status_name(MdxStatus::Infeasible)) };
        assert_ne!(a, b);
    }
}
