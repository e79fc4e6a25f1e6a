//! Shared numerical machinery: quadrature, special functions, root finding,
//! 1-D maximization and limit extrapolation.

pub mod extrapolate;
pub mod optimize;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use extrapolate::{extrapolate_limit, LimitFit, LimitModel};
pub use optimize::maximize_1d;
pub use quadrature::{
    integrate, integrate_estimate, integrate_positive_axis, probe_toward, probe_upper_tail, Domain,
    Estimate, ProbeLimits, QuadratureSpec, TailProbe,
};
pub use roots::{find_root, RootSpec};
pub use special::{digamma_fn, digamma_minus_ln, gamma_fn, ln_gamma};
