//! The three-parameter (Prabhakar) Mittag-Leffler function on the negative
//! real axis,
//!
//! ```text
//! E^γ_{α,β}(−x) = Σ_{r≥0} (γ)_r (−x)^r / (r! Γ(αr + β)),
//! ```
//!
//! its spectral density, and numerical complete-monotonicity audits.
//!
//! * [`series`]: direct summation and derivatives by parameter shift.
//! * [`bromwich`]: contour inversion for the densities `f` and `g`, the
//!   integral representation, and [`bromwich::eval_auto`] which picks a route.
//! * [`closed_forms`]: explicit densities used as oracles.
//! * [`audit`]: density sweeps, derivative signs, and the Laplace-pair check.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.
//!
//! ```
//! use prabhakar::{eval_auto, EvalConfig, Params};
//!
//! let p = Params::new(0.5, 1.0, 1.0).unwrap();
//! let e = eval_auto(&p, 1.0, &EvalConfig::default()).unwrap();
//! assert!((e.value - 0.427_583_576_155_807).abs() < 1e-13);
//! ```

pub mod audit;
pub mod bromwich;
pub mod closed_forms;
pub mod error;
pub mod quadrature;
pub mod real;
pub mod series;
pub mod special;
pub mod talbot;

pub use audit::{
    audit_density, audit_derivatives, check_criterion, full_report, verify_laplace_identity, Annotation,
    AuditConfig,
};
pub use bromwich::{
    density_f, density_g, eval_auto, eval_integral_rep, CurveMethod, EvalConfig, EvalMethod,
};
pub use closed_forms::{ExpectedSign, FormulaId};
pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
pub use real::Real;
pub use series::{eval_series, nth_derivative_signed, reduce_classic, reduce_wiman, SeriesOptions};
pub use talbot::TalbotConfig;

pub type Params = series::MLParams<f64>;
pub type SeriesResult = series::SeriesResult<f64>;
pub type DensityCurve = bromwich::DensityCurve<f64>;
pub type AutoResult = bromwich::AutoResult<f64>;
pub type OracleCase = closed_forms::OracleCase<f64>;
pub type CMReport = audit::CMReport<f64>;
pub type DensityAudit = audit::DensityAudit<f64>;
pub type DerivativeAudit = audit::DerivativeAudit<f64>;
pub type LaplaceCheck = audit::LaplaceCheck<f64>;
