//! Complete-monotonicity audits of `x ↦ E^γ_{α,β}(−x)`.
//!
//! Two numerical routes gather evidence: the sign of the spectral density on
//! a `y` grid (a nonnegative density is a Bernstein representation), and the
//! alternating signs of derivatives up to a fixed order on an `x` grid. A
//! third check compares the Laplace transform of `t^{β−1} E^γ_{α,β}(−x t^α)`
//! with its closed form. Numerics can only falsify on a grid, so the verdict
//! stays with the parameter criterion and the evidence annotates it.

use serde::{Deserialize, Serialize};

use crate::bromwich::{
    density_f, eval_auto, integral_rep_moments, validate_grid, EvalConfig, POINTS_PER_DECADE,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::real::Real;
use crate::series::{nth_derivative_series, MLParams, SeriesOptions};
use crate::talbot::TalbotConfig;

/// Highest derivative order the sign audit accepts.
pub const MAX_AUDIT_ORDER: usize = 8;
/// `f` counts as negative below `−DENSITY_TOL · max|f|`.
pub const DENSITY_TOL: f64 = 1e-9;
/// Signed derivatives count as negative below `−DERIVATIVE_TOL · (|E| + 1)`.
pub const DERIVATIVE_TOL: f64 = 1e-10;
/// Relative width to which violation endpoints are bisected.
pub const BISECTION_TOL: f64 = 1e-9;
/// Adjacent samples further apart than this fraction of the sampled range
/// mark the grid as too coarse.
pub const COARSE_JUMP: f64 = 0.5;

/// True iff `0 < α < 1`, `γ > 0` and `β ≥ αγ`.
pub fn check_criterion<T: Real>(p: &MLParams<T>) -> bool {
    p.cm_condition()
}

/// Interval on which the density is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolationLocus<T> {
    pub lower: T,
    pub upper: T,
    /// The negative run reaches the first grid point, so `lower` is only a bound.
    pub open_below: bool,
    /// The negative run reaches the last grid point, so `upper` is only a bound.
    pub open_above: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityAudit<T> {
    pub min_value: T,
    pub argmin: T,
    pub max_abs: T,
    pub violation_locus: Option<ViolationLocus<T>>,
    pub grid_too_coarse: bool,
    pub points: usize,
}

impl<T: Real> DensityAudit<T> {
    pub fn nonnegative(&self) -> bool {
        self.violation_locus.is_none()
    }
}

/// Bisects `[lo, hi]`, on whose ends `pred` differs, down to width
/// `rel_tol · hi`. Returns the final bracket.
pub fn bisect<T: Real, F>(mut pred: F, mut lo: T, mut hi: T, rel_tol: T) -> Result<(T, T)>
where
    F: FnMut(T) -> Result<bool>,
{
    let at_lo = pred(lo)?;
    if at_lo == pred(hi)? {
        return Err(Error::domain("bisection bracket does not straddle a change"));
    }
    let half = T::lit(0.5);
    for _ in 0..200 {
        if hi - lo <= rel_tol * hi.abs() {
            break;
        }
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Samples the density over `ys` and locates where it is negative.
///
/// The violation locus is the contiguous negative run containing the
/// minimum, with each interior endpoint bisected on the same threshold.
pub fn audit_density<T: Real>(p: &MLParams<T>, ys: &[T], cfg: &TalbotConfig) -> Result<DensityAudit<T>> {
    validate_grid(ys)?;
    let fs = ys
        .iter()
        .map(|&y| density_f(p, y, cfg))
        .collect::<Result<Vec<T>>>()?;

    let (imin, &min_value) = fs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("density values are finite"))
        .expect("grid is nonempty");
    let max_abs = fs.iter().fold(T::zero(), |m, f| m.max(f.abs()));
    let max_f = fs.iter().fold(T::neg_infinity(), |m, &f| m.max(f));
    let range = max_f - min_value;
    let grid_too_coarse =
        range > T::zero() && fs.windows(2).any(|w| (w[1] - w[0]).abs() > T::lit(COARSE_JUMP) * range);

    let threshold = -T::lit(DENSITY_TOL) * max_abs;
    let negative = |f: T| f < threshold;
    let violation_locus = if negative(min_value) {
        let mut lo = imin;
        while lo > 0 && negative(fs[lo - 1]) {
            lo -= 1;
        }
        let mut hi = imin;
        while hi + 1 < fs.len() && negative(fs[hi + 1]) {
            hi += 1;
        }
        let rel = T::lit(BISECTION_TOL);
        let pred = |y: T| density_f(p, y, cfg).map(negative);
        let lower = if lo == 0 {
            ys[0]
        } else {
            let (_, b) = bisect(pred, ys[lo - 1], ys[lo], rel)?;
            b
        };
        let upper = if hi + 1 == fs.len() {
            ys[hi]
        } else {
            let (a, _) = bisect(pred, ys[hi], ys[hi + 1], rel)?;
            a
        };
        Some(ViolationLocus {
            lower,
            upper,
            open_below: lo == 0,
            open_above: hi + 1 == fs.len(),
        })
    } else {
        None
    };

    Ok(DensityAudit {
        min_value,
        argmin: ys[imin],
        max_abs,
        violation_locus,
        grid_too_coarse,
        points: ys.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeRoute {
    Series,
    Integral,
}

/// First grid point and order at which a signed derivative came out negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignViolation<T> {
    pub x: T,
    pub order: usize,
    pub value: T,
    pub scale: T,
}

/// A grid point neither route could evaluate reliably.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint<T> {
    pub x: T,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeAudit<T> {
    /// All checked signed derivatives are above tolerance.
    pub sign_ok: bool,
    pub max_order: usize,
    pub checked_points: usize,
    pub series_points: usize,
    pub integral_points: usize,
    pub first_violation: Option<SignViolation<T>>,
    pub skipped: Vec<SkippedPoint<T>>,
}

/// Signed derivatives `(−1)ⁿ dⁿ/dxⁿ E(−x)` for `n = 0..=max_order` at one point.
///
/// The shifted series is used when every order is accurate to well below the
/// sign tolerance; otherwise, for `α < 1`, all orders come from one vector
/// quadrature of the integral representation.
pub fn signed_derivatives<T: Real>(
    p: &MLParams<T>,
    x: T,
    max_order: usize,
    cfg: &EvalConfig,
) -> Result<(Vec<T>, DerivativeRoute)> {
    if max_order > MAX_AUDIT_ORDER {
        return Err(Error::domain(format!(
            "derivative order {max_order} exceeds {MAX_AUDIT_ORDER}"
        )));
    }
    let opts = SeriesOptions {
        max_ratio: cfg.series.max_ratio,
        ..cfg.series
    };
    let growth_ok = p.alpha() >= T::one() || x.powf(p.alpha().recip()).as_f64() <= cfg.series_max_growth;
    let mut series_err = None;
    if growth_ok {
        let mut vals = Vec::with_capacity(max_order + 1);
        for n in 0..=max_order {
            match nth_derivative_series(p, x, n, &opts) {
                Ok(r) => {
                    let limit = T::lit(0.01 * DERIVATIVE_TOL) * (r.value.abs() + T::one());
                    if r.error_bound > limit {
                        series_err = Some(Error::PrecisionLoss {
                            ratio: r.cancellation_ratio.as_f64(),
                            limit: opts.max_ratio,
                        });
                        break;
                    }
                    vals.push(r.value);
                }
                Err(e) if e.is_domain() => return Err(e),
                Err(e) => {
                    series_err = Some(e);
                    break;
                }
            }
        }
        if vals.len() == max_order + 1 {
            return Ok((vals, DerivativeRoute::Series));
        }
    }
    if p.alpha() < T::one() {
        let quad = audit_quadrature(&cfg.quadrature);
        let m = integral_rep_moments::<T, { MAX_AUDIT_ORDER + 1 }>(p, x, &quad, &cfg.talbot)?;
        return Ok((m[..=max_order].to_vec(), DerivativeRoute::Integral));
    }
    Err(series_err.unwrap_or(Error::PrecisionLoss {
        ratio: f64::INFINITY,
        limit: opts.max_ratio,
    }))
}

/// Sign decisions need far less than full accuracy.
fn audit_quadrature(q: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: q.abs_tol.max(1e-13),
        rel_tol: q.rel_tol.max(1e-10),
        ..q.clone()
    }
}

/// Checks `(−1)ⁿ dⁿ/dxⁿ E(−x) ≥ −1e-10 · (|E(−x)| + 1)` on `xs` for `n ≤ max_order`.
///
/// Points neither route can evaluate are skipped and listed rather than
/// failing the audit.
pub fn audit_derivatives<T: Real>(
    p: &MLParams<T>,
    xs: &[T],
    max_order: usize,
    cfg: &EvalConfig,
) -> Result<DerivativeAudit<T>> {
    if max_order > MAX_AUDIT_ORDER {
        return Err(Error::domain(format!(
            "derivative order {max_order} exceeds {MAX_AUDIT_ORDER}"
        )));
    }
    if xs.iter().any(|&x| !(x.is_finite() && x >= T::zero())) {
        return Err(Error::domain("x grid must be finite and nonnegative"));
    }
    let mut audit = DerivativeAudit {
        sign_ok: true,
        max_order,
        checked_points: 0,
        series_points: 0,
        integral_points: 0,
        first_violation: None,
        skipped: Vec::new(),
    };
    let tol = T::lit(DERIVATIVE_TOL);
    for &x in xs {
        let (vals, route) = match signed_derivatives(p, x, max_order, cfg) {
            Ok(v) => v,
            Err(e) if e.is_domain() => return Err(e),
            Err(e) => {
                audit.skipped.push(SkippedPoint { x, reason: e.to_string() });
                continue;
            }
        };
        audit.checked_points += 1;
        match route {
            DerivativeRoute::Series => audit.series_points += 1,
            DerivativeRoute::Integral => audit.integral_points += 1,
        }
        let scale = vals[0].abs() + T::one();
        if let Some((order, &value)) = vals.iter().enumerate().find(|(_, &v)| v < -tol * scale) {
            audit.sign_ok = false;
            if audit.first_violation.is_none() {
                audit.first_violation = Some(SignViolation { x, order, value, scale });
            }
        }
    }
    Ok(audit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
}

/// Compares `∫₀^∞ t^{β−1} E^γ_{α,β}(−x t^α) e^{−st} dt` with
/// `s^{αγ−β} / (x + s^α)^γ`, returning the relative residual.
///
/// Requires `s > x^{1/α}`. There the terms of the series, integrated one by
/// one, still converge, and the `e^{−st}` weight dominates the growth of the
/// series' largest terms, so the series may be used well past its usual
/// cancellation limit.
pub fn verify_laplace_identity<T: Real>(
    p: &MLParams<T>,
    x: T,
    s: T,
    cfg: &EvalConfig,
) -> Result<LaplaceCheck<T>> {
    if !(x.is_finite() && x > T::zero() && s.is_finite() && s > T::zero()) {
        return Err(Error::domain("x and s must be positive and finite"));
    }
    let edge = x.powf(p.alpha().recip());
    if s <= edge {
        return Err(Error::domain(format!(
            "s = {s} lies outside the validity region s > x^(1/alpha) = {edge}"
        )));
    }
    let (a, b) = (p.alpha(), p.beta());
    let relaxed = EvalConfig {
        series: SeriesOptions {
            max_ratio: f64::INFINITY,
            ..cfg.series
        },
        ..cfg.clone()
    };
    let e_at = |t: T| -> Result<T> {
        let w = x * t.powf(a);
        if a >= T::one() {
            // the series is the only route; its absolute error is damped by e^{−st}
            return crate::series::eval_series_with(p, w, &relaxed.series).map(|r| r.value);
        }
        eval_auto(p, w, cfg).map(|r| r.value)
    };

    // past t_max the integrand is below e^{-60} of its scale
    let mut t_max = T::one();
    while s * t_max - (b - T::one()).abs() * t_max.ln() < T::lit(60.0) {
        t_max = t_max + t_max;
    }
    let quad = &cfg.quadrature;
    let head = if b < T::one() {
        // t = τ^{1/β} absorbs t^{β−1}
        let inv_b = b.recip();
        integrate(
            |tau: T| {
                if tau <= T::zero() {
                    return Ok(e_at(T::zero())? * inv_b);
                }
                let t = tau.powf(inv_b);
                Ok(inv_b * e_at(t)? * (-s * t).exp())
            },
            T::zero(),
            T::one(),
            quad,
        )?
        .0
    } else {
        integrate(
            |t: T| Ok(t.powf(b - T::one()) * e_at(t)? * (-s * t).exp()),
            T::zero(),
            T::one(),
            quad,
        )?
        .0
    };
    let tail = integrate(
        |t: T| Ok(t.powf(b - T::one()) * e_at(t)? * (-s * t).exp()),
        T::one(),
        t_max,
        quad,
    )?
    .0;
    let lhs = head + tail;
    let rhs = s.powf(a * p.gamma() - b) / (x + s.powf(a)).powf(p.gamma());
    Ok(LaplaceCheck {
        lhs,
        rhs,
        residual: ((lhs - rhs) / rhs).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annotation {
    /// Criterion true and not refuted, or criterion false and refuted.
    Consistent,
    /// Criterion true but the evidence finds a violation.
    Inconsistent,
    /// Criterion false yet no violation was found.
    Unconfirmed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub completely_monotone: bool,
    pub annotation: Annotation,
}

/// Grids and configurations for [`full_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub y_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub max_order: usize,
    pub eval: EvalConfig,
    /// `(x, s)` for the Laplace-identity check, if wanted.
    pub laplace: Option<(f64, f64)>,
}

/// Range of the default density sweep.
///
/// Wider than the curve default: for `β` just below `αγ` the density can
/// turn negative only in its algebraic tail, e.g. near `y ≈ 300` for
/// `(α, β, γ) = (0.2, 0.3, 1.75)`.
pub const AUDIT_Y_RANGE: (f64, f64) = (1e-3, 1e4);

/// Default `x` grid: 48 geometric points on `[1e-3, 50]`.
pub fn default_x_grid() -> Vec<f64> {
    let n = 48;
    let (lo, hi): (f64, f64) = (1e-3, 50.0);
    let step = (hi / lo).ln() / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
    xs[n - 1] = hi;
    xs
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            y_grid: crate::bromwich::geometric_grid(AUDIT_Y_RANGE.0, AUDIT_Y_RANGE.1, POINTS_PER_DECADE)
                .expect("valid default grid"),
            x_grid: default_x_grid(),
            max_order: MAX_AUDIT_ORDER,
            eval: EvalConfig::default(),
            laplace: None,
        }
    }
}

/// Aggregated evidence for one parameter triple. Fields that could not be
/// computed are `None`, with the reason in `errors`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CMReport<T> {
    pub params: MLParams<T>,
    pub criterion_satisfied: bool,
    pub density: Option<DensityAudit<T>>,
    pub derivatives: Option<DerivativeAudit<T>>,
    pub laplace_residual: Option<T>,
    /// Density nonnegative ⟺ derivative signs pass; `None` unless both ran.
    pub routes_agree: Option<bool>,
    pub verdict: Verdict,
    pub errors: Vec<(String, String)>,
}

impl<T: Real> CMReport<T> {
    /// Some completed route found a violation.
    pub fn refuted(&self) -> bool {
        self.density.as_ref().is_some_and(|d| !d.nonnegative())
            || self.derivatives.as_ref().is_some_and(|d| !d.sign_ok)
    }
}

/// Runs every audit that applies to `p`.
///
/// The density route needs `0 < α < 1` and is recorded as an error
/// otherwise; the derivative route runs for all `α`.
pub fn full_report<T: Real>(p: &MLParams<T>, cfg: &AuditConfig) -> CMReport<T> {
    let mut errors = Vec::new();
    let criterion = check_criterion(p);

    let ys: Vec<T> = cfg.y_grid.iter().map(|&y| T::lit(y)).collect();
    let density = match audit_density(p, &ys, &cfg.eval.talbot) {
        Ok(d) => Some(d),
        Err(e) => {
            errors.push(("density".to_string(), e.to_string()));
            None
        }
    };
    let xs: Vec<T> = cfg.x_grid.iter().map(|&x| T::lit(x)).collect();
    let derivatives = match audit_derivatives(p, &xs, cfg.max_order, &cfg.eval) {
        Ok(d) => Some(d),
        Err(e) => {
            errors.push(("derivatives".to_string(), e.to_string()));
            None
        }
    };
    let laplace_residual = cfg.laplace.and_then(|(x, s)| {
        match verify_laplace_identity(p, T::lit(x), T::lit(s), &cfg.eval) {
            Ok(c) => Some(c.residual),
            Err(e) => {
                errors.push(("laplace".to_string(), e.to_string()));
                None
            }
        }
    });
    let routes_agree = match (&density, &derivatives) {
        (Some(d), Some(v)) => Some(d.nonnegative() == v.sign_ok),
        _ => None,
    };
    let mut report = CMReport {
        params: *p,
        criterion_satisfied: criterion,
        density,
        derivatives,
        laplace_residual,
        routes_agree,
        verdict: Verdict {
            completely_monotone: criterion,
            annotation: Annotation::Consistent,
        },
        errors,
    };
    let refuted = report.refuted();
    report.verdict.annotation = match (criterion, refuted) {
        (true, false) | (false, true) => Annotation::Consistent,
        (true, true) => Annotation::Inconsistent,
        (false, false) => Annotation::Unconfirmed,
    };
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, g: f64) -> MLParams<f64> {
        MLParams::new(a, b, g).unwrap()
    }

    #[test]
    fn criterion_examples() {
        assert!(check_criterion(&params(0.5, 5.0 / 3.0, 4.0 / 3.0)));
        assert!(!check_criterion(&params(0.5, 1.0 / 3.0, 4.0 / 3.0)));
        assert!(check_criterion(&params(0.5, 1.0, 2.0)));
        assert!(!check_criterion(&params(1.0, 1.0, 1.0)));
    }

    #[test]
    fn bisect_finds_root() {
        let (lo, hi) = bisect(|y: f64| Ok(y * y > 2.0), 1.0, 2.0, 1e-12).unwrap();
        assert!(lo <= 2f64.sqrt() && 2f64.sqrt() <= hi && hi - lo < 1e-11);
        assert!(bisect(|y: f64| Ok(y > 5.0), 1.0, 2.0, 1e-6).is_err());
    }

    #[test]
    fn exponential_derivatives_alternate() {
        let xs = [0.0, 0.5, 2.0, 10.0];
        let a = audit_derivatives(&params(1.0, 1.0, 1.0), &xs, 8, &EvalConfig::default()).unwrap();
        assert!(a.sign_ok);
        assert!(a.checked_points + a.skipped.len() == xs.len());
        assert!(audit_derivatives(&params(1.0, 1.0, 1.0), &xs, 9, &EvalConfig::default()).is_err());
    }

    #[test]
    fn laplace_gate() {
        let cfg = EvalConfig::default();
        let err = verify_laplace_identity(&params(0.5, 1.5, 2.0), 4.0, 1.0, &cfg).unwrap_err();
        assert!(err.is_domain());
        let c = verify_laplace_identity(&params(1.0, 1.0, 1.0), 1.0, 2.0, &cfg).unwrap();
        assert!(c.residual < 1e-10, "{c:?}");
    }

    #[test]
    fn default_grids() {
        let xs = default_x_grid();
        assert_eq!(xs.len(), 48);
        assert_eq!(xs[0], 1e-3);
        assert_eq!(xs[47], 50.0);
    }
}
