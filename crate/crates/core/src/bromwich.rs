//! Spectral densities by contour inversion, and `E^γ_{α,β}(−w)` from its
//! Laplace-type integral representation.
//!
//! For `0 < α < 1` the auxiliary density `f` is the inverse Laplace transform
//! of `z^{αγ−β} e^{−z^α}` and the spectral density is
//! `g(y) = α/Γ(γ) · y^{−β} f(y)`. Substituting `u = y^{−α}` in the spectral
//! representation gives
//!
//! ```text
//! E^γ_{α,β}(−w) = ∫₀^∞ e^{−w y^{−α}} g(y) dy,
//! ```
//!
//! and differentiating under the integral,
//! `(−1)ⁿ dⁿ/dwⁿ E^γ_{α,β}(−w) = ∫₀^∞ e^{−w y^{−α}} y^{−nα} g(y) dy`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::closed_forms::OracleCase;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_vec, QuadratureConfig};
use crate::real::Real;
use crate::series::{eval_series_with, MLParams, SeriesOptions};
use crate::special::ln_gamma;
use crate::talbot::{talbot_invert_ln, Inversion, TalbotConfig};

/// Multiple of the image's saddle point `(α/y)^{1/(1−α)}` the contour scale
/// is never allowed to fall below.
pub const SADDLE_FACTOR: f64 = 4.0;

/// Default sampling density of [`geometric_grid`] curves.
pub const POINTS_PER_DECADE: usize = 200;
pub const DEFAULT_Y_RANGE: (f64, f64) = (1e-3, 50.0);

/// Log-decay below which the small-`y` end of the density is dropped.
const TRUNCATION_LOG: f64 = 50.0;

fn require_density_domain<T: Real>(p: &MLParams<T>) -> Result<()> {
    if p.alpha() >= T::one() {
        return Err(Error::domain(format!(
            "density route needs 0 < alpha < 1, got alpha = {}",
            p.alpha()
        )));
    }
    Ok(())
}

fn check_y<T: Real>(y: T) -> Result<()> {
    if !(y.is_finite() && y > T::zero()) {
        return Err(Error::domain(format!("y must be positive and finite, got {y}")));
    }
    Ok(())
}

/// Contour scale used for the density at `y`.
pub fn density_sigma<T: Real>(alpha: T, y: T, cfg: &TalbotConfig) -> T {
    let saddle = (alpha / y).powf((T::one() - alpha).recip());
    cfg.sigma(y).max(T::lit(SADDLE_FACTOR) * saddle)
}

/// Inversion of `z^{αγ−β} e^{−z^α}` at `y`, with diagnostics.
pub fn density_f_inversion<T: Real>(p: &MLParams<T>, y: T, cfg: &TalbotConfig) -> Result<Inversion<T>> {
    require_density_domain(p)?;
    check_y(y)?;
    let alpha = p.alpha();
    let q = p.p_exponent();
    let ln_image = |z: Complex<T>| {
        let ln_z = z.ln();
        // principal branch: z^α = exp(α Ln z)
        Ok(ln_z * q - (ln_z * alpha).exp())
    };
    talbot_invert_ln(ln_image, y, density_sigma(alpha, y, cfg), cfg)
}

/// Auxiliary density `f^γ_{α,β}(y)`.
pub fn density_f<T: Real>(p: &MLParams<T>, y: T, cfg: &TalbotConfig) -> Result<T> {
    density_f_inversion(p, y, cfg).map(|r| r.value)
}

/// `α/Γ(γ) · y^{−β}`, the factor turning `f` into `g`.
fn g_factor<T: Real>(p: &MLParams<T>, y: T) -> Result<T> {
    Ok((p.alpha().ln() - ln_gamma(p.gamma())? - p.beta() * y.ln()).exp())
}

/// Spectral density `g^γ_{α,β}(y) = α/Γ(γ) · y^{−β} f^γ_{α,β}(y)`.
pub fn density_g<T: Real>(p: &MLParams<T>, y: T, cfg: &TalbotConfig) -> Result<T> {
    let f = density_f(p, y, cfg)?;
    Ok(g_factor(p, y)? * f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMethod {
    Talbot,
    ClosedForm,
}

/// Sampled density `(y, f(y))` with the parameters it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve<T> {
    pub params: MLParams<T>,
    pub points: Vec<(T, T)>,
    pub method: CurveMethod,
}

impl<T: Real> DensityCurve<T> {
    /// Samples `f` on `ys`, which must be positive and strictly increasing.
    pub fn sample(p: &MLParams<T>, ys: &[T], method: CurveMethod, cfg: &TalbotConfig) -> Result<Self> {
        validate_grid(ys)?;
        let points = match method {
            CurveMethod::Talbot => ys
                .iter()
                .map(|&y| Ok((y, density_f(p, y, cfg)?)))
                .collect::<Result<Vec<_>>>()?,
            CurveMethod::ClosedForm => {
                let oracle = OracleCase::matching(p).ok_or_else(|| {
                    Error::domain(format!(
                        "no closed form for alpha={}, beta={}, gamma={}",
                        p.alpha(),
                        p.beta(),
                        p.gamma()
                    ))
                })?;
                ys.iter()
                    .map(|&y| Ok((y, oracle.eval(y)?)))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Self {
            params: *p,
            points,
            method,
        })
    }

    pub fn min(&self) -> Option<(T, T)> {
        self.points
            .iter()
            .copied()
            .fold(None, |acc: Option<(T, T)>, (y, f)| match acc {
                Some((_, m)) if m <= f => acc,
                _ => Some((y, f)),
            })
    }

    pub fn max_abs(&self) -> T {
        self.points.iter().fold(T::zero(), |m, &(_, f)| m.max(f.abs()))
    }
}

pub(crate) fn validate_grid<T: Real>(ys: &[T]) -> Result<()> {
    if ys.is_empty() {
        return Err(Error::domain("y grid is empty"));
    }
    if ys.iter().any(|&y| !(y.is_finite() && y > T::zero())) {
        return Err(Error::domain("y grid must be positive and finite"));
    }
    if ys.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("y grid must be strictly increasing"));
    }
    Ok(())
}

/// Geometric grid from `lo` to `hi` inclusive with `per_decade` points per
/// factor of ten.
pub fn geometric_grid<T: Real>(lo: T, hi: T, per_decade: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi > lo && hi.is_finite()) || per_decade == 0 {
        return Err(Error::domain("geometric grid needs 0 < lo < hi and per_decade > 0"));
    }
    let decades = (hi / lo).log10();
    let n = (decades * T::from_count(per_decade)).ceil().to_usize().unwrap_or(1).max(1);
    let step = decades / T::from_count(n);
    let ten = T::lit(10.0);
    let mut ys: Vec<T> = (0..n).map(|i| lo * ten.powf(step * T::from_count(i))).collect();
    ys.push(hi);
    Ok(ys)
}

/// Default density grid: `[1e-3, 50]` at 200 points per decade.
pub fn default_y_grid<T: Real>() -> Vec<T> {
    geometric_grid(T::lit(DEFAULT_Y_RANGE.0), T::lit(DEFAULT_Y_RANGE.1), POINTS_PER_DECADE)
        .expect("default grid parameters are valid")
}

/// Where the small-`y` part of the integrand has decayed by `e^{−50}`,
/// expressed as `s = −ln y`.
///
/// `f` falls off like `exp(−c y^{−α/(1−α)})` with `c = (1−α) α^{α/(1−α)}`,
/// while the moment weights grow at most polynomially.
fn truncation_s<T: Real>(p: &MLParams<T>, max_order: usize) -> T {
    let a = p.alpha();
    let kappa = a / (T::one() - a);
    let c = (T::one() - a) * a.powf(kappa);
    let growth = p.beta() + T::from_count(max_order) * a + p.p_exponent().abs() + T::lit(2.0);
    let target = T::lit(TRUNCATION_LOG);
    let step = T::lit(0.25);
    let mut s = T::one();
    while c * (kappa * s).exp() - growth * s < target {
        s = s + step;
    }
    s
}

/// Moments `∫₀^∞ e^{−w y^{−α}} y^{−nα} g(y) dy` for `n = 0..N`, which equal
/// `(−1)ⁿ dⁿ/dwⁿ E^γ_{α,β}(−w)`.
///
/// `(0, 1]` is integrated in `s = −ln y`; `[1, ∞)` in `u` with `y = u^{−k}`,
/// `k = 1/(αγ)`, which maps the `y^{−αγ−1}` tail of `g` to a bounded
/// integrand on `(0, 1]`. Split points given in `y` are mapped accordingly.
pub fn integral_rep_moments<T: Real, const N: usize>(
    p: &MLParams<T>,
    w: T,
    qcfg: &QuadratureConfig,
    tcfg: &TalbotConfig,
) -> Result<[T; N]> {
    require_density_domain(p)?;
    qcfg.validate()?;
    tcfg.validate()?;
    if !(w.is_finite() && w >= T::zero()) {
        return Err(Error::domain(format!("w must be finite and nonnegative, got {w}")));
    }
    let alpha = p.alpha();
    let ln_pref = alpha.ln() - ln_gamma(p.gamma())?;

    // integrand in y times the Jacobian factor `jac`
    let weighted = |y: T, jac_ln: T| -> Result<[T; N]> {
        let ln_y = y.ln();
        let base_ln = ln_pref - p.beta() * ln_y - w * (-alpha * ln_y).exp() + jac_ln;
        let mut out = [T::zero(); N];
        if base_ln < T::lit(-745.0) {
            return Ok(out);
        }
        let f = density_f(p, y, tcfg)?;
        for (n, o) in out.iter_mut().enumerate() {
            *o = f * (base_ln - T::from_count(n) * alpha * ln_y).exp();
        }
        Ok(out)
    };

    let s_max = truncation_s(p, N.saturating_sub(1));
    let lower_cfg = QuadratureConfig {
        split_points: qcfg
            .split_points
            .iter()
            .filter(|&&y| y < 1.0)
            .map(|&y| -y.ln())
            .collect(),
        ..qcfg.clone()
    };
    let lower = integrate_vec(
        |s: T| {
            let y = (-s).exp();
            weighted(y, -s)
        },
        T::zero(),
        s_max,
        &lower_cfg,
    )?;

    let k = (alpha * p.gamma()).recip();
    let upper_cfg = QuadratureConfig {
        split_points: qcfg
            .split_points
            .iter()
            .filter(|&&y| y > 1.0)
            .map(|&y| y.powf(-1.0 / k.as_f64()))
            .collect(),
        ..qcfg.clone()
    };
    let upper = integrate_vec(
        |u: T| {
            if u <= T::zero() {
                return Ok([T::zero(); N]);
            }
            let ln_u = u.ln();
            let y = (-k * ln_u).exp();
            if !y.is_finite() {
                return Ok([T::zero(); N]);
            }
            weighted(y, k.ln() - (k + T::one()) * ln_u)
        },
        T::zero(),
        T::one(),
        &upper_cfg,
    )?;

    let mut out = [T::zero(); N];
    for n in 0..N {
        out[n] = lower.value[n] + upper.value[n];
    }
    Ok(out)
}

/// `E^γ_{α,β}(−w)` from the integral representation (requires `0 < α < 1`).
pub fn eval_integral_rep<T: Real>(
    p: &MLParams<T>,
    w: T,
    qcfg: &QuadratureConfig,
    tcfg: &TalbotConfig,
) -> Result<T> {
    integral_rep_moments::<T, 1>(p, w, qcfg, tcfg).map(|m| m[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Series,
    Integral,
}

impl EvalMethod {
    pub fn name(self) -> &'static str {
        match self {
            EvalMethod::Series => "series",
            EvalMethod::Integral => "integral",
        }
    }
}

/// Configuration of [`eval_auto`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub series: SeriesOptions,
    pub quadrature: QuadratureConfig,
    pub talbot: TalbotConfig,
    /// The series result is kept when its error bound is below
    /// `max(series_abs_tol, series_rel_tol · |value|)`.
    pub series_abs_tol: f64,
    pub series_rel_tol: f64,
    /// The series is not attempted for `0 < α < 1` once `x^{1/α}` exceeds
    /// this; its largest term then grows roughly like `e^{x^{1/α}}`.
    pub series_max_growth: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            series: SeriesOptions::default(),
            quadrature: QuadratureConfig::default(),
            talbot: TalbotConfig::default(),
            series_abs_tol: 5e-14,
            series_rel_tol: 1e-13,
            series_max_growth: 40.0,
        }
    }
}

/// Value of `E^γ_{α,β}(−x)` with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AutoResult<T> {
    pub value: T,
    pub method: EvalMethod,
    /// Series terms summed, zero for the integral route.
    pub terms: usize,
    /// Contour nodes per density evaluation, zero for the series route.
    pub nodes: usize,
    /// Series cancellation ratio; one for the integral route.
    pub cancellation: T,
}

/// Evaluates `E^γ_{α,β}(−x)` by series where that is accurate, otherwise by
/// the integral representation.
///
/// For `α ≥ 1` only the series is available and its errors propagate.
pub fn eval_auto<T: Real>(p: &MLParams<T>, x: T, cfg: &EvalConfig) -> Result<AutoResult<T>> {
    let integral_ok = p.alpha() < T::one();
    let try_series = !integral_ok || x.powf(p.alpha().recip()).as_f64() <= cfg.series_max_growth;
    let mut series_err = None;
    if try_series {
        match eval_series_with(p, x, &cfg.series) {
            Ok(r) => {
                let accept = r.error_bound.as_f64() <= cfg.series_abs_tol.max(cfg.series_rel_tol * r.value.abs().as_f64());
                if accept || !integral_ok {
                    return Ok(AutoResult {
                        value: r.value,
                        method: EvalMethod::Series,
                        terms: r.terms_used,
                        nodes: 0,
                        cancellation: r.cancellation_ratio,
                    });
                }
            }
            Err(e) if e.is_domain() || !integral_ok => return Err(e),
            Err(e) => series_err = Some(e),
        }
    }
    let value = eval_integral_rep(p, x, &cfg.quadrature, &cfg.talbot).map_err(|e| series_err.unwrap_or(e))?;
    Ok(AutoResult {
        value,
        method: EvalMethod::Integral,
        terms: 0,
        nodes: cfg.talbot.nodes,
        cancellation: T::one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{example_b, levy_smirnov};

    fn params(a: f64, b: f64, g: f64) -> MLParams<f64> {
        MLParams::new(a, b, g).unwrap()
    }

    #[test]
    fn density_examples() {
        let cfg = TalbotConfig::default();
        let f = density_f(&params(0.5, 1.5, 2.0), 1.0, &cfg).unwrap();
        assert!((f - 0.439_391_289_467_722_4).abs() < 1e-9 * 0.44);
        let f = density_f(&params(0.5, 1.5, 4.0), 1.0, &cfg).unwrap();
        assert!((f + 0.109_847_822_366_930_6).abs() < 1e-9 * 0.11);
        let f = density_f(&params(0.5, 0.5, 1.0), 1.0, &cfg).unwrap();
        assert!((f - 0.219_695_644_733_861_2).abs() < 1e-9 * 0.22);
    }

    #[test]
    fn g_scaling() {
        let cfg = TalbotConfig::default();
        let g = density_g(&params(0.5, 1.5, 2.0), 1.0, &cfg).unwrap();
        assert!((g - 0.5 * example_b(1.0).unwrap()).abs() < 1e-9);
        let g = density_g(&params(0.5, 0.5, 1.0), 4.0, &cfg).unwrap();
        let want = 0.5 * 0.5 * levy_smirnov(4.0).unwrap();
        assert!((g - want).abs() < 1e-9 * want);
    }

    #[test]
    fn density_route_rejects_alpha_one() {
        let cfg = TalbotConfig::default();
        assert!(density_f(&params(1.0, 1.0, 1.0), 1.0, &cfg).unwrap_err().is_domain());
        assert!(density_f(&params(0.5, 1.0, 1.0), 0.0, &cfg).unwrap_err().is_domain());
    }

    #[test]
    fn grid_shape() {
        let ys: Vec<f64> = default_y_grid();
        assert_eq!(ys.len(), 941); // ceil(200 · log10(5e4)) + 1
        assert_eq!(ys[0], 1e-3);
        assert_eq!(*ys.last().unwrap(), 50.0);
        assert!(ys.windows(2).all(|w| w[1] > w[0]));
        assert!(validate_grid(&[1.0, 1.0]).is_err());
        assert!(validate_grid::<f64>(&[]).is_err());
    }

    #[test]
    fn curve_from_closed_form() {
        let p = params(0.5, 1.5, 4.0);
        let c = DensityCurve::sample(&p, &[0.25, 0.5, 1.0], CurveMethod::ClosedForm, &TalbotConfig::default()).unwrap();
        let (ymin, fmin) = c.min().unwrap();
        assert_eq!(ymin, 1.0);
        assert!(fmin < 0.0);
        let q = params(0.5, 1.0, 1.0);
        assert!(DensityCurve::sample(&q, &[1.0], CurveMethod::ClosedForm, &TalbotConfig::default()).is_err());
    }

    #[test]
    fn integral_rep_at_zero_is_normalization() {
        let v = eval_integral_rep(&params(0.5, 1.0, 1.0), 0.0, &QuadratureConfig::default(), &TalbotConfig::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn auto_switches_route() {
        let cfg = EvalConfig::default();
        let p = params(0.5, 1.0, 1.0);
        let small = eval_auto(&p, 0.5, &cfg).unwrap();
        assert_eq!(small.method, EvalMethod::Series);
        let large = eval_auto(&p, 10.0, &cfg).unwrap();
        assert_eq!(large.method, EvalMethod::Integral);
        // e^{x²} erfc(x) at x = 10, mpmath
        assert!((large.value - 0.056_140_992_743_822_586).abs() < 1e-12, "{large:?}");
        let e = eval_auto(&params(1.0, 1.0, 1.0), 2.0, &cfg).unwrap();
        assert_eq!(e.method, EvalMethod::Series);
    }
}
