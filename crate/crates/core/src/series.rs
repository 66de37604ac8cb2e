//! Power-series evaluation of `E^γ_{α,β}(−x)` and its derivatives.
//!
//! Terms are built in log space: `ln|t_r| = ln (γ)_r − ln r! + r ln x − ln Γ(αr + β)`.
//! The Pochhammer/factorial ratio is accumulated incrementally while
//! `ln Γ(αr + β)` is evaluated directly for each term, so no rounding drift
//! builds up in the part that dominates for large `r`. Partial sums use
//! Neumaier's compensated summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::{gamma, ln_gamma, GAMMA_MAX_ARG};

/// Parameter triple `(α, β, γ)` of the three-parameter Mittag-Leffler function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams<T>", bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct MLParams<T> {
    alpha: T,
    beta: T,
    gamma: T,
}

#[derive(Deserialize)]
struct RawParams<T> {
    alpha: T,
    beta: T,
    gamma: T,
}

impl<T: Real> TryFrom<RawParams<T>> for MLParams<T> {
    type Error = Error;
    fn try_from(r: RawParams<T>) -> Result<Self> {
        MLParams::new(r.alpha, r.beta, r.gamma)
    }
}

impl<T: Real> MLParams<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// `0 < α < 1` and `β ≥ αγ`.
    ///
    /// The product is compared through a fused multiply-add, so the sign of
    /// `β − αγ` is that of the exactly rounded difference.
    pub fn cm_condition(&self) -> bool {
        self.alpha < T::one() && self.alpha.mul_add(-self.gamma, self.beta) >= T::zero()
    }

    /// Exponent `αγ − β` of the power factor in the Laplace image of the density.
    pub fn p_exponent(&self) -> T {
        self.alpha.mul_add(self.gamma, -self.beta)
    }

    /// Parameters `(α, β + nα, γ + n)` of the n-th derivative series.
    pub fn shifted(&self, n: usize) -> Self {
        let n = T::from_count(n);
        Self {
            alpha: self.alpha,
            beta: n.mul_add(self.alpha, self.beta),
            gamma: self.gamma + n,
        }
    }
}

/// Outcome of a series summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult<T> {
    pub value: T,
    pub terms_used: usize,
    /// `max |partial sum| / |value|`; at least one.
    pub cancellation_ratio: T,
    /// Rounding plus truncation estimate for `value`, absolute.
    pub error_bound: T,
}

/// Tuning knobs for [`eval_series_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    pub tol: f64,
    pub max_terms: usize,
    /// Precision-loss threshold on the cancellation ratio.
    pub max_ratio: f64,
}

pub const DEFAULT_TOL: f64 = 1e-15;
pub const MAX_TERMS: usize = 100_000;
pub const MAX_CANCELLATION: f64 = 1e12;
pub const MAX_DERIVATIVE_ORDER: usize = 12;

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_terms: MAX_TERMS,
            max_ratio: MAX_CANCELLATION,
        }
    }
}

fn validate_x<T: Real>(x: T) -> Result<()> {
    if !(x.is_finite() && x >= T::zero()) {
        return Err(Error::domain(format!("x must be finite and nonnegative, got {x}")));
    }
    Ok(())
}

fn recip_gamma<T: Real>(b: T) -> Result<T> {
    if b < T::lit(GAMMA_MAX_ARG) {
        Ok(gamma(b)?.recip())
    } else {
        Ok((-ln_gamma(b)?).exp())
    }
}

/// Sums the defining series at `−x` with tolerance `tol`.
pub fn eval_series<T: Real>(p: &MLParams<T>, x: T, tol: f64) -> Result<SeriesResult<T>> {
    eval_series_with(
        p,
        x,
        &SeriesOptions {
            tol,
            ..SeriesOptions::default()
        },
    )
}

/// [`eval_series`] with every limit configurable.
///
/// Summation stops once `|t_r| < tol·|S_r|` and the next term is smaller
/// still. Overflow of a term is reported as precision loss with an infinite
/// ratio, since the true sum is then swamped regardless.
pub fn eval_series_with<T: Real>(p: &MLParams<T>, x: T, opts: &SeriesOptions) -> Result<SeriesResult<T>> {
    validate_x(x)?;
    if !(1e-15..=1e-3).contains(&opts.tol) {
        return Err(Error::domain(format!("tol must lie in [1e-15, 1e-3], got {}", opts.tol)));
    }
    let eps = T::epsilon();
    let t0 = recip_gamma(p.beta)?;
    if x == T::zero() {
        return Ok(SeriesResult {
            value: t0,
            terms_used: 1,
            cancellation_ratio: T::one(),
            error_bound: eps * t0.abs(),
        });
    }

    let tol = T::lit(opts.tol);
    let ln_x = x.ln();
    let ln_max = T::max_value().ln();

    let mut sum = t0;
    let mut comp = T::zero();
    let mut max_partial = t0.abs();
    let mut rounding = eps * t0.abs();
    let mut ln_ratio = T::zero(); // ln((γ)_r / r!)
    let mut prev_abs = t0.abs();
    let mut small_prev = false;

    for r in 1..opts.max_terms {
        let rf = T::from_count(r);
        ln_ratio = ln_ratio + ((p.gamma + rf - T::one()) / rf).ln();
        let lg = ln_gamma(p.alpha.mul_add(rf, p.beta))?;
        let ln_t = ln_ratio + rf * ln_x - lg;
        if ln_t > ln_max {
            return Err(Error::PrecisionLoss {
                ratio: f64::INFINITY,
                limit: opts.max_ratio,
            });
        }
        let mag = ln_t.exp();
        let term = if r % 2 == 1 { -mag } else { mag };

        // Neumaier step
        let s = sum + term;
        comp = comp + if sum.abs() >= term.abs() { (sum - s) + term } else { (term - s) + sum };
        sum = s;

        let partial = (sum + comp).abs();
        if partial > max_partial {
            max_partial = partial;
        }
        let log_scale = ln_ratio.abs() + (rf * ln_x).abs() + lg.abs() + T::lit(2.0);
        rounding = rounding + eps * mag * log_scale;

        let total = (sum + comp).abs();
        // previous term was already below tolerance and this one is smaller
        if small_prev && (mag < prev_abs || mag == T::zero()) {
            return finish(sum + comp, r + 1, max_partial, rounding + mag, opts);
        }
        small_prev = mag < tol * total;
        prev_abs = mag;
    }
    Err(Error::NonConvergence { terms: opts.max_terms })
}

fn finish<T: Real>(
    value: T,
    terms_used: usize,
    max_partial: T,
    error_bound: T,
    opts: &SeriesOptions,
) -> Result<SeriesResult<T>> {
    let ratio = if value == T::zero() {
        T::infinity()
    } else {
        (max_partial / value.abs()).max(T::one())
    };
    if !(ratio.as_f64() <= opts.max_ratio) {
        return Err(Error::PrecisionLoss {
            ratio: ratio.as_f64(),
            limit: opts.max_ratio,
        });
    }
    Ok(SeriesResult {
        value,
        terms_used,
        cancellation_ratio: ratio,
        error_bound: error_bound + T::epsilon() * value.abs(),
    })
}

/// Rising factorial `(a)_n` by direct product.
pub fn pochhammer<T: Real>(a: T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, i| acc * (a + T::from_count(i)))
}

/// `(−1)ⁿ dⁿ/dxⁿ E^γ_{α,β}(−x)` with its diagnostics.
///
/// Uses `dⁿ/dzⁿ E^γ_{α,β}(z) = (γ)_n E^{γ+n}_{α,β+nα}(z)`, obtained by
/// differentiating the series term by term and reindexing.
pub fn nth_derivative_series<T: Real>(
    p: &MLParams<T>,
    x: T,
    n: usize,
    opts: &SeriesOptions,
) -> Result<SeriesResult<T>> {
    if n > MAX_DERIVATIVE_ORDER {
        return Err(Error::domain(format!(
            "derivative order {n} exceeds {MAX_DERIVATIVE_ORDER}"
        )));
    }
    let scale = pochhammer(p.gamma, n);
    let r = eval_series_with(&p.shifted(n), x, opts)?;
    Ok(SeriesResult {
        value: scale * r.value,
        error_bound: scale * r.error_bound,
        ..r
    })
}

/// `(−1)ⁿ dⁿ/dxⁿ E^γ_{α,β}(−x)` for `n ≤ 12`.
///
/// Fails with [`Error::PrecisionLoss`] when the error bound exceeds the
/// value itself, i.e. when no digit of the result can be trusted.
pub fn nth_derivative_signed<T: Real>(p: &MLParams<T>, x: T, n: usize) -> Result<T> {
    let r = nth_derivative_series(p, x, n, &SeriesOptions::default())?;
    if !(r.error_bound < r.value.abs()) {
        return Err(Error::PrecisionLoss {
            ratio: r.cancellation_ratio.as_f64(),
            limit: MAX_CANCELLATION,
        });
    }
    Ok(r.value)
}

/// Two-parameter (Wiman) function `E_{α,β}(−x)`.
pub fn reduce_wiman<T: Real>(alpha: T, beta: T, x: T) -> Result<T> {
    let p = MLParams::new(alpha, beta, T::one())?;
    eval_series(&p, x, DEFAULT_TOL).map(|r| r.value)
}

/// Classic Mittag-Leffler function `E_α(−x)`.
pub fn reduce_classic<T: Real>(alpha: T, x: T) -> Result<T> {
    reduce_wiman(alpha, T::one(), x)
}
