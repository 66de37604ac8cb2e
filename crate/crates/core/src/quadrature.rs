//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature on finite intervals.
//!
//! Integrands may be vector valued (`[T; N]`), in which case every component
//! shares one subdivision and an interval is refined while any component is
//! above its tolerance. Semi-infinite ranges are handled by the callers
//! through variable substitutions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

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
    0.123_491_976_262_065_851_077_600_525_614_825,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 10-point Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and subdivision policy for adaptive quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Initial breakpoints; points outside the integration range are ignored.
    pub split_points: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_subdivisions: 400,
            split_points: Vec::new(),
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol)] {
            if !(1e-14..=1e-4).contains(&v) {
                return Err(Error::domain(format!(
                    "{name} must lie in [1e-14, 1e-4], got {v}"
                )));
            }
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be positive"));
        }
        if self.split_points.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::domain("split points must be positive and finite"));
        }
        Ok(())
    }
}

/// Integral estimate with its error bound and evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T, const N: usize> {
    pub value: [T; N],
    pub error: [T; N],
    pub evaluations: usize,
    pub subdivisions: usize,
}

struct Segment<T, const N: usize> {
    a: T,
    b: T,
    value: [T; N],
    error: [T; N],
    floor: [T; N],
    priority: f64,
}

impl<T, const N: usize> PartialEq for Segment<T, N> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<T, const N: usize> Eq for Segment<T, N> {}
impl<T, const N: usize> PartialOrd for Segment<T, N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T, const N: usize> Ord for Segment<T, N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

/// Single 21-point Kronrod rule with the QUADPACK error heuristic.
/// Returns the estimate, its error, and the roundoff floor `50 ε ∫|f|`.
fn kronrod21<T: Real, const N: usize, F>(f: &mut F, a: T, b: T) -> Result<([T; N], [T; N], [T; N])>
where
    F: FnMut(T) -> Result<[T; N]>,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center)?;
    let mut res_k = [T::zero(); N];
    let mut res_g = [T::zero(); N];
    let mut res_abs = [T::zero(); N];
    let mut fv1 = [[T::zero(); N]; 10];
    let mut fv2 = [[T::zero(); N]; 10];
    for i in 0..N {
        res_k[i] = fc[i] * T::lit(WGK[10]);
        res_abs[i] = res_k[i].abs();
    }
    for j in 0..10 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = f(center - x)?;
        let f2 = f(center + x)?;
        let wk = T::lit(WGK[j]);
        for i in 0..N {
            let s = f1[i] + f2[i];
            res_k[i] = res_k[i] + wk * s;
            res_abs[i] = res_abs[i] + wk * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                res_g[i] = res_g[i] + T::lit(WG[j / 2]) * s;
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }

    let mut value = [T::zero(); N];
    let mut error = [T::zero(); N];
    let mut floor = [T::zero(); N];
    let eps50 = T::lit(50.0) * T::epsilon();
    for i in 0..N {
        let mean = res_k[i] * half;
        let mut res_asc = T::lit(WGK[10]) * (fc[i] - mean).abs();
        for j in 0..10 {
            res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j][i] - mean).abs() + (fv2[j][i] - mean).abs());
        }
        res_asc = res_asc * abs_half;
        let rabs = res_abs[i] * abs_half;
        let mut err = ((res_k[i] - res_g[i]) * half_len).abs();
        if res_asc != T::zero() && err != T::zero() {
            let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
            err = if scale < T::one() { res_asc * scale } else { res_asc };
        }
        if rabs > T::min_positive_value() / eps50 {
            err = err.max(eps50 * rabs);
        }
        value[i] = res_k[i] * half_len;
        error[i] = err;
        floor[i] = eps50 * rabs;
    }
    Ok((value, error, floor))
}

fn segment<T: Real, const N: usize, F>(f: &mut F, a: T, b: T, cfg: &QuadratureConfig) -> Result<Segment<T, N>>
where
    F: FnMut(T) -> Result<[T; N]>,
{
    let (value, error, floor) = kronrod21(f, a, b)?;
    let abs_tol = T::lit(cfg.abs_tol);
    let mut priority = 0.0f64;
    for i in 0..N {
        if !value[i].is_finite() {
            return Err(Error::Quadrature {
                estimate: value[i].as_f64(),
                error: f64::INFINITY,
                subdivisions: 0,
            });
        }
        priority = priority.max((error[i] / abs_tol).as_f64());
    }
    Ok(Segment { a, b, value, error, floor, priority })
}

/// Integrates a vector-valued function over `[a, b]`.
///
/// Converged when, for every component, the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)` or has reached the roundoff floor
/// `50 ε ∫|f|`.
pub fn integrate_vec<T: Real, const N: usize, F>(
    mut f: F,
    a: T,
    b: T,
    cfg: &QuadratureConfig,
) -> Result<Integral<T, N>>
where
    F: FnMut(T) -> Result<[T; N]>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(Integral {
            value: [T::zero(); N],
            error: [T::zero(); N],
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut points = vec![lo];
    let mut splits: Vec<T> = cfg
        .split_points
        .iter()
        .map(|&p| T::lit(p))
        .filter(|&p| p > lo && p < hi)
        .collect();
    splits.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    points.extend(splits);
    points.push(hi);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        heap.push(segment(&mut f, w[0], w[1], cfg)?);
        evaluations += 21;
    }

    let abs_tol = T::lit(cfg.abs_tol);
    let rel_tol = T::lit(cfg.rel_tol);
    let mut subdivisions = 0usize;
    loop {
        let mut total = [T::zero(); N];
        let mut err = [T::zero(); N];
        let mut floor = [T::zero(); N];
        for s in heap.iter() {
            for i in 0..N {
                total[i] = total[i] + s.value[i];
                err[i] = err[i] + s.error[i];
                floor[i] = floor[i] + s.floor[i];
            }
        }
        // a component whose error is at the roundoff floor cannot improve further
        let converged = (0..N).all(|i| err[i] <= abs_tol.max(rel_tol * total[i].abs()).max(floor[i]));
        if converged || subdivisions >= cfg.max_subdivisions {
            if !converged {
                let worst = (0..N)
                    .max_by(|&x, &y| err[x].partial_cmp(&err[y]).unwrap_or(Ordering::Equal))
                    .unwrap_or(0);
                return Err(Error::Quadrature {
                    estimate: total[worst].as_f64(),
                    error: err[worst].as_f64(),
                    subdivisions,
                });
            }
            let sign = if a < b { T::one() } else { -T::one() };
            for v in total.iter_mut() {
                *v = *v * sign;
            }
            return Ok(Integral {
                value: total,
                error: err,
                evaluations,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution; keep it and give up refining
            return Err(Error::Quadrature {
                estimate: worst.value[0].as_f64(),
                error: worst.error[0].as_f64(),
                subdivisions,
            });
        }
        heap.push(segment(&mut f, worst.a, mid, cfg)?);
        heap.push(segment(&mut f, mid, worst.b, cfg)?);
        evaluations += 42;
        subdivisions += 1;
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<T: Real, F>(mut f: F, a: T, b: T, cfg: &QuadratureConfig) -> Result<(T, T)>
where
    F: FnMut(T) -> Result<T>,
{
    let r = integrate_vec(|x| Ok([f(x)?]), a, b, cfg)?;
    Ok((r.value[0], r.error[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_exact_for_polynomials() {
        let cfg = QuadratureConfig::default();
        // degree 30 polynomial: exact for K21 (degree 31)
        let (v, _) = integrate(|x: f64| Ok(x.powi(30)), 0.0, 1.0, &cfg).unwrap();
        assert!((v - 1.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let cfg = QuadratureConfig::default();
        let (v, _) = integrate(|x: f64| Ok(x.sqrt().recip()), 0.0, 1.0, &cfg).unwrap();
        assert!((v - 2.0).abs() < 1e-11, "{v}");
        let (v, _) = integrate(|x: f64| Ok(x.ln()), 0.0, 1.0, &cfg).unwrap();
        assert!((v + 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn reversed_limits_and_splits() {
        let cfg = QuadratureConfig {
            split_points: vec![0.3, 2.0],
            ..QuadratureConfig::default()
        };
        let (v, _) = integrate(|x: f64| Ok(x.exp()), 1.0, 0.0, &cfg).unwrap();
        assert!((v + (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn vector_components_share_subdivision() {
        let cfg = QuadratureConfig::default();
        let r = integrate_vec(|x: f64| Ok([x.sin(), x.cos(), 1.0]), 0.0, std::f64::consts::PI, &cfg).unwrap();
        assert!((r.value[0] - 2.0).abs() < 1e-14);
        assert!(r.value[1].abs() < 1e-14);
        assert!((r.value[2] - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let cfg = QuadratureConfig {
            max_subdivisions: 3,
            ..QuadratureConfig::default()
        };
        let err = integrate(|x: f64| Ok((1.0 / x).sin()), 1e-6, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(1e-15, 1e-10).is_err());
        assert!(QuadratureConfig::new(1e-12, 1e-3).is_err());
        assert!(QuadratureConfig::new(1e-12, 1e-10).is_ok());
    }
}
