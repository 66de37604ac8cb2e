use prabhakar::bromwich::{
    density_f, density_f_inversion, density_g, eval_integral_rep, geometric_grid, integral_rep_moments,
};
use prabhakar::closed_forms::{levy_smirnov, FormulaId, OracleCase};
use prabhakar::quadrature::{integrate, QuadratureConfig};
use prabhakar::series::{eval_series, MLParams};
use prabhakar::talbot::TalbotConfig;
use prabhakar_reference::prabhakar_mp;
use proptest::prelude::*;

fn params(a: f64, b: f64, g: f64) -> MLParams<f64> {
    MLParams::new(a, b, g).unwrap()
}

fn tcfg() -> TalbotConfig {
    TalbotConfig::default()
}

#[test]
fn every_oracle_matches_inversion() {
    let ys = geometric_grid(0.05, 20.0, 80).unwrap();
    for case in OracleCase::<f64>::all() {
        for &y in &ys {
            let inv = density_f_inversion(&case.params, y, &tcfg()).unwrap();
            let want = case.eval(y).unwrap();
            assert!(
                (inv.value - want).abs() <= 1e-8 * want.abs() + 1e-12,
                "{:?} y={y}: {} vs {want}",
                case.formula_id,
                inv.value
            );
            assert!(inv.imag_residue < 1e-8, "{:?} y={y}: residue {:e}", case.formula_id, inv.imag_residue);
        }
    }
}

/// The closed forms need `y > 0` only; this pins their behaviour at the
/// small-`y` end of the audit grid, where the inversion is hardest.
#[test]
fn small_y_agreement_in_absolute_terms() {
    for case in OracleCase::<f64>::all() {
        let ys = geometric_grid(1e-3, 0.05, 40).unwrap();
        let scale = (0..50).map(|i| case.eval(0.05 * 1.1f64.powi(i)).unwrap().abs()).fold(0.0, f64::max);
        for &y in &ys {
            let f = density_f(&case.params, y, &tcfg()).unwrap();
            let want = case.eval(y).unwrap();
            assert!((f - want).abs() <= 1e-11 * scale, "{:?} y={y}: {f} vs {want}", case.formula_id);
        }
    }
}

#[test]
fn levy_constant_is_one_for_every_gamma() {
    let ys = geometric_grid(0.05, 20.0, 20).unwrap();
    for g in [0.5, 1.0, 4.0 / 3.0, 2.0, 3.0] {
        let p = params(0.5, g / 2.0, g);
        let ratios: Vec<f64> = ys
            .iter()
            .map(|&y| density_f(&p, y, &tcfg()).unwrap() / levy_smirnov(y).unwrap())
            .collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((mean - 1.0).abs() < 1e-8, "gamma={g}: constant {mean}");
        assert!(ratios.iter().all(|r| (r - mean).abs() < 1e-8));
    }
}

#[test]
fn example_c1_tail_exponent() {
    // f ~ y^{−p−1}/Γ(−p) with p = αγ − β = −1/3, i.e. slope −2/3 in log-log
    let p = params(1.0 / 3.0, 2.0, 5.0);
    let (y1, y2) = (1e5, 1e6);
    let slope_talbot = (density_f(&p, y2, &tcfg()).unwrap() / density_f(&p, y1, &tcfg()).unwrap()).ln() / 10f64.ln();
    let slope_formula = (FormulaId::ExampleC1.eval(y2).unwrap() / FormulaId::ExampleC1.eval(y1).unwrap()).ln() / 10f64.ln();
    assert!((slope_talbot + 2.0 / 3.0).abs() < 1e-3, "{slope_talbot}");
    assert!((slope_talbot - slope_formula).abs() < 1e-8);
}

/// `∫₀^∞ e^{−zy} f(y) dy = z^{αγ−β} e^{−z^α}` for each closed form.
#[test]
fn closed_forms_have_the_right_laplace_transform() {
    let q = QuadratureConfig::new(1e-14, 1e-11).unwrap();
    for case in OracleCase::<f64>::all() {
        let p = case.params;
        for z in [0.5, 1.0, 2.0, 5.0] {
            // (0, 1] in s = −ln y, [1, ∞) in u = 1/y
            let (head, _) = integrate(
                |s: f64| {
                    let y = (-s).exp();
                    Ok((-z * y).exp() * case.eval(y)? * y)
                },
                0.0,
                40.0,
                &q,
            )
            .unwrap();
            let (tail, _) = integrate(
                |u: f64| {
                    if u == 0.0 {
                        return Ok(0.0);
                    }
                    Ok((-z / u).exp() * case.eval(1.0 / u)? / (u * u))
                },
                0.0,
                1.0,
                &q,
            )
            .unwrap();
            let want = z.powf(p.p_exponent()) * (-z.powf(p.alpha())).exp();
            let got = head + tail;
            assert!((got - want).abs() <= 1e-7 * want.abs(), "{:?} z={z}: {got} vs {want}", case.formula_id);
        }
    }
}

#[test]
fn g_is_scaled_f() {
    let p = params(0.5, 0.5, 1.0);
    let g = density_g(&p, 4.0, &tcfg()).unwrap();
    let want = 0.5 * 0.5 * levy_smirnov(4.0).unwrap();
    assert!((g - want).abs() <= 1e-9 * want);
}

#[test]
fn integral_rep_examples() {
    let q = QuadratureConfig::default();
    let v = eval_integral_rep(&params(0.5, 1.0, 1.0), 0.0, &q, &tcfg()).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let p = params(0.5, 1.0, 1.0);
    let v = eval_integral_rep(&p, 1.0, &q, &tcfg()).unwrap();
    let s = eval_series(&p, 1.0, 1e-15).unwrap().value;
    assert!((v - s).abs() < 1e-12, "{v} vs {s}");
    let v = eval_integral_rep(&params(0.5, 1.5, 2.0), 10.0, &q, &tcfg()).unwrap();
    let want = prabhakar_mp(1, 2, 1.5, 2.0, 10.0);
    assert!((v - want).abs() < 1e-12, "{v} vs {want}");
}

/// The representation as implemented (in `y`) against the form in `u = y^{−α}`:
/// `(1/α) ∫₀^∞ e^{−wu} u^{−1−1/α} g(u^{−1/α}) du`.
#[test]
fn substitution_matches_unsubstituted_form() {
    let q = QuadratureConfig::new(1e-14, 1e-11).unwrap();
    for (a, b, g, w) in [(0.5, 1.0, 1.0, 1.0), (2.0 / 3.0, 2.0, 2.0, 0.5), (0.3, 0.8, 1.5, 2.0)] {
        let p = params(a, b, g);
        let integrand = |u: f64| -> prabhakar::Result<f64> {
            if u == 0.0 {
                return Ok(0.0);
            }
            let y = u.powf(-1.0 / a);
            if y == 0.0 || !y.is_finite() {
                return Ok(0.0);
            }
            Ok((-w * u).exp() * u.powf(-1.0 - 1.0 / a) * density_g(&p, y, &tcfg())? / a)
        };
        let (lo, _) = integrate(integrand, 0.0, 1.0, &q).unwrap();
        // u ∈ [1, ∞) as v = 1/u
        let (hi, _) = integrate(
            |v: f64| if v == 0.0 { Ok(0.0) } else { Ok(integrand(1.0 / v)? / (v * v)) },
            0.0,
            1.0,
            &q,
        )
        .unwrap();
        let direct = lo + hi;
        let rep = eval_integral_rep(&p, w, &QuadratureConfig::default(), &tcfg()).unwrap();
        assert!((direct - rep).abs() < 1e-9 * rep.abs(), "({a},{b},{g}) w={w}: {direct} vs {rep}");
    }
}

#[test]
fn moments_are_shifted_functions() {
    let p = params(0.5, 1.5, 2.0);
    let m = integral_rep_moments::<f64, 4>(&p, 2.0, &QuadratureConfig::default(), &tcfg()).unwrap();
    for (n, &v) in m.iter().enumerate() {
        let poch: f64 = (0..n).map(|i| 2.0 + i as f64).product();
        let want = poch * prabhakar_mp(1, 2, 1.5 + 0.5 * n as f64, 2.0 + n as f64, 2.0);
        assert!((v - want).abs() < 1e-11 * want.abs().max(1.0), "n={n}: {v} vs {want}");
    }
}

/// Below `y ≈ 0.02` the density is under `e^{−12}` relative to its peak and the
/// sign is no longer resolved in double precision.
#[test]
fn counterexample_is_negative_past_one_half() {
    let p = params(0.5, 1.5, 4.0);
    for y in geometric_grid(0.5 + 1e-6, 50.0, 100).unwrap() {
        assert!(density_f(&p, y, &tcfg()).unwrap() < 0.0, "y={y}");
    }
    for y in geometric_grid(0.02, 0.5 - 1e-6, 100).unwrap() {
        assert!(density_f(&p, y, &tcfg()).unwrap() > 0.0, "y={y}");
    }
}

#[test]
fn single_precision_density() {
    let p = MLParams::new(0.5f32, 1.5, 2.0).unwrap();
    let cfg = TalbotConfig {
        nodes: 20,
        residue_tol: 1e-3,
        ..TalbotConfig::default()
    };
    let f = density_f(&p, 1.0f32, &cfg).unwrap();
    assert!((f - 0.439_391_3).abs() < 1e-4, "{f}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonnegative_under_criterion(a in 0.15f64..0.85, g in 0.2f64..3.0, excess in 0.0f64..2.0) {
        let p = params(a, a * g + excess, g);
        prop_assume!(p.cm_condition());
        let ys = geometric_grid(1e-3, 50.0, 20).unwrap();
        let fs: Vec<f64> = ys.iter().map(|&y| density_f(&p, y, &tcfg()).unwrap()).collect();
        let max = fs.iter().fold(0.0f64, |m, f| m.max(f.abs()));
        prop_assert!(fs.iter().all(|&f| f >= -1e-9 * max));
    }
}
