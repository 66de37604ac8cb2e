use prabhakar::audit::{
    audit_density, audit_derivatives, default_x_grid, full_report, verify_laplace_identity, Annotation, AuditConfig,
};
use prabhakar::bromwich::{eval_auto, geometric_grid, EvalConfig};
use prabhakar::series::MLParams;
use prabhakar::talbot::TalbotConfig;
use proptest::prelude::*;

fn params(a: f64, b: f64, g: f64) -> MLParams<f64> {
    MLParams::new(a, b, g).unwrap()
}

fn y_grid() -> Vec<f64> {
    geometric_grid(1e-3, 50.0, 200).unwrap()
}

fn x_grid_to_20() -> Vec<f64> {
    let mut xs = vec![0.0];
    xs.extend(geometric_grid(1e-3, 20.0, 10).unwrap());
    xs
}

#[test]
fn density_sweep_examples() {
    let t = TalbotConfig::default();
    let b = audit_density(&params(0.5, 1.5, 2.0), &y_grid(), &t).unwrap();
    assert!(b.nonnegative());
    assert!(b.min_value >= -1e-9 * b.max_abs);

    let c = audit_density(&params(0.5, 1.5, 4.0), &y_grid(), &t).unwrap();
    let locus = c.violation_locus.expect("counterexample must be refuted");
    assert!((locus.lower - 0.5).abs() < 1e-6, "{locus:?}");
    assert!(locus.open_above && !locus.open_below);
    assert!(c.min_value < 0.0 && c.argmin > 0.5);

    let boundary = audit_density(&params(0.5, 2.0 / 3.0, 4.0 / 3.0), &y_grid(), &t).unwrap();
    assert!(boundary.nonnegative());
}

#[test]
fn derivative_sign_examples() {
    let cfg = EvalConfig::default();
    let xs = x_grid_to_20();
    let exp = audit_derivatives(&params(1.0, 1.0, 1.0), &xs, 8, &cfg).unwrap();
    assert!(exp.sign_ok, "{:?} {:?}", exp.first_violation, exp.skipped);
    // α = 1 has only the series route, whose cancellation grows like e^{2x}
    assert_eq!(exp.checked_points + exp.skipped.len(), xs.len());
    assert!(exp.skipped.iter().all(|s| s.x > 5.0), "{:?}", exp.skipped);

    let good = audit_derivatives(&params(0.5, 5.0 / 3.0, 4.0 / 3.0), &xs, 8, &cfg).unwrap();
    assert!(good.sign_ok, "{:?}", good.first_violation);
    assert!(good.skipped.is_empty());

    let bad = audit_derivatives(&params(0.5, 1.0 / 3.0, 4.0 / 3.0), &xs, 8, &cfg).unwrap();
    let v = bad.first_violation.expect("wrong case must show a sign violation");
    assert!(!bad.sign_ok && v.value < 0.0);
    assert!(audit_derivatives(&params(0.5, 1.0, 1.0), &xs, 9, &cfg).is_err());
}

#[test]
fn laplace_identity_examples() {
    let cfg = EvalConfig::default();
    let exp = verify_laplace_identity(&params(1.0, 1.0, 1.0), 1.0, 2.0, &cfg).unwrap();
    assert!((exp.lhs - 1.0 / 3.0).abs() < 1e-12);
    assert!(exp.residual <= 1e-10);
    for (a, b, g, x, s) in [(0.5, 1.5, 2.0, 1.0, 3.0), (0.5, 0.5, 1.0, 1.0, 2.0), (1.0 / 3.0, 2.0, 5.0, 1.0, 2.0)] {
        let r = verify_laplace_identity(&params(a, b, g), x, s, &cfg).unwrap();
        assert!(r.residual <= 1e-6, "({a},{b},{g}) x={x} s={s}: {:e}", r.residual);
    }
    let err = verify_laplace_identity(&params(0.5, 1.5, 2.0), 4.0, 1.0, &cfg).unwrap_err();
    assert!(err.is_domain());
}

#[test]
fn laplace_identity_past_series_limit() {
    // x t^α reaches far beyond where the plain series is usable
    let cfg = EvalConfig::default();
    for (a, b, g, x, s) in [(0.5, 2.0, 1.5, 2.0, 5.0), (0.8, 0.7, 0.6, 2.0, 3.0), (1.5, 1.0, 2.0, 3.0, 2.5)] {
        let r = verify_laplace_identity(&params(a, b, g), x, s, &cfg).unwrap();
        assert!(r.residual <= 1e-6, "({a},{b},{g}) x={x} s={s}: {:e}", r.residual);
    }
}

#[test]
fn full_report_examples() {
    let cfg = AuditConfig::default();
    let good = full_report(&params(0.5, 5.0 / 3.0, 4.0 / 3.0), &cfg);
    assert!(good.criterion_satisfied && good.errors.is_empty());
    assert!(good.density.as_ref().unwrap().nonnegative());
    assert!(good.derivatives.as_ref().unwrap().sign_ok);
    assert_eq!(good.routes_agree, Some(true));
    assert_eq!(good.verdict.annotation, Annotation::Consistent);

    let bad = full_report(&params(0.5, 1.5, 4.0), &cfg);
    assert!(!bad.criterion_satisfied && bad.refuted());
    let locus = bad.density.as_ref().unwrap().violation_locus.unwrap();
    assert!((locus.lower - 0.5).abs() < 1e-6);
    assert_eq!(bad.verdict.annotation, Annotation::Consistent);
    assert!(!bad.verdict.completely_monotone);

    let exp = full_report(&params(1.0, 1.0, 1.0), &cfg);
    assert!(exp.density.is_none());
    assert_eq!(exp.errors.len(), 1);
    assert_eq!(exp.errors[0].0, "density");
    assert!(exp.derivatives.as_ref().unwrap().sign_ok);
    assert_eq!(exp.routes_agree, None);
}

#[test]
fn report_carries_laplace_residual() {
    let cfg = AuditConfig {
        laplace: Some((1.0, 3.0)),
        ..AuditConfig::default()
    };
    let r = full_report(&params(0.5, 1.5, 2.0), &cfg);
    assert!(r.laplace_residual.unwrap() <= 1e-6);
    let cfg = AuditConfig {
        laplace: Some((4.0, 1.0)),
        ..AuditConfig::default()
    };
    let r = full_report(&params(0.5, 1.5, 2.0), &cfg);
    assert!(r.laplace_residual.is_none());
    assert!(r.errors.iter().any(|(k, _)| k == "laplace"));
}

#[test]
fn report_serializes() {
    let r = full_report(&params(0.5, 1.5, 4.0), &AuditConfig::default());
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["params"]["gamma"], 4.0);
    assert_eq!(v["verdict"]["annotation"], "consistent");
    assert!(v["density"]["violation_locus"]["lower"].as_f64().unwrap() > 0.49);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn decreasing_under_criterion(a in 0.15f64..0.95, g in 0.2f64..3.0, excess in 0.0f64..2.0) {
        let p = params(a, a * g + excess, g);
        prop_assume!(p.cm_condition());
        let cfg = EvalConfig::default();
        let mut prev = f64::INFINITY;
        for x in default_x_grid() {
            let v = eval_auto(&p, x, &cfg).unwrap().value;
            prop_assert!(v <= prev + 1e-12, "x={} {} > {}", x, v, prev);
            prev = v;
        }
    }
}
