//! Runs the complete-monotonicity audit over a 5×5×5 parameter grid and
//! prints one line per triple.

use std::time::Instant;

use prabhakar::audit::{full_report, AuditConfig};
use prabhakar::series::MLParams;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn main() {
    let cfg = AuditConfig::default();
    let start = Instant::now();
    for &a in &linspace(0.2, 0.8, 5) {
        for &g in &linspace(0.5, 3.0, 5) {
            for &b in &linspace(0.3, 3.0, 5) {
                let t = Instant::now();
                let p = MLParams::new(a, b, g).expect("grid parameters are positive");
                let r = full_report(&p, &cfg);
                let dmin = r.density.as_ref().map(|d| d.min_value / d.max_abs);
                let dv = r.derivatives.as_ref().map(|d| (d.sign_ok, d.first_violation.map(|v| (v.x, v.order)), d.skipped.len(), d.integral_points));
                println!(
                    "a={a:.3} g={g:.3} b={b:.3} crit={} dens_min_rel={:?} deriv={:?} agree={:?} {:?} errs={:?} {:.2}s",
                    r.criterion_satisfied, dmin, dv, r.routes_agree, r.verdict.annotation, r.errors, t.elapsed().as_secs_f64()
                );
            }
        }
    }
    println!("total {:.1}s", start.elapsed().as_secs_f64());
}
