//! Extended-precision reference values for the test suites of `prabhakar`
//! and its CLI.
//!
//! Nothing here calls into the library: series are summed in MPFR with a
//! working precision chosen from the size of the largest term, so the
//! alternating cancellation that limits double precision does not matter.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

const GUARD_BITS: u32 = 96;

fn term_exp(t: &Float) -> i64 {
    t.get_exp().map(i64::from).unwrap_or(i64::MIN / 2)
}

/// Sums `Σ_r (γ)_r (−x)^r / (r! Γ(αr + β))` with `α = l/k` at `prec` bits.
///
/// Uses `Γ(α(r+k) + β) = Γ(αr + β) Π_{i<l} (αr + β + i)`, so only the first
/// `k` terms need a gamma function. Returns the sum and the binary exponent
/// of the largest term.
fn lag_sum(l: u32, k: u32, beta: f64, gamma: f64, x: f64, prec: u32) -> (Float, i64) {
    let alpha = Float::with_val(prec, l) / k;
    let b = Float::with_val(prec, beta);
    let g = Float::with_val(prec, gamma);
    let neg_x = -Float::with_val(prec, x);
    let neg_x_k = Float::with_val(prec, (&neg_x).pow(k));

    let mut terms: Vec<Float> = Vec::new();
    // direct terms r < k
    let mut poch = Float::with_val(prec, 1); // (γ)_r / r!
    for r in 0..k {
        let arg = Float::with_val(prec, &alpha * r) + &b;
        let t = Float::with_val(prec, &poch * Float::with_val(prec, (&neg_x).pow(r))) / arg.gamma();
        terms.push(t);
        poch *= Float::with_val(prec, &g + r);
        poch /= r + 1;
    }
    let mut sum = Float::with_val(prec, 0);
    let mut max_exp = i64::MIN / 2;
    for t in &terms {
        sum += t;
        max_exp = max_exp.max(term_exp(t));
    }
    let k_us = k as usize;
    let mut quiet = 0u32;
    let mut r = k;
    loop {
        let base = r - k;
        let prev = &terms[(base as usize) % k_us];
        let mut t = Float::with_val(prec, prev * &neg_x_k);
        for i in 0..k {
            t *= Float::with_val(prec, &g + (base + i));
            t /= base + 1 + i;
        }
        for i in 0..l {
            let d = Float::with_val(prec, &alpha * base) + &b + i;
            t /= d;
        }
        sum += &t;
        let e = term_exp(&t);
        max_exp = max_exp.max(e);
        // past the peak and negligible against the sum for a full lag cycle
        if e < term_exp(&sum) - i64::from(prec) - 8 && e < max_exp {
            quiet += 1;
            if quiet >= 2 * k {
                return (sum, max_exp);
            }
        } else {
            quiet = 0;
        }
        terms[(base as usize) % k_us] = t;
        r += 1;
        assert!(r < 5_000_000, "reference series failed to converge");
    }
}

/// `E^γ_{α,β}(−x)` for rational `α = l/k`, correctly rounded to `f64` in
/// all but pathological cases.
pub fn prabhakar_mp(l: u32, k: u32, beta: f64, gamma: f64, x: f64) -> f64 {
    let mut prec = 128u32;
    loop {
        let (sum, max_exp) = lag_sum(l, k, beta, gamma, x, prec);
        let need = (max_exp - term_exp(&sum)).max(0) as u32 + GUARD_BITS;
        if prec >= need {
            return sum.to_f64();
        }
        prec = need + 32;
    }
}

/// Two-parameter function `Σ_r (−x)^r / Γ(αr + β)` with `α = l/k`, coded
/// separately from [`prabhakar_mp`] (direct gamma per term, no Pochhammer
/// recurrence) so that it can act as an independent check of the `γ = 1`
/// reduction.
pub fn wiman_series_mp(l: u32, k: u32, beta: f64, x: f64) -> f64 {
    let alpha = l as f64 / k as f64;
    // largest term ~ exp(x^{1/α}); add room for the result's own size
    let bits = (x.powf(1.0 / alpha) / std::f64::consts::LN_2).ceil() as u32 + 2 * GUARD_BITS;
    let prec = bits.max(128);
    let a = Float::with_val(prec, l) / k;
    let b = Float::with_val(prec, beta);
    let neg_x = -Float::with_val(prec, x);
    let mut sum = Float::with_val(prec, 0);
    let mut power = Float::with_val(prec, 1);
    let mut peak_passed = false;
    let mut last_exp = i64::MIN;
    for r in 0u32.. {
        let arg = Float::with_val(prec, &a * r) + &b;
        let t = Float::with_val(prec, &power / arg.gamma());
        sum += &t;
        let e = term_exp(&t);
        if e < last_exp {
            peak_passed = true;
        }
        last_exp = e;
        if peak_passed && r > 8 && e < term_exp(&sum) - i64::from(prec) {
            break;
        }
        power *= &neg_x;
        assert!(r < 2_000_000, "reference series failed to converge");
    }
    sum.to_f64()
}

/// Algebraic expansion `E_{α,β}(−x) ~ Σ_{j≥1} (−1)^{j+1} x^{−j} / Γ(β − αj)`
/// for `0 < α < 1`. Its terms keep shrinking until `j ≈ x^{1/α}/α`, far past
/// the point where they drop below `1e-40` for the arguments used here.
/// Returns the value and the last term's magnitude.
pub fn wiman_asymptotic(l: u32, k: u32, beta: f64, x: f64) -> (f64, f64) {
    let prec = 192;
    let a = Float::with_val(prec, l) / k;
    let b = Float::with_val(prec, beta);
    let xf = Float::with_val(prec, x);
    let mut sum = Float::with_val(prec, 0);
    let mut xpow = Float::with_val(prec, 1);
    let mut tiny_run = 0;
    for j in 1u32..100_000 {
        xpow /= &xf;
        let arg = Float::with_val(prec, &b - Float::with_val(prec, &a * j));
        let t = Float::with_val(prec, &xpow * recip_gamma(&arg));
        if j % 2 == 1 {
            sum += &t;
        } else {
            sum -= &t;
        }
        let mag = t.to_f64().abs();
        // two in a row, so a term that merely sits near a pole cannot stop it
        tiny_run = if mag < 1e-40 * sum.to_f64().abs() { tiny_run + 1 } else { 0 };
        if tiny_run >= 2 {
            return (sum.to_f64(), mag);
        }
    }
    panic!("asymptotic reference did not settle");
}

fn recip_gamma(z: &Float) -> Float {
    let prec = z.prec();
    let rounded = Float::with_val(prec, z.round_ref());
    let near_pole = *z <= 0 && Float::with_val(prec, z - &rounded).abs() < Float::with_val(prec, 1e-40);
    if near_pole {
        return Float::with_val(prec, 0);
    }
    Float::with_val(prec, z.gamma_ref()).recip()
}

/// Reference `E_{α,β}(−x)`: the extended-precision series where its working
/// precision stays moderate, the algebraic expansion beyond.
pub fn wiman_reference(l: u32, k: u32, beta: f64, x: f64) -> f64 {
    let growth = x.powf(k as f64 / l as f64);
    if growth <= 1000.0 {
        wiman_series_mp(l, k, beta, x)
    } else {
        let (v, err) = wiman_asymptotic(l, k, beta, x);
        assert!(err < 1e-30, "asymptotic reference not converged: {err:e}");
        v
    }
}

/// `√π` to `f64`, computed in MPFR.
pub fn sqrt_pi() -> f64 {
    Float::with_val(128, Constant::Pi).sqrt().to_f64()
}

/// Richardson extrapolation of central differences of order `n ≤ 3`, with
/// steps `h, h/2, h/4, …`. Returns `(−1)ⁿ dⁿf/dxⁿ`.
pub fn signed_richardson<F: FnMut(f64) -> f64>(mut f: F, x: f64, n: usize, h: f64, levels: usize) -> f64 {
    let mut stencil = |h: f64| -> f64 {
        match n {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
            _ => panic!("difference order {n} unsupported"),
        }
    };
    // central stencils have even error expansions: h², h⁴, …
    let mut table: Vec<Vec<f64>> = Vec::new();
    for i in 0..levels {
        let mut row = vec![stencil(h / f64::powi(2.0, i as i32))];
        for j in 1..=i {
            let factor = f64::powi(4.0, j as i32);
            let v = (factor * row[j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
            row.push(v);
        }
        table.push(row);
    }
    let best = table[levels - 1][levels - 1];
    if n % 2 == 1 {
        -best
    } else {
        best
    }
}

/// `1/Γ(x)` rounded to `f64`.
pub fn recip_gamma_mp(x: f64) -> f64 {
    recip_gamma(&Float::with_val(256, x)).to_f64()
}

/// `K_ν(z) = ∫₀^∞ e^{−z cosh t} cosh(νt) dt` by the trapezoid rule, which
/// converges geometrically here because the integrand is analytic in a strip
/// around the real axis and decays doubly exponentially.
pub fn bessel_k_mp(nu: f64, z: f64) -> f64 {
    assert!(z > 0.0, "bessel_k_mp needs z > 0");
    let prec = 160;
    let h = Float::with_val(prec, 1) / 32;
    let z = Float::with_val(prec, z);
    let nu = Float::with_val(prec, nu);
    let f = |t: &Float| -> Float {
        let e = Float::with_val(prec, -(Float::with_val(prec, &z * t.clone().cosh())));
        e.exp() * Float::with_val(prec, &nu * t).cosh()
    };
    let mut sum: Float = f(&Float::with_val(prec, 0)) / 2;
    let mut i = 1u32;
    loop {
        let t = Float::with_val(prec, &h * i);
        let v = f(&t);
        sum += &v;
        if v < 1e-45 * Float::with_val(prec, &sum) && Float::with_val(prec, &z * t.cosh()) > 1 {
            break;
        }
        i += 1;
    }
    Float::with_val(prec, &sum * &h).to_f64()
}
