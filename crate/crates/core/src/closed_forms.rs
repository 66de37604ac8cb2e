//! Closed-form densities `f^γ_{α,β}` for a handful of parameter triples.
//!
//! These are coded straight from their formulas and share nothing with the
//! contour inversion in [`crate::bromwich`], so they can serve as oracles for it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::series::MLParams;
use crate::special::bessel_k;

/// Parameter matching tolerance of [`OracleCase::matching`].
pub const MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    LevySmirnov,
    ExampleB,
    ExampleC1,
    ExampleC2,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedSign {
    Nonnegative,
    ChangesSign,
}

impl FormulaId {
    pub const ALL: [FormulaId; 5] = [
        FormulaId::LevySmirnov,
        FormulaId::ExampleB,
        FormulaId::ExampleC1,
        FormulaId::ExampleC2,
        FormulaId::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::LevySmirnov => "levy_smirnov",
            FormulaId::ExampleB => "example_b",
            FormulaId::ExampleC1 => "example_c1",
            FormulaId::ExampleC2 => "example_c2",
            FormulaId::Counterexample => "counterexample",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// `(α, β, γ)` the formula belongs to.
    pub fn params_f64(self) -> (f64, f64, f64) {
        match self {
            FormulaId::LevySmirnov => (0.5, 0.5, 1.0),
            FormulaId::ExampleB => (0.5, 1.5, 2.0),
            FormulaId::ExampleC1 => (1.0 / 3.0, 2.0, 5.0),
            FormulaId::ExampleC2 => (2.0 / 3.0, 2.0, 2.0),
            FormulaId::Counterexample => (0.5, 1.5, 4.0),
        }
    }

    pub fn expected_sign(self) -> ExpectedSign {
        match self {
            FormulaId::Counterexample => ExpectedSign::ChangesSign,
            _ => ExpectedSign::Nonnegative,
        }
    }

    pub fn eval<T: Real>(self, y: T) -> Result<T> {
        match self {
            FormulaId::LevySmirnov => levy_smirnov(y),
            FormulaId::ExampleB => example_b(y),
            FormulaId::ExampleC1 => example_c1(y),
            FormulaId::ExampleC2 => example_c2(y),
            FormulaId::Counterexample => counterexample(y),
        }
    }
}

/// A closed form bound to its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCase<T> {
    pub params: MLParams<T>,
    pub formula_id: FormulaId,
    pub expected_sign: ExpectedSign,
}

impl<T: Real> OracleCase<T> {
    pub fn new(formula_id: FormulaId) -> Self {
        let (a, b, g) = formula_id.params_f64();
        Self {
            params: MLParams::new(T::lit(a), T::lit(b), T::lit(g)).expect("fixed oracle parameters are valid"),
            formula_id,
            expected_sign: formula_id.expected_sign(),
        }
    }

    pub fn all() -> Vec<Self> {
        FormulaId::ALL.into_iter().map(Self::new).collect()
    }

    /// The oracle whose parameters equal `p` within [`MATCH_TOL`].
    ///
    /// The density depends on `(α, β, γ)` only through `α` and `αγ − β`, so
    /// every triple with `α = 1/2` and `β = γ/2` has the Lévy–Smirnov density;
    /// the measured proportionality constant is one.
    pub fn matching(p: &MLParams<T>) -> Option<Self> {
        let tol = T::lit(MATCH_TOL);
        let close = |x: T, y: f64| (x - T::lit(y)).abs() <= tol;
        let exact = FormulaId::ALL.into_iter().find(|f| {
            let (a, b, g) = f.params_f64();
            close(p.alpha(), a) && close(p.beta(), b) && close(p.gamma(), g)
        });
        if let Some(f) = exact {
            return Some(Self::new(f));
        }
        if close(p.alpha(), 0.5) && p.p_exponent().abs() <= tol {
            return Some(Self {
                params: *p,
                formula_id: FormulaId::LevySmirnov,
                expected_sign: ExpectedSign::Nonnegative,
            });
        }
        None
    }

    pub fn eval(&self, y: T) -> Result<T> {
        self.formula_id.eval(y)
    }
}

fn check_y<T: Real>(y: T) -> Result<()> {
    if !(y.is_finite() && y > T::zero()) {
        return Err(Error::domain(format!("closed forms need y > 0, got {y}")));
    }
    Ok(())
}

/// `y^{−3/2} e^{−1/(4y)} / (2√π)`.
pub fn levy_smirnov<T: Real>(y: T) -> Result<T> {
    check_y(y)?;
    let quarter = T::lit(0.25);
    Ok((-quarter / y).exp() / (T::lit(2.0) * T::PI().sqrt() * y * y.sqrt()))
}

/// `e^{−1/(4y)} / √(πy)`.
pub fn example_b<T: Real>(y: T) -> Result<T> {
    check_y(y)?;
    Ok((-T::lit(0.25) / y).exp() / (T::PI() * y).sqrt())
}

/// `K_{2/3}(2 / (3√(3y))) / (π y √3)`.
pub fn example_c1<T: Real>(y: T) -> Result<T> {
    check_y(y)?;
    let three = T::lit(3.0);
    let arg = T::lit(2.0) / (three * (three * y).sqrt());
    Ok(bessel_k(T::lit(2.0 / 3.0), arg)? / (T::PI() * y * three.sqrt()))
}

/// `e^{−2/(27y²)} K_{1/3}(2/(27y²)) / (√3 π y)`.
pub fn example_c2<T: Real>(y: T) -> Result<T> {
    check_y(y)?;
    let arg = T::lit(2.0) / (T::lit(27.0) * y * y);
    let k = bessel_k(T::lit(1.0 / 3.0), arg)?;
    Ok((-arg).exp() * k / (T::lit(3.0).sqrt() * T::PI() * y))
}

/// `(1 − 2y) e^{−1/(4y)} / (4√π y^{5/2})`.
pub fn counterexample<T: Real>(y: T) -> Result<T> {
    check_y(y)?;
    let two = T::lit(2.0);
    Ok((T::one() - two * y) * (-T::lit(0.25) / y).exp() / (T::lit(4.0) * T::PI().sqrt() * y * y * y.sqrt()))
}
