//! Direct closed form for the square of a polynomial density.

use crate::error::{Error, Result};
use crate::measure::{DensityTerm, Measure};
use crate::scalar::Scalar;

/// Square of `g(t) = Σ a_i t^i` on (0, 1), evaluated term by term from
///
/// ```text
/// f(x) = Σ_{i=0}^{n-1} (1 - x^{i+1})/(i+1) Σ_{j=0}^{n-i-1} a_j a_{j+i+1} x^j
///      - ln x Σ_{i=0}^{n} a_i² x^i
///      + Σ_{i=-n-1}^{-2} (1 - x^{i+1})/(i+1) Σ_{j=-i-1}^{n} a_j a_{j+i+1} x^j
/// ```
///
/// The input must be a probability density that is nonnegative on [0, 1].
pub fn polynomial_square_direct(coeffs: &[Scalar]) -> Result<Measure> {
    check_probability_polynomial(coeffs)?;
    let n = coeffs.len() as i64 - 1;
    let a = |j: i64| &coeffs[j as usize];
    let mut terms = Vec::new();

    // (1 - x^{i+1})/(i+1) · a_j a_{j+i+1} x^j  =  c x^j - c x^{j+i+1}
    let mut push_pair = |i: i64, j: i64| {
        let c = a(j) * a(j + i + 1) / Scalar::int(i + 1);
        if c.is_zero() {
            return;
        }
        terms.push(DensityTerm::monomial(c.clone(), j));
        terms.push(DensityTerm::monomial(-c, j + i + 1));
    };
    for i in 0..n {
        for j in 0..=(n - i - 1) {
            push_pair(i, j);
        }
    }
    for i in (-n - 1)..=-2 {
        for j in (-i - 1)..=n {
            push_pair(i, j);
        }
    }
    for i in 0..=n {
        let c = a(i) * a(i);
        if !c.is_zero() {
            terms.push(DensityTerm::unit(c, Scalar::int(i), Scalar::one()));
        }
    }
    Measure::from_terms(terms)
}

/// Integral one, and nonnegative on a fine grid of [0, 1].
fn check_probability_polynomial(coeffs: &[Scalar]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("empty polynomial".into()));
    }
    let integral: Scalar = coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a / Scalar::int(i as i64 + 1))
        .sum();
    let unit = if integral.is_exact() {
        integral.is_one()
    } else {
        (&integral - Scalar::one()).abs().to_f64() < 1e-12
    };
    if !unit {
        return Err(Error::InvalidMeasure(format!("polynomial integrates to {integral}, not 1")));
    }
    let c: Vec<f64> = coeffs.iter().map(Scalar::to_f64).collect();
    let eval = |x: f64| c.iter().rev().fold(0.0, |acc, a| acc * x + a);
    let scale = c.iter().map(|a| a.abs()).sum::<f64>();
    const SAMPLES: usize = 4096;
    for s in 0..=SAMPLES {
        let x = s as f64 / SAMPLES as f64;
        if eval(x) < -1e-12 * scale {
            return Err(Error::InvalidMeasure(format!("polynomial is negative at t = {x}")));
        }
    }
    Ok(())
}
