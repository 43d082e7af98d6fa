//! Named measures with known moments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{DensityTerm, Measure};
use crate::scalar::{binomial, factorial, Scalar};
use crate::shift::MomentRule;

/// Bound on the moment-0 error of truncated catalog series.
pub const SERIES_TAIL_BOUND: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogMeasure {
    pub name: String,
    pub measure: Measure,
    /// Upper bound on `|γ_n(truncated) - γ_n(exact)|` for every `n`.
    pub truncation_bound: Scalar,
    #[serde(skip)]
    pub moments: Option<MomentRule>,
}

/// `(1/Γ(q)) (-ln u)^{q-1} du`, with moments `(n+1)^{-q}`: the q-th power
/// of Lebesgue measure in the moment sense.
pub fn pth_power_lebesgue(q: &Scalar) -> Result<Measure> {
    if !q.is_positive() {
        return Err(Error::InvalidArgument(format!("power q = {q} must be positive")));
    }
    Measure::from_terms(vec![DensityTerm::unit(q.gamma().recip(), Scalar::zero(), q - Scalar::one())])
}

/// `(j-1)(1-t)^{j-2} dt`, the measure of the Agler shift `A_j`.
pub fn agler_measure(j: u32) -> Result<Measure> {
    if j < 2 {
        return Err(Error::InvalidArgument(format!("Agler index j = {j} must be at least 2")));
    }
    let m = j - 2;
    let scale = Scalar::int(i64::from(j) - 1);
    let coeffs: Vec<Scalar> = (0..=m)
        .map(|i| {
            let sign = if i % 2 == 0 { Scalar::one() } else { Scalar::int(-1) };
            &scale * sign * binomial(m, i)
        })
        .collect();
    Measure::polynomial(&coeffs)
}

/// Number of series terms for the square root of `2(1-t) dt`.
///
/// Term `m` contributes `√2 C(2m,m) / (16^m a^{2m+1})` to the n-th moment,
/// `a = n + 3/2`. Consecutive terms shrink by at most `x = 1/(4a²) ≤ 1/9`, so
/// after `M` terms the moment-0 tail is below `(√2/a) x^M / (1-x)`.
pub fn sqrt_a3_terms_needed(bound: f64) -> (usize, f64) {
    let mut m = 0usize;
    while sqrt_a3_tail(m) >= bound {
        m += 1;
    }
    (m, sqrt_a3_tail(m))
}

/// Moment error bound after `m` series terms.
fn sqrt_a3_tail(m: usize) -> f64 {
    let a = 1.5f64;
    let x = 1.0 / (4.0 * a * a);
    2f64.sqrt() / a * x.powi(m as i32) / (1.0 - x)
}

/// Truncation of `√2 Σ_m t^{1/2} (-ln t)^{2m} / (16^m (m!)²) dt`, whose
/// moments are `√2/sqrt((n+1)(n+2))`, the square roots of the moments of
/// `2(1-t) dt`. Without an explicit term count the series is cut where the
/// tail bound drops below `SERIES_TAIL_BOUND`.
pub fn sqrt_a3(terms: Option<usize>) -> Result<CatalogMeasure> {
    let count = terms.unwrap_or_else(|| sqrt_a3_terms_needed(SERIES_TAIL_BOUND).0);
    if count == 0 {
        return Err(Error::InvalidArgument("series needs at least one term".into()));
    }
    let bound = sqrt_a3_tail(count);
    let root2 = Scalar::int(2).sqrt();
    let half = Scalar::ratio(1, 2);
    let sixteen = Scalar::int(16);
    let terms = (0..count)
        .map(|m| {
            let f = factorial(m as u32);
            let coeff = &root2 / (sixteen.powi(m as i64) * &f * &f);
            DensityTerm::unit(coeff, half.clone(), Scalar::int(2 * m as i64))
        })
        .collect();
    Ok(CatalogMeasure {
        name: "sqrtA3".into(),
        measure: Measure::from_terms(terms)?,
        truncation_bound: Scalar::real(bound),
        moments: None,
    })
}

/// `√2/sqrt((n+1)(n+2))`.
pub fn sqrt_a3_moment(n: u32) -> Scalar {
    let n = i64::from(n);
    Scalar::int(2).sqrt() / Scalar::int((n + 1) * (n + 2)).sqrt()
}

/// Looks up a catalog entry. `param` is `q` for `pth-lebesgue`, `j` for
/// `agler`, and the number of series terms for `sqrtA3`.
pub fn catalog(name: &str, param: Option<&Scalar>) -> Result<CatalogMeasure> {
    let exact = |name: &str, measure: Measure, moments: Option<MomentRule>| CatalogMeasure {
        name: name.to_string(),
        measure,
        truncation_bound: Scalar::zero(),
        moments,
    };
    match name {
        "lebesgue" => Ok(exact(
            name,
            Measure::lebesgue(),
            Some(MomentRule::InversePower { q: Scalar::one() }),
        )),
        "pth-lebesgue" | "lebesgue-pth" => {
            let q = param.ok_or_else(|| Error::InvalidArgument(format!("{name} needs a power q")))?;
            Ok(exact(
                "pth-lebesgue",
                pth_power_lebesgue(q)?,
                Some(MomentRule::InversePower { q: q.clone() }),
            ))
        }
        "agler" => {
            let j = param
                .and_then(Scalar::as_nonneg_integer)
                .ok_or_else(|| Error::InvalidArgument("agler needs an integer index j".into()))?;
            Ok(exact("agler", agler_measure(j)?, None))
        }
        "sqrtA3" | "sqrt-a3" => {
            let terms = param
                .map(|p| {
                    p.as_nonneg_integer()
                        .map(|m| m as usize)
                        .ok_or_else(|| Error::InvalidArgument(format!("term count {p} must be a nonnegative integer")))
                })
                .transpose()?;
            sqrt_a3(terms)
        }
        other => Err(Error::UnknownCatalogEntry(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lebesgue_powers() {
        assert_eq!(pth_power_lebesgue(&Scalar::one()).unwrap(), Measure::lebesgue());
        let two = pth_power_lebesgue(&Scalar::int(2)).unwrap();
        assert_eq!(two.terms(), &[DensityTerm::unit(Scalar::one(), Scalar::zero(), Scalar::one())]);
        let half = pth_power_lebesgue(&Scalar::ratio(1, 2)).unwrap();
        assert!((&half.terms()[0].coeff - Scalar::pi().sqrt().recip()).abs().to_f64() < 1e-50);
        assert!(pth_power_lebesgue(&Scalar::zero()).is_err());
    }

    #[test]
    fn agler_measures() {
        for j in 2..8u32 {
            let m = agler_measure(j).unwrap();
            // moments of A_j: Π_{i<n} (i+1)/(i+j)
            let mut g = Scalar::one();
            for n in 0..10u32 {
                assert_eq!(m.moment(n), g);
                g = g * Scalar::ratio(i64::from(n) + 1, i64::from(n + j));
            }
        }
    }

    #[test]
    fn sqrt_a3_series() {
        let (m, tail) = sqrt_a3_terms_needed(1e-12);
        assert!(tail < 1e-12);
        let c = sqrt_a3(None).unwrap();
        assert_eq!(c.measure.terms().len(), m);
        assert!((c.measure.moment(0) - Scalar::one()).abs().to_f64() < 1e-10);
        for n in 0..20u32 {
            let d = (c.measure.moment(n) - sqrt_a3_moment(n)).abs().to_f64();
            assert!(d <= c.truncation_bound.to_f64(), "n={n} d={d}");
        }
        let forty = sqrt_a3(Some(40)).unwrap();
        assert!((forty.measure.moment(0) - Scalar::one()).abs().to_f64() < 1e-10);
        assert!((forty.measure.moment(2) - Scalar::int(2).sqrt() / (Scalar::int(2) * Scalar::int(3).sqrt())).abs().to_f64() < 1e-10);
    }

    #[test]
    fn lookup() {
        assert!(catalog("nope", None).is_err());
        let c = catalog("lebesgue-pth", Some(&Scalar::ratio(3, 2))).unwrap();
        assert_eq!(c.measure, pth_power_lebesgue(&Scalar::ratio(3, 2)).unwrap());
        assert!(catalog("pth-lebesgue", None).is_err());
        assert_eq!(catalog("agler", Some(&Scalar::int(3))).unwrap().measure.terms().len(), 2);
    }
}
