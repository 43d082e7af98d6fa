//! Moving densities between the half line and (0, 1) by `t = e^{-x}`.
//!
//! A density `f` on `(0, ∞)` becomes `f(-ln t) dt` on (0, 1), and then
//! `∫ t^n f(-ln t) dt = F(n+1)`, the Laplace transform of `f` at `n+1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DensityTerm, Measure};
use crate::oracle::quadrature::{quad_moment, LogDensity, DEFAULT_QUAD_TOL};
use crate::oracle::verify::MomentSource;
use crate::scalar::Scalar;
use crate::shift::MomentRule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HalfLineDensity {
    /// `coeff (x-shift)^k e^{-alpha (x-shift)}` for `x > shift`, zero before.
    ExpPoly {
        coeff: Scalar,
        alpha: Scalar,
        k: Scalar,
        #[serde(default)]
        shift: Scalar,
    },
    /// `c/(2 sqrt(π x³)) e^{-c²/(4x)}`, with Laplace transform `e^{-c sqrt(s)}`.
    InverseGaussian { c: Scalar },
}

impl HalfLineDensity {
    /// `H(x)`, the indicator of the half line.
    pub fn heaviside() -> Self {
        HalfLineDensity::ExpPoly {
            coeff: Scalar::one(),
            alpha: Scalar::zero(),
            k: Scalar::zero(),
            shift: Scalar::zero(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            HalfLineDensity::ExpPoly { coeff, alpha, k, shift } => {
                let u = x - shift.to_f64();
                if !(u > 0.0) {
                    return 0.0;
                }
                let k = k.to_f64();
                let p = if k == 0.0 { 1.0 } else { u.powf(k) };
                coeff.to_f64() * p * (-alpha.to_f64() * u).exp()
            }
            HalfLineDensity::InverseGaussian { c } => {
                if !(x > 0.0) {
                    return 0.0;
                }
                let c = c.to_f64();
                c / (2.0 * (std::f64::consts::PI * x * x * x).sqrt()) * (-c * c / (4.0 * x)).exp()
            }
        }
    }
}

/// A transported density outside the closed family, integrated numerically.
#[derive(Clone, Debug)]
pub struct TransportedMeasure {
    pub source: HalfLineDensity,
    /// Total mass of `f(-ln t) dt` before normalization.
    pub raw_mass: Scalar,
    /// Closed-form moments of the normalized measure.
    pub moments: MomentRule,
    pub tol: f64,
}

impl TransportedMeasure {
    /// Normalized moment from the closed form.
    pub fn exact_moment(&self, n: u32) -> Result<Scalar> {
        self.moments.moment(n as usize)
    }
}

impl LogDensity for TransportedMeasure {
    fn density_offset(&self, anchor: f64, offset: f64) -> f64 {
        self.source.eval(anchor + offset) / self.raw_mass.to_f64()
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl MomentSource for TransportedMeasure {
    fn moment(&self, n: u32) -> Result<Scalar> {
        Ok(Scalar::real(quad_moment(self, n, self.tol)?))
    }

    fn method(&self) -> String {
        format!("quadrature (tol {:.0e})", self.tol)
    }
}

#[derive(Clone, Debug)]
pub enum Transported {
    Family(Measure),
    Numeric(TransportedMeasure),
}

/// `f ↦ f(-ln t) dt`. Family members map exactly; the inverse Gaussian
/// density maps to a normalized measure with moments `e^{c - c sqrt(n+1)}`.
pub fn transport_from_halfline(g: &HalfLineDensity) -> Result<Transported> {
    match g {
        HalfLineDensity::ExpPoly { coeff, alpha, k, shift } => {
            if shift.is_negative() {
                return Err(Error::UnsupportedDensity(format!("shift {shift} must be nonnegative")));
            }
            // coeff (−ln t − ℓ)^k (t/c)^α on (0, c) is coeff·c times the scaled basis density
            let term = DensityTerm::new(coeff * (-shift).exp(), alpha.clone(), k.clone(), shift.clone());
            term.validate()
                .map_err(|e| Error::UnsupportedDensity(format!("not integrable on (0, 1): {e}")))?;
            Ok(Transported::Family(Measure::from_terms(vec![term])?))
        }
        HalfLineDensity::InverseGaussian { c } => {
            if !c.is_positive() {
                return Err(Error::UnsupportedDensity(format!("inverse Gaussian parameter c = {c} must be positive")));
            }
            Ok(Transported::Numeric(TransportedMeasure {
                source: g.clone(),
                raw_mass: (-c).exp(),
                moments: MomentRule::ExpSqrt { c: c.clone() },
                tol: DEFAULT_QUAD_TOL,
            }))
        }
    }
}

/// `μ ↦ f` with `f(x) = ρ(e^{-x})`, one half-line term per density term.
pub fn transport_to_halfline(mu: &Measure) -> Result<Vec<HalfLineDensity>> {
    if !mu.atoms().is_empty() || !mu.zero_mass().is_zero() {
        return Err(Error::UnsupportedDensity("atoms have no half-line density".into()));
    }
    Ok(mu
        .terms()
        .iter()
        .map(|t| HalfLineDensity::ExpPoly {
            coeff: &t.coeff * t.log_support.exp(),
            alpha: t.alpha.clone(),
            k: t.k.clone(),
            shift: t.log_support.clone(),
        })
        .collect())
}
