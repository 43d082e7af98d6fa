//! Measures on [0, 1]: finitely many atoms plus a finite combination of
//! scaled log-power densities.
//!
//! Positions are stored in log coordinates, `t = e^{-log_pos}`, so that the
//! product of two atoms is an exact sum. The density family
//!
//! ```text
//! coeff * (1/c) * (t/c)^alpha * (-ln(t/c))^k   on (0, c),   c = e^{-log_support}
//! ```
//!
//! is closed under multiplicative convolution when `k` is a nonnegative
//! integer, and every member has closed-form power moments
//! `coeff * c^n * Γ(k+1) / (n + alpha + 1)^(k+1)`.

pub(crate) mod support;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{total_cmp, Scalar};

pub use support::{support_set, support_square_check, Support, SupportCheck};

/// A point mass at `t = e^{-log_pos}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub log_pos: Scalar,
    pub mass: Scalar,
}

impl Atom {
    pub fn new(log_pos: Scalar, mass: Scalar) -> Self {
        Atom { log_pos, mass }
    }

    /// Position in `t` coordinates.
    pub fn position(&self) -> Scalar {
        (-&self.log_pos).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityTerm {
    pub coeff: Scalar,
    pub alpha: Scalar,
    pub k: Scalar,
    #[serde(default)]
    pub log_support: Scalar,
}

impl DensityTerm {
    pub fn new(coeff: Scalar, alpha: Scalar, k: Scalar, log_support: Scalar) -> Self {
        DensityTerm {
            coeff,
            alpha,
            k,
            log_support,
        }
    }

    /// `coeff * t^alpha * (-ln t)^k` on (0, 1).
    pub fn unit(coeff: Scalar, alpha: Scalar, k: Scalar) -> Self {
        Self::new(coeff, alpha, k, Scalar::zero())
    }

    /// `coeff * t^m` on (0, 1).
    pub fn monomial(coeff: Scalar, m: i64) -> Self {
        Self::unit(coeff, Scalar::int(m), Scalar::zero())
    }

    pub fn validate(&self) -> Result<()> {
        let minus_one = Scalar::int(-1);
        if self.alpha <= minus_one {
            return Err(Error::InvalidMeasure(format!(
                "term exponent alpha = {} must exceed -1",
                self.alpha
            )));
        }
        if self.k <= minus_one {
            return Err(Error::InvalidMeasure(format!(
                "term log power k = {} must exceed -1",
                self.k
            )));
        }
        if self.log_support.is_negative() {
            return Err(Error::InvalidMeasure(format!(
                "term log_support = {} must be nonnegative",
                self.log_support
            )));
        }
        Ok(())
    }

    /// Right end `c` of the support interval (0, c).
    pub fn support_end(&self) -> Scalar {
        (-&self.log_support).exp()
    }

    /// True when `k` is a nonnegative integer, the symbolic convolution family.
    pub fn in_symbolic_family(&self) -> bool {
        self.k.as_nonneg_integer().is_some()
    }

    /// Same term with a different coefficient.
    pub fn with_coeff(&self, coeff: Scalar) -> Self {
        DensityTerm {
            coeff,
            ..self.clone()
        }
    }

    /// Power moment `∫ t^n dterm`.
    pub fn moment(&self, n: u32) -> Scalar {
        self.moment_at(&Scalar::int(i64::from(n)))
            .expect("nonnegative moments of a valid term exist")
    }

    /// Moment at a real order `s`, defined for `s + alpha + 1 > 0`.
    pub fn moment_at(&self, s: &Scalar) -> Result<Scalar> {
        let base = s + &self.alpha + Scalar::one();
        if !base.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "moment of order {s} diverges for alpha = {}",
                self.alpha
            )));
        }
        let k1 = &self.k + Scalar::one();
        let scale = (-(s * &self.log_support)).exp();
        Ok(&self.coeff * scale * k1.gamma() / base.pow(&k1))
    }

    /// Total mass (zeroth moment).
    pub fn mass(&self) -> Scalar {
        self.moment(0)
    }

    /// Density at `t = e^{-x}` in double precision.
    pub fn density_at_log(&self, x: f64) -> f64 {
        let ell = self.log_support.to_f64();
        if !(x > ell) {
            return 0.0;
        }
        let u = x - ell;
        let alpha = self.alpha.to_f64();
        let k = self.k.to_f64();
        let log_power = if k == 0.0 { 1.0 } else { u.powf(k) };
        self.coeff.to_f64() * (ell - alpha * u).exp() * log_power
    }

    /// Density at `t` in working precision; zero outside (0, c).
    pub fn density_eval(&self, t: &Scalar) -> Scalar {
        let c = self.support_end();
        if !t.is_positive() || *t >= c {
            return Scalar::zero();
        }
        let ratio = t / &c;
        let log_part = if self.k.is_zero() {
            Scalar::one()
        } else {
            (-ratio.ln()).pow(&self.k)
        };
        &self.coeff / &c * ratio.pow(&self.alpha) * log_part
    }

    fn shape_cmp(&self, other: &Self) -> Ordering {
        total_cmp(&self.alpha, &other.alpha)
            .then_with(|| total_cmp(&self.k, &other.k))
            .then_with(|| total_cmp(&self.log_support, &other.log_support))
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.alpha.agrees_to_rounding(&other.alpha)
            && self.k.agrees_to_rounding(&other.k)
            && self.log_support.agrees_to_rounding(&other.log_support)
    }
}

/// Atoms, a mass at zero and density terms, kept in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr")]
pub struct Measure {
    zero_mass: Scalar,
    atoms: Vec<Atom>,
    terms: Vec<DensityTerm>,
}

#[derive(Deserialize)]
struct MeasureRepr {
    #[serde(default)]
    zero_mass: Scalar,
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    terms: Vec<DensityTerm>,
}

impl TryFrom<MeasureRepr> for Measure {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        Measure::new(r.zero_mass, r.atoms, r.terms)
    }
}

impl Measure {
    /// Validates, merges equal atoms and like terms, and sorts canonically.
    pub fn new(zero_mass: Scalar, atoms: Vec<Atom>, terms: Vec<DensityTerm>) -> Result<Self> {
        if zero_mass.is_negative() {
            return Err(Error::InvalidMeasure(format!(
                "mass at zero must be nonnegative, got {zero_mass}"
            )));
        }
        for a in &atoms {
            if a.log_pos.is_negative() {
                return Err(Error::InvalidMeasure(format!(
                    "atom log position {} is negative (position above 1)",
                    a.log_pos
                )));
            }
            if !a.mass.is_positive() {
                return Err(Error::InvalidMeasure(format!(
                    "atom mass {} must be positive",
                    a.mass
                )));
            }
        }
        for t in &terms {
            t.validate()?;
        }
        Ok(Measure {
            zero_mass,
            atoms: merge_atoms(atoms),
            terms: merge_terms(terms),
        })
    }

    pub fn zero() -> Self {
        Measure {
            zero_mass: Scalar::zero(),
            atoms: Vec::new(),
            terms: Vec::new(),
        }
    }

    /// Unit point mass at `t = e^{-log_pos}`.
    pub fn dirac(log_pos: Scalar) -> Result<Self> {
        Measure::new(Scalar::zero(), vec![Atom::new(log_pos, Scalar::one())], Vec::new())
    }

    /// Unit point mass at `t = 0`.
    pub fn dirac_at_zero() -> Self {
        Measure {
            zero_mass: Scalar::one(),
            ..Measure::zero()
        }
    }

    /// Lebesgue measure `1 dt` on (0, 1).
    pub fn lebesgue() -> Self {
        Measure::from_terms(vec![DensityTerm::monomial(Scalar::one(), 0)])
            .expect("Lebesgue term is valid")
    }

    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        Measure::new(Scalar::zero(), atoms, Vec::new())
    }

    pub fn from_terms(terms: Vec<DensityTerm>) -> Result<Self> {
        Measure::new(Scalar::zero(), Vec::new(), terms)
    }

    /// `Σ a_i t^i dt` on (0, 1).
    pub fn polynomial(coeffs: &[Scalar]) -> Result<Self> {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| DensityTerm::monomial(a.clone(), i as i64))
            .collect();
        Measure::from_terms(terms)
    }

    pub fn zero_mass(&self) -> &Scalar {
        &self.zero_mass
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn terms(&self) -> &[DensityTerm] {
        &self.terms
    }

    pub fn is_atomic(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_density(&self) -> bool {
        !self.terms.is_empty()
    }

    /// True when every stored value is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.zero_mass.is_exact()
            && self.atoms.iter().all(|a| a.log_pos.is_exact() && a.mass.is_exact())
            && self
                .terms
                .iter()
                .all(|t| t.coeff.is_exact() && t.alpha.is_exact() && t.k.is_exact() && t.log_support.is_exact())
    }

    /// `factor * self`; the factor must be positive.
    pub fn scaled(&self, factor: &Scalar) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "measure scale factor {factor} must be positive"
            )));
        }
        Ok(Measure {
            zero_mass: &self.zero_mass * factor,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom::new(a.log_pos.clone(), &a.mass * factor))
                .collect(),
            terms: self
                .terms
                .iter()
                .map(|t| t.with_coeff(&t.coeff * factor))
                .collect(),
        })
    }

    pub fn plus(&self, other: &Measure) -> Result<Self> {
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Measure::new(&self.zero_mass + &other.zero_mass, atoms, terms)
    }

    /// Positive linear combination `Σ w_i μ_i`.
    pub fn combination(parts: &[(Scalar, &Measure)]) -> Result<Self> {
        parts.iter().try_fold(Measure::zero(), |acc, (w, m)| acc.plus(&m.scaled(w)?))
    }

    pub fn total_mass(&self) -> Scalar {
        self.moment(0)
    }

    /// Total mass equals one: exactly on the rational path, within `tol` otherwise.
    pub fn is_probability(&self, tol: &Scalar) -> bool {
        let total = self.total_mass();
        if total.is_exact() {
            total.is_one()
        } else {
            (total - Scalar::one()).abs() <= *tol
        }
    }

    /// `γ_n = ∫ t^n dμ`.
    pub fn moment(&self, n: u32) -> Scalar {
        let mut sum = if n == 0 {
            self.zero_mass.clone()
        } else {
            Scalar::zero()
        };
        let nn = Scalar::int(i64::from(n));
        for a in &self.atoms {
            sum = sum + &a.mass * (-(&nn * &a.log_pos)).exp();
        }
        for t in &self.terms {
            sum = sum + t.moment(n);
        }
        sum
    }

    /// Moment at a real order `s > 0`, or `s = 0`.
    pub fn moment_at(&self, s: &Scalar) -> Result<Scalar> {
        if s.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "moment order {s} must be nonnegative"
            )));
        }
        let mut sum = if s.is_zero() {
            self.zero_mass.clone()
        } else {
            Scalar::zero()
        };
        for a in &self.atoms {
            sum = sum + &a.mass * (-(s * &a.log_pos)).exp();
        }
        for t in &self.terms {
            sum = sum + t.moment_at(s)?;
        }
        Ok(sum)
    }

    /// `∫ (1/t) dμ`, or `None` when 1/t is not integrable.
    pub fn inverse_moment(&self) -> Option<Scalar> {
        if self.zero_mass.is_positive() {
            return None;
        }
        let minus_one = Scalar::int(-1);
        let mut sum = Scalar::zero();
        for a in &self.atoms {
            sum = sum + &a.mass * a.log_pos.exp();
        }
        for t in &self.terms {
            if !t.alpha.is_positive() {
                return None;
            }
            sum = sum + t.moment_at(&minus_one).ok()?;
        }
        Some(sum)
    }

    /// Density of the absolutely continuous part at `t ∈ (0, 1)`.
    pub fn density_eval(&self, t: &Scalar) -> Result<Scalar> {
        if !t.is_positive() || *t >= Scalar::one() {
            return Err(Error::InvalidArgument(format!(
                "density evaluation point {t} is outside (0, 1)"
            )));
        }
        Ok(self.terms.iter().map(|term| term.density_eval(t)).sum())
    }

    /// Density at `t = e^{-x}` in double precision.
    pub fn density_at_log(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.density_at_log(x)).sum()
    }

    /// `t^n dμ / ∫ t^n dμ`: the Berger measure of the restriction to the
    /// span of `e_n, e_{n+1}, …`.
    pub fn restrict_and_normalize(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("restriction order must be at least 1".into()));
        }
        let nn = Scalar::int(i64::from(n));
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.log_pos.clone(), &a.mass * (-(&nn * &a.log_pos)).exp()))
            .collect();
        // t^n * (1/c)(t/c)^α(...) = c^n * (1/c)(t/c)^{α+n}(...)
        let terms: Vec<DensityTerm> = self
            .terms
            .iter()
            .map(|t| DensityTerm {
                coeff: &t.coeff * (-(&nn * &t.log_support)).exp(),
                alpha: &t.alpha + &nn,
                k: t.k.clone(),
                log_support: t.log_support.clone(),
            })
            .collect();
        let shifted = Measure::new(Scalar::zero(), atoms, terms)?;
        let total = shifted.total_mass();
        if !total.is_positive() {
            return Err(Error::InvalidMeasure(
                "restricted measure has zero total mass".into(),
            ));
        }
        shifted.scaled(&total.recip())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| total_cmp(&a.log_pos, &b.log_pos));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if last.log_pos.agrees_to_rounding(&a.log_pos) => last.mass = &last.mass + &a.mass,
            _ => out.push(a),
        }
    }
    out
}

fn merge_terms(mut terms: Vec<DensityTerm>) -> Vec<DensityTerm> {
    terms.sort_by(|a, b| a.shape_cmp(b));
    let mut out: Vec<DensityTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.same_shape(&t) => last.coeff = &last.coeff + &t.coeff,
            _ => out.push(t),
        }
    }
    out.retain(|t| !t.coeff.is_zero());
    out
}
