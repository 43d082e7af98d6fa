//! Weighted shifts through their weight and moment sequences.
//!
//! Weights are stored squared (`α_n²`): moments are products of squared
//! weights, and keeping them squared keeps every rational shift exact,
//! including square roots that happen to be rational.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, DensityTerm, Measure};
use crate::scalar::Scalar;

/// Closed-form generator `n ↦ α_n²` for the weights beyond a prefix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// `α_n = weight` for all n.
    Constant { weight: Scalar },
    /// Agler shift `A_j`: `α_n = sqrt((n+1)/(n+j))`. `A_2` is the Bergman shift.
    Agler { j: u32 },
    /// `α_n = ((n+1)/(n+s))^r`.
    PowerRatio { s: Scalar, r: Scalar },
    /// `α_n^p`.
    Power { rule: Box<TailRule>, p: Scalar },
    /// `α_n β_n`.
    Schur { left: Box<TailRule>, right: Box<TailRule> },
    /// `α_{n+by}`; undefined where `n + by < 0`.
    Offset { rule: Box<TailRule>, by: i64 },
    /// `sqrt(α_n α_{n+1})`.
    Aluthge { rule: Box<TailRule> },
}

impl TailRule {
    /// `α_n²`, or `None` where the rule is undefined.
    pub fn weight_sq(&self, n: i64) -> Option<Scalar> {
        if n < 0 {
            return None;
        }
        match self {
            TailRule::Constant { weight } => Some(weight * weight),
            TailRule::Agler { j } => Some(Scalar::ratio(n + 1, n + i64::from(*j))),
            TailRule::PowerRatio { s, r } => {
                let base = Scalar::int(n + 1) / (s + Scalar::int(n));
                Some(base.pow(&(r * Scalar::int(2))))
            }
            TailRule::Power { rule, p } => rule.weight_sq(n).map(|w| w.pow(p)),
            TailRule::Schur { left, right } => Some(left.weight_sq(n)? * right.weight_sq(n)?),
            TailRule::Offset { rule, by } => rule.weight_sq(n + by),
            TailRule::Aluthge { rule } => Some((rule.weight_sq(n)? * rule.weight_sq(n + 1)?).sqrt()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightRepr", into = "WeightRepr")]
pub struct WeightSequence {
    prefix_sq: Vec<Scalar>,
    tail: Option<TailRule>,
}

/// File form of a shift: explicit squared weights and an optional rule.
#[derive(Clone, Serialize, Deserialize)]
struct WeightRepr {
    #[serde(default)]
    squared_weights: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailRule>,
}

impl TryFrom<WeightRepr> for WeightSequence {
    type Error = Error;
    fn try_from(r: WeightRepr) -> Result<Self> {
        WeightSequence::new(r.squared_weights, r.tail)
    }
}

impl From<WeightSequence> for WeightRepr {
    fn from(w: WeightSequence) -> Self {
        WeightRepr {
            squared_weights: w.prefix_sq,
            tail: w.tail,
        }
    }
}

fn check_weight_sq(index: usize, w: &Scalar) -> Result<()> {
    if !w.is_positive() {
        return Err(Error::InvalidWeight {
            index,
            reason: format!("squared weight {w} is not positive"),
        });
    }
    if *w > Scalar::one() {
        return Err(Error::InvalidWeight {
            index,
            reason: format!("squared weight {w} exceeds 1 (not a contraction)"),
        });
    }
    Ok(())
}

impl WeightSequence {
    /// Builds a sequence from squared weights `α_0², α_1², …` and an
    /// optional rule for the indices past the prefix. The rule must agree
    /// with the prefix wherever both are defined.
    pub fn new(prefix_sq: Vec<Scalar>, tail: Option<TailRule>) -> Result<Self> {
        for (i, w) in prefix_sq.iter().enumerate() {
            check_weight_sq(i, w)?;
            if let Some(rule) = &tail {
                if let Some(r) = rule.weight_sq(i as i64) {
                    if r != *w {
                        return Err(Error::InvalidWeight {
                            index: i,
                            reason: format!("prefix value {w} disagrees with tail rule value {r}"),
                        });
                    }
                }
            }
        }
        Ok(WeightSequence { prefix_sq, tail })
    }

    pub fn from_rule(rule: TailRule) -> Self {
        WeightSequence {
            prefix_sq: Vec::new(),
            tail: Some(rule),
        }
    }

    /// Finite sequence given by its weights (not squared).
    pub fn from_weights(weights: &[Scalar]) -> Result<Self> {
        Self::new(weights.iter().map(|w| w * w).collect(), None)
    }

    pub fn agler(j: u32) -> Self {
        Self::from_rule(TailRule::Agler { j })
    }

    pub fn bergman() -> Self {
        Self::agler(2)
    }

    pub fn constant(weight: Scalar) -> Self {
        Self::from_rule(TailRule::Constant { weight })
    }

    pub fn prefix_sq(&self) -> &[Scalar] {
        &self.prefix_sq
    }

    pub fn tail(&self) -> Option<&TailRule> {
        self.tail.as_ref()
    }

    /// Number of available weights, `None` when a tail rule makes it infinite.
    pub fn len(&self) -> Option<usize> {
        match self.tail {
            Some(_) => None,
            None => Some(self.prefix_sq.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `α_n²`.
    pub fn weight_sq(&self, n: usize) -> Result<Scalar> {
        if let Some(w) = self.prefix_sq.get(n) {
            return Ok(w.clone());
        }
        let w = self
            .tail
            .as_ref()
            .and_then(|r| r.weight_sq(n as i64))
            .ok_or(Error::InsufficientWeights { index: n })?;
        check_weight_sq(n, &w)?;
        Ok(w)
    }

    /// `α_n`.
    pub fn weight(&self, n: usize) -> Result<Scalar> {
        Ok(self.weight_sq(n)?.sqrt())
    }

    pub fn squared_weights(&self, count: usize) -> Result<Vec<Scalar>> {
        (0..count).map(|n| self.weight_sq(n)).collect()
    }

    /// First `count` weights as an explicit finite sequence.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        Ok(WeightSequence {
            prefix_sq: self.squared_weights(count)?,
            tail: None,
        })
    }

    fn map_prefix<F>(&self, count: usize, f: F) -> Result<Vec<Scalar>>
    where
        F: Fn(usize) -> Result<Scalar>,
    {
        (0..count).map(f).collect()
    }
}

/// Closed-form moment generators.
#[derive(Clone, Debug, PartialEq)]
pub enum MomentRule {
    /// Moments of a weight sequence.
    Weights(WeightSequence),
    /// `γ_n = (n+1)^{-q}`, the q-th power of Lebesgue measure.
    InversePower { q: Scalar },
    /// `γ_n = e^{c - c·sqrt(n+1)}`.
    ExpSqrt { c: Scalar },
    /// Moments of a measure, normalized by its total mass.
    Measure(Box<Measure>),
}

impl MomentRule {
    pub fn moment(&self, n: usize) -> Result<Scalar> {
        match self {
            MomentRule::Weights(w) => {
                let mut g = Scalar::one();
                for i in 0..n {
                    g = g * w.weight_sq(i)?;
                }
                Ok(g)
            }
            MomentRule::InversePower { q } => Ok(Scalar::int(n as i64 + 1).pow(&-q)),
            MomentRule::ExpSqrt { c } => Ok((c - c * Scalar::int(n as i64 + 1).sqrt()).exp()),
            MomentRule::Measure(m) => Ok(m.moment(n as u32) / m.total_mass()),
        }
    }
}

/// `γ_0 = 1, γ_1, …` with an optional rule that extends the stored values.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    values: Vec<Scalar>,
    rule: Option<MomentRule>,
}

impl MomentSequence {
    /// Explicit values; requires `γ_0 = 1` and every value positive.
    pub fn new(values: Vec<Scalar>) -> Result<Self> {
        Self::validate(&values)?;
        Ok(MomentSequence { values, rule: None })
    }

    /// The first `count` values of `rule`, extensible on demand.
    pub fn from_rule(rule: MomentRule, count: usize) -> Result<Self> {
        let values = (0..count).map(|n| rule.moment(n)).collect::<Result<Vec<_>>>()?;
        Self::validate(&values)?;
        Ok(MomentSequence {
            values,
            rule: Some(rule),
        })
    }

    fn validate(values: &[Scalar]) -> Result<()> {
        if let Some(g0) = values.first() {
            if !g0.is_one() {
                return Err(Error::InvalidMoments(format!("γ_0 = {g0}, expected 1")));
            }
        }
        if let Some((n, g)) = values.iter().enumerate().find(|(_, g)| !g.is_positive()) {
            return Err(Error::InvalidMoments(format!("γ_{n} = {g} is not positive")));
        }
        Ok(())
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rule(&self) -> Option<&MomentRule> {
        self.rule.as_ref()
    }

    /// `γ_n`, from the stored values or the rule.
    pub fn get(&self, n: usize) -> Result<Scalar> {
        if let Some(g) = self.values.get(n) {
            return Ok(g.clone());
        }
        match &self.rule {
            Some(rule) => rule.moment(n),
            None => Err(Error::InsufficientMoments { index: n }),
        }
    }

    pub fn take(&self, count: usize) -> Result<Vec<Scalar>> {
        (0..count).map(|n| self.get(n)).collect()
    }

    /// `γ_{n+1} ≤ γ_n` over the stored values.
    pub fn is_contractive(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(Scalar::is_exact)
    }
}

/// `γ_0 … γ_{count-1}` with `γ_j = ∏_{i<j} α_i²`.
pub fn moments_from_weights(w: &WeightSequence, count: usize) -> Result<MomentSequence> {
    let mut values = Vec::with_capacity(count);
    let mut g = Scalar::one();
    for j in 0..count {
        if j > 0 {
            g = g * w.weight_sq(j - 1)?;
        }
        values.push(g.clone());
    }
    Ok(MomentSequence {
        values,
        rule: Some(MomentRule::Weights(w.clone())),
    })
}

/// `α_j² = γ_{j+1}/γ_j` for the stored moments.
pub fn weights_from_moments(g: &MomentSequence) -> Result<WeightSequence> {
    if let Some(MomentRule::Weights(w)) = &g.rule {
        return Ok(w.clone());
    }
    let prefix = g
        .values
        .windows(2)
        .map(|p| &p[1] / &p[0])
        .collect::<Vec<_>>();
    WeightSequence::new(prefix, None)
}

/// Weights `α_n^p`; moments become `γ_n^p`.
pub fn pth_power_shift(w: &WeightSequence, p: &Scalar) -> Result<WeightSequence> {
    if !p.is_positive() {
        return Err(Error::InvalidArgument(format!("power p = {p} must be positive")));
    }
    Ok(WeightSequence {
        prefix_sq: w.prefix_sq.iter().map(|x| x.pow(p)).collect(),
        tail: w.tail.clone().map(|rule| TailRule::Power {
            rule: Box::new(rule),
            p: p.clone(),
        }),
    })
}

/// Weights `α_n β_n`.
pub fn schur_product(a: &WeightSequence, b: &WeightSequence) -> Result<WeightSequence> {
    let count = match (a.len(), b.len()) {
        (Some(x), Some(y)) if x != y => {
            return Err(Error::LengthMismatch(format!(
                "Schur product of finite sequences of lengths {x} and {y}"
            )))
        }
        (Some(x), _) | (None, Some(x)) => x,
        (None, None) => a.prefix_sq.len().max(b.prefix_sq.len()),
    };
    let prefix_sq = a.map_prefix(count, |n| Ok(a.weight_sq(n)? * b.weight_sq(n)?))?;
    let tail = match (&a.tail, &b.tail) {
        (Some(l), Some(r)) => Some(TailRule::Schur {
            left: Box::new(l.clone()),
            right: Box::new(r.clone()),
        }),
        _ => None,
    };
    Ok(WeightSequence { prefix_sq, tail })
}

/// Aluthge transform of a shift: weights `sqrt(α_n α_{n+1})`.
pub fn aluthge_transform(w: &WeightSequence) -> Result<WeightSequence> {
    let count = match w.len() {
        Some(0) => 0,
        Some(n) => n - 1,
        None => w.prefix_sq.len(),
    };
    let prefix_sq =
        w.map_prefix(count, |n| Ok((w.weight_sq(n)? * w.weight_sq(n + 1)?).sqrt()))?;
    Ok(WeightSequence {
        prefix_sq,
        tail: w.tail.clone().map(|rule| TailRule::Aluthge { rule: Box::new(rule) }),
    })
}

/// `times`-fold Aluthge transform.
pub fn iterated_aluthge(w: &WeightSequence, times: usize) -> Result<WeightSequence> {
    if times == 0 {
        return Err(Error::InvalidArgument("iteration count must be at least 1".into()));
    }
    (0..times).try_fold(w.clone(), |acc, _| aluthge_transform(&acc))
}

/// Restriction to the span of `e_n, e_{n+1}, …`: weights shifted left by `n`.
pub fn restriction_shift(w: &WeightSequence, n: usize) -> WeightSequence {
    if n == 0 {
        return w.clone();
    }
    WeightSequence {
        prefix_sq: w.prefix_sq.iter().skip(n).cloned().collect(),
        tail: w.tail.clone().map(|rule| TailRule::Offset {
            rule: Box::new(rule),
            by: n as i64,
        }),
    }
}

/// Weight sequence `x, α_0, α_1, …`.
pub fn backstep_weights(w: &WeightSequence, x: &Scalar) -> Result<WeightSequence> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument(format!("back-step weight x = {x} must be positive")));
    }
    let mut prefix_sq = vec![x * x];
    prefix_sq.extend(w.prefix_sq.iter().cloned());
    let tail = w.tail.clone().map(|rule| TailRule::Offset {
        rule: Box::new(rule),
        by: -1,
    });
    WeightSequence::new(prefix_sq, tail)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum BackstepInfeasibility {
    /// `1/t` is not in `L¹(μ)`.
    NotIntegrable,
    /// `x² > 1/‖1/t‖`.
    TooLarge { inverse_moment: Scalar, max_x_squared: Scalar },
}

impl std::fmt::Display for BackstepInfeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BackstepInfeasibility::NotIntegrable => write!(f, "1/t not integrable"),
            BackstepInfeasibility::TooLarge { max_x_squared, .. } => {
                write!(f, "x too large: x^2 must be at most {max_x_squared}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BackstepOutcome {
    Extension(Measure),
    Infeasible(BackstepInfeasibility),
}

/// Berger measure of the back-step extension `x, α_0, α_1, …` of the shift
/// with Berger measure `μ`:
/// `(x²/t) dμ + (1 - x²‖1/t‖) δ_0` when `1/t ∈ L¹(μ)` and `x² ≤ 1/‖1/t‖`.
pub fn backstep_extension(mu: &Measure, x: &Scalar) -> Result<BackstepOutcome> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument(format!("back-step weight x = {x} must be positive")));
    }
    let Some(inv) = mu.inverse_moment() else {
        return Ok(BackstepOutcome::Infeasible(BackstepInfeasibility::NotIntegrable));
    };
    let x2 = x * x;
    let leftover = Scalar::one() - &x2 * &inv;
    if leftover.is_negative() {
        return Ok(BackstepOutcome::Infeasible(BackstepInfeasibility::TooLarge {
            max_x_squared: inv.recip(),
            inverse_moment: inv,
        }));
    }
    let atoms = mu
        .atoms()
        .iter()
        .map(|a| Atom::new(a.log_pos.clone(), &a.mass * &x2 * a.log_pos.exp()))
        .collect();
    // (1/t)·(1/c)(t/c)^α = (1/c)·(1/c)(t/c)^{α-1}
    let terms = mu
        .terms()
        .iter()
        .map(|t| DensityTerm {
            coeff: &t.coeff * &x2 * t.log_support.exp(),
            alpha: &t.alpha - Scalar::one(),
            k: t.k.clone(),
            log_support: t.log_support.clone(),
        })
        .collect();
    Ok(BackstepOutcome::Extension(Measure::new(leftover, atoms, terms)?))
}
