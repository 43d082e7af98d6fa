//! Moment matching verdicts.

use serde::Serialize;

use crate::error::Result;
use crate::measure::Measure;
use crate::scalar::{working_digits, Scalar};
use crate::shift::{MomentRule, MomentSequence};

/// Anything with power moments `γ_0, γ_1, …`.
pub trait MomentSource {
    fn moment(&self, n: u32) -> Result<Scalar>;

    /// Short description for reports.
    fn method(&self) -> String;
}

impl MomentSource for Measure {
    fn moment(&self, n: u32) -> Result<Scalar> {
        Ok(Measure::moment(self, n))
    }

    fn method(&self) -> String {
        if self.is_exact() {
            "closed form (exact)".into()
        } else {
            format!("closed form ({} digits)", working_digits())
        }
    }
}

impl MomentSource for MomentSequence {
    fn moment(&self, n: u32) -> Result<Scalar> {
        self.get(n as usize)
    }

    fn method(&self) -> String {
        "moment sequence".into()
    }
}

impl MomentSource for MomentRule {
    fn moment(&self, n: u32) -> Result<Scalar> {
        MomentRule::moment(self, n as usize)
    }

    fn method(&self) -> String {
        "moment rule".into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n_checked: usize,
    pub tol: f64,
    /// Residual at each n, as defined by the check that produced the report.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub first_failure: Option<usize>,
    pub passed: bool,
    /// Every residual was computed in exact rational arithmetic.
    pub exact: bool,
    pub method: String,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Builds a report; `passed` holds iff every residual is at most `tol`.
    pub fn from_residuals(residuals: &[Scalar], tol: &Scalar, method: impl Into<String>) -> Self {
        let first_failure = residuals.iter().position(|r| r > tol);
        let values: Vec<f64> = residuals.iter().map(Scalar::to_f64).collect();
        VerificationReport {
            n_checked: residuals.len(),
            tol: tol.to_f64(),
            max_residual: values.iter().copied().fold(0.0, f64::max),
            residuals: values,
            first_failure,
            passed: first_failure.is_none(),
            exact: residuals.iter().all(Scalar::is_exact),
            method: method.into(),
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text table, one row per n.
    pub fn table(&self) -> String {
        let mut out = format!("method: {}\n", self.method);
        out.push_str("   n  residual                 ok\n");
        for (n, r) in self.residuals.iter().enumerate() {
            let ok = *r <= self.tol;
            out.push_str(&format!("{n:>4}  {r:<23.6e}  {ok}\n"));
        }
        out.push_str(&format!(
            "max residual {:.6e} (tol {:.1e}): {}\n",
            self.max_residual,
            self.tol,
            if self.passed { "pass" } else { "fail" }
        ));
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }
}

/// Checks `γ_n(μ) = γ_n(ν)²` for `n = 0..=n_max`. Residuals are
/// `|γ_n(μ) - γ_n(ν)²|`.
pub fn verify_square(
    mu: &dyn MomentSource,
    nu: &dyn MomentSource,
    n_max: u32,
    tol: &Scalar,
) -> Result<VerificationReport> {
    let residuals = (0..=n_max)
        .map(|n| {
            let g = nu.moment(n)?;
            Ok((mu.moment(n)? - &g * &g).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    let method = format!("square: {} vs {}", mu.method(), nu.method());
    Ok(VerificationReport::from_residuals(&residuals, tol, method))
}

/// Checks `γ_n(μ) = target_n` for `n = 0..=n_max`, residuals `|γ_n(μ) - target_n|`.
pub fn verify_moments(
    mu: &dyn MomentSource,
    target: &dyn MomentSource,
    n_max: u32,
    tol: &Scalar,
) -> Result<VerificationReport> {
    let residuals = (0..=n_max)
        .map(|n| Ok((mu.moment(n)? - target.moment(n)?).abs()))
        .collect::<Result<Vec<_>>>()?;
    let method = format!("moments: {} vs {}", mu.method(), target.method());
    Ok(VerificationReport::from_residuals(&residuals, tol, method))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DensityTerm;

    #[test]
    fn log_density_is_square_of_lebesgue() {
        let log = Measure::from_terms(vec![DensityTerm::unit(Scalar::one(), Scalar::zero(), Scalar::one())]).unwrap();
        let r = verify_square(&log, &Measure::lebesgue(), 30, &Scalar::real(1e-10)).unwrap();
        assert!(r.passed);
        assert!(r.exact);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn lebesgue_is_not_its_own_square() {
        let l = Measure::lebesgue();
        let r = verify_square(&l, &l, 2, &Scalar::real(1e-10)).unwrap();
        assert!(!r.passed);
        assert_eq!(r.first_failure, Some(1));
        assert!((r.residuals[1] - 0.25).abs() < 1e-15);
        assert!(r.table().contains("fail"));
    }

    #[test]
    fn moments_against_rule() {
        let q = Scalar::ratio(3, 2);
        let mu = Measure::from_terms(vec![DensityTerm::unit(q.gamma().recip(), Scalar::zero(), Scalar::ratio(1, 2))]).unwrap();
        let rule = MomentRule::InversePower { q };
        let r = verify_moments(&mu, &rule, 25, &Scalar::real(1e-10)).unwrap();
        assert!(r.passed, "{}", r.table());
        let json = r.to_json().unwrap();
        assert!(json.contains("\"passed\": true"));
    }
}
