use serde::Serialize;

use super::Measure;
use crate::scalar::{total_cmp, Scalar};

/// Closed support of a measure in the atom + density model.
///
/// Atom positions are kept in log coordinates. The density part of a
/// family measure is supported on `[0, e^{-density_floor}]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Support {
    pub has_zero: bool,
    pub atom_logs: Vec<Scalar>,
    pub density_floor: Option<Scalar>,
}

impl Support {
    pub fn atom_count(&self) -> usize {
        self.atom_logs.len() + usize::from(self.has_zero)
    }

    /// Support of the square measure: pairwise products of this support.
    pub fn squared(&self) -> Support {
        let mut logs: Vec<Scalar> = Vec::new();
        for (i, a) in self.atom_logs.iter().enumerate() {
            for b in &self.atom_logs[i..] {
                logs.push(a + b);
            }
        }
        sort_dedup(&mut logs);
        let density_floor = self.density_floor.as_ref().map(|d| {
            let nearest = match self.atom_logs.first() {
                Some(a) if a < d => a.clone(),
                _ => d.clone(),
            };
            d + &nearest
        });
        Support {
            has_zero: self.has_zero,
            atom_logs: logs,
            density_floor,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportCheck {
    pub matches: bool,
    /// Pairwise products of the candidate root's support.
    pub expected: Support,
    pub found: Support,
}

pub(crate) fn sort_dedup(v: &mut Vec<Scalar>) {
    v.sort_by(total_cmp);
    v.dedup_by(|a, b| a.agrees_to_rounding(b));
}

pub fn support_set(mu: &Measure) -> Support {
    let mut atom_logs: Vec<Scalar> = mu.atoms().iter().map(|a| a.log_pos.clone()).collect();
    sort_dedup(&mut atom_logs);
    let density_floor = mu
        .terms()
        .iter()
        .map(|t| t.log_support.clone())
        .min_by(total_cmp);
    Support {
        has_zero: mu.zero_mass().is_positive(),
        atom_logs,
        density_floor,
    }
}

/// Checks `supp(μ) = closure(supp(ν)²)`. Atom sets are compared exactly in
/// log coordinates; density supports are compared as intervals `[0, c]`.
pub fn support_square_check(mu: &Measure, nu: &Measure) -> SupportCheck {
    let expected = support_set(nu).squared();
    let found = support_set(mu);
    SupportCheck {
        matches: expected == found,
        expected,
        found,
    }
}
