//! Finite-order subnormality tests: Hankel positivity (k-hyponormality)
//! and alternating binomial sums (n-contractivity).
//!
//! Passing every test up to some order is evidence only; no finite sweep
//! proves subnormality.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{min_eigenvalue_f64, psd_test, Matrix};
use crate::scalar::{binomial, Scalar};
use crate::shift::{moments_from_weights, MomentSequence, WeightSequence};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_M_MAX: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct HankelWindow {
    pub m: usize,
    pub k: usize,
    pub entries: Matrix,
}

/// `(k+1)×(k+1)` matrix with entries `γ_{m+i+j}`.
pub fn hankel_matrix(g: &MomentSequence, m: usize, k: usize) -> Result<HankelWindow> {
    let vals = (0..=2 * k).map(|i| g.get(m + i)).collect::<Result<Vec<_>>>()?;
    let entries = (0..=k)
        .map(|i| (0..=k).map(|j| vals[i + j].clone()).collect())
        .collect();
    Ok(HankelWindow { m, k, entries })
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowVerdict {
    pub m: usize,
    pub passed: bool,
    pub min_eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Scalar>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_value: Option<Scalar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HyponormalityReport {
    pub k: usize,
    pub m_max: usize,
    pub passed: bool,
    pub first_failure: Option<usize>,
    pub windows: Vec<WindowVerdict>,
}

/// Tests the Hankel windows of order `k` at base indices `0..=m_max`.
pub fn hankel_sweep(g: &MomentSequence, k: usize, m_max: usize, tol: &Scalar) -> Result<HyponormalityReport> {
    let mut windows = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let h = hankel_matrix(g, m, k)?;
        let out = psd_test(&h.entries, tol);
        windows.push(WindowVerdict {
            m,
            passed: out.psd,
            min_eigenvalue: min_eigenvalue_f64(&h.entries),
            witness: out.witness,
            witness_value: out.witness_value,
        });
    }
    let first_failure = windows.iter().find(|w| !w.passed).map(|w| w.m);
    Ok(HyponormalityReport {
        k,
        m_max,
        passed: first_failure.is_none(),
        first_failure,
        windows,
    })
}

/// k-hyponormality of the shift with weights `w`, tested on windows
/// `m = 0..=m_max`.
pub fn is_k_hyponormal(w: &WeightSequence, k: usize, m_max: usize, tol: &Scalar) -> Result<HyponormalityReport> {
    let g = moments_from_weights(w, m_max + 2 * k + 1)?;
    hankel_sweep(&g, k, m_max, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractivityReport {
    pub n: usize,
    pub m_max: usize,
    pub passed: bool,
    pub first_failure: Option<usize>,
    /// `Σ_j (-1)^j C(n,j) γ_{m+j}` for each m.
    pub sums: Vec<Scalar>,
}

/// n-th forward difference `Σ_j (-1)^j C(n,j) γ_{m+j}`, with the size of
/// the largest summand for rounding control.
fn alternating_sum(g: &MomentSequence, n: usize, m: usize) -> Result<(Scalar, Scalar)> {
    let mut sum = Scalar::zero();
    let mut largest = Scalar::zero();
    for j in 0..=n {
        let term = binomial(n as u32, j as u32) * g.get(m + j)?;
        largest = largest.max(term.abs());
        sum = if j % 2 == 0 { sum + term } else { sum - term };
    }
    Ok((sum, largest))
}

/// Checks `Σ_j (-1)^j C(n,j) γ_{m+j} ≥ 0` for `m = 0..=m_max`. Exact for
/// rational moments; real sums are allowed a rounding slack of a few ulps
/// of the largest summand.
pub fn is_n_contractive(g: &MomentSequence, n: usize, m_max: usize) -> Result<ContractivityReport> {
    let mut sums = Vec::with_capacity(m_max + 1);
    let mut first_failure = None;
    for m in 0..=m_max {
        let (s, largest) = alternating_sum(g, n, m)?;
        let slack = match s.precision() {
            Some(bits) => largest * Scalar::int(2).powi(-(i64::from(bits) - 16)),
            None => Scalar::zero(),
        };
        if first_failure.is_none() && s < -slack {
            first_failure = Some(m);
        }
        sums.push(s);
    }
    Ok(ContractivityReport {
        n,
        m_max,
        passed: first_failure.is_none(),
        first_failure,
        sums,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityScan {
    pub max_order: usize,
    pub m_max: usize,
    pub passed: bool,
    pub orders: Vec<ContractivityReport>,
}

impl MonotonicityScan {
    /// Plain-text summary, one line per order.
    pub fn table(&self) -> String {
        let mut out = String::from("order  passed  first_failure\n");
        for r in &self.orders {
            let ff = r.first_failure.map_or_else(|| "-".to_string(), |m| m.to_string());
            out.push_str(&format!("{:>5}  {:>6}  {:>13}\n", r.n, r.passed, ff));
        }
        out
    }
}

/// Runs `is_n_contractive` for `n = 1..=max_order`.
pub fn complete_monotonicity_scan(g: &MomentSequence, max_order: usize, m_max: usize) -> Result<MonotonicityScan> {
    let orders = (1..=max_order)
        .map(|n| is_n_contractive(g, n, m_max))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotonicityScan {
        max_order,
        m_max,
        passed: orders.iter().all(|r| r.passed),
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::MomentRule;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn bergman_hilbert_window() {
        let g = moments_from_weights(&WeightSequence::bergman(), 5).unwrap();
        let h = hankel_matrix(&g, 0, 2).unwrap();
        let expected: Matrix = (0..3).map(|i| (0..3).map(|j| q(1, i + j + 1)).collect()).collect();
        assert_eq!(h.entries, expected);
        assert_eq!(hankel_matrix(&g, 3, 0).unwrap().entries, vec![vec![q(1, 4)]]);
        let finite = MomentSequence::new(g.values().to_vec()).unwrap();
        assert!(hankel_matrix(&finite, 2, 2).is_err());
    }

    #[test]
    fn constant_moments_all_ones_window() {
        let g = MomentSequence::new(vec![Scalar::one(); 8]).unwrap();
        let h = hankel_matrix(&g, 2, 2).unwrap();
        assert!(h.entries.iter().flatten().all(Scalar::is_one));
        assert!(hankel_sweep(&g, 2, 3, &Scalar::zero()).unwrap().passed);
    }

    #[test]
    fn bergman_is_three_hyponormal() {
        let r = is_k_hyponormal(&WeightSequence::bergman(), 3, 10, &Scalar::zero()).unwrap();
        assert!(r.passed);
        assert_eq!(r.windows.len(), 11);
    }

    #[test]
    fn hyponormality_is_increasing_weights() {
        let up = WeightSequence::new(vec![q(1, 4), q(1, 2), q(3, 4), Scalar::one()], None).unwrap();
        assert!(is_k_hyponormal(&up, 1, 2, &Scalar::zero()).unwrap().passed);
        let down = WeightSequence::new(vec![q(1, 2), q(1, 4), q(3, 4), Scalar::one()], None).unwrap();
        let r = is_k_hyponormal(&down, 1, 2, &Scalar::zero()).unwrap();
        assert_eq!(r.first_failure, Some(0));
        assert!(r.windows[0].witness_value.as_ref().unwrap().is_negative());
    }

    #[test]
    fn bergman_two_contractive_sum() {
        let g = moments_from_weights(&WeightSequence::bergman(), 3).unwrap();
        let r = is_n_contractive(&g, 2, 0).unwrap();
        assert!(r.passed);
        assert_eq!(r.sums[0], q(1, 3));
    }

    #[test]
    fn constant_moments_are_boundary() {
        let g = MomentSequence::new(vec![Scalar::one(); 12]).unwrap();
        for n in 1..5 {
            let r = is_n_contractive(&g, n, 5).unwrap();
            assert!(r.passed);
            assert!(r.sums.iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn monotonicity_scan_cases() {
        let g = moments_from_weights(&WeightSequence::bergman(), 30).unwrap();
        assert!(complete_monotonicity_scan(&g, 6, 20).unwrap().passed);

        let sq = MomentSequence::from_rule(MomentRule::InversePower { q: Scalar::int(2) }, 30).unwrap();
        assert!(complete_monotonicity_scan(&sq, 6, 20).unwrap().passed);

        let bumpy = MomentSequence::new(vec![q(1, 1), q(1, 2), q(1, 3), q(1, 2), q(1, 4)]).unwrap();
        let scan = complete_monotonicity_scan(&bumpy, 1, 3).unwrap();
        assert!(!scan.passed);
        assert_eq!(scan.orders[0].first_failure, Some(2));
        assert!(scan.table().contains("false"));
    }
}
