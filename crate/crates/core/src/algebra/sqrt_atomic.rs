//! Square roots of finitely atomic measures.
//!
//! If `ν² = μ` then every point of `supp ν` times the top point of `supp ν`
//! lies in `supp μ`, so the root lives on a finite set read off from `μ`.
//! Masses are then forced one at a time from the top down, or obtained all
//! at once from the moment equations `Σ φ_i x_i^n = sqrt(γ_n)`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::measure::support::sort_dedup;
use crate::measure::{Atom, Measure};
use crate::oracle::verify::{verify_square, VerificationReport};
use crate::scalar::{working_precision, Scalar};

use super::convolve::square_atomic;

pub const DEFAULT_SQRT_TOL: f64 = 1e-10;

/// Largest number of optional support points enumerated by the support check.
const SUBSET_SEARCH_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SqrtMethod {
    Algorithmic,
    Vandermonde,
    Generating,
    Catalog,
}

#[derive(Clone, Debug, Serialize)]
pub struct SqrtCandidate {
    pub measure: Measure,
    pub method: SqrtMethod,
    /// Moments of the candidate's square against the target.
    pub report: VerificationReport,
    /// Largest mass difference between the candidate's square and the target.
    pub mass_residual: f64,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum SqrtFailure {
    /// No subset of the admissible points squares onto the target support.
    SupportMismatch {
        target_points: usize,
        candidate_points: usize,
        squared_points: usize,
    },
    NegativeMass {
        method: SqrtMethod,
        log_pos: Scalar,
        mass: Scalar,
    },
    VerificationFailed {
        candidate: Box<SqrtCandidate>,
    },
    PathsDisagree {
        difference: f64,
    },
}

impl fmt::Display for SqrtFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqrtFailure::SupportMismatch {
                target_points,
                candidate_points,
                squared_points,
            } => write!(
                f,
                "support mismatch: admissible root support of {candidate_points} points squares to {squared_points} points, target has {target_points}"
            ),
            SqrtFailure::NegativeMass { method, log_pos, mass } => write!(
                f,
                "negative mass {} forced at t = exp(-{}) ({method:?} path)",
                mass.to_decimal(12),
                log_pos.to_decimal(12)
            ),
            SqrtFailure::VerificationFailed { candidate } => write!(
                f,
                "candidate fails verification: moment residual {:.3e}, mass residual {:.3e}",
                candidate.report.max_residual, candidate.mass_residual
            ),
            SqrtFailure::PathsDisagree { difference } => {
                write!(f, "algorithmic and Vandermonde candidates differ by {difference:.3e}")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomicRoot {
    pub algorithmic: SqrtCandidate,
    pub vandermonde: SqrtCandidate,
    /// Largest mass difference between the two candidates.
    pub path_difference: f64,
}

impl AtomicRoot {
    pub fn measure(&self) -> &Measure {
        &self.algorithmic.measure
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SqrtOutcome {
    Root(AtomicRoot),
    NoRoot(SqrtFailure),
}

/// Admissible root support in log coordinates, with the mass at zero
/// handled separately.
struct Plan {
    /// Positive atoms of the target, ascending in log position.
    target: Vec<Atom>,
    /// Points that may carry root mass, ascending; the first is the top point.
    forced: Vec<Scalar>,
    /// Zero mass of the root.
    zero: Scalar,
    /// Total mass of the root.
    total: Scalar,
}

fn plan(mu: &Measure) -> Result<Plan> {
    if mu.has_density() {
        return Err(Error::InvalidArgument("sqrt_atomic needs a purely atomic measure".into()));
    }
    let total_mu = mu.total_mass();
    if !total_mu.is_positive() {
        return Err(Error::InvalidMeasure("measure has zero total mass".into()));
    }
    let total = total_mu.sqrt();
    // φ_0 (2S - φ_0) = z with the root in [0, S]
    let z = mu.zero_mass();
    let zero = if z.is_zero() {
        Scalar::zero()
    } else {
        &total - (&total_mu - z).sqrt()
    };
    let target = mu.atoms().to_vec();
    let forced = match (target.first(), target.last()) {
        (Some(top), Some(bottom)) => {
            let half_top = &top.log_pos / Scalar::int(2);
            let bottom_root = &bottom.log_pos / Scalar::int(2);
            let mut pts: Vec<Scalar> = target
                .iter()
                .map(|a| &a.log_pos - &half_top)
                .filter(|y| *y <= bottom_root)
                .collect();
            pts.push(bottom_root);
            sort_dedup(&mut pts);
            pts
        }
        _ => Vec::new(),
    };
    Ok(Plan {
        target,
        forced,
        zero,
        total,
    })
}

fn pair_sums(points: &[Scalar]) -> Vec<Scalar> {
    let mut sums = Vec::with_capacity(points.len() * (points.len() + 1) / 2);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i..] {
            sums.push(a + b);
        }
    }
    sort_dedup(&mut sums);
    sums
}

/// Searches subsets of the admissible points, always containing the top and
/// bottom points, whose pairwise sums are exactly the target support.
fn support_check(p: &Plan) -> std::result::Result<Option<Vec<Scalar>>, SqrtFailure> {
    let target: Vec<Scalar> = p.target.iter().map(|a| a.log_pos.clone()).collect();
    let n = p.forced.len();
    let mismatch = || {
        let sq = pair_sums(&p.forced);
        SqrtFailure::SupportMismatch {
            target_points: target.len(),
            candidate_points: n,
            squared_points: sq.len(),
        }
    };
    if n == 0 {
        return Ok(None);
    }
    let bottom_root = p.forced[n - 1].clone();
    let bottom_in_target = target
        .iter()
        .any(|l| l.agrees_to_rounding(&(&p.forced[0] + &bottom_root)));
    if !bottom_in_target {
        return Err(mismatch());
    }
    let optional = &p.forced[1..n.saturating_sub(1).max(1)];
    if optional.len() > SUBSET_SEARCH_LIMIT {
        return Ok(None);
    }
    for mask in 0u64..(1u64 << optional.len()) {
        let mut s = vec![p.forced[0].clone()];
        s.extend(
            optional
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, y)| y.clone()),
        );
        if n > 1 {
            s.push(bottom_root.clone());
        }
        let sums = pair_sums(&s);
        if sums.len() == target.len() && sums.iter().zip(&target).all(|(a, b)| a.agrees_to_rounding(b)) {
            return Ok(Some(s));
        }
    }
    Err(mismatch())
}

fn target_mass(target: &[Atom], log_pos: &Scalar) -> Scalar {
    target
        .iter()
        .find(|a| a.log_pos.agrees_to_rounding(log_pos))
        .map_or_else(Scalar::zero, |a| a.mass.clone())
}

fn build(p: &Plan, points: &[Scalar], masses: &[Scalar]) -> Result<Measure> {
    let atoms = points
        .iter()
        .zip(masses)
        .filter(|(_, m)| m.is_positive())
        .map(|(y, m)| Atom::new(y.clone(), m.clone()))
        .collect();
    Measure::new(p.zero.clone(), atoms, Vec::new())
}

fn negligible(m: &Scalar, tol: &Scalar) -> bool {
    if m.is_exact() {
        m.is_zero()
    } else {
        m.abs() <= *tol
    }
}

/// Masses forced in decreasing position order: the top mass is the square
/// root of the target's top mass, and each further mass is what remains at
/// `top · x_i` after all pairs of already determined points.
fn algorithmic_masses(p: &Plan, points: &[Scalar], tol: &Scalar) -> std::result::Result<Vec<Scalar>, SqrtFailure> {
    let two = Scalar::int(2);
    let top = &points[0];
    let phi0 = target_mass(&p.target, &(top + top)).sqrt();
    let mut masses = vec![phi0.clone()];
    for i in 1..points.len() {
        let at = top + &points[i];
        let mut rest = target_mass(&p.target, &at);
        for a in 1..i {
            for b in a..i {
                if (&points[a] + &points[b]).agrees_to_rounding(&at) {
                    let pair = &masses[a] * &masses[b];
                    rest = rest - if a == b { pair } else { &two * pair };
                }
            }
        }
        let m = rest / (&two * &phi0);
        if m.is_negative() && !negligible(&m, tol) {
            return Err(SqrtFailure::NegativeMass {
                method: SqrtMethod::Algorithmic,
                log_pos: points[i].clone(),
                mass: m,
            });
        }
        masses.push(if negligible(&m, tol) { Scalar::zero() } else { m });
    }
    Ok(masses)
}

/// Rough count of bits lost solving the Vandermonde system on `x_i = e^{-y_i}`:
/// the spread of the powers plus the closeness of the nodes.
fn vandermonde_loss_bits(points: &[Scalar]) -> u32 {
    let ys: Vec<f64> = points.iter().map(Scalar::to_f64).collect();
    let m = ys.len() as f64;
    let spread = ys.iter().copied().fold(0.0, f64::max) * (m - 1.0);
    let mut closeness = 0.0;
    for (i, a) in ys.iter().enumerate() {
        for b in &ys[i + 1..] {
            let (lo, hi) = if a < b { (*a, *b) } else { (*b, *a) };
            // -ln|e^{-lo} - e^{-hi}|
            closeness += lo - (-(-(hi - lo)).exp_m1()).ln();
        }
    }
    ((spread + closeness) / std::f64::consts::LN_2).ceil() as u32 + 64
}

/// Masses from `Σ φ_i x_i^n = sqrt(γ_n)`, `n < M`, with the zero atom's
/// share removed from `n = 0`.
fn vandermonde_masses(
    p: &Plan,
    mu: &Measure,
    points: &[Scalar],
    tol: &Scalar,
) -> Result<std::result::Result<Vec<Scalar>, SqrtFailure>> {
    let m = points.len();
    let bits = working_precision() + vandermonde_loss_bits(points);
    let xs: Vec<Scalar> = points.iter().map(|y| (-y.with_precision(bits)).exp()).collect();
    let a: Vec<Vec<Scalar>> = (0..m)
        .map(|n| xs.iter().map(|x| x.powi(n as i64)).collect())
        .collect();
    let b: Vec<Scalar> = (0..m)
        .map(|n| {
            // the moments themselves must carry the extra precision
            let nn = Scalar::int(n as i64);
            let mut g: Scalar = mu
                .atoms()
                .iter()
                .map(|a| &a.mass * (-(&nn * &a.log_pos).with_precision(bits)).exp())
                .sum();
            if n == 0 {
                g = g + mu.zero_mass();
            }
            let root = g.with_precision(bits).sqrt();
            if n == 0 {
                root - &p.zero
            } else {
                root
            }
        })
        .collect();
    let phi = solve(&a, &b)?;
    for (y, f) in points.iter().zip(&phi) {
        if f.is_negative() && !negligible(f, tol) {
            return Ok(Err(SqrtFailure::NegativeMass {
                method: SqrtMethod::Vandermonde,
                log_pos: y.clone(),
                mass: f.clone(),
            }));
        }
    }
    Ok(Ok(phi
        .into_iter()
        .map(|f| if negligible(&f, tol) { Scalar::zero() } else { f })
        .collect()))
}

fn verify(mu: &Measure, nu: Measure, method: SqrtMethod, tol: &Scalar) -> Result<SqrtCandidate> {
    let squared = square_atomic(&nu)?;
    let mut points: Vec<Scalar> = mu
        .atoms()
        .iter()
        .chain(squared.atoms())
        .map(|a| a.log_pos.clone())
        .collect();
    sort_dedup(&mut points);
    let mut mass_residual = (mu.zero_mass() - squared.zero_mass()).abs();
    for y in &points {
        let d = (target_mass(mu.atoms(), y) - target_mass(squared.atoms(), y)).abs();
        mass_residual = mass_residual.max(d);
    }
    let n_max = (mu.atoms().len() + 1).max(2 * nu.atoms().len() + 2) as u32;
    let report = verify_square(mu, &nu, n_max, tol)?;
    let verified = report.passed && mass_residual <= *tol;
    Ok(SqrtCandidate {
        measure: nu,
        method,
        report,
        mass_residual: mass_residual.to_f64(),
        verified,
    })
}

/// Square root of a finitely atomic measure by mass matching, cross-checked
/// by the Vandermonde moment system. Both candidates must verify and agree.
pub fn sqrt_atomic(mu: &Measure, tol: &Scalar) -> Result<SqrtOutcome> {
    let p = plan(mu)?;
    if p.forced.is_empty() {
        let nu = Measure::new(p.total.clone(), Vec::new(), Vec::new())?;
        let alg = verify(mu, nu.clone(), SqrtMethod::Algorithmic, tol)?;
        let vdm = verify(mu, nu, SqrtMethod::Vandermonde, tol)?;
        return Ok(SqrtOutcome::Root(AtomicRoot {
            algorithmic: alg,
            vandermonde: vdm,
            path_difference: 0.0,
        }));
    }
    let support = match support_check(&p) {
        Ok(s) => s.unwrap_or_else(|| p.forced.clone()),
        Err(f) => return Ok(SqrtOutcome::NoRoot(f)),
    };

    let alg_masses = match algorithmic_masses(&p, &support, tol) {
        Ok(m) => m,
        Err(f) => return Ok(SqrtOutcome::NoRoot(f)),
    };
    let vdm_masses = match vandermonde_masses(&p, mu, &p.forced, tol)? {
        Ok(m) => m,
        Err(f) => return Ok(SqrtOutcome::NoRoot(f)),
    };

    let alg = verify(mu, build(&p, &support, &alg_masses)?, SqrtMethod::Algorithmic, tol)?;
    if !alg.verified {
        return Ok(SqrtOutcome::NoRoot(SqrtFailure::VerificationFailed { candidate: Box::new(alg) }));
    }
    let vdm = verify(mu, build(&p, &p.forced, &vdm_masses)?, SqrtMethod::Vandermonde, tol)?;
    if !vdm.verified {
        return Ok(SqrtOutcome::NoRoot(SqrtFailure::VerificationFailed { candidate: Box::new(vdm) }));
    }

    let mut difference = Scalar::zero();
    for y in &p.forced {
        let d = target_mass(alg.measure.atoms(), y) - target_mass(vdm.measure.atoms(), y);
        difference = difference.max(d.abs());
    }
    let path_difference = difference.to_f64();
    if difference > *tol {
        return Ok(SqrtOutcome::NoRoot(SqrtFailure::PathsDisagree { difference: path_difference }));
    }
    Ok(SqrtOutcome::Root(AtomicRoot {
        algorithmic: alg,
        vandermonde: vdm,
        path_difference,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn tol() -> Scalar {
        Scalar::real(DEFAULT_SQRT_TOL)
    }

    #[test]
    fn three_atoms_from_two() {
        let ln2 = Scalar::int(2).ln();
        let mu = Measure::atomic(vec![
            Atom::new(Scalar::zero(), q(1, 4)),
            Atom::new(ln2.clone(), q(1, 2)),
            Atom::new(&ln2 + &ln2, q(1, 4)),
        ])
        .unwrap();
        let SqrtOutcome::Root(root) = sqrt_atomic(&mu, &tol()).unwrap() else {
            panic!("root expected");
        };
        let atoms = root.measure().atoms();
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0].mass, q(1, 2));
        assert_eq!(atoms[1].log_pos, ln2);
        assert!(root.path_difference < 1e-40);
    }

    #[test]
    fn dirac_at_one() {
        let d = Measure::dirac(Scalar::zero()).unwrap();
        let SqrtOutcome::Root(root) = sqrt_atomic(&d, &tol()).unwrap() else {
            panic!("root expected");
        };
        assert_eq!(root.measure(), &d);
    }

    #[test]
    fn two_atoms_have_no_root() {
        let mu = Measure::atomic(vec![Atom::new(Scalar::zero(), q(1, 2)), Atom::new(q(1, 3), q(1, 2))]).unwrap();
        let SqrtOutcome::NoRoot(f) = sqrt_atomic(&mu, &tol()).unwrap() else {
            panic!("no root expected");
        };
        assert!(matches!(f, SqrtFailure::SupportMismatch { squared_points: 3, target_points: 2, .. }));
        assert!(f.to_string().starts_with("support mismatch"));
    }

    #[test]
    fn zero_atom_root() {
        // ν = (1/4)δ_0 + (3/4)δ_{e^{-1}}
        let nu = Measure::new(q(1, 4), vec![Atom::new(Scalar::one(), q(3, 4))], vec![]).unwrap();
        let mu = square_atomic(&nu).unwrap();
        let SqrtOutcome::Root(root) = sqrt_atomic(&mu, &tol()).unwrap() else {
            panic!("root expected");
        };
        assert_eq!(root.measure(), &nu);
    }

    #[test]
    fn top_atom_below_one() {
        let nu = Measure::atomic(vec![Atom::new(q(1, 2), q(1, 3)), Atom::new(q(3, 2), q(2, 3))]).unwrap();
        let mu = square_atomic(&nu).unwrap();
        let SqrtOutcome::Root(root) = sqrt_atomic(&mu, &tol()).unwrap() else {
            panic!("root expected");
        };
        assert_eq!(root.measure(), &nu);
    }

    #[test]
    fn negative_forced_mass() {
        // supp {1, a, a^2} with too little mass in the middle
        let mu = Measure::atomic(vec![
            Atom::new(Scalar::zero(), q(1, 4)),
            Atom::new(Scalar::one(), q(1, 100)),
            Atom::new(Scalar::int(2), q(74, 100)),
        ])
        .unwrap();
        let SqrtOutcome::NoRoot(f) = sqrt_atomic(&mu, &tol()).unwrap() else {
            panic!("no root expected");
        };
        assert!(matches!(f, SqrtFailure::VerificationFailed { .. } | SqrtFailure::NegativeMass { .. }), "{f}");
    }
}
