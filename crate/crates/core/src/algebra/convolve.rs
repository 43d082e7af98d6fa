//! Squares of measures through multiplicative convolution.
//!
//! A basis term `U(α, k)` with support `(0, e^{-ℓ})` has moment
//! `e^{-sℓ} Γ(k+1)/(s+α+1)^{k+1}`, so the convolution of two terms is read
//! off from the product of these rational functions of `s`.

use crate::error::{Error, Result};
use crate::measure::{Atom, DensityTerm, Measure};
use crate::scalar::Scalar;

use super::partial_fraction::PartialFractionExpansion;

/// Moments compared by the internal consistency check of `square_measure`.
pub const SELF_CHECK_MOMENTS: u32 = 12;

/// Multiplicative convolution `t1 ∗ t2` expressed in the density family.
///
/// Equal exponents give a single term with log power `j+k+1` (this works
/// for any real `j, k > -1`). Distinct exponents require integer log powers
/// and expand into terms at both exponents.
pub fn convolve_terms(t1: &DensityTerm, t2: &DensityTerm) -> Result<Vec<DensityTerm>> {
    let coeff = &t1.coeff * &t2.coeff;
    let log_support = &t1.log_support + &t2.log_support;
    let one = Scalar::one();

    if t1.alpha == t2.alpha {
        let j1 = &t1.k + &one;
        let k1 = &t2.k + &one;
        let jk = &j1 + &k1;
        let beta = j1.gamma() * k1.gamma() / jk.gamma();
        return Ok(vec![DensityTerm::new(coeff * beta, t1.alpha.clone(), &jk - &one, log_support)]);
    }

    let (Some(j), Some(k)) = (t1.k.as_nonneg_integer(), t2.k.as_nonneg_integer()) else {
        return Err(Error::OutsideFamily(format!(
            "convolution of terms with distinct exponents needs integer log powers, got k = {} and k = {}",
            t1.k, t2.k
        )));
    };
    // Γ(j+1)Γ(k+1)/((s+α+1)^{j+1}(s+β+1)^{k+1}); a pole of order r is the
    // moment function of U(·, r-1) divided by (r-1)!.
    let scale = coeff * (&t1.k + &one).gamma() * (&t2.k + &one).gamma();
    let pf = PartialFractionExpansion::new(&t1.alpha, j + 1, &t2.alpha, k + 1)?;
    Ok(pf
        .parts
        .iter()
        .filter(|f| !f.coeff.is_zero())
        .map(|f| {
            let k_out = f.order - 1;
            DensityTerm::new(
                &scale * &f.coeff / Scalar::int(i64::from(k_out) + 1).gamma(),
                f.alpha.clone(),
                Scalar::int(i64::from(k_out)),
                log_support.clone(),
            )
        })
        .collect())
}

fn atoms_product(atoms: &[Atom]) -> Vec<Atom> {
    let two = Scalar::int(2);
    let mut out = Vec::with_capacity(atoms.len() * (atoms.len() + 1) / 2);
    for (i, a) in atoms.iter().enumerate() {
        out.push(Atom::new(&a.log_pos + &a.log_pos, &a.mass * &a.mass));
        for b in &atoms[i + 1..] {
            out.push(Atom::new(&a.log_pos + &b.log_pos, &two * &a.mass * &b.mass));
        }
    }
    out
}

/// Square of a purely atomic measure: masses of pairs grouped by product.
pub fn square_atomic(nu: &Measure) -> Result<Measure> {
    if nu.has_density() {
        return Err(Error::InvalidArgument("square_atomic needs a purely atomic measure".into()));
    }
    let z = nu.zero_mass();
    let zero_mass = z * (Scalar::int(2) * nu.total_mass() - z);
    Measure::new(zero_mass, atoms_product(nu.atoms()), Vec::new())
}

/// The square `ν²`: the image of `ν × ν` under `(s, t) ↦ st`.
///
/// The result is checked against `γ_n(ν)²` for the first few moments,
/// exactly on the rational path and to a rounding allowance otherwise.
pub fn square_measure(nu: &Measure) -> Result<Measure> {
    let two = Scalar::int(2);
    let z = nu.zero_mass();
    let zero_mass = z * (&two * nu.total_mass() - z);

    let atoms = atoms_product(nu.atoms());

    let mut terms = Vec::new();
    for a in nu.atoms() {
        for t in nu.terms() {
            terms.push(DensityTerm::new(
                &two * &a.mass * &t.coeff,
                t.alpha.clone(),
                t.k.clone(),
                &t.log_support + &a.log_pos,
            ));
        }
    }
    let ts = nu.terms();
    for (i, t1) in ts.iter().enumerate() {
        terms.extend(convolve_terms(t1, t1)?);
        for t2 in &ts[i + 1..] {
            for t in convolve_terms(t1, t2)? {
                let c = &two * &t.coeff;
                terms.push(t.with_coeff(c));
            }
        }
    }
    let mu = Measure::new(zero_mass, atoms, terms)?;
    self_check(nu, &mu)?;
    Ok(mu)
}

fn self_check(nu: &Measure, mu: &Measure) -> Result<()> {
    for n in 0..=SELF_CHECK_MOMENTS {
        let g = nu.moment(n);
        let lhs = mu.moment(n);
        let rhs = &g * &g;
        let ok = if lhs.is_exact() && rhs.is_exact() {
            lhs == rhs
        } else {
            let bits = lhs.precision().unwrap_or(64).min(rhs.precision().unwrap_or(64));
            let allowance = Scalar::int(2).powi(-(i64::from(bits) / 2)) * rhs.abs().max(Scalar::one());
            (&lhs - &rhs).abs() <= allowance
        };
        if !ok {
            return Err(Error::SelfCheck(format!(
                "moment {n} of the square is {lhs}, expected {rhs}"
            )));
        }
    }
    Ok(())
}
