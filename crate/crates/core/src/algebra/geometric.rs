//! Square roots on a geometric support `{r^n}` via power series.
//!
//! With masses `ρ_n` at `r^n`, squaring the measure squares the generating
//! series `Σ ρ_n z^n`, independently of `r`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{Atom, Measure};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct GeometricRoot {
    /// `φ_0, φ_1, …` with `(Σ φ_n z^n)² = Σ ρ_n z^n` through the given order.
    pub coefficients: Vec<Scalar>,
    /// Largest `|ρ_n - (φ ∗ φ)_n|` when the series is squared back.
    pub residual: Scalar,
}

impl GeometricRoot {
    /// Atoms `φ_n` at `r^n`, for `0 < r < 1`.
    pub fn measure(&self, r: &Scalar) -> Result<Measure> {
        if !r.is_positive() || *r >= Scalar::one() {
            return Err(Error::InvalidArgument(format!("ratio r = {r} must lie in (0, 1)")));
        }
        let step = -r.ln();
        let atoms = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_positive())
            .map(|(n, c)| Atom::new(&step * Scalar::int(n as i64), c.clone()))
            .collect();
        Measure::atomic(atoms)
    }
}

/// Cauchy square of a truncated series.
pub fn series_square(phi: &[Scalar]) -> Vec<Scalar> {
    (0..phi.len())
        .map(|n| (0..=n).map(|i| &phi[i] * &phi[n - i]).sum())
        .collect()
}

/// `φ_0 = sqrt(ρ_0)`, `φ_n = (ρ_n - Σ_{0<i<n} φ_i φ_{n-i}) / (2 φ_0)`.
/// Fails when a coefficient comes out negative.
pub fn sqrt_geometric(rho: &[Scalar]) -> Result<GeometricRoot> {
    let Some(rho0) = rho.first() else {
        return Err(Error::InvalidArgument("empty mass sequence".into()));
    };
    if !rho0.is_positive() {
        return Err(Error::InvalidArgument(format!("leading mass {rho0} must be positive")));
    }
    let phi0 = rho0.sqrt();
    let two_phi0 = Scalar::int(2) * &phi0;
    let mut phi = vec![phi0];
    for n in 1..rho.len() {
        let cross: Scalar = (1..n).map(|i| &phi[i] * &phi[n - i]).sum();
        let c = (&rho[n] - cross) / &two_phi0;
        if c.is_negative() {
            return Err(Error::NoRoot(format!(
                "coefficient {n} of the series square root is negative ({})",
                c.to_decimal(12)
            )));
        }
        phi.push(c);
    }
    let residual = series_square(&phi)
        .iter()
        .zip(rho)
        .map(|(a, b)| (a - b).abs())
        .fold(Scalar::zero(), Scalar::max);
    Ok(GeometricRoot {
        coefficients: phi,
        residual,
    })
}
