//! Partial fractions of `1/((s+α+1)^p (s+β+1)^q)` for distinct `α, β`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

/// `coeff / (s + alpha + 1)^order`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialFraction {
    pub alpha: Scalar,
    pub order: u32,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialFractionExpansion {
    pub alpha: Scalar,
    pub p: u32,
    pub beta: Scalar,
    pub q: u32,
    pub parts: Vec<PartialFraction>,
}

impl PartialFractionExpansion {
    /// Expands `1/((s+α+1)^p (s+β+1)^q)`.
    ///
    /// With `w = s+α+1` and `d = β-α`, the principal part at `w = 0` comes
    /// from `(w+d)^{-q} = Σ_i (-1)^i C(q+i-1, i) w^i / d^{q+i}`.
    pub fn new(alpha: &Scalar, p: u32, beta: &Scalar, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidArgument("pole orders must be positive".into()));
        }
        let d = beta - alpha;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!("poles coincide at alpha = {alpha}")));
        }
        let mut parts = principal_part(alpha, p, q, &d);
        parts.extend(principal_part(beta, q, p, &(-&d)));
        Ok(PartialFractionExpansion {
            alpha: alpha.clone(),
            p,
            beta: beta.clone(),
            q,
            parts,
        })
    }

    /// `Σ coeff/(s+α+1)^order` at `s`.
    pub fn evaluate(&self, s: &Scalar) -> Scalar {
        self.parts
            .iter()
            .map(|f| &f.coeff / (s + &f.alpha + Scalar::one()).powi(i64::from(f.order)))
            .sum()
    }

    /// The product being expanded, at `s`.
    pub fn target(&self, s: &Scalar) -> Scalar {
        let one = Scalar::one();
        ((s + &self.alpha + &one).powi(i64::from(self.p)) * (s + &self.beta + &one).powi(i64::from(self.q))).recip()
    }
}

/// Coefficients of `w^{-r}`, `r = own..1`, in `w^{-own} (w+d)^{-other}`.
fn principal_part(alpha: &Scalar, own: u32, other: u32, d: &Scalar) -> Vec<PartialFraction> {
    (0..own)
        .map(|i| {
            let sign = if i % 2 == 0 { Scalar::one() } else { Scalar::int(-1) };
            let coeff = sign * binomial(other + i - 1, i) / d.powi(i64::from(other + i));
            PartialFraction {
                alpha: alpha.clone(),
                order: own - i,
                coeff,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn simple_poles() {
        // 1/((s+1)(s+2)) = 1/(s+1) - 1/(s+2)
        let e = PartialFractionExpansion::new(&Scalar::zero(), 1, &Scalar::one(), 1).unwrap();
        assert_eq!(e.parts.len(), 2);
        assert_eq!(e.parts[0].coeff, Scalar::one());
        assert_eq!(e.parts[1].coeff, Scalar::int(-1));
    }

    #[test]
    fn reconstructs_at_rational_points() {
        let cases = [(q(1, 13), 2, Scalar::int(7), 3), (q(-1, 2), 4, q(5, 3), 1), (Scalar::zero(), 3, Scalar::int(2), 5)];
        for (a, p, b, qq) in cases {
            let e = PartialFractionExpansion::new(&a, p, &b, qq).unwrap();
            assert_eq!(e.parts.len() as u32, p + qq);
            for s in [q(0, 1), q(3, 7), Scalar::int(11), q(29, 4)] {
                assert_eq!(e.evaluate(&s), e.target(&s));
            }
        }
    }

    #[test]
    fn rejects_equal_poles() {
        assert!(PartialFractionExpansion::new(&Scalar::one(), 1, &Scalar::one(), 2).is_err());
        assert!(PartialFractionExpansion::new(&Scalar::one(), 0, &Scalar::zero(), 2).is_err());
    }
}
