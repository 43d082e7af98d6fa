//! Exact-or-real scalar values.
//!
//! A [`Scalar`] is an exact rational whenever every input to a computation
//! was rational and the operation has a rational result, and a multiple
//! precision binary float otherwise. Arithmetic on two rationals never
//! rounds; anything touching a real is carried out at the larger of the
//! operand precision and the working precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Environment variable holding the working precision in decimal digits.
pub const PRECISION_ENV: &str = "BERGERKIT_PRECISION";

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 60;

const GUARD_BITS: u32 = 16;

static WORKING_BITS: OnceLock<u32> = OnceLock::new();

fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

/// Working precision in bits, read once from `BERGERKIT_PRECISION`.
pub fn working_precision() -> u32 {
    *WORKING_BITS.get_or_init(|| {
        let digits = std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .filter(|&d| d >= 17)
            .unwrap_or(DEFAULT_DIGITS);
        digits_to_bits(digits)
    })
}

/// Working precision in decimal digits (guard bits excluded).
pub fn working_digits() -> u32 {
    (f64::from(working_precision() - GUARD_BITS) / std::f64::consts::LOG2_10).floor() as u32
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Rat(Rational),
    Real(Float),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::new())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::from(1))
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rat(Rational::from(n))
    }

    /// The rational `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rat(Rational::from((num, den)))
    }

    pub fn real(x: f64) -> Self {
        Scalar::Real(Float::with_val(working_precision(), x))
    }

    pub fn from_float(x: Float) -> Self {
        Scalar::Real(x)
    }

    pub fn pi() -> Self {
        Scalar::Real(Float::with_val(working_precision(), Constant::Pi))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    pub fn is_real(&self) -> bool {
        !self.is_exact()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(q) => Some(q),
            Scalar::Real(_) => None,
        }
    }

    /// Bits of precision carried by a real value; `None` for rationals.
    pub fn precision(&self) -> Option<u32> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Real(x) => Some(x.prec()),
        }
    }

    pub fn to_float(&self) -> Float {
        self.to_float_prec(working_precision())
    }

    fn to_float_prec(&self, prec: u32) -> Float {
        match self {
            Scalar::Rat(q) => Float::with_val(prec, q),
            Scalar::Real(x) => Float::with_val(prec.max(x.prec()), x),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rat(q) => q.to_f64(),
            Scalar::Real(x) => x.to_f64(),
        }
    }

    /// A real carrying at least `bits` of precision.
    pub fn with_precision(&self, bits: u32) -> Self {
        Scalar::Real(self.to_float_prec(bits))
    }

    /// Equality for exact values; for reals, agreement up to the rounding
    /// of the less precise operand, relative to the larger magnitude or 1.
    pub fn agrees_to_rounding(&self, other: &Scalar) -> bool {
        if self.is_exact() && other.is_exact() {
            return self == other;
        }
        let bits = self.float_prec().min(other.float_prec()) - GUARD_BITS;
        let scale = self.abs().max(other.abs()).max(Scalar::one());
        (self - other).abs() <= Scalar::int(2).powi(-i64::from(bits)) * scale
    }

    /// Degrades to a real at working precision.
    pub fn into_real(self) -> Self {
        match self {
            Scalar::Rat(q) => Scalar::Real(Float::with_val(working_precision(), q)),
            r => r,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.cmp0() == Ordering::Equal,
            Scalar::Real(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(q) => *q == 1,
            Scalar::Real(x) => *x == 1,
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Scalar::Rat(q) => q.cmp0(),
            Scalar::Real(x) => x.cmp0().unwrap_or(Ordering::Equal),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// `Some(n)` if the value is exactly the integer `n`.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Scalar::Rat(q) if *q.denom() == 1 => q.numer().to_i64(),
            _ => None,
        }
    }

    /// `Some(n)` if the value is exactly a nonnegative integer.
    pub fn as_nonneg_integer(&self) -> Option<u32> {
        self.as_integer().and_then(|n| u32::try_from(n).ok())
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Rat(q) => Scalar::Rat(q.clone().abs()),
            Scalar::Real(x) => Scalar::Real(x.clone().abs()),
        }
    }

    pub fn recip(&self) -> Self {
        Scalar::one() / self
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn powi(&self, n: i64) -> Self {
        match self {
            Scalar::Rat(q) => {
                let e = i32::try_from(n).expect("exponent out of range");
                Scalar::Rat(q.clone().pow(e))
            }
            Scalar::Real(x) => {
                let e = i32::try_from(n).expect("exponent out of range");
                Scalar::Real(x.clone().pow(e))
            }
        }
    }

    /// Square root; exact when the argument is the square of a rational.
    pub fn sqrt(&self) -> Self {
        match self {
            Scalar::Rat(q) if q.cmp0() != Ordering::Less => {
                if let Some(r) = exact_root(q, 1, 2) {
                    return Scalar::Rat(r);
                }
                Scalar::Real(Float::with_val(working_precision(), q).sqrt())
            }
            _ => Scalar::Real(self.to_float().sqrt()),
        }
    }

    /// `self^p`. Exact when both are rational and the result is rational.
    pub fn pow(&self, p: &Scalar) -> Self {
        if let (Scalar::Rat(base), Scalar::Rat(e)) = (self, p) {
            if let (Some(num), Some(den)) = (e.numer().to_i32(), e.denom().to_u32()) {
                if base.cmp0() == Ordering::Greater || (den == 1 && num >= 0) {
                    if let Some(r) = exact_root(base, num, den) {
                        return Scalar::Rat(r);
                    }
                }
            }
        }
        if p.is_zero() {
            return Scalar::one();
        }
        let prec = self.float_prec().max(p.float_prec());
        let base = self.to_float_prec(prec);
        let e = p.to_float_prec(prec);
        Scalar::Real(base.pow(e))
    }

    pub fn exp(&self) -> Self {
        if self.is_zero() {
            return Scalar::one();
        }
        Scalar::Real(self.to_float().exp())
    }

    pub fn ln(&self) -> Self {
        if self.is_one() {
            return Scalar::zero();
        }
        Scalar::Real(self.to_float().ln())
    }

    /// Γ(x). Exact for positive integers; MPFR at working precision otherwise.
    pub fn gamma(&self) -> Self {
        if let Some(n) = self.as_integer() {
            if n >= 1 {
                return factorial((n - 1) as u32);
            }
        }
        Scalar::Real(self.to_float().gamma())
    }

    fn float_prec(&self) -> u32 {
        match self {
            Scalar::Rat(_) => working_precision(),
            Scalar::Real(x) => x.prec().max(working_precision()),
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let x = self.to_float();
        if x.is_zero() {
            return "0".to_string();
        }
        x.to_string_radix(10, Some(digits))
    }

    /// Exact rational from a finite decimal literal such as `-1.25e-3`.
    pub fn parse_decimal(s: &str) -> Option<Rational> {
        let s = s.trim();
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
            None => (s, 0),
        };
        let (neg, mantissa) = match mantissa.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((a, b)) => (a, b),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let mut value = Rational::from(Integer::from_str(&digits).ok()?);
        let scale = exponent - frac_part.len() as i32;
        let ten = Rational::from(10);
        value *= ten.pow(scale);
        if neg {
            value = -value;
        }
        Some(value)
    }
}

/// `base^(num/den)` as an exact rational when it exists.
fn exact_root(base: &Rational, num: i32, den: u32) -> Option<Rational> {
    if den == 0 {
        return None;
    }
    let root = |z: &Integer| -> Option<Integer> {
        if den == 1 {
            return Some(z.clone());
        }
        if z.cmp0() == Ordering::Less {
            return None;
        }
        let r = z.clone().root(den);
        (r.clone().pow(den) == *z).then_some(r)
    };
    let n = root(base.numer())?;
    let d = root(base.denom())?;
    let r = Rational::from((n, d));
    if num < 0 && r.cmp0() == Ordering::Equal {
        return None;
    }
    Some(r.pow(num))
}

pub fn factorial(n: u32) -> Scalar {
    Scalar::Rat(Rational::from(Integer::from(Integer::factorial(n))))
}

pub fn binomial(n: u32, k: u32) -> Scalar {
    Scalar::Rat(Rational::from(Integer::from(Integer::binomial_u(n, k))))
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Rat(q)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p/q`, integers and finite decimals (all exact).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('/') {
            return t
                .parse::<Rational>()
                .map(Scalar::Rat)
                .map_err(|_| Error::Parse(format!("invalid rational '{s}'")));
        }
        Scalar::parse_decimal(t)
            .map(Scalar::Rat)
            .ok_or_else(|| Error::Parse(format!("invalid number '{s}'")))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(q) => write!(f, "{q}"),
            Scalar::Real(x) => {
                let digits = ((f64::from(x.prec()) - f64::from(GUARD_BITS)).max(24.0)
                    / std::f64::consts::LOG2_10) as usize;
                write!(f, "{}", self.to_decimal(digits.min(80)))
            }
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a.partial_cmp(b),
            (Scalar::Rat(a), Scalar::Real(b)) => b.partial_cmp(a).map(Ordering::reverse),
            (Scalar::Real(a), Scalar::Rat(b)) => a.partial_cmp(b),
            (Scalar::Real(a), Scalar::Real(b)) => a.partial_cmp(b),
        }
    }
}

/// Total order for sorting; NaN (never produced by valid inputs) sorts last.
pub fn total_cmp(a: &Scalar, b: &Scalar) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Greater)
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(Rational::from(a.$method(b))),
                    _ => {
                        let prec = self.float_prec().max(rhs.float_prec());
                        let a = self.to_float_prec(prec);
                        let b = rhs.to_float_prec(prec);
                        Scalar::Real(a.$method(b))
                    }
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(q) => Scalar::Rat(-q),
            Scalar::Real(x) => Scalar::Real(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

/// File representation: `{"rat": "p/q"}` or `{"dec": "<digits>", "prec": bits}`.
/// Input also accepts a bare integer or an exact string like `"3/4"` or `"0.25"`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Rat { rat: String },
    Dec { dec: String, prec: u32 },
    Int(i64),
    Text(String),
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Scalar::Rat(q) => ScalarRepr::Rat { rat: q.to_string() },
            Scalar::Real(x) => {
                // enough digits to round-trip the binary value
                let digits = (f64::from(x.prec()) / std::f64::consts::LOG2_10).ceil() as usize + 2;
                ScalarRepr::Dec {
                    dec: x.to_string_radix(10, Some(digits)),
                    prec: x.prec(),
                }
            }
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match ScalarRepr::deserialize(deserializer)? {
            ScalarRepr::Rat { rat } => rat
                .parse::<Rational>()
                .map(Scalar::Rat)
                .map_err(|_| D::Error::custom(format!("invalid rational '{rat}'"))),
            ScalarRepr::Dec { dec, prec } => {
                if !(2..=1 << 20).contains(&prec) {
                    return Err(D::Error::custom(format!("unsupported precision {prec}")));
                }
                let parsed = Float::parse(&dec)
                    .map_err(|_| D::Error::custom(format!("invalid decimal '{dec}'")))?;
                Ok(Scalar::Real(Float::with_val(prec, parsed)))
            }
            ScalarRepr::Int(n) => Ok(Scalar::int(n)),
            ScalarRepr::Text(t) => t.parse::<Scalar>().map_err(|e| D::Error::custom(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_stays_exact() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(1, 6);
        let c = &a + &b;
        assert!(c.is_exact());
        assert_eq!(c, Scalar::ratio(1, 2));
        assert_eq!((&a * &b), Scalar::ratio(1, 18));
    }

    #[test]
    fn mixed_arithmetic_degrades_to_real() {
        let s = Scalar::ratio(1, 2) + Scalar::pi();
        assert!(!s.is_exact());
        assert!(s.precision().unwrap() >= working_precision());
    }

    #[test]
    fn sqrt_detects_perfect_squares() {
        assert_eq!(Scalar::ratio(9, 16).sqrt(), Scalar::ratio(3, 4));
        assert!(Scalar::ratio(1, 2).sqrt().is_real());
        let r = Scalar::int(2).sqrt();
        assert!(((&r * &r) - Scalar::int(2)).abs().to_f64() < 1e-50);
    }

    #[test]
    fn rational_powers() {
        assert_eq!(Scalar::ratio(4, 9).pow(&Scalar::ratio(3, 2)), Scalar::ratio(8, 27));
        assert_eq!(Scalar::ratio(2, 3).pow(&Scalar::int(-2)), Scalar::ratio(9, 4));
        assert!(Scalar::int(2).pow(&Scalar::ratio(1, 3)).is_real());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(Scalar::int(5).gamma(), Scalar::int(24));
        let half = Scalar::ratio(1, 2).gamma();
        let sqrt_pi = Scalar::pi().sqrt();
        assert!((half - sqrt_pi).abs().to_f64() < 1e-55);
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!("0.5".parse::<Scalar>().unwrap(), Scalar::ratio(1, 2));
        assert_eq!("-1.25e-1".parse::<Scalar>().unwrap(), Scalar::ratio(-1, 8));
        assert_eq!("3/12".parse::<Scalar>().unwrap(), Scalar::ratio(1, 4));
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn serde_round_trip() {
        let q = Scalar::ratio(-7, 3);
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, r#"{"rat":"-7/3"}"#);
        let back: Scalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);

        let r = Scalar::pi();
        let json = serde_json::to_string(&r).unwrap();
        let back: Scalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);

        assert!(Scalar::int(2).ln().agrees_to_rounding(&(Scalar::int(4).ln() / Scalar::int(2))));
        assert!(!Scalar::real(0.5).agrees_to_rounding(&Scalar::real(0.5 + 1e-15)));
        assert!(Scalar::ratio(1, 3).agrees_to_rounding(&Scalar::ratio(1, 3)));

        let short: Vec<Scalar> = serde_json::from_str(r#"[2, "3/4", "0.25"]"#).unwrap();
        assert_eq!(short, vec![Scalar::int(2), Scalar::ratio(3, 4), Scalar::ratio(1, 4)]);
        assert!(serde_json::from_str::<Scalar>(r#""abc""#).is_err());
    }

    #[test]
    fn cross_variant_comparison() {
        assert!(Scalar::ratio(22, 7) > Scalar::pi());
        assert!(Scalar::ratio(3, 1) < Scalar::pi());
        assert_eq!(Scalar::real(0.5), Scalar::ratio(1, 2));
    }
}
