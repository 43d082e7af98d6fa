//! Double-precision quadrature independent of the closed forms.
//!
//! Integrals over `t ∈ (0, 1)` are taken in `x = -ln t`, where family
//! densities become `x^k e^{-ax}`. Segments between breakpoints are covered
//! by Gauss–Legendre panels that shrink geometrically toward both ends,
//! each panel refined by halving until two levels agree.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::scalar::Scalar;

use super::verify::MomentSource;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

const ORDER: usize = 20;
const GRADING: f64 = 0.25;
const MAX_DEPTH: u32 = 48;
const MAX_PANELS: usize = 4000;

fn rule() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        GaussLegendre::new(ORDER.try_into().expect("nonzero order"))
            .iter()
            .map(|(x, w)| (*x, *w))
            .collect()
    })
}

/// A density on (0, 1) evaluated at `t = e^{-x}`.
pub trait LogDensity {
    /// Density at `t = e^{-(anchor + offset)}`. Implementations measure the
    /// distance to any breakpoint equal to `anchor` by `offset` itself, so
    /// singular factors stay accurate arbitrarily close to it.
    fn density_offset(&self, anchor: f64, offset: f64) -> f64;

    /// Points in `x` where the density may be singular or jump, besides 0.
    fn breakpoints(&self) -> Vec<f64>;

    fn density_at_log(&self, x: f64) -> f64 {
        self.density_offset(x, 0.0)
    }
}

impl LogDensity for Measure {
    fn density_offset(&self, anchor: f64, offset: f64) -> f64 {
        self.terms()
            .iter()
            .map(|t| {
                let ell = t.log_support.to_f64();
                let u = (anchor - ell) + offset;
                if !(u > 0.0) {
                    return 0.0;
                }
                let alpha = t.alpha.to_f64();
                let k = t.k.to_f64();
                let log_power = if k == 0.0 { 1.0 } else { u.powf(k) };
                t.coeff.to_f64() * (ell - alpha * u).exp() * log_power
            })
            .sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.terms().iter().map(|t| t.log_support.to_f64()).collect()
    }
}

fn panel(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule().iter().map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

fn adaptive(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = panel(f, a, m);
    let right = panel(f, m, b);
    let refined = left + right;
    let diff = (refined - whole).abs();
    if diff <= tol.max(4.0 * f64::EPSILON * refined.abs()) || m <= a || m >= b {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature(format!(
            "panel [{a:e}, {b:e}] still differs by {diff:e} after {MAX_DEPTH} halvings"
        )));
    }
    Ok(adaptive(f, a, m, left, 0.5 * tol, depth + 1)? + adaptive(f, m, b, right, 0.5 * tol, depth + 1)?)
}

fn refined_panel(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let whole = panel(f, a, b);
    adaptive(f, a, b, whole, tol, 0)
}

/// `∫_0^h g(s) ds` with panels `[h r^{j+1}, h r^j]` closing in on `s = 0`.
/// The remainder near 0 is estimated from the geometric decay of the last
/// panels.
fn graded(g: &mut dyn FnMut(f64) -> f64, h: f64, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    let mut hi = h;
    for j in 0..MAX_PANELS {
        let lo = hi * GRADING;
        let part = refined_panel(g, lo, hi, 1e-3 * tol)?;
        total += part;
        if j >= 3 && part.abs() < 1e-3 * tol {
            if let Some(p) = prev {
                let ratio = if p == 0.0 { 0.0 } else { (part / p).abs() };
                if ratio < 0.95 {
                    return Ok(total + part * ratio / (1.0 - ratio));
                }
            }
        }
        if lo == 0.0 || lo < f64::MIN_POSITIVE {
            return Ok(total);
        }
        prev = Some(part);
        hi = lo;
    }
    Err(Error::Quadrature(format!("endpoint grading did not settle within {MAX_PANELS} panels")))
}

/// `∫_a^b`, with `f(l, r)` evaluated at distance `l` from `a` and `r` from
/// `b`. Both ends may carry integrable singularities.
pub fn integrate_segment(f: &mut dyn FnMut(f64, f64) -> f64, len: f64, tol: f64) -> Result<f64> {
    if !(len > 0.0) {
        return Ok(0.0);
    }
    let half = 0.5 * len;
    let left = graded(&mut |l| f(l, len - l), half, 0.5 * tol)?;
    let right = graded(&mut |r| f(len - r, r), half, 0.5 * tol)?;
    Ok(left + right)
}

/// `∫_0^∞ f(l) dl` for `f` decaying at infinity, singular at most at 0.
pub fn integrate_tail(f: &mut dyn FnMut(f64) -> f64, tol: f64) -> Result<f64> {
    let mut total = graded(f, 1.0, 0.5 * tol)?;
    let mut prev: Option<f64> = None;
    let mut lo = 1.0;
    for j in 0..MAX_PANELS {
        let hi = 2.0 * lo;
        let part = refined_panel(f, lo, hi, 1e-3 * tol)?;
        total += part;
        if j >= 3 && part.abs() < 1e-3 * tol {
            let settled = match prev {
                Some(p) if p != 0.0 => (part / p).abs() < 0.5,
                _ => true,
            };
            if settled {
                return Ok(total);
            }
        }
        if !hi.is_finite() {
            break;
        }
        prev = Some(part);
        lo = hi;
    }
    Err(Error::Quadrature("integrand does not decay at infinity".into()))
}

fn sorted_points(mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|p| p.is_finite() && *p > 0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `∫_0^1 t^n ρ(t) dt` for the density `ρ`, to absolute accuracy `tol`.
pub fn quad_moment(d: &dyn LogDensity, n: u32, tol: f64) -> Result<f64> {
    quad_moment_at(d, f64::from(n), tol)
}

/// Moment of real order `s ≥ 0`.
pub fn quad_moment_at(d: &dyn LogDensity, s: f64, tol: f64) -> Result<f64> {
    integrate_from(d, s, 0.0, tol)
}

/// `∫_0^t ρ(u) du` for `0 < t ≤ 1`.
pub fn quad_mass_below(d: &dyn LogDensity, t: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!("cut point {t} is outside (0, 1]")));
    }
    integrate_from(d, 0.0, -t.ln(), tol)
}

/// `∫_start^∞ e^{-(s+1)x} ρ(e^{-x}) dx`.
fn integrate_from(d: &dyn LogDensity, s: f64, start: f64, tol: f64) -> Result<f64> {
    let mut anchors = vec![start];
    anchors.extend(sorted_points(d.breakpoints()).into_iter().filter(|b| *b > start));
    let segments = anchors.len();
    let share = tol / segments as f64;
    let mut total = 0.0;
    for (i, &a) in anchors.iter().enumerate() {
        // t^s ρ(t) dt = e^{-(s+1)x} ρ(e^{-x}) dx
        let mut f = |l: f64| d.density_offset(a, l) * (-(s + 1.0) * (a + l)).exp();
        total += match anchors.get(i + 1) {
            Some(&b) => integrate_segment(&mut |l, _| f(l), b - a, share)?,
            None => integrate_tail(&mut f, share)?,
        };
    }
    Ok(total)
}

/// Moment of a measure: atoms and the mass at zero in closed form, the
/// density part by quadrature.
pub fn quad_measure_moment(mu: &Measure, n: u32, tol: f64) -> Result<f64> {
    let mut sum = if n == 0 { mu.zero_mass().to_f64() } else { 0.0 };
    for a in mu.atoms() {
        sum += a.mass.to_f64() * (-f64::from(n) * a.log_pos.to_f64()).exp();
    }
    Ok(sum + quad_moment(mu, n, tol)?)
}

/// Quadrature moments of a measure as a [`MomentSource`].
pub struct QuadratureMoments<'a> {
    pub measure: &'a Measure,
    pub tol: f64,
}

impl MomentSource for QuadratureMoments<'_> {
    fn moment(&self, n: u32) -> Result<Scalar> {
        Ok(Scalar::real(quad_measure_moment(self.measure, n, self.tol)?))
    }

    fn method(&self) -> String {
        format!("quadrature (tol {:.0e})", self.tol)
    }
}

/// Density of the square at `a ∈ (0, 1)`:
/// `f(a) = ∫_a^1 g(a/x) g(x) dx/x`, computed as `∫_0^A g(e^{-(A-u)}) g(e^{-u}) du`
/// with `A = -ln a`.
pub fn numeric_convolution(g: &dyn LogDensity, a: f64, tol: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!("convolution point {a} is outside (0, 1)")));
    }
    let big_a = -a.ln();
    let bps = sorted_points(g.breakpoints());
    // Each cut point carries the anchors for both factors: g(u) measured from
    // a breakpoint b at u = b, g(A-u) measured from b at u = A - b.
    #[derive(Clone, Copy)]
    struct Cut {
        at: f64,
        left: f64,
        right: f64,
    }
    let mut cuts = vec![Cut { at: 0.0, left: 0.0, right: big_a }, Cut { at: big_a, left: big_a, right: 0.0 }];
    for &b in &bps {
        if b < big_a {
            cuts.push(Cut { at: b, left: b, right: big_a - b });
            cuts.push(Cut { at: big_a - b, left: big_a - b, right: b });
        }
    }
    cuts.sort_by(|x, y| x.at.total_cmp(&y.at));
    cuts.dedup_by(|x, y| x.at == y.at);
    let share = tol / cuts.len() as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        // u = lo.left + l  and  A - u = hi.right + r
        total += integrate_segment(
            &mut |l, r| g.density_offset(lo.left, l) * g.density_offset(hi.right, r),
            hi.at - lo.at,
            share,
        )?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DensityTerm;

    #[test]
    fn lebesgue_moments() {
        let l = Measure::lebesgue();
        assert!((quad_moment(&l, 3, 1e-12).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn inverse_square_root_log_singularity() {
        let m = Measure::from_terms(vec![DensityTerm::unit(Scalar::pi().sqrt().recip(), Scalar::zero(), Scalar::ratio(-1, 2))])
            .unwrap();
        assert!((quad_moment(&m, 0, 1e-11).unwrap() - 1.0).abs() < 1e-10);
        assert!((quad_moment(&m, 8, 1e-11).unwrap() - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn mass_below_cut() {
        // -ln t dt has mass t(1 - ln t) below t
        let m = Measure::from_terms(vec![DensityTerm::unit(Scalar::one(), Scalar::zero(), Scalar::one())]).unwrap();
        for t in [0.1f64, 0.5, 0.9, 1.0] {
            let got = quad_mass_below(&m, t, 1e-12).unwrap();
            assert!((got - t * (1.0 - t.ln())).abs() < 1e-10, "t={t}: {got}");
        }
        assert!(quad_mass_below(&m, 0.0, 1e-12).is_err());
    }

    #[test]
    fn log_density_moment() {
        let m = Measure::from_terms(vec![DensityTerm::unit(Scalar::one(), Scalar::zero(), Scalar::one())]).unwrap();
        assert!((quad_moment(&m, 4, 1e-12).unwrap() - 1.0 / 25.0).abs() < 1e-10);
    }

    #[test]
    fn strong_singularity_near_breakpoint() {
        let k = Scalar::ratio(-9, 10);
        let term = DensityTerm::new(Scalar::one(), Scalar::ratio(-9, 10), k, Scalar::ratio(3, 2));
        let exact = term.moment(2).to_f64();
        let m = Measure::from_terms(vec![term]).unwrap();
        let got = quad_moment(&m, 2, 1e-11).unwrap();
        assert!((got - exact).abs() < 1e-10 * exact.max(1.0), "{got} vs {exact}");
    }

    #[test]
    fn convolution_of_constant() {
        let l = Measure::lebesgue();
        let a = (-1.0f64).exp();
        assert!((numeric_convolution(&l, a, 1e-12).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn convolution_of_two_t() {
        let g = Measure::polynomial(&[Scalar::zero(), Scalar::int(2)]).unwrap();
        let a = 0.25f64;
        let expected = 4.0 * a * -a.ln();
        assert!((numeric_convolution(&g, a, 1e-12).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn polynomial_square_vanishes_at_one() {
        let g = Measure::polynomial(&[Scalar::int(2), Scalar::int(-2)]).unwrap();
        let near = numeric_convolution(&g, 1.0 - 1e-6, 1e-12).unwrap();
        assert!(near.abs() < 1e-4);
        assert!(numeric_convolution(&g, 1.0, 1e-12).is_err());
    }
}
