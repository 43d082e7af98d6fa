//! Independent numeric checks: quadrature moments and convolutions, and
//! moment-matching reports.

pub mod quadrature;
pub mod verify;

pub use quadrature::{
    integrate_segment, integrate_tail, numeric_convolution, quad_mass_below, quad_measure_moment, quad_moment, quad_moment_at,
    LogDensity, QuadratureMoments, DEFAULT_QUAD_TOL,
};
pub use verify::{verify_moments, verify_square, MomentSource, VerificationReport};
