//! Squares and square roots of measures on [0, 1] under multiplicative convolution.

pub mod catalog;
pub mod convolve;
pub mod geometric;
pub mod partial_fraction;
pub mod polysquare;
pub mod sqrt_atomic;
pub mod transport;

pub use catalog::{agler_measure, catalog, pth_power_lebesgue, sqrt_a3, CatalogMeasure};
pub use convolve::{convolve_terms, square_atomic, square_measure};
pub use geometric::{sqrt_geometric, GeometricRoot};
pub use partial_fraction::{PartialFraction, PartialFractionExpansion};
pub use polysquare::polynomial_square_direct;
pub use sqrt_atomic::{sqrt_atomic, AtomicRoot, SqrtFailure, SqrtOutcome, DEFAULT_SQRT_TOL};
pub use transport::{transport_from_halfline, transport_to_halfline, HalfLineDensity, Transported, TransportedMeasure};
