//! Vacuum separability of a massless scalar field near a Dirichlet plane.
//!
//! The crate computes the boundary-regularized equal-time covariance of the
//! field and its conjugate momentum, smears it over two small boxes to get an
//! effective two-mode Gaussian state, and evaluates the PPT separability
//! functional on it. Two independent oracles (a regulated momentum-space
//! integral and a half-space harmonic lattice) check the closed forms.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below are what the CLI uses.

pub mod collective;
pub mod error;
pub mod gaussian;
pub mod greens;
pub mod lemmas;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod scan;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use collective::{QuadratureSpec, SmearedVariance, SmearingPath};
pub use gaussian::{EvaluationPath, SeparabilityReport, SymplecticForm, VarianceMatrix, Verdict};
pub use greens::{ComponentSet, PairGeometry, SpacetimeEvent, SpatialPoint};
pub use oracle::OracleComparison;
pub use scan::{ScanOutcome, ScanRange, ScanRecord};

pub type VarianceMatrix64 = VarianceMatrix<f64>;
pub type VarianceMatrix32 = VarianceMatrix<f32>;
pub type SeparabilityReport64 = SeparabilityReport<f64>;
pub type PairGeometry64 = PairGeometry<f64>;
pub type PairGeometry32 = PairGeometry<f32>;
pub type ComponentSet64 = ComponentSet<f64>;
pub type SpacetimeEvent64 = SpacetimeEvent<f64>;
pub type SpatialPoint64 = SpatialPoint<f64>;
pub type SmearedVariance64 = SmearedVariance<f64>;
pub type ScanRange64 = ScanRange<f64>;
pub type ScanRecord64 = ScanRecord<f64>;
pub type OracleComparison64 = OracleComparison<f64>;
