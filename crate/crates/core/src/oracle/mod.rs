//! Independent numerical checks of the closed-form covariance components.
//!
//! Neither oracle calls into [`crate::greens`] while computing its estimate;
//! the closed forms only enter when a comparison is tabulated.

pub mod lattice;
pub mod momentum;

use crate::greens::{ComponentSet, PairGeometry};
use crate::scalar::Scalar;

/// Which regularized component an oracle estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Field-field cross component `c`.
    FieldField,
    /// Momentum-momentum cross component `d`.
    MomentumMomentum,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::FieldField => "c",
            Quantity::MomentumMomentum => "d",
        }
    }
}

/// Pair of probe points: transverse separation and wall distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePair<T> {
    pub r: T,
    pub z: T,
    pub zprime: T,
}

impl<T: Scalar> ProbePair<T> {
    pub fn new(r: T, z: T, zprime: T) -> Self {
        Self { r, z, zprime }
    }

    pub fn image_distance(&self) -> T {
        let s = self.z + self.zprime;
        (self.r * self.r + s * s).sqrt()
    }

    /// Closed-form cross components; the box edge does not enter `c` or `d`.
    pub(crate) fn closed_form(&self) -> crate::Result<ComponentSet<T>> {
        let l = self.z.min(self.zprime);
        Ok(crate::greens::components(&PairGeometry::new(self.r, self.z, self.zprime, l)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleDetails<T> {
    Momentum {
        /// Regulator values (largest first) fed to the extrapolation.
        epsilons: Vec<T>,
        /// Residual-based error estimate of the extrapolated value.
        error_estimate: T,
    },
    Lattice {
        spacing: T,
        sites: usize,
        knodes: usize,
    },
}

/// Closed-form value against an oracle estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison<T> {
    pub quantity: Quantity,
    pub probes: ProbePair<T>,
    pub closed_form: T,
    pub estimate: T,
    pub relative_error: T,
    pub details: OracleDetails<T>,
}

impl<T: Scalar> OracleComparison<T> {
    pub fn new(
        quantity: Quantity,
        probes: ProbePair<T>,
        closed_form: T,
        estimate: T,
        details: OracleDetails<T>,
    ) -> Self {
        Self {
            quantity,
            probes,
            closed_form,
            estimate,
            relative_error: ((estimate - closed_form) / closed_form).abs(),
            details,
        }
    }
}
