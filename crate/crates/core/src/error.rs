use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures reported by the numerical routines.
///
/// Values are carried as `f64` regardless of the scalar type the computation
/// ran in, so diagnostics print the same way for every precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("singular separation: invariant interval {interval:e} vanishes (coincident or light-like events)")]
    SingularSeparation { interval: f64 },

    #[error("event at z = {z} is not in the half-space z > 0")]
    BehindWall { z: f64 },

    #[error("variance matrix breaks the field/momentum block pattern at ({row}, {col}): {value:e}")]
    BlockPattern { row: usize, col: usize, value: f64 },

    #[error("variance matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("variance matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigen-solve did not converge after {iterations} iterations")]
    EigenNonConvergence { iterations: usize },

    #[error("state is unphysical: smallest symplectic eigenvalue {min_symplectic} < 1/2")]
    Unphysical { min_symplectic: f64 },

    #[error("finite-difference step h = {step} too large: estimate {estimate:e} vs analytic {analytic:e}")]
    StepTooLarge { step: f64, estimate: f64, analytic: f64 },

    #[error("quadrature needs {requested} kernel evaluations, budget is {budget}")]
    NodeBudget { requested: u128, budget: u128 },

    #[error("boxes overlap (center separation below L on every axis); the quadrature path needs disjoint boxes")]
    OverlappingBoxes,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("regulator epsilon = {epsilon} is below the floor {floor} for image distance R = {distance}")]
    RegulatorTooSmall { epsilon: f64, floor: f64, distance: f64 },

    #[error("extrapolation needs at least 3 samples, got {got}")]
    TooFewSamples { got: usize },

    #[error("regulator samples must have distinct, strictly decreasing epsilon")]
    SamplesNotDecreasing,

    #[error("extrapolation unstable: estimate {estimate:e} with error {error:e}")]
    ExtrapolationUnstable { estimate: f64, error: f64 },

    #[error("scan range is empty")]
    EmptyScan,

    #[error("grid refinement did not reach tolerance {tolerance:e} within {depth} levels")]
    RefinementNonConvergence { depth: usize, tolerance: f64 },

    /// A lattice resolution or chain specification violates a precondition.
    #[error("lattice oracle: {0}")]
    Lattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
