//! Box-smeared collective operators.
//!
//! The field is averaged over a cube of edge `L` (factor `1/L³`), the
//! momentum is integrated over it. For small boxes the smeared variance
//! matrix is the point matrix with every momentum entry scaled by `L⁶`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{build_variance_matrix, VarianceMatrix};
use crate::greens::{components, field_correlator, momentum_correlator, PairGeometry, SpatialPoint};
use crate::quadrature::{Rule, Rule1d};
use crate::scalar::Scalar;

pub const DEFAULT_NODE_BUDGET: u128 = 1_000_000;

/// Tensor-product rule for the six-dimensional box-pair integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    pub rule: Rule,
    pub budget: u128,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_axis: 8,
            rule: Rule::GaussLegendre,
            budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl QuadratureSpec {
    pub fn new(nodes_per_axis: usize, rule: Rule) -> Self {
        Self {
            nodes_per_axis,
            rule,
            budget: DEFAULT_NODE_BUDGET,
        }
    }

    /// Total kernel evaluations per entry, `nodes⁶`.
    pub fn evaluations(&self) -> u128 {
        (self.nodes_per_axis as u128).pow(6)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least 2 nodes per axis, got {}",
                self.nodes_per_axis
            )));
        }
        if self.evaluations() > self.budget {
            return Err(Error::NodeBudget {
                requested: self.evaluations(),
                budget: self.budget,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmearingPath {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearedVariance<T> {
    pub matrix: VarianceMatrix<T>,
    pub geometry: PairGeometry<T>,
    pub path: SmearingPath,
}

/// Smeared variance matrix from the closed-form components, valid for
/// small `L`.
pub fn tilde_variance_closed_form<T: Scalar>(geom: &PairGeometry<T>) -> SmearedVariance<T> {
    let c = components(geom);
    SmearedVariance {
        matrix: build_variance_matrix(c.a, c.b, c.a_prime, c.b_prime, c.c, c.d, geom.l()),
        geometry: *geom,
        path: SmearingPath::ClosedForm,
    }
}

/// `Vol(B ∩ B′) / L³` for two axis-aligned cubes of edge `l`.
pub fn box_overlap_fraction<T: Scalar>(a: &SpatialPoint<T>, b: &SpatialPoint<T>, l: T) -> T {
    [a.x - b.x, a.y - b.y, a.z - b.z]
        .iter()
        .map(|d| (l - d.abs()).max(T::zero()) / l)
        .fold(T::one(), |acc, f| acc * f)
}

/// Mean of `kernel(p, q)` over `p ∈ B(center_a)`, `q ∈ B(center_b)`.
///
/// The outer node loop runs in parallel; partial sums are reduced in node
/// order so the result does not depend on scheduling.
pub fn box_pair_average<T, F>(
    center_a: &SpatialPoint<T>,
    center_b: &SpatialPoint<T>,
    l: T,
    spec: &QuadratureSpec,
    kernel: F,
) -> Result<T>
where
    T: Scalar,
    F: Fn(&SpatialPoint<T>, &SpatialPoint<T>) -> Result<T> + Sync,
{
    spec.validate()?;
    let rule = Rule1d::<T>::new(spec.rule, spec.nodes_per_axis);
    let half = l * T::lit(0.5);
    // Offsets in [−L/2, L/2] with weights normalized to sum to one.
    let offsets: Vec<(T, T)> = rule
        .mapped(-half, half)
        .map(|(x, w)| (x, w / l))
        .collect();

    let partials: Vec<Result<T>> = offsets
        .par_iter()
        .map(|&(ox, wx)| {
            let mut outer = T::zero();
            for &(oy, wy) in &offsets {
                for &(oz, wz) in &offsets {
                    let p = SpatialPoint::new(center_a.x + ox, center_a.y + oy, center_a.z + oz);
                    let mut inner = T::zero();
                    for &(qx, vx) in &offsets {
                        for &(qy, vy) in &offsets {
                            for &(qz, vz) in &offsets {
                                let q = SpatialPoint::new(
                                    center_b.x + qx,
                                    center_b.y + qy,
                                    center_b.z + qz,
                                );
                                inner = inner + vx * vy * vz * kernel(&p, &q)?;
                            }
                        }
                    }
                    outer = outer + wy * wz * inner;
                }
            }
            Ok(wx * outer)
        })
        .collect();
    partials.into_iter().try_fold(T::zero(), |acc, p| Ok(acc + p?))
}

/// Smeared variance matrix by direct quadrature of the regularized kernels
/// over the box pair. Needs disjoint boxes.
pub fn tilde_variance_quadrature<T: Scalar>(
    geom: &PairGeometry<T>,
    spec: &QuadratureSpec,
) -> Result<SmearedVariance<T>> {
    spec.validate()?;
    let l = geom.l();
    let (ca, cb) = geom.centers();
    if box_overlap_fraction(&ca, &cb, l) > T::zero() {
        return Err(Error::OverlappingBoxes);
    }
    let l6 = l.powi(6);
    let field = |p: &SpatialPoint<T>, q: &SpatialPoint<T>| box_pair_average(p, q, l, spec, field_correlator);
    let momentum =
        |p: &SpatialPoint<T>, q: &SpatialPoint<T>| Ok(l6 * box_pair_average(p, q, l, spec, momentum_correlator)?);

    let matrix = build_variance_matrix(
        field(&ca, &ca)?,
        momentum(&ca, &ca)?,
        field(&cb, &cb)?,
        momentum(&cb, &cb)?,
        field(&ca, &cb)?,
        momentum(&ca, &cb)?,
        T::one(),
    );
    Ok(SmearedVariance {
        matrix,
        geometry: *geom,
        path: SmearingPath::Quadrature,
    })
}
