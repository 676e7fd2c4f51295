//! Two-mode Gaussian covariance machinery.
//!
//! Conventions are fixed: ħ = 1, `[φ, π] = i`, a single vacuum mode has
//! variance 1/2, and the operator ordering is `(Φ, Π, Φ′, Π′)`. A two-mode
//! state is PPT (and therefore separable) iff
//!
//! ```text
//! F = (det A + det B − 2 det G) − (1/4 + 4 det V) ≤ 0
//! ```
//!
//! where `A`, `B` are the single-mode blocks and `G` the cross block.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Absolute tolerance for the zero (field, momentum) entries of a block-pattern matrix.
pub const BLOCK_PATTERN_TOLERANCE: f64 = 1e-12;

/// Entries that must vanish in a block-pattern variance matrix (0-based,
/// upper triangle).
const MIXED_POSITIONS: [(usize, usize); 4] = [(0, 1), (0, 3), (1, 2), (2, 3)];

/// Symmetric 4×4 second-moment matrix over `(Φ, Π, Φ′, Π′)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceMatrix<T> {
    entries: [[T; 4]; 4],
}

impl<T: Scalar> VarianceMatrix<T> {
    /// Wraps raw entries after checking exact symmetry.
    pub fn from_entries(entries: [[T; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in i + 1..4 {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { entries })
    }

    /// Block-pattern matrix from single-mode and cross blocks, each given as
    /// `(field-field, momentum-momentum)` diagonal pairs.
    fn from_diagonal_blocks(first: (T, T), second: (T, T), cross: (T, T)) -> Self {
        let z = T::zero();
        Self {
            entries: [
                [first.0, z, cross.0, z],
                [z, first.1, z, cross.1],
                [cross.0, z, second.0, z],
                [z, cross.1, z, second.1],
            ],
        }
    }

    /// `(1/2)·I`: two uncorrelated vacuum oscillators.
    pub fn vacuum() -> Self {
        let half = T::lit(0.5);
        Self::from_diagonal_blocks((half, half), (half, half), (T::zero(), T::zero()))
    }

    /// Two-mode squeezed vacuum with squeezing parameter `s`.
    pub fn two_mode_squeezed(s: T) -> Self {
        let two_s = s + s;
        let diag = two_s.cosh() * T::lit(0.5);
        let cross = two_s.sinh() * T::lit(0.5);
        Self::from_diagonal_blocks((diag, diag), (diag, diag), (cross, -cross))
    }

    pub fn entries(&self) -> &[[T; 4]; 4] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row][col]
    }

    pub fn block_a(&self) -> [[T; 2]; 2] {
        self.block(0, 0)
    }

    pub fn block_b(&self) -> [[T; 2]; 2] {
        self.block(2, 2)
    }

    /// Cross block `G` (rows from the first mode, columns from the second).
    pub fn block_g(&self) -> [[T; 2]; 2] {
        self.block(0, 2)
    }

    fn block(&self, row: usize, col: usize) -> [[T; 2]; 2] {
        let e = &self.entries;
        [
            [e[row][col], e[row][col + 1]],
            [e[row + 1][col], e[row + 1][col + 1]],
        ]
    }

    /// Checks that all (field, momentum) mixed entries vanish to within
    /// [`BLOCK_PATTERN_TOLERANCE`].
    pub fn check_block_pattern(&self) -> Result<()> {
        let tol = T::lit(BLOCK_PATTERN_TOLERANCE);
        for &(i, j) in &MIXED_POSITIONS {
            let value = self.entries[i][j];
            if !(value.abs() <= tol) {
                return Err(Error::BlockPattern {
                    row: i + 1,
                    col: j + 1,
                    value: value.as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn has_block_pattern(&self) -> bool {
        self.check_block_pattern().is_ok()
    }

    /// Flips the sign of the second mode's momentum (partial transposition).
    pub fn partial_transpose(&self) -> Self {
        let mut entries = self.entries;
        for k in 0..4 {
            if k != 3 {
                entries[3][k] = -entries[3][k];
                entries[k][3] = -entries[k][3];
            }
        }
        Self { entries }
    }

    pub fn determinant(&self) -> T {
        linalg::determinant(&self.entries)
    }
}

fn det2<T: Scalar>(m: &[[T; 2]; 2]) -> T {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Diagonal two-mode matrix
/// `diag-blocks (a, s·b), (a′, s·b′), cross (c, s·d)` with `s = lscale⁶`.
///
/// With `lscale = 1` this is the bare point-field matrix; with `lscale = L` it
/// is the box-smeared matrix (momenta are integrated, not averaged, so they
/// pick up the box volume squared).
pub fn build_variance_matrix<T: Scalar>(
    a: T,
    b: T,
    a_prime: T,
    b_prime: T,
    c: T,
    d: T,
    lscale: T,
) -> VarianceMatrix<T> {
    let l6 = lscale.powi(6);
    VarianceMatrix::from_diagonal_blocks((a, l6 * b), (a_prime, l6 * b_prime), (c, l6 * d))
}

/// `Ω = J ⊕ J` with `J = [[0, 1], [−1, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SymplecticForm;

impl SymplecticForm {
    pub fn matrix<T: Scalar>(&self) -> [[T; 4]; 4] {
        let (o, z) = (T::one(), T::zero());
        [[z, o, z, z], [-o, z, z, z], [z, z, z, o], [z, z, -o, z]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Positive partial transpose; separable for two-mode Gaussian states.
    Separable,
    /// Negative partial transpose; entangled.
    Entangled,
}

impl Verdict {
    /// Ties at `F = 0` are separable (the criterion is non-strict).
    pub fn from_functional<T: Scalar>(f: T) -> Self {
        if f <= T::zero() {
            Verdict::Separable
        } else {
            Verdict::Entangled
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Separable => "separable",
            Verdict::Entangled => "entangled",
        }
    }
}

/// Which algebraic route produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvaluationPath {
    DeterminantForm,
    ExpandedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityReport<T> {
    pub f: T,
    pub sigma_tilde: T,
    pub det_a: T,
    pub det_b: T,
    pub det_g: T,
    pub det_v: T,
    pub verdict: Verdict,
    pub path: EvaluationPath,
}

impl<T: Scalar> SeparabilityReport<T> {
    /// Assembles a report from block determinants.
    pub fn from_determinants(det_a: T, det_b: T, det_g: T, det_v: T, path: EvaluationPath) -> Self {
        let sigma_tilde = det_a + det_b - T::lit(2.0) * det_g;
        let f = sigma_tilde - (T::lit(0.25) + T::lit(4.0) * det_v);
        Self {
            f,
            sigma_tilde,
            det_a,
            det_b,
            det_g,
            det_v,
            verdict: Verdict::from_functional(f),
            path,
        }
    }
}

/// PPT functional of a block-pattern variance matrix.
///
/// Regularized matrices with negative diagonal entries are accepted; use
/// [`check_physical`] separately when physicality matters.
pub fn simon_ppt_functional<T: Scalar>(v: &VarianceMatrix<T>) -> Result<SeparabilityReport<T>> {
    v.check_block_pattern()?;
    Ok(SeparabilityReport::from_determinants(
        det2(&v.block_a()),
        det2(&v.block_b()),
        det2(&v.block_g()),
        v.determinant(),
        EvaluationPath::DeterminantForm,
    ))
}

/// Symplectic eigenvalues `(ν₁ ≤ ν₂)`: the moduli of the eigenvalues of `iΩV`.
///
/// Computed as the square roots of the spectrum of the real symmetric matrix
/// `V^{1/2} Ωᵀ V Ω V^{1/2}`, which is similar to `−(ΩV)²`. Requires `V`
/// positive definite; the partial transpose of a positive definite matrix is
/// again positive definite, so the flag never changes that requirement.
pub fn symplectic_eigenvalues<T: Scalar>(v: &VarianceMatrix<T>, partial_transpose: bool) -> Result<(T, T)> {
    let m = if partial_transpose {
        v.partial_transpose()
    } else {
        *v
    };
    let (vals, vecs) = linalg::symmetric_eigen(m.entries())?;
    let scale = vals.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if !(vals[0] > T::epsilon() * T::lit(16.0) * scale) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: vals[0].as_f64(),
        });
    }
    // V^{1/2} = U diag(√λ) Uᵀ
    let sqrt_v: [[T; 4]; 4] = std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..4).map(|k| vecs[i][k] * vals[k].sqrt() * vecs[j][k]).sum())
    });
    let omega = SymplecticForm.matrix::<T>();
    let inner = linalg::mat_mul(&linalg::transpose(&omega), &linalg::mat_mul(m.entries(), &omega));
    let mut reduced = linalg::mat_mul(&sqrt_v, &linalg::mat_mul(&inner, &sqrt_v));
    // Symmetrize away rounding so the Jacobi solver sees an exactly symmetric input.
    for i in 0..4 {
        for j in i + 1..4 {
            let avg = (reduced[i][j] + reduced[j][i]) * T::lit(0.5);
            reduced[i][j] = avg;
            reduced[j][i] = avg;
        }
    }
    let (squares, _) = linalg::symmetric_eigen(&reduced)?;
    let half = T::lit(0.5);
    let nu1 = ((squares[0] + squares[1]) * half).max(T::zero()).sqrt();
    let nu2 = ((squares[2] + squares[3]) * half).max(T::zero()).sqrt();
    Ok((nu1, nu2))
}

/// Errors with [`Error::Unphysical`] unless the smallest symplectic eigenvalue
/// is at least `1/2` (up to `tolerance`).
pub fn check_physical<T: Scalar>(v: &VarianceMatrix<T>, tolerance: T) -> Result<()> {
    let (nu_min, _) = symplectic_eigenvalues(v, false)?;
    if nu_min < T::lit(0.5) - tolerance {
        return Err(Error::Unphysical {
            min_symplectic: nu_min.as_f64(),
        });
    }
    Ok(())
}

/// Logarithmic negativity `max(0, −ln(2 ν̃_min))`, natural-log convention.
///
/// For the two-mode squeezed vacuum this is exactly `2s`; multiply by
/// `log₂ e` for the base-2 (ebit) convention.
pub fn logarithmic_negativity<T: Scalar>(v: &VarianceMatrix<T>) -> Result<T> {
    check_physical(v, T::lit(1e3) * T::epsilon())?;
    let (nu_min, _) = symplectic_eigenvalues(v, true)?;
    Ok((-(T::lit(2.0) * nu_min).ln()).max(T::zero()))
}
