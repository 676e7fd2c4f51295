//! Small dense and tridiagonal eigen-solvers.
//!
//! Everything here is written against [`Scalar`] so the Gaussian core can run
//! in `f32` as well as `f64`. Sizes are tiny (4×4) or banded, so no BLAS.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const JACOBI_MAX_SWEEPS: usize = 64;
const QL_MAX_ITERATIONS: usize = 60;

/// Eigen-decomposition of a real symmetric `N×N` matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in ascending order and the matching
/// eigenvectors as columns.
pub fn symmetric_eigen<T: Scalar, const N: usize>(
    matrix: &[[T; N]; N],
) -> Result<([T; N], [[T; N]; N])> {
    let mut a = *matrix;
    let mut v = [[T::zero(); N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(T::zero(), |m, x| m.max(x.abs()));
    let tiny = T::epsilon() * T::epsilon() * scale * scale;

    let mut converged = scale == T::zero();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off: T = (0..N)
            .flat_map(|p| (p + 1..N).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off <= tiny {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNonConvergence {
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = std::array::from_fn(|k| a[order[k]][order[k]]);
    let vectors = std::array::from_fn(|row| std::array::from_fn(|k| v[row][order[k]]));
    Ok((values, vectors))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Scalar, const N: usize>(matrix: &[[T; N]; N]) -> T {
    let mut a = *matrix;
    let mut det = T::one();
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det = det * a[col][col];
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
        }
    }
    det
}

pub fn mat_mul<T: Scalar, const N: usize>(a: &[[T; N]; N], b: &[[T; N]; N]) -> [[T; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..N).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn transpose<T: Scalar, const N: usize>(a: &[[T; N]; N]) -> [[T; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    diagonal: Vec<T>,
    off_diagonal: Vec<T>,
}

impl<T: Scalar> SymTridiagonal<T> {
    /// `off_diagonal[i]` couples rows `i` and `i + 1`.
    pub fn new(diagonal: Vec<T>, off_diagonal: Vec<T>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[T] {
        &self.off_diagonal
    }

    /// Eigenvalues in ascending order (implicit QL with Wilkinson shifts).
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let n = self.len();
        let mut d = self.diagonal.clone();
        let mut e = self.off_diagonal.clone();
        e.push(T::zero());
        let two = T::lit(2.0);

        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= T::epsilon() * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > QL_MAX_ITERATIONS {
                    return Err(Error::EigenNonConvergence { iterations: iter });
                }
                let mut g = (d[l + 1] - d[l]) / (two * e[l]);
                let mut r = g.hypot(T::one());
                g = d[m] - d[l] + e[l] / (g + r.abs() * g.signum());
                let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
                let mut deflated = false;
                for i in (l..m).rev() {
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == T::zero() {
                        d[i + 1] = d[i + 1] - p;
                        e[m] = T::zero();
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + two * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] = d[l] - p;
                e[l] = g;
                e[m] = T::zero();
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(d)
    }

    /// Unit eigenvector for an (accurately known) eigenvalue, by inverse
    /// iteration with a pivoted tridiagonal LU.
    pub fn eigenvector(&self, eigenvalue: T) -> Vec<T> {
        let n = self.len();
        if n == 1 {
            return vec![T::one()];
        }
        let norm = self
            .diagonal
            .iter()
            .chain(self.off_diagonal.iter())
            .fold(T::zero(), |m, x| m.max(x.abs()));
        let floor = T::epsilon() * norm.max(T::min_positive_value());
        let lu = TridiagonalLu::factor(self, eigenvalue, floor);

        // Deterministic start vector with no special symmetry.
        let mut x: Vec<T> = (0..n)
            .map(|i| T::one() + T::lit(((i * 7919) % 101) as f64 / 1000.0))
            .collect();
        for _ in 0..3 {
            lu.solve_in_place(&mut x);
            let scale = x.iter().fold(T::zero(), |s, v| s + *v * *v).sqrt();
            for v in x.iter_mut() {
                *v = *v / scale;
            }
        }
        x
    }

    /// Full eigen-decomposition: ascending eigenvalues and unit eigenvectors
    /// (`vectors[j]` belongs to `values[j]`).
    pub fn eigen_decomposition(&self) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        let values = self.eigenvalues()?;
        let vectors = values.iter().map(|&l| self.eigenvector(l)).collect();
        Ok((values, vectors))
    }
}

/// LU factors of `T − shift·I` with partial pivoting (bandwidth grows to two
/// super-diagonals).
struct TridiagonalLu<T> {
    upper0: Vec<T>,
    upper1: Vec<T>,
    upper2: Vec<T>,
    multipliers: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> TridiagonalLu<T> {
    fn factor(matrix: &SymTridiagonal<T>, shift: T, floor: T) -> Self {
        let n = matrix.len();
        let mut d: Vec<T> = matrix.diagonal.iter().map(|&x| x - shift).collect();
        let mut du: Vec<T> = matrix.off_diagonal.clone();
        let mut dl: Vec<T> = matrix.off_diagonal.clone();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut multipliers = vec![T::zero(); n - 1];
        let mut swapped = vec![false; n - 1];

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < floor {
                    d[i] = floor;
                }
                let f = dl[i] / d[i];
                multipliers[i] = f;
                d[i + 1] = d[i + 1] - f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                multipliers[i] = f;
                swapped[i] = true;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
            }
            dl[i] = T::zero();
        }
        if d[n - 1].abs() < floor {
            d[n - 1] = floor;
        }
        Self {
            upper0: d,
            upper1: du,
            upper2: du2,
            multipliers,
            swapped,
        }
    }

    fn solve_in_place(&self, x: &mut [T]) {
        let n = x.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                x.swap(i, i + 1);
                x[i + 1] = x[i + 1] - self.multipliers[i] * x[i];
            } else {
                x[i + 1] = x[i + 1] - self.multipliers[i] * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s = s - self.upper1[i] * x[i + 1];
            }
            if i + 2 < n {
                s = s - self.upper2[i] * x[i + 2];
            }
            x[i] = s / self.upper0[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        let m = [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        let (vals, vecs) = symmetric_eigen(&m).unwrap();
        let s2 = 2f64.sqrt();
        let expected = [2.0 - s2, 2.0, 2.0 + s2];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14, "{v} vs {e}");
        }
        // A v = λ v
        for k in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| m[i][j] * vecs[j][k]).sum();
                assert!((av - vals[k] * vecs[i][k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = [
            [4.0, 1.0, 0.5, 0.0],
            [1.0, 3.0, 0.0, 0.2],
            [0.5, 0.0, 2.0, 0.1],
            [0.0, 0.2, 0.1, 1.0],
        ];
        let mut expected = 0.0;
        for (sign, perm) in permutations4() {
            expected += sign * (0..4).map(|i| m[i][perm[i]]).product::<f64>();
        }
        assert!((determinant(&m) - expected).abs() < 1e-12);
    }

    fn permutations4() -> Vec<(f64, [usize; 4])> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        let mut seen = [false; 4];
                        if p.iter().all(|&i| !std::mem::replace(&mut seen[i], true)) {
                            let inversions = (0..4)
                                .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                                .filter(|&(i, j)| p[i] > p[j])
                                .count();
                            out.push((if inversions % 2 == 0 { 1.0 } else { -1.0 }, p));
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn tridiagonal_laplacian_matches_sine_modes() {
        let n = 40;
        let t = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let (vals, vecs) = t.eigen_decomposition().unwrap();
        let pi = std::f64::consts::PI;
        for (j, (&lam, v)) in vals.iter().zip(&vecs).enumerate() {
            let theta = (j + 1) as f64 * pi / (n + 1) as f64;
            let expected = 2.0 - 2.0 * theta.cos();
            assert!((lam - expected).abs() < 1e-12, "mode {j}: {lam} vs {expected}");
            // Compare against the normalized sine vector up to sign.
            let norm = (2.0 / (n + 1) as f64).sqrt();
            let sign = (v[0] * (theta).sin()).signum();
            for (i, &vi) in v.iter().enumerate() {
                let s = norm * ((i + 1) as f64 * theta).sin();
                assert!((vi - sign * s).abs() < 1e-10, "mode {j} site {i}");
            }
        }
    }

    #[test]
    fn tridiagonal_vectors_are_orthonormal() {
        let n = 300;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.01 * (i as f64).sin()).collect();
        let t = SymTridiagonal::new(diag, vec![-1.0; n - 1]).unwrap();
        let (_, vecs) = t.eigen_decomposition().unwrap();
        for a in (0..n).step_by(37) {
            for b in (0..n).step_by(41) {
                let dot: f64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-9, "({a},{b}) dot = {dot}");
            }
        }
    }

    #[test]
    fn single_site_tridiagonal() {
        let t = SymTridiagonal::new(vec![3.0f32], vec![]).unwrap();
        assert_eq!(t.eigenvalues().unwrap(), vec![3.0]);
        assert_eq!(t.eigenvector(3.0), vec![1.0]);
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }
}
