//! Half-space lattice oracle.
//!
//! The field is discretized along `z` only; the transverse directions stay
//! continuous and are handled in Fourier space. For each transverse momentum
//! `k⊥` the problem is a harmonic chain with stiffness
//! `K = tridiag(−1/a², 2/a² + k⊥², −1/a²)`, whose ground state has
//! `⟨q qᵀ⟩ = K^{−1/2}/2` and `⟨p pᵀ⟩ = K^{1/2}/2` in canonical variables
//! `q = √a φ`, `p = √a π`. A Dirichlet wall is the fixed end of the chain;
//! the free reference is a longer chain with the probes deep in its bulk.
//! The transverse integral `∫ d²k/(2π)² J₀(k r) (…)` is done on a radial
//! Gauss–Legendre rule.

use rayon::prelude::*;

use super::{OracleComparison, OracleDetails, ProbePair, Quantity};
use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;
use crate::quadrature::gauss_legendre;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChainBoundary {
    /// Site `i` sits at height `(i + 1)·a` above a wall at height 0.
    DirichletWall,
    /// No wall; height 0 is the central site `sites / 2`.
    FreeExtended,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec<T> {
    pub sites: usize,
    pub spacing: T,
    pub kperp: T,
    pub boundary: ChainBoundary,
}

impl<T: Scalar> ChainSpec<T> {
    pub fn new(sites: usize, spacing: T, kperp: T, boundary: ChainBoundary) -> Result<Self> {
        if sites < 2 {
            return Err(Error::Lattice(format!("chain needs at least 2 sites, got {sites}")));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::Lattice(format!("spacing {spacing} must be > 0")));
        }
        if !(kperp >= T::zero()) || !kperp.is_finite() {
            return Err(Error::Lattice(format!("kperp {kperp} must be >= 0")));
        }
        Ok(Self {
            sites,
            spacing,
            kperp,
            boundary,
        })
    }

    /// Chain index of the site at height `n·a`.
    pub fn site_index(&self, height_sites: usize) -> Option<usize> {
        let idx = match self.boundary {
            ChainBoundary::DirichletWall => height_sites.checked_sub(1)?,
            ChainBoundary::FreeExtended => self.sites / 2 + height_sites,
        };
        (idx < self.sites).then_some(idx)
    }

    pub fn stiffness(&self) -> SymTridiagonal<T> {
        let inv_a2 = (self.spacing * self.spacing).recip();
        let diag = T::lit(2.0) * inv_a2 + self.kperp * self.kperp;
        SymTridiagonal::new(vec![diag; self.sites], vec![-inv_a2; self.sites - 1])
            .expect("sites >= 2 gives a consistent shape")
    }
}

/// Ground-state covariance of one chain in canonical variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCovariance<T> {
    /// `K^{−1/2}/2`, row-major.
    pub phi_phi: Vec<Vec<T>>,
    /// `K^{1/2}/2`, row-major.
    pub pi_pi: Vec<Vec<T>>,
    pub eigenvalues: Vec<T>,
}

/// Stiffness spectrum reused across transverse momenta: adding `k⊥²`
/// shifts every eigenvalue and leaves the eigenvectors alone. Only the
/// products `v[i]·v[j]` at the two probe sites are kept.
#[derive(Debug, Clone)]
struct ChainSpectrum<T> {
    eigenvalues: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> ChainSpectrum<T> {
    fn new(spec: &ChainSpec<T>, i: usize, j: usize) -> Result<Self> {
        let stiffness = spec.stiffness();
        let eigenvalues = stiffness.eigenvalues()?;
        if let Some(&lowest) = eigenvalues.first() {
            if !(lowest > T::zero()) {
                return Err(Error::NotPositiveDefinite {
                    min_eigenvalue: lowest.as_f64(),
                });
            }
        }
        let weights = eigenvalues
            .par_iter()
            .map(|&lam| {
                let v = stiffness.eigenvector(lam);
                v[i] * v[j]
            })
            .collect();
        Ok(Self { eigenvalues, weights })
    }

    /// `([K^{−1/2}]_{ij}, [K^{1/2}]_{ij})` at extra shift `k²`.
    fn roots(&self, k2: T) -> (T, T) {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .fold((T::zero(), T::zero()), |(inv, fwd), (&lam, &w)| {
                let root = (lam + k2).sqrt();
                (inv + w / root, fwd + w * root)
            })
    }
}

pub fn chain_ground_covariance<T: Scalar>(spec: &ChainSpec<T>) -> Result<ChainCovariance<T>> {
    let (eigenvalues, vectors) = spec.stiffness().eigen_decomposition()?;
    if let Some(&lowest) = eigenvalues.first() {
        if !(lowest > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: lowest.as_f64(),
            });
        }
    }
    let n = spec.sites;
    let half = T::lit(0.5);
    let mut phi_phi = vec![vec![T::zero(); n]; n];
    let mut pi_pi = vec![vec![T::zero(); n]; n];
    for (&lam, v) in eigenvalues.iter().zip(&vectors) {
        let root = lam.sqrt();
        let (inv, fwd) = (half / root, half * root);
        for i in 0..n {
            for j in 0..n {
                let w = v[i] * v[j];
                phi_phi[i][j] = phi_phi[i][j] + w * inv;
                pi_pi[i][j] = pi_pi[i][j] + w * fwd;
            }
        }
    }
    Ok(ChainCovariance {
        phi_phi,
        pi_pi,
        eigenvalues,
    })
}

/// Bessel `J₀(x) = (1/π) ∫₀^π cos(x sin θ) dθ` by the trapezoid rule, which
/// converges geometrically for this periodic integrand.
pub fn bessel_j0<T: Scalar>(x: T) -> T {
    let m = 32 + x.abs().ceil().to_usize().unwrap_or(0);
    let step = T::PI() / T::lit(m as f64);
    let interior: T = (1..m)
        .map(|i| (x * (step * T::lit(i as f64)).sin()).cos())
        .sum();
    (interior + T::one()) / T::lit(m as f64)
}

/// Lattice resolution: spacing, wall-chain length and radial node count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeResolution<T> {
    pub spacing: T,
    pub sites: usize,
    pub knodes: usize,
}

impl<T: Scalar> LatticeResolution<T> {
    pub const DEFAULT_SITES: usize = 256;
    pub const DEFAULT_KNODES: usize = 64;
    /// Closest probe sits this many sites above the wall by default.
    pub const DEFAULT_SITES_PER_HEIGHT: f64 = 8.0;

    /// Default resolution for probes at heights `z`, `z′`.
    pub fn for_heights(z: T, zprime: T) -> Self {
        Self {
            spacing: z.min(zprime) / T::lit(Self::DEFAULT_SITES_PER_HEIGHT),
            sites: Self::DEFAULT_SITES,
            knodes: Self::DEFAULT_KNODES,
        }
    }

    /// Half the spacing over the same physical extent.
    pub fn refined(&self) -> Self {
        Self {
            spacing: self.spacing * T::lit(0.5),
            sites: self.sites * 2,
            knodes: self.knodes,
        }
    }
}

/// Minimum probe height in lattice sites.
pub const MIN_PROBE_SITES: usize = 8;
/// The free reference chain extends this many wall-chain lengths on each
/// side of height 0. Its far ends act as same-sign images of the probes,
/// while the wall chain's far-end images cancel in pairs, so the reference
/// needs the longer extent.
pub const FREE_EXTENT_FACTOR: usize = 8;
/// Radial cutoff `k_max = RADIAL_CUTOFF / (z + z′)`.
pub const RADIAL_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeEstimate<T> {
    pub c: T,
    pub d: T,
    pub k_max: T,
}

fn height_in_sites<T: Scalar>(height: T, spacing: T) -> Result<usize> {
    let n = (height / spacing).round();
    if (n * spacing - height).abs() > T::lit(1e-6) * spacing {
        return Err(Error::Lattice(format!(
            "height {height} is not a multiple of the spacing {spacing}"
        )));
    }
    let n = n.to_usize().unwrap_or(0);
    if n < MIN_PROBE_SITES {
        return Err(Error::Lattice(format!(
            "height {height} is only {n} sites above the wall; need at least {MIN_PROBE_SITES}"
        )));
    }
    Ok(n)
}

/// Continuum estimates of `c` and `d` at transverse separation `r` and
/// heights `z`, `z′` from wall-minus-free chain correlators.
pub fn halfspace_component<T: Scalar>(
    z: T,
    zprime: T,
    r: T,
    res: &LatticeResolution<T>,
) -> Result<LatticeEstimate<T>> {
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::Lattice(format!("separation r = {r} must be >= 0")));
    }
    if res.sites < 16 {
        return Err(Error::Lattice(format!("wall chain needs at least 16 sites, got {}", res.sites)));
    }
    if res.knodes < 2 {
        return Err(Error::Lattice("need at least 2 radial nodes".into()));
    }
    let a = res.spacing;
    let n1 = height_in_sites(z, a)?;
    let n2 = height_in_sites(zprime, a)?;
    let highest = n1.max(n2);
    // Chain ends must sit at least four probe heights beyond the probes.
    if res.sites + 1 < 5 * highest {
        return Err(Error::Lattice(format!(
            "{} sites leave less than 4x the probe height ({highest} sites) beyond the probes",
            res.sites
        )));
    }

    let wall = ChainSpec::new(res.sites, a, T::zero(), ChainBoundary::DirichletWall)?;
    let free_half = FREE_EXTENT_FACTOR * res.sites;
    let free = ChainSpec::new(2 * free_half + 1, a, T::zero(), ChainBoundary::FreeExtended)?;
    let index = |spec: &ChainSpec<T>, n: usize| {
        spec.site_index(n)
            .ok_or_else(|| Error::Lattice(format!("height {n} sites is outside the chain")))
    };
    let (w1, w2) = (index(&wall, n1)?, index(&wall, n2)?);
    let (f1, f2) = (index(&free, n1)?, index(&free, n2)?);
    let wall_spec = ChainSpectrum::new(&wall, w1, w2)?;
    let free_spec = ChainSpectrum::new(&free, f1, f2)?;

    let k_max = T::lit(RADIAL_CUTOFF) / (z + zprime);
    let rule = gauss_legendre::<T>(res.knodes);
    let nodes: Vec<(T, T)> = rule.mapped(T::zero(), k_max).collect();
    let two_pi = T::lit(2.0) * T::PI();
    // ⟨φφ⟩ = K^{−1/2}/(2a) in field variables
    let field_norm = (T::lit(2.0) * a).recip();

    let contributions: Vec<(T, T)> = nodes
        .par_iter()
        .map(|&(k, w)| {
            let k2 = k * k;
            let (wall_inv, wall_fwd) = wall_spec.roots(k2);
            let (free_inv, free_fwd) = free_spec.roots(k2);
            let measure = w * k / two_pi * bessel_j0(k * r) * field_norm;
            (measure * (wall_inv - free_inv), measure * (wall_fwd - free_fwd))
        })
        .collect();
    let (c, d) = contributions
        .into_iter()
        .fold((T::zero(), T::zero()), |(c, d), (dc, dd)| (c + dc, d + dd));
    if !c.is_finite() || !d.is_finite() {
        return Err(Error::Quadrature("lattice transverse quadrature produced a non-finite value".into()));
    }
    Ok(LatticeEstimate { c, d, k_max })
}

/// Resolution used for a probe pair when the caller does not fix the spacing.
pub fn default_resolution<T: Scalar>(probes: &ProbePair<T>) -> LatticeResolution<T> {
    LatticeResolution::for_heights(probes.z, probes.zprime)
}

/// Lattice estimates of `c` and `d` against the closed forms.
pub fn oracle_report<T: Scalar>(
    probes: &[ProbePair<T>],
    resolution: &dyn Fn(&ProbePair<T>) -> LatticeResolution<T>,
) -> Result<Vec<OracleComparison<T>>> {
    let mut out = Vec::with_capacity(2 * probes.len());
    for p in probes {
        let res = resolution(p);
        let est = halfspace_component(p.z, p.zprime, p.r, &res)?;
        let closed = p.closed_form()?;
        let details = OracleDetails::Lattice {
            spacing: res.spacing,
            sites: res.sites,
            knodes: res.knodes,
        };
        out.push(OracleComparison::new(Quantity::FieldField, *p, closed.c, est.c, details.clone()));
        out.push(OracleComparison::new(Quantity::MomentumMomentum, *p, closed.d, est.d, details));
    }
    Ok(out)
}
