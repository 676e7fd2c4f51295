//! Hadamard two-point functions of a massless scalar near a Dirichlet plane
//! at `z = 0`, and the boundary-induced covariance components.
//!
//! The regularized function `G_reg = G_boundary − G_free` keeps only the
//! image term, so it stays finite when the two points coincide. Every
//! covariance component below is a closed-form derivative of `G_reg`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialPoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> SpatialPoint<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn at_time(self, t: T) -> SpacetimeEvent<T> {
        SpacetimeEvent {
            x: self.x,
            y: self.y,
            z: self.z,
            t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimeEvent<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub t: T,
}

impl<T: Scalar> SpacetimeEvent<T> {
    pub fn new(x: T, y: T, z: T, t: T) -> Self {
        Self { x, y, z, t }
    }

    pub fn position(&self) -> SpatialPoint<T> {
        SpatialPoint::new(self.x, self.y, self.z)
    }
}

/// Scan point: transverse separation `r`, wall distances `z`, `z′` and box
/// edge `L` of the two smearing cubes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry<T> {
    r: T,
    z: T,
    zprime: T,
    l: T,
}

impl<T: Scalar> PairGeometry<T> {
    pub fn new(r: T, z: T, zprime: T, l: T) -> Result<Self> {
        let bad = |what: String| Err(Error::Geometry(what));
        if !(r >= T::zero()) || !r.is_finite() {
            return bad(format!("r = {r} must be finite and >= 0"));
        }
        if !(z > T::zero()) || !z.is_finite() {
            return bad(format!("z = {z} must be finite and > 0"));
        }
        if !(zprime > T::zero()) || !zprime.is_finite() {
            return bad(format!("zprime = {zprime} must be finite and > 0"));
        }
        if !(l > T::zero()) || !l.is_finite() {
            return bad(format!("L = {l} must be finite and > 0"));
        }
        let half = l * T::lit(0.5);
        if !(z - half > T::zero()) || !(zprime - half > T::zero()) {
            return bad(format!(
                "box of edge L = {l} crosses the wall (needs z - L/2 > 0 and zprime - L/2 > 0, got z = {z}, zprime = {zprime})"
            ));
        }
        Ok(Self { r, z, zprime, l })
    }

    /// Geometry with the default box edge `L = min(z, z′)/20`.
    pub fn with_default_box(r: T, z: T, zprime: T) -> Result<Self> {
        Self::new(r, z, zprime, default_box_edge(z, zprime))
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn zprime(&self) -> T {
        self.zprime
    }

    pub fn l(&self) -> T {
        self.l
    }

    /// `R² = r² + (z + z′)²`, squared distance from one point to the other's mirror image.
    pub fn image_distance_sq(&self) -> T {
        let s = self.z + self.zprime;
        self.r * self.r + s * s
    }

    /// Box centers: the first on the z axis, the second offset by `r` along x.
    pub fn centers(&self) -> (SpatialPoint<T>, SpatialPoint<T>) {
        (
            SpatialPoint::new(T::zero(), T::zero(), self.z),
            SpatialPoint::new(self.r, T::zero(), self.zprime),
        )
    }

    pub fn scaled(&self, lambda: T) -> Result<Self> {
        Self::new(lambda * self.r, lambda * self.z, lambda * self.zprime, lambda * self.l)
    }

    pub fn swapped(&self) -> Self {
        Self {
            z: self.zprime,
            zprime: self.z,
            ..*self
        }
    }

    pub fn with_box_edge(&self, l: T) -> Result<Self> {
        Self::new(self.r, self.z, self.zprime, l)
    }
}

pub fn default_box_edge<T: Scalar>(z: T, zprime: T) -> T {
    z.min(zprime) / T::lit(20.0)
}

/// Regularized covariance components. `a, a′, c` are field-field (length⁻²),
/// `b, b′, d` momentum-momentum (length⁻⁴).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentSet<T> {
    pub a: T,
    pub b: T,
    pub a_prime: T,
    pub b_prime: T,
    pub c: T,
    pub d: T,
}

fn check_interval<T: Scalar>(sigma: T, scale: T) -> Result<T> {
    if !(sigma.abs() > T::lit(4.0) * T::epsilon() * scale) {
        return Err(Error::SingularSeparation {
            interval: sigma.as_f64(),
        });
    }
    Ok(sigma)
}

/// Interval to the mirror image of `e2` and its non-negative scale.
fn image_interval<T: Scalar>(e1: &SpacetimeEvent<T>, e2: &SpacetimeEvent<T>) -> (T, T) {
    let dt = e1.t - e2.t;
    let dx = e1.x - e2.x;
    let dy = e1.y - e2.y;
    let s = e1.z + e2.z;
    let spatial = dx * dx + dy * dy + s * s;
    (spatial - dt * dt, spatial + dt * dt)
}

fn free_interval<T: Scalar>(e1: &SpacetimeEvent<T>, e2: &SpacetimeEvent<T>) -> (T, T) {
    let dt = e1.t - e2.t;
    let dx = e1.x - e2.x;
    let dy = e1.y - e2.y;
    let dz = e1.z - e2.z;
    let spatial = dx * dx + dy * dy + dz * dz;
    (spatial - dt * dt, spatial + dt * dt)
}

fn two_pi_sq<T: Scalar>() -> T {
    let pi = T::PI();
    T::lit(2.0) * pi * pi
}

/// Free-space Hadamard function `1 / (2π² σ)`.
pub fn g_free<T: Scalar>(e1: &SpacetimeEvent<T>, e2: &SpacetimeEvent<T>) -> Result<T> {
    let (sigma, scale) = free_interval(e1, e2);
    let sigma = check_interval(sigma, scale)?;
    Ok((two_pi_sq::<T>() * sigma).recip())
}

/// Dirichlet Hadamard function by the image method.
///
/// Events on the wall (`z = 0`) are allowed and give exactly zero; events
/// behind it are rejected.
pub fn g_boundary<T: Scalar>(e1: &SpacetimeEvent<T>, e2: &SpacetimeEvent<T>) -> Result<T> {
    for e in [e1, e2] {
        if !(e.z >= T::zero()) {
            return Err(Error::BehindWall { z: e.z.as_f64() });
        }
    }
    let free = g_free(e1, e2)?;
    let (sigma, scale) = image_interval(e1, e2);
    let sigma = check_interval(sigma, scale)?;
    Ok(free - (two_pi_sq::<T>() * sigma).recip())
}

/// `G_boundary − G_free = −1 / (2π² σ_image)`; finite at coincidence.
pub fn g_regularized<T: Scalar>(e1: &SpacetimeEvent<T>, e2: &SpacetimeEvent<T>) -> Result<T> {
    for e in [e1, e2] {
        if !(e.z > T::zero()) {
            return Err(Error::BehindWall { z: e.z.as_f64() });
        }
    }
    let (sigma, scale) = image_interval(e1, e2);
    let sigma = check_interval(sigma, scale)?;
    Ok(-(two_pi_sq::<T>() * sigma).recip())
}

/// Mixed second derivatives `∂_a ∂_{a′} G_reg` for `a ∈ (t, x, y, z)`,
/// taken analytically from `G_reg = −1/(2π² σ)`:
///
/// ```text
/// ∂_a ∂_{a′} G_reg = (1/2π²) (σ_{aa′}/σ² − 2 σ_a σ_{a′}/σ³)
/// ```
pub fn regularized_mixed_derivatives<T: Scalar>(
    e1: &SpacetimeEvent<T>,
    e2: &SpacetimeEvent<T>,
) -> Result<[T; 4]> {
    for e in [e1, e2] {
        if !(e.z > T::zero()) {
            return Err(Error::BehindWall { z: e.z.as_f64() });
        }
    }
    let (sigma, scale) = image_interval(e1, e2);
    let sigma = check_interval(sigma, scale)?;
    let two = T::lit(2.0);
    let dt = e1.t - e2.t;
    let dx = e1.x - e2.x;
    let dy = e1.y - e2.y;
    let s = e1.z + e2.z;
    // (σ_a, σ_{a′}, σ_{aa′}) per coordinate
    let parts = [
        (-two * dt, two * dt, two),
        (two * dx, -two * dx, -two),
        (two * dy, -two * dy, -two),
        (two * s, two * s, two),
    ];
    let k = two_pi_sq::<T>().recip();
    let s2 = sigma * sigma;
    let s3 = s2 * sigma;
    Ok(parts.map(|(da, db, dab)| k * (dab / s2 - two * da * db / s3)))
}

/// Equal-time field correlator `(1/2) G_reg = −1/(4π² ρ²)`, ρ the distance
/// from `p` to the mirror image of `q`.
pub fn field_correlator<T: Scalar>(p: &SpatialPoint<T>, q: &SpatialPoint<T>) -> Result<T> {
    Ok(T::lit(0.5) * g_regularized(&p.at_time(T::zero()), &q.at_time(T::zero()))?)
}

/// Equal-time momentum correlator `(1/2) ∂_t ∂_{t′} G_reg = 1/(2π² ρ⁴)`.
pub fn momentum_correlator<T: Scalar>(p: &SpatialPoint<T>, q: &SpatialPoint<T>) -> Result<T> {
    let d = regularized_mixed_derivatives(&p.at_time(T::zero()), &q.at_time(T::zero()))?;
    Ok(T::lit(0.5) * d[0])
}

/// The six regularized components for a pair geometry.
pub fn components<T: Scalar>(geom: &PairGeometry<T>) -> ComponentSet<T> {
    let (p, q) = geom.centers();
    // Geometry invariants guarantee positive heights, so these cannot fail.
    let field = |u: &SpatialPoint<T>, v: &SpatialPoint<T>| {
        field_correlator(u, v).expect("valid geometry has non-singular image interval")
    };
    let momentum = |u: &SpatialPoint<T>, v: &SpatialPoint<T>| {
        momentum_correlator(u, v).expect("valid geometry has non-singular image interval")
    };
    ComponentSet {
        a: field(&p, &p),
        b: momentum(&p, &p),
        a_prime: field(&q, &q),
        b_prime: momentum(&q, &q),
        c: field(&p, &q),
        d: momentum(&p, &q),
    }
}

/// Central second-difference estimate of `d = lim (1/2) ∂_t ∂_{t′} G_reg`
/// with time step `h`. Error is `O(h²)`.
///
/// Returns [`Error::StepTooLarge`] if the estimate is off the analytic value
/// by more than 50%.
pub fn d_component_by_differentiation<T: Scalar>(geom: &PairGeometry<T>, h: T) -> Result<T> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("step h = {h} must be > 0")));
    }
    let analytic = components(geom).d;
    let too_large = |estimate: T| Error::StepTooLarge {
        step: h.as_f64(),
        estimate: estimate.as_f64(),
        analytic: analytic.as_f64(),
    };
    let (p, q) = geom.centers();
    let at = |t: T| g_regularized(&p.at_time(t), &q.at_time(T::zero()));
    let (plus, centre, minus) = match (at(h), at(T::zero()), at(-h)) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        _ => return Err(too_large(T::nan())),
    };
    // G depends on t − t′ only, so ∂_t ∂_{t′} G = −G''(t − t′).
    let estimate = -T::lit(0.5) * (plus - T::lit(2.0) * centre + minus) / (h * h);
    if (estimate - analytic).abs() > T::lit(0.5) * analytic.abs() {
        return Err(too_large(estimate));
    }
    Ok(estimate)
}

fn check_height<T: Scalar>(z: T) -> Result<()> {
    if !(z > T::zero()) || !z.is_finite() {
        return Err(Error::BehindWall { z: z.as_f64() });
    }
    Ok(())
}

/// Boundary-induced vacuum energy density at height `z`:
/// `(1/4) lim (∂_t ∂_{t′} + ∇·∇′) G_reg`, equal to `−1/(16π² z⁴)`.
pub fn casimir_energy_density<T: Scalar>(z: T) -> Result<T> {
    check_height(z)?;
    let e = SpacetimeEvent::new(T::zero(), T::zero(), z, T::zero());
    let parts = regularized_mixed_derivatives(&e, &e)?;
    Ok(T::lit(0.25) * parts.iter().copied().sum::<T>())
}

/// Finite-difference cross-check of [`casimir_energy_density`]: four-point
/// mixed differences of `G_reg` in each coordinate, Richardson-combined over
/// steps `h` and `h/2` (error `O(h⁴)`).
pub fn casimir_energy_density_fd<T: Scalar>(z: T, h: T) -> Result<T> {
    check_height(z)?;
    if !(h > T::zero()) || !(h < z) {
        return Err(Error::InvalidArgument(format!(
            "step h = {h} must satisfy 0 < h < z = {z}"
        )));
    }
    let base = SpacetimeEvent::new(T::zero(), T::zero(), z, T::zero());
    let shift = |e: SpacetimeEvent<T>, axis: usize, by: T| {
        let mut e = e;
        match axis {
            0 => e.t = e.t + by,
            1 => e.x = e.x + by,
            2 => e.y = e.y + by,
            _ => e.z = e.z + by,
        }
        e
    };
    let laplacian_sum = |step: T| -> Result<T> {
        let mut total = T::zero();
        for axis in 0..4 {
            let g = |s1: T, s2: T| g_regularized(&shift(base, axis, s1), &shift(base, axis, s2));
            let mixed = g(step, step)? - g(step, -step)? - g(-step, step)? + g(-step, -step)?;
            total = total + mixed / (T::lit(4.0) * step * step);
        }
        Ok(total)
    };
    let coarse = laplacian_sum(h)?;
    let fine = laplacian_sum(h * T::lit(0.5))?;
    let extrapolated = (T::lit(4.0) * fine - coarse) / T::lit(3.0);
    Ok(T::lit(0.25) * extrapolated)
}
