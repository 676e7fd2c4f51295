//! Momentum-space oracle for the image-term correlators.
//!
//! The image contribution to the equal-time correlators is a mode sum over
//! `d³k / ((2π)³ 2ω)` with `ω = |k|`. After the angular integration it
//! reduces to a radial integral of `kᵖ sin(kR)`, which only converges with a
//! regulator `e^{−εk}`. The radial integral is computed by adaptive Gauss
//! quadrature panel by panel, and the regulator is removed by polynomial
//! extrapolation in `ε²`.

use rayon::prelude::*;

use super::{OracleComparison, OracleDetails, ProbePair, Quantity};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, Rule1d};
use crate::scalar::Scalar;

/// Tuning for the regulated radial integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumOracleConfig {
    /// Truncation `k_max = cutoff / ε`.
    pub cutoff: f64,
    /// Smallest admissible `ε / R`.
    pub regulator_floor: f64,
    /// Largest admissible analytic tail bound relative to the integral.
    pub tail_tolerance: f64,
    /// Panel acceptance threshold (relative to the panel envelope).
    pub panel_tolerance: f64,
    /// `ε / R` values used for extrapolation, largest first.
    pub epsilon_fractions: Vec<f64>,
}

impl Default for MomentumOracleConfig {
    fn default() -> Self {
        Self {
            cutoff: 50.0,
            regulator_floor: 1e-3,
            tail_tolerance: 1e-10,
            panel_tolerance: 1e-14,
            epsilon_fractions: vec![0.1, 0.05, 0.025],
        }
    }
}

/// One regulated radial integral with its quadrature metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegulatedIntegral<T> {
    pub distance: T,
    pub epsilon: T,
    pub value: T,
    pub panels: usize,
    pub evaluations: usize,
    pub truncation: T,
    pub tail_bound: T,
}

const PANEL_NODES: usize = 15;
const MAX_PANEL_DEPTH: usize = 24;

fn check_inputs<T: Scalar>(distance: T, epsilon: T, config: &MomentumOracleConfig) -> Result<()> {
    if !(distance > T::zero()) || !distance.is_finite() {
        return Err(Error::InvalidArgument(format!("image distance R = {distance} must be > 0")));
    }
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("regulator epsilon = {epsilon} must be > 0")));
    }
    let floor = T::lit(config.regulator_floor) * distance;
    if epsilon < floor {
        return Err(Error::RegulatorTooSmall {
            epsilon: epsilon.as_f64(),
            floor: floor.as_f64(),
            distance: distance.as_f64(),
        });
    }
    Ok(())
}

/// Upper bound on `∫_K^∞ kᵖ e^{−εk} dk` for `p ∈ {0, 2}`.
fn exponential_tail<T: Scalar>(power: i32, k: T, epsilon: T) -> T {
    let decay = (-epsilon * k).exp();
    match power {
        0 => decay / epsilon,
        _ => {
            let two = T::lit(2.0);
            decay * (k * k / epsilon + two * k / (epsilon * epsilon) + two / epsilon.powi(3))
        }
    }
}

struct Panels<'a, T> {
    rule: &'a Rule1d<T>,
    tolerance: T,
    distance: T,
    evaluations: usize,
}

impl<T: Scalar> Panels<'_, T> {
    fn integrate<F: Fn(T) -> T>(&mut self, f: &F, lo: T, hi: T, envelope: T, depth: usize) -> Result<T> {
        let mid = (lo + hi) * T::lit(0.5);
        let whole = self.rule.integrate(lo, hi, f);
        let halves = self.rule.integrate(lo, mid, f) + self.rule.integrate(mid, hi, f);
        self.evaluations += 3 * self.rule.len();
        // sin(kR) cannot be evaluated better than ~ε·kR, so the acceptance
        // floor grows with the phase.
        let phase_floor = T::lit(64.0) * T::epsilon() * (T::one() + hi * self.distance);
        let scale = envelope * (hi - lo);
        if (whole - halves).abs() <= self.tolerance.max(phase_floor) * scale {
            return Ok(halves);
        }
        if depth >= MAX_PANEL_DEPTH {
            return Err(Error::Quadrature(format!(
                "panel [{lo}, {hi}] not resolved after {depth} bisections"
            )));
        }
        Ok(self.integrate(f, lo, mid, envelope, depth + 1)? + self.integrate(f, mid, hi, envelope, depth + 1)?)
    }
}

/// `∫₀^{k_max} kᵖ sin(kR) e^{−εk} dk` over half-period panels.
fn radial_integral<T: Scalar>(
    power: i32,
    distance: T,
    epsilon: T,
    config: &MomentumOracleConfig,
) -> Result<RegulatedIntegral<T>> {
    check_inputs(distance, epsilon, config)?;
    let half_period = T::PI() / distance;
    let k_cut = T::lit(config.cutoff) / epsilon;
    let panels = (k_cut / half_period).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    let truncation = half_period * T::lit(panels as f64);

    let rule = gauss_legendre::<T>(PANEL_NODES);
    let mut quad = Panels {
        rule: &rule,
        tolerance: T::lit(config.panel_tolerance),
        distance,
        evaluations: 0,
    };
    let integrand = |k: T| k.powi(power) * (k * distance).sin() * (-epsilon * k).exp();
    let mut total = T::zero();
    for i in 0..panels {
        let lo = half_period * T::lit(i as f64);
        let hi = half_period * T::lit((i + 1) as f64);
        // Envelope kᵖ e^{−εk} is maximal at k = p/ε.
        let k_peak = (T::lit(power as f64) / epsilon).max(lo).min(hi);
        let envelope = k_peak.powi(power) * (-epsilon * k_peak).exp();
        total = total + quad.integrate(&integrand, lo, hi, envelope.max(T::min_positive_value()), 0)?;
    }

    let tail_bound = exponential_tail(power, truncation, epsilon);
    if tail_bound > T::lit(config.tail_tolerance) * total.abs() {
        return Err(Error::Quadrature(format!(
            "truncation at k = {truncation} leaves tail bound {tail_bound:e} against integral {total:e}"
        )));
    }
    Ok(RegulatedIntegral {
        distance,
        epsilon,
        value: total,
        panels,
        evaluations: quad.evaluations,
        truncation,
        tail_bound,
    })
}

fn mode_sum_prefactor<T: Scalar>(distance: T) -> T {
    let pi = T::PI();
    -(T::lit(4.0) * pi * pi * distance).recip()
}

/// Regulated estimate of the field-field image correlator at image distance
/// `R`: `−(1/4π²R) ∫₀^∞ sin(kR) e^{−εk} dk`, tending to `−1/(4π²R²)`.
pub fn phi_phi_image_integral<T: Scalar>(distance: T, epsilon: T) -> Result<RegulatedIntegral<T>> {
    phi_phi_image_integral_with(distance, epsilon, &MomentumOracleConfig::default())
}

pub fn phi_phi_image_integral_with<T: Scalar>(
    distance: T,
    epsilon: T,
    config: &MomentumOracleConfig,
) -> Result<RegulatedIntegral<T>> {
    let mut out = radial_integral(0, distance, epsilon, config)?;
    out.value = mode_sum_prefactor(distance) * out.value;
    Ok(out)
}

/// Regulated estimate of the momentum-momentum image correlator:
/// `−(1/4π²R) ∫₀^∞ k² sin(kR) e^{−εk} dk`, tending to `+1/(2π²R⁴)`.
pub fn pi_pi_image_integral<T: Scalar>(distance: T, epsilon: T) -> Result<RegulatedIntegral<T>> {
    pi_pi_image_integral_with(distance, epsilon, &MomentumOracleConfig::default())
}

pub fn pi_pi_image_integral_with<T: Scalar>(
    distance: T,
    epsilon: T,
    config: &MomentumOracleConfig,
) -> Result<RegulatedIntegral<T>> {
    let mut out = radial_integral(2, distance, epsilon, config)?;
    out.value = mode_sum_prefactor(distance) * out.value;
    Ok(out)
}

/// Result of removing the regulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation<T> {
    pub value: T,
    pub error_estimate: T,
    /// `|T_m − T_{m−1}|` for successive extrapolation orders `m = 1..n−1`.
    pub error_sequence: Vec<T>,
}

/// Default relative threshold above which an extrapolation is rejected.
pub const EXTRAPOLATION_TOLERANCE: f64 = 1e-2;

/// Polynomial extrapolation in `ε²` to `ε = 0` (Neville's scheme).
///
/// Needs at least three samples with strictly decreasing `ε`. The error
/// estimate is the change between the two highest orders.
pub fn extrapolate_regulator<T: Scalar>(samples: &[(T, T)]) -> Result<Extrapolation<T>> {
    extrapolate_regulator_with(samples, T::lit(EXTRAPOLATION_TOLERANCE))
}

pub fn extrapolate_regulator_with<T: Scalar>(samples: &[(T, T)], tolerance: T) -> Result<Extrapolation<T>> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples { got: samples.len() });
    }
    if samples
        .windows(2)
        .any(|w| !(w[1].0 < w[0].0) || !(w[1].0 > T::zero()))
    {
        return Err(Error::SamplesNotDecreasing);
    }
    let x: Vec<T> = samples.iter().map(|(e, _)| *e * *e).collect();
    // Neville tableau evaluated at x = 0; `column[i]` after pass m is the
    // degree-m interpolant through samples i..=i+m.
    let mut column: Vec<T> = samples.iter().map(|(_, v)| *v).collect();
    let mut diagonal = vec![column[0]];
    for m in 1..samples.len() {
        for i in 0..samples.len() - m {
            let (xi, xj) = (x[i], x[i + m]);
            // P(0) = P_hi + (P_hi − P_lo)·x_j/(x_i − x_j); exact for constant data
            column[i] = column[i + 1] + (column[i + 1] - column[i]) * xj / (xi - xj);
        }
        diagonal.push(column[0]);
    }
    let error_sequence: Vec<T> = diagonal.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let value = *diagonal.last().expect("non-empty");
    let error_estimate = *error_sequence.last().expect("at least two orders");
    if !value.is_finite() || error_estimate > tolerance * value.abs() {
        return Err(Error::ExtrapolationUnstable {
            estimate: value.as_f64(),
            error: error_estimate.as_f64(),
        });
    }
    Ok(Extrapolation {
        value,
        error_estimate,
        error_sequence,
    })
}

/// Extrapolated `(c, d)` oracle estimates at image distance `R`.
pub fn image_components<T: Scalar>(
    distance: T,
    config: &MomentumOracleConfig,
) -> Result<(Extrapolation<T>, Extrapolation<T>, Vec<T>)> {
    let epsilons: Vec<T> = config
        .epsilon_fractions
        .iter()
        .map(|&f| T::lit(f) * distance)
        .collect();
    let samples: Vec<Result<(T, T, T)>> = epsilons
        .par_iter()
        .map(|&eps| {
            let phi = phi_phi_image_integral_with(distance, eps, config)?.value;
            let pi = pi_pi_image_integral_with(distance, eps, config)?.value;
            Ok((eps, phi, pi))
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let phi: Vec<(T, T)> = samples.iter().map(|&(e, p, _)| (e, p)).collect();
    let pi: Vec<(T, T)> = samples.iter().map(|&(e, _, q)| (e, q)).collect();
    Ok((extrapolate_regulator(&phi)?, extrapolate_regulator(&pi)?, epsilons))
}

/// Oracle-versus-closed-form table for `c` and `d` at each probe pair.
pub fn momentum_report<T: Scalar>(
    probes: &[ProbePair<T>],
    config: &MomentumOracleConfig,
) -> Result<Vec<OracleComparison<T>>> {
    let mut out = Vec::with_capacity(2 * probes.len());
    for p in probes {
        let (c_est, d_est, epsilons) = image_components(p.image_distance(), config)?;
        let closed = p.closed_form()?;
        out.push(OracleComparison::new(
            Quantity::FieldField,
            *p,
            closed.c,
            c_est.value,
            OracleDetails::Momentum {
                epsilons: epsilons.clone(),
                error_estimate: c_est.error_estimate,
            },
        ));
        out.push(OracleComparison::new(
            Quantity::MomentumMomentum,
            *p,
            closed.d,
            d_est.value,
            OracleDetails::Momentum {
                epsilons,
                error_estimate: d_est.error_estimate,
            },
        ));
    }
    Ok(out)
}
