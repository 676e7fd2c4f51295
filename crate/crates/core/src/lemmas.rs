//! Checkers for the two elementary inequalities behind the bound `F ≤ −1/4`:
//!
//! * `1/(X+Y)ⁿ ≤ (1/Xⁿ + 1/Yⁿ) / 2ⁿ⁺¹`
//! * `X³ + Y³ ≥ XY² + YX²`
//!
//! for `X, Y > 0`. Both are evaluated in `f64` first; when the two sides are
//! within a rounding guard band of each other the comparison is redone
//! exactly in rational arithmetic on the same binary inputs.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;

use crate::error::{Error, Result};

/// How the smaller side compares with the larger side of an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Strict,
    Equal,
    Violated,
}

impl Comparison {
    /// `a ≤ b` read as an inequality outcome.
    fn of<T: PartialOrd>(a: &T, b: &T) -> Self {
        match a.partial_cmp(b) {
            Some(Ordering::Less) => Comparison::Strict,
            Some(Ordering::Equal) => Comparison::Equal,
            _ => Comparison::Violated,
        }
    }

    pub fn holds(&self) -> bool {
        !matches!(self, Comparison::Violated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InequalityCheck {
    pub outcome: Comparison,
    /// `true` when the double-precision result fell inside the guard band and
    /// the exact rational comparison decided.
    pub escalated: bool,
}

impl InequalityCheck {
    pub fn holds(&self) -> bool {
        self.outcome.holds()
    }

    pub fn is_equality(&self) -> bool {
        self.outcome == Comparison::Equal
    }
}

fn powu<T: Num + Clone>(x: &T, n: u32) -> T {
    (0..n).fold(T::one(), |acc, _| acc * x.clone())
}

/// `(smaller, larger)` sides of the power-mean inequality in any exact or
/// floating number type.
pub fn power_mean_sides<T: Num + Clone>(x: &T, y: &T, n: u32) -> (T, T) {
    let two = T::one() + T::one();
    let lhs = T::one() / powu(&(x.clone() + y.clone()), n);
    let rhs = (T::one() / powu(x, n) + T::one() / powu(y, n)) / powu(&two, n + 1);
    (lhs, rhs)
}

/// `(smaller, larger)` sides of the cubic rearrangement inequality.
pub fn cubic_sides<T: Num + Clone>(x: &T, y: &T) -> (T, T) {
    let lhs = x.clone() * y.clone() * y.clone() + y.clone() * x.clone() * x.clone();
    let rhs = powu(x, 3) + powu(y, 3);
    (lhs, rhs)
}

pub fn power_mean_comparison<T: Num + Clone + PartialOrd>(x: &T, y: &T, n: u32) -> Comparison {
    let (lhs, rhs) = power_mean_sides(x, y, n);
    Comparison::of(&lhs, &rhs)
}

pub fn cubic_comparison<T: Num + Clone + PartialOrd>(x: &T, y: &T) -> Comparison {
    let (lhs, rhs) = cubic_sides(x, y);
    Comparison::of(&lhs, &rhs)
}

fn positive_inputs(x: f64, y: f64) -> Result<(BigRational, BigRational)> {
    if !(x > 0.0 && x.is_finite() && y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "inequality arguments must be finite and positive, got X = {x}, Y = {y}"
        )));
    }
    let exact = |v: f64| BigRational::from_float(v).expect("finite float is rational");
    Ok((exact(x), exact(y)))
}

/// Decides `lhs ≤ rhs` in double precision unless the sides are within
/// `ulps` units of rounding of each other.
fn guarded(lhs: f64, rhs: f64, ulps: f64) -> Option<Comparison> {
    if !lhs.is_finite() || !rhs.is_finite() {
        return None;
    }
    let band = ulps * f64::EPSILON * lhs.abs().max(rhs.abs());
    if lhs < rhs - band {
        Some(Comparison::Strict)
    } else if lhs > rhs + band {
        Some(Comparison::Violated)
    } else {
        None
    }
}

pub fn check_power_mean_inequality(x: f64, y: f64, n: u32) -> Result<InequalityCheck> {
    if n == 0 {
        return Err(Error::InvalidArgument("power n must be positive".into()));
    }
    let (xr, yr) = positive_inputs(x, y)?;
    let (lhs, rhs) = power_mean_sides(&x, &y, n);
    // Each side accumulates at most ~2n+4 roundings.
    let ulps = 4.0 * (2 * n + 4) as f64;
    Ok(match guarded(lhs, rhs, ulps) {
        Some(outcome) => InequalityCheck {
            outcome,
            escalated: false,
        },
        None => InequalityCheck {
            outcome: power_mean_comparison(&xr, &yr, n),
            escalated: true,
        },
    })
}

pub fn check_cubic_rearrangement(x: f64, y: f64) -> Result<InequalityCheck> {
    let (xr, yr) = positive_inputs(x, y)?;
    let (lhs, rhs) = cubic_sides(&x, &y);
    Ok(match guarded(lhs, rhs, 32.0) {
        Some(outcome) => InequalityCheck {
            outcome,
            escalated: false,
        },
        None => InequalityCheck {
            outcome: cubic_comparison(&xr, &yr),
            escalated: true,
        },
    })
}

/// Exact rational `X = p/q` helper for callers that want to stay off floats.
pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_at_x_equals_y() {
        for n in 1..=6 {
            let c = check_power_mean_inequality(1.0, 1.0, n).unwrap();
            assert!(c.is_equality() && c.escalated, "n = {n}: {c:?}");
            let c = check_power_mean_inequality(0.37, 0.37, n).unwrap();
            assert!(c.is_equality(), "n = {n}");
        }
        assert!(check_cubic_rearrangement(2.5, 2.5).unwrap().is_equality());
    }

    #[test]
    fn strict_cases() {
        // 1/27 < (1 + 1/8)/16
        let c = check_power_mean_inequality(1.0, 2.0, 3).unwrap();
        assert_eq!(c.outcome, Comparison::Strict);
        let (lhs, rhs) = power_mean_sides(&rational(1, 1), &rational(2, 1), 3);
        assert_eq!(lhs, rational(1, 27));
        assert_eq!(rhs, rational(9, 128));
        // 9 ≥ 6
        let (lhs, rhs) = cubic_sides(&rational(1, 1), &rational(2, 1));
        assert_eq!((lhs, rhs), (rational(6, 1), rational(9, 1)));
        assert_eq!(check_cubic_rearrangement(1.0, 2.0).unwrap().outcome, Comparison::Strict);
    }

    #[test]
    fn near_ties_escalate_to_exact_arithmetic() {
        let x = 1.0;
        let y = 1.0 + f64::EPSILON;
        let c = check_power_mean_inequality(x, y, 4).unwrap();
        assert!(c.escalated);
        assert_eq!(c.outcome, Comparison::Strict);
        let c = check_cubic_rearrangement(x, y).unwrap();
        assert!(c.escalated);
        assert_eq!(c.outcome, Comparison::Strict);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(check_power_mean_inequality(0.0, 1.0, 2).is_err());
        assert!(check_power_mean_inequality(1.0, 1.0, 0).is_err());
        assert!(check_cubic_rearrangement(-1.0, 1.0).is_err());
        assert!(check_cubic_rearrangement(f64::INFINITY, 1.0).is_err());
    }
}
