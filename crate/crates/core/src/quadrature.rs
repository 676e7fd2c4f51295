//! One-dimensional quadrature rules on `[-1, 1]` and their tensor products.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    GaussLegendre,
    Trapezoid,
}

/// Nodes and weights on `[-1, 1]`; weights sum to 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> Rule1d<T> {
    pub fn new(rule: Rule, n: usize) -> Self {
        match rule {
            Rule::GaussLegendre => gauss_legendre(n),
            Rule::Trapezoid => trapezoid(n),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn mapped(&self, lo: T, hi: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (hi - lo) * T::lit(0.5);
        let mid = (hi + lo) * T::lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// `∫_lo^hi f`.
    pub fn integrate<F: FnMut(T) -> T>(&self, lo: T, hi: T, mut f: F) -> T {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule by Newton iteration on `P_n`.
pub fn gauss_legendre<T: Scalar>(n: usize) -> Rule1d<T> {
    assert!(n >= 1, "Gauss-Legendre needs at least one node");
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule1d {
        nodes: nodes.into_iter().map(T::lit).collect(),
        weights: weights.into_iter().map(T::lit).collect(),
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Closed trapezoid rule with `n ≥ 2` equally spaced nodes.
pub fn trapezoid<T: Scalar>(n: usize) -> Rule1d<T> {
    assert!(n >= 2, "trapezoid rule needs at least two nodes");
    let h = 2.0 / (n - 1) as f64;
    let nodes = (0..n).map(|i| T::lit(-1.0 + h * i as f64)).collect();
    let weights = (0..n)
        .map(|i| T::lit(if i == 0 || i == n - 1 { 0.5 * h } else { h }))
        .collect();
    Rule1d { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in 1..=12 {
            let rule = gauss_legendre::<f64>(n);
            let sum: f64 = rule.weights.iter().sum();
            assert!((sum - 2.0).abs() < 1e-14);
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
                let q = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn eight_point_nodes_match_tables() {
        let rule = gauss_legendre::<f64>(8);
        assert!((rule.nodes[7] - 0.960_289_856_497_536_2).abs() < 1e-15);
        assert!((rule.weights[7] - 0.101_228_536_290_376_26).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let rule = trapezoid::<f64>(5);
        assert!((rule.integrate(0.0, 3.0, |x| 2.0 * x + 1.0) - 12.0).abs() < 1e-14);
    }
}
