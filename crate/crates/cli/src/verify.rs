//! Seeded property suites behind `bvac verify`.
//!
//! Every suite draws from its own ChaCha stream keyed by the seed, so
//! adding a suite never perturbs the samples of another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use bvac::gaussian::{logarithmic_negativity, simon_ppt_functional};
use bvac::greens::{casimir_energy_density, casimir_energy_density_fd};
use bvac::lemmas::{check_cubic_rearrangement, check_power_mean_inequality};
use bvac::oracle::lattice::{chain_ground_covariance, ChainBoundary, ChainSpec};
use bvac::oracle::momentum::{momentum_report, MomentumOracleConfig};
use bvac::oracle::ProbePair;
use bvac::scan::{f_detform, f_expanded};
use bvac::{collective, PairGeometry64, VarianceMatrix64, Verdict};

use crate::commands::CASIMIR_FD_STEP;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest observed value of the suite's checked quantity.
    pub worst: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            cases: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    /// Record one case; NaN counts as a failure.
    fn check(&mut self, value: f64, ok: bool) {
        self.cases += 1;
        if !ok || value.is_nan() {
            self.failures += 1;
        }
        if value > self.worst || value.is_nan() {
            self.worst = value;
        }
    }

    fn finish(self, name: &'static str, tolerance: f64) -> SuiteResult {
        SuiteResult {
            name,
            cases: self.cases,
            failures: self.failures,
            worst: self.worst,
            tolerance,
        }
    }
}

fn stream(seed: u64, suite: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite);
    rng
}

/// `z, z′ ∈ [0.1, 10]`, `r ∈ [0, 10]`, `L ∈ (0, min(z, z′)/5]`.
pub fn random_geometries(rng: &mut ChaCha8Rng, count: usize) -> Vec<PairGeometry64> {
    (0..count)
        .map(|_| {
            let z = rng.gen_range(0.1..=10.0);
            let zp = rng.gen_range(0.1..=10.0);
            let r = rng.gen_range(0.0..=10.0);
            let frac: f64 = 1.0 - rng.gen::<f64>();
            let g = PairGeometry64::new(r, z, zp, frac * z.min(zp) / 5.0);
            g.expect("sampled geometry keeps both boxes above the wall")
        })
        .collect()
}

fn coincidence() -> SuiteResult {
    let mut t = Tally::new();
    for z in [0.5, 1.0, 2.0] {
        for l in [z / 100.0, z / 20.0] {
            let g = PairGeometry64::new(0.0, z, z, l).expect("valid");
            let e = (f_expanded(&g) + 0.25).abs();
            let d = f_detform(&g).map(|f| (f + 0.25).abs()).unwrap_or(f64::NAN);
            t.check(e.max(d), e <= 1e-12 && d <= 1e-12);
        }
    }
    t.finish("coincidence_maximum", 1e-12)
}

fn global_bound_and_paths(geoms: &[PairGeometry64]) -> (SuiteResult, SuiteResult) {
    let evaluated: Vec<(f64, Option<f64>)> = geoms
        .par_iter()
        .map(|g| (f_expanded(g), f_detform(g).ok()))
        .collect();
    let mut bound = Tally::new();
    let mut paths = Tally::new();
    for (e, d) in evaluated {
        let Some(d) = d else {
            bound.check(f64::NAN, false);
            paths.check(f64::NAN, false);
            continue;
        };
        let excess = e.max(d) + 0.25;
        let separable = Verdict::from_functional(d) == Verdict::Separable;
        bound.check(excess, excess <= 1e-12 && separable);
        let gap = (e - d).abs() / e.abs().max(1.0);
        paths.check(gap, gap <= 1e-10);
    }
    (bound.finish("global_bound", 1e-12), paths.finish("path_identity", 1e-10))
}

fn scale_invariance(geoms: &[PairGeometry64]) -> SuiteResult {
    let mut t = Tally::new();
    for g in geoms {
        let f = f_expanded(g);
        for lambda in [0.5, 2.0, 10.0] {
            let diff = g
                .scaled(lambda)
                .map(|s| (f_expanded(&s) - f).abs())
                .unwrap_or(f64::NAN);
            t.check(diff, diff <= 1e-12);
        }
    }
    t.finish("scale_invariance", 1e-12)
}

fn swap_symmetry(geoms: &[PairGeometry64]) -> SuiteResult {
    let mut t = Tally::new();
    for g in geoms {
        let diff = (f_expanded(g) - f_expanded(&g.swapped())).abs();
        t.check(diff, diff == 0.0);
    }
    t.finish("swap_symmetry", 0.0)
}

fn monotone_decay() -> SuiteResult {
    let mut t = Tally::new();
    for z in [0.2, 1.0, 5.0] {
        let l = z / 20.0;
        let mut prev = f_expanded(&PairGeometry64::new(0.0, z, z, l).expect("valid"));
        for i in 1..=100 {
            let f = f_expanded(&PairGeometry64::new(0.1 * i as f64 * z, z, z, l).expect("valid"));
            t.check(f - prev, f <= prev);
            prev = f;
        }
    }
    t.finish("monotone_decay", 0.0)
}

fn casimir(rng: &mut ChaCha8Rng, count: usize) -> (SuiteResult, SuiteResult) {
    let target = -1.0 / (16.0 * std::f64::consts::PI.powi(2));
    let zs: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..=10.0)).collect();
    let mut analytic = Tally::new();
    let mut fd = Tally::new();
    for z in zs {
        let rel = casimir_energy_density(z)
            .map(|e| ((e * z.powi(4) - target) / target).abs())
            .unwrap_or(f64::NAN);
        analytic.check(rel, rel <= 1e-10);
        let rel = casimir_energy_density_fd(z, CASIMIR_FD_STEP * z)
            .map(|e| ((e * z.powi(4) - target) / target).abs())
            .unwrap_or(f64::NAN);
        fd.check(rel, rel <= 1e-6);
    }
    (analytic.finish("casimir_analytic", 1e-10), fd.finish("casimir_finite_difference", 1e-6))
}

fn gaussian_sanity(rng: &mut ChaCha8Rng, geoms: &[PairGeometry64], count: usize) -> SuiteResult {
    let mut t = Tally::new();
    let vacuum = simon_ppt_functional(&VarianceMatrix64::vacuum()).map(|r| r.f.abs());
    let v = vacuum.unwrap_or(f64::NAN);
    t.check(v, v == 0.0);
    let squeezes: Vec<f64> = std::iter::once(0.5)
        .chain((0..count).map(|_| rng.gen_range(0.0..1.5)))
        .collect();
    for s in squeezes {
        let v = VarianceMatrix64::two_mode_squeezed(s);
        let expected = ((4.0 * s).cosh() - 1.0) / 2.0;
        let (dev, entangled) = match simon_ppt_functional(&v) {
            Ok(r) => ((r.f - expected).abs() / expected.max(1.0), r.verdict == Verdict::Entangled),
            Err(_) => (f64::NAN, false),
        };
        t.check(dev, dev <= 1e-10 && (entangled || s == 0.0));
        let en = logarithmic_negativity(&v).map(|e| (e - 2.0 * s).abs()).unwrap_or(f64::NAN);
        t.check(en, en <= 1e-10);
    }
    for g in geoms {
        let m = collective::tilde_variance_closed_form(g).matrix;
        let (d, dpt) = (m.determinant(), m.partial_transpose().determinant());
        let rel = (d - dpt).abs() / d.abs().max(f64::MIN_POSITIVE);
        t.check(rel, rel <= 1e-10);
    }
    t.finish("gaussian_sanity", 1e-10)
}

fn positive_sample(rng: &mut ChaCha8Rng) -> f64 {
    10.0 * (1.0 - rng.gen::<f64>())
}

fn lemmas(rng: &mut ChaCha8Rng, count: usize) -> (SuiteResult, SuiteResult) {
    let mut power = Tally::new();
    let mut cubic = Tally::new();
    for i in 0..count {
        let x = positive_sample(rng);
        // Every eighth sample is an exact tie.
        let y = if i % 8 == 0 { x } else { positive_sample(rng) };
        let n = rng.gen_range(1..=6u32);
        let flag = |ok: bool| if ok { 0.0 } else { 1.0 };
        match check_power_mean_inequality(x, y, n) {
            Ok(c) => {
                let ok = c.holds() && (c.is_equality() == (x == y));
                power.check(flag(ok), ok);
            }
            Err(_) => power.check(f64::NAN, false),
        }
        match check_cubic_rearrangement(x, y) {
            Ok(c) => {
                let ok = c.holds() && (c.is_equality() == (x == y));
                cubic.check(flag(ok), ok);
            }
            Err(_) => cubic.check(f64::NAN, false),
        }
    }
    (power.finish("power_mean_lemma", 0.0), cubic.finish("cubic_lemma", 0.0))
}

fn lattice_uncertainty(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut t = Tally::new();
    for i in 0..count {
        let sites = rng.gen_range(16..=40usize);
        let spacing = rng.gen_range(0.01..1.0);
        let kperp = rng.gen_range(0.0..5.0);
        let boundary = if i % 2 == 0 {
            ChainBoundary::DirichletWall
        } else {
            ChainBoundary::FreeExtended
        };
        let Ok(cov) = ChainSpec::new(sites, spacing, kperp, boundary).and_then(|s| chain_ground_covariance(&s)) else {
            t.check(f64::NAN, false);
            continue;
        };
        // φφ and ππ are functions of one matrix, so their product is
        // diagonal in the site basis up to rounding.
        let n = sites;
        for a in 0..n {
            for b in 0..n {
                let v: f64 = (0..n).map(|k| cov.phi_phi[a][k] * cov.pi_pi[k][b]).sum();
                if a == b {
                    t.check(0.25 - v, v >= 0.25 - 1e-10);
                } else {
                    t.check(v.abs(), v.abs() <= 1e-10);
                }
            }
        }
    }
    t.finish("lattice_uncertainty", 1e-10)
}

fn momentum_oracle() -> SuiteResult {
    let mut t = Tally::new();
    let probes: Vec<ProbePair<f64>> = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&r| ProbePair::new(0.0, r / 2.0, r / 2.0))
        .collect();
    match momentum_report(&probes, &MomentumOracleConfig::default()) {
        Ok(rows) => {
            for row in rows {
                t.check(row.relative_error, row.relative_error <= 1e-3);
            }
        }
        Err(_) => t.check(f64::NAN, false),
    }
    t.finish("momentum_oracle", 1e-3)
}

/// All suites in a fixed order.
pub fn run_suites(seed: u64, samples: usize) -> Vec<SuiteResult> {
    let geoms = random_geometries(&mut stream(seed, 0), samples);
    let small = &geoms[..samples.min(1000)];
    let (bound, paths) = global_bound_and_paths(&geoms);
    let (casimir_analytic, casimir_fd) = casimir(&mut stream(seed, 1), samples.min(1000));
    let (power, cubic) = lemmas(&mut stream(seed, 3), samples.max(1));
    vec![
        coincidence(),
        bound,
        paths,
        scale_invariance(small),
        swap_symmetry(&geoms),
        monotone_decay(),
        casimir_analytic,
        casimir_fd,
        gaussian_sanity(&mut stream(seed, 2), small, samples.min(1000)),
        power,
        cubic,
        lattice_uncertainty(&mut stream(seed, 4), samples.min(20)),
        momentum_oracle(),
    ]
}
