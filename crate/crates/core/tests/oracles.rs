use std::f64::consts::PI;

use bvac::oracle::lattice::{
    chain_ground_covariance, default_resolution, halfspace_component, oracle_report, ChainBoundary, ChainSpec,
};
use bvac::oracle::momentum::{
    extrapolate_regulator, momentum_report, phi_phi_image_integral, MomentumOracleConfig,
};
use bvac::oracle::{ProbePair, Quantity};

#[test]
fn momentum_oracle_source_never_touches_closed_forms() {
    let source = include_str!("../src/oracle/momentum.rs");
    for forbidden in ["greens", "g_regularized", "field_correlator", "momentum_correlator"] {
        assert!(!source.contains(forbidden), "momentum oracle mentions {forbidden}");
    }
}

#[test]
fn lattice_oracle_source_never_touches_closed_forms() {
    let source = include_str!("../src/oracle/lattice.rs");
    for forbidden in ["greens", "g_regularized", "field_correlator", "momentum_correlator"] {
        assert!(!source.contains(forbidden), "lattice oracle mentions {forbidden}");
    }
}

#[test]
fn momentum_oracle_matches_closed_forms() {
    let probes: Vec<ProbePair<f64>> = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&r| ProbePair::new(0.0, r / 2.0, r / 2.0))
        .collect();
    let report = momentum_report(&probes, &MomentumOracleConfig::default()).unwrap();
    assert_eq!(report.len(), 8);
    for row in &report {
        assert!(row.relative_error <= 1e-3, "{:?}", row);
    }
}

#[test]
fn regulator_only_suppresses() {
    let r = 1.3;
    let values: Vec<f64> = [0.05, 0.1, 0.2, 0.4, 0.8]
        .iter()
        .map(|&e| phi_phi_image_integral(r, e * r).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[0].abs() > w[1].abs()));
}

#[test]
fn extrapolation_error_estimates_shrink() {
    let r = 2.0;
    let samples: Vec<(f64, f64)> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&f| (f * r, phi_phi_image_integral(r, f * r).unwrap().value))
        .collect();
    let ex = extrapolate_regulator(&samples).unwrap();
    assert!(ex.error_sequence.windows(2).all(|w| w[1] < w[0]), "{:?}", ex.error_sequence);
    assert!((ex.value + 1.0 / (16.0 * PI * PI)).abs() < 1e-6 / (16.0 * PI * PI));
}

#[test]
fn chains_respect_uncertainty_bound() {
    for boundary in [ChainBoundary::DirichletWall, ChainBoundary::FreeExtended] {
        for (sites, spacing, kperp) in [(16, 0.1, 0.0), (24, 0.5, 1.0), (40, 0.05, 7.0)] {
            let cov = chain_ground_covariance(&ChainSpec::new(sites, spacing, kperp, boundary).unwrap()).unwrap();
            // Both blocks are functions of the same K, so the product is
            // symmetric and every eigenvalue sits on the diagonal.
            let xp = product(&cov.phi_phi, &cov.pi_pi);
            for (i, row) in xp.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if i == j {
                        assert!(v >= 0.25 - 1e-10, "eigenvalue {v} below 1/4");
                    } else {
                        assert!(v.abs() < 1e-10, "off-diagonal {v}");
                    }
                }
            }
        }
    }
}

fn product(x: &[Vec<f64>], p: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * p[k][j]).sum()).collect())
        .collect()
}

#[test]
fn wall_suppresses_fluctuations() {
    let a = 0.1;
    for kperp in [0.0, 0.5, 3.0] {
        let wall = chain_ground_covariance(&ChainSpec::new(64, a, kperp, ChainBoundary::DirichletWall).unwrap()).unwrap();
        let free_spec = ChainSpec::new(257, a, kperp, ChainBoundary::FreeExtended).unwrap();
        let free = chain_ground_covariance(&free_spec).unwrap();
        for n in [1usize, 4, 10, 20] {
            let w = wall.phi_phi[n - 1][n - 1];
            let f_idx = free_spec.site_index(n).unwrap();
            let f = free.phi_phi[f_idx][f_idx];
            assert!(w <= f, "k = {kperp}, n = {n}: {w} > {f}");
        }
        // the site next to the wall fluctuates less than one deep in the bulk
        assert!(wall.phi_phi[0][0] < wall.phi_phi[30][30]);
    }
}

#[test]
fn lattice_estimate_converges_under_refinement() {
    let p = ProbePair::new(1.0, 1.0, 1.0);
    let coarse = oracle_report(&[p], &|q| default_resolution(q)).unwrap();
    let fine = oracle_report(&[p], &|q| default_resolution(q).refined()).unwrap();
    let c = |rows: &[bvac::OracleComparison64]| {
        rows.iter().find(|r| r.quantity == Quantity::FieldField).unwrap().relative_error
    };
    assert!(c(&coarse) <= 0.10);
    assert!(c(&fine) < c(&coarse), "{} !< {}", c(&fine), c(&coarse));
}

#[test]
fn lattice_image_term_tracks_sum_of_heights() {
    // Same z + z′, different z − z′: the image term barely moves.
    let a = 1.0 / 8.0;
    let res = |z: f64, zp: f64| bvac::oracle::lattice::LatticeResolution { spacing: a, ..default_resolution(&ProbePair::new(0.0, z, zp)) };
    let sym = halfspace_component(1.5, 1.5, 0.0, &res(1.5, 1.5)).unwrap();
    let asym = halfspace_component(1.0, 2.0, 0.0, &res(1.0, 2.0)).unwrap();
    assert!((sym.c - asym.c).abs() < 0.02 * sym.c.abs(), "{} vs {}", sym.c, asym.c);
    // Doubling z + z′ divides it by about four.
    let far = halfspace_component(3.0, 3.0, 0.0, &res(3.0, 3.0)).unwrap();
    let ratio = sym.c / far.c;
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
}
