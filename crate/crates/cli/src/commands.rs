use bvac::collective::{tilde_variance_quadrature, QuadratureSpec};
use bvac::greens::{casimir_energy_density, casimir_energy_density_fd, components, default_box_edge};
use bvac::oracle::lattice::{default_resolution, oracle_report};
use bvac::oracle::momentum::{momentum_report, MomentumOracleConfig};
use bvac::oracle::{OracleDetails, ProbePair};
use bvac::scan::{find_max_f, scan, BoxEdges, Interval, MaxSearchRegion};
use bvac::{OracleComparison64, PairGeometry64, ScanRange64};

use crate::config::{RunConfig, ValueSpec};
use crate::output::{Cell, Fields, Report};
use crate::CliError;

pub const SCAN_COLUMNS: [&str; 8] = ["r", "z", "zprime", "L", "F_expanded", "F_detform", "verdict", "max_flag"];

/// Relative finite-difference step for the Casimir cross-check.
pub const CASIMIR_FD_STEP: f64 = 1e-3;

fn inputs(cfg: &RunConfig) -> Fields {
    let mut f = Fields::new();
    for (k, v) in &cfg.inputs {
        f.push(k, v.as_str());
    }
    f
}

/// Box-pair geometries of the Cartesian product of the flag grids, each
/// validated before anything is computed.
fn geometries(cfg: &RunConfig) -> Result<Vec<PairGeometry64>, CliError> {
    let z = cfg.require("z", cfg.z)?.values();
    let zp = cfg.require("zprime", cfg.zprime)?.values();
    let r = cfg.r.unwrap_or(ValueSpec::Single(0.0)).values();
    let l = cfg.l.map(|s| s.values());
    let mut out = Vec::new();
    for &r in &r {
        for &z in &z {
            for &zp in &zp {
                let edges = l.clone().unwrap_or_else(|| vec![default_box_edge(z, zp)]);
                for edge in edges {
                    let g = PairGeometry64::new(r, z, zp, edge).map_err(|e| {
                        CliError::Usage(format!("geometry r={r}, z={z}, zprime={zp}, L={edge}: {e}"))
                    })?;
                    out.push(g);
                }
            }
        }
    }
    Ok(out)
}

fn geometry_cells(g: &PairGeometry64) -> Vec<Cell> {
    vec![g.r().into(), g.z().into(), g.zprime().into(), g.l().into()]
}

pub fn components_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let geoms = geometries(cfg)?;
    let mut columns = vec!["r", "z", "zprime", "L", "a", "b", "a_prime", "b_prime", "c", "d"];
    let spec = cfg.nodes.map(|n| QuadratureSpec {
        nodes_per_axis: n,
        ..QuadratureSpec::default()
    });
    if let Some(spec) = &spec {
        spec.validate().map_err(CliError::from_core)?;
        columns.extend(["c_smeared", "d_smeared"]);
    }
    let mut report = Report::new("components", inputs(cfg), columns);
    for g in &geoms {
        let c = components(g);
        let mut row = geometry_cells(g);
        row.extend([c.a, c.b, c.a_prime, c.b_prime, c.c, c.d].map(Cell::Num));
        if let Some(spec) = &spec {
            let v = tilde_variance_quadrature(g, spec).map_err(CliError::from_core)?.matrix;
            row.push(v.get(0, 2).into());
            row.push((v.get(1, 3) / g.l().powi(6)).into());
        }
        report.push_row(row);
    }
    if let Some(spec) = &spec {
        report.diagnostics.push("nodes_per_axis", spec.nodes_per_axis);
    }
    Ok(report)
}

pub fn scan_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    // Validate the whole grid first; the scan itself never skips a point.
    let geoms = geometries(cfg)?;
    let range = ScanRange64 {
        r_values: cfg.r.unwrap_or(ValueSpec::Single(0.0)).values(),
        z_values: cfg.require("z", cfg.z)?.values(),
        zprime_values: cfg.require("zprime", cfg.zprime)?.values(),
        box_edges: match cfg.l {
            Some(l) => BoxEdges::Fixed(l.values()),
            None => BoxEdges::Default,
        },
    };
    let outcome = scan(&range).map_err(CliError::from_core)?;
    let mut report = Report::new("scan", inputs(cfg), SCAN_COLUMNS.to_vec());
    let mut max_f = f64::NEG_INFINITY;
    for rec in &outcome.records {
        let mut row = geometry_cells(&rec.geometry);
        row.extend([
            Cell::Num(rec.f_expanded),
            Cell::Num(rec.f_detform),
            rec.verdict.as_str().into(),
            rec.max_flag.into(),
        ]);
        max_f = max_f.max(rec.f_expanded);
        report.push_row(row);
    }
    report.diagnostics.push("points", geoms.len());
    report.diagnostics.push("skipped", outcome.skipped);
    report.diagnostics.push("max_F_expanded", max_f);
    Ok(report)
}

pub fn find_max_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let interval = |v: ValueSpec| {
        let (lo, hi) = v.bounds();
        Interval::new(lo, hi).map_err(CliError::from_core)
    };
    let z = cfg.require("z", cfg.z)?;
    let zp = cfg.require("zprime", cfg.zprime)?;
    let r = cfg.r.unwrap_or(ValueSpec::Single(0.0));
    let l = match cfg.l {
        Some(ValueSpec::Single(l)) => l,
        Some(_) => return Err(CliError::Usage("find-max needs a single --L value".into())),
        None => default_box_edge(z.bounds().0, zp.bounds().0),
    };
    let region = MaxSearchRegion {
        r: interval(r)?,
        z: interval(z)?,
        zprime: interval(zp)?,
        l,
    };
    let best = find_max_f(&region, cfg.tolerance).map_err(CliError::from_core)?;
    let mut report = Report::new(
        "find-max",
        inputs(cfg),
        vec!["r", "z", "zprime", "L", "F", "F_plus_quarter", "levels"],
    );
    let mut row = geometry_cells(&best.geometry);
    // `+ 0.0` turns a negative zero into zero
    row.extend([Cell::Num(best.f), Cell::Num(best.excess + 0.0), best.levels.into()]);
    report.push_row(row);
    report.diagnostics.push("tolerance", cfg.tolerance);
    let contains_coincidence = region.r.lo == 0.0 && region.z.lo.max(region.zprime.lo) <= region.z.hi.min(region.zprime.hi);
    report.diagnostics.push("region_contains_coincidence", contains_coincidence);
    Ok(report)
}

pub fn casimir_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let zs = cfg.require("z", cfg.z)?.values();
    if let Some(&bad) = zs.iter().find(|z| !(**z > 0.0)) {
        return Err(CliError::Usage(format!("casimir needs z > 0, got {bad}")));
    }
    let mut report = Report::new(
        "casimir",
        inputs(cfg),
        vec!["z", "energy_density", "energy_density_fd", "energy_density_z4"],
    );
    for z in zs {
        let rho = casimir_energy_density(z).map_err(CliError::from_core)?;
        let fd = casimir_energy_density_fd(z, CASIMIR_FD_STEP * z).map_err(CliError::from_core)?;
        report.push_row(vec![z.into(), rho.into(), fd.into(), (rho * z.powi(4)).into()]);
    }
    report.diagnostics.push("fd_relative_step", CASIMIR_FD_STEP);
    Ok(report)
}

/// Probe pairs from the flags, or `fallback` when no height was given.
fn probes(cfg: &RunConfig, fallback: Vec<ProbePair<f64>>) -> Result<Vec<ProbePair<f64>>, CliError> {
    if cfg.z.is_none() && cfg.zprime.is_none() {
        return Ok(fallback);
    }
    let z = cfg.require("z", cfg.z)?.values();
    let zp = cfg.zprime.map(|v| v.values()).unwrap_or_else(|| z.clone());
    let r = cfg.r.unwrap_or(ValueSpec::Single(0.0)).values();
    let mut out = Vec::new();
    for &r in &r {
        for &z in &z {
            for &zp in &zp {
                if !(z > 0.0 && zp > 0.0 && r >= 0.0) {
                    return Err(CliError::Usage(format!(
                        "probe r={r}, z={z}, zprime={zp}: need z, zprime > 0 and r >= 0"
                    )));
                }
                out.push(ProbePair::new(r, z, zp));
            }
        }
    }
    Ok(out)
}

fn comparison_cells(row: &OracleComparison64) -> Vec<Cell> {
    vec![
        row.quantity.as_str().into(),
        row.probes.r.into(),
        row.probes.z.into(),
        row.probes.zprime.into(),
        row.probes.image_distance().into(),
        row.closed_form.into(),
        row.estimate.into(),
        row.relative_error.into(),
    ]
}

const COMPARISON_COLUMNS: [&str; 8] = ["quantity", "r", "z", "zprime", "R", "closed_form", "estimate", "relative_error"];

pub fn oracle_momentum_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let standard = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&r| ProbePair::new(0.0, r / 2.0, r / 2.0))
        .collect();
    let probes = probes(cfg, standard)?;
    let config = MomentumOracleConfig::default();
    let rows = momentum_report(&probes, &config).map_err(CliError::from_core)?;
    let mut columns = COMPARISON_COLUMNS.to_vec();
    columns.extend(["error_estimate", "epsilons"]);
    let mut report = Report::new("oracle-momentum", inputs(cfg), columns);
    let mut worst = 0.0f64;
    for row in &rows {
        let mut cells = comparison_cells(row);
        if let OracleDetails::Momentum { epsilons, error_estimate } = &row.details {
            cells.push((*error_estimate).into());
            cells.push(Cell::List(epsilons.iter().map(|&e| Cell::Num(e)).collect()));
        }
        worst = worst.max(row.relative_error);
        report.push_row(cells);
    }
    report.diagnostics.push("max_relative_error", worst);
    report.diagnostics.push("cutoff_over_epsilon", config.cutoff);
    Ok(report)
}

pub fn oracle_lattice_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let standard = vec![
        ProbePair::new(0.0, 1.0, 1.0),
        ProbePair::new(0.0, 1.0, 2.0),
        ProbePair::new(1.0, 1.0, 1.0),
        ProbePair::new(1.0, 1.0, 2.0),
    ];
    let probes = probes(cfg, standard)?;
    let (spacing, sites, knodes) = (cfg.spacing, cfg.sites, cfg.knodes);
    let resolution = move |p: &ProbePair<f64>| {
        let mut res = default_resolution(p);
        if let Some(a) = spacing {
            res.spacing = a;
        }
        if let Some(n) = sites {
            res.sites = n;
        }
        if let Some(k) = knodes {
            res.knodes = k;
        }
        res
    };
    let rows = oracle_report(&probes, &resolution).map_err(CliError::from_core)?;
    let mut columns = COMPARISON_COLUMNS.to_vec();
    columns.extend(["spacing", "sites", "knodes"]);
    let mut report = Report::new("oracle-lattice", inputs(cfg), columns);
    let mut worst = 0.0f64;
    for row in &rows {
        let mut cells = comparison_cells(row);
        if let OracleDetails::Lattice { spacing, sites, knodes } = row.details {
            cells.extend([spacing.into(), sites.into(), knodes.into()]);
        }
        worst = worst.max(row.relative_error);
        report.push_row(cells);
    }
    report.diagnostics.push("max_relative_error", worst);
    Ok(report)
}
