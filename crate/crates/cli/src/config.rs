//! Flag grammar, config-file merging and typed run configuration.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "bvac", version, about = "Vacuum separability near a Dirichlet plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Regularized covariance components a, b, a', b', c, d
    Components,
    /// Separability functional over a grid of geometries
    Scan,
    /// Nested-grid search for the largest F in a region
    FindMax,
    /// Seeded property suites over every module
    Verify,
    /// Regulated momentum-space integrals against the closed forms
    OracleMomentum,
    /// Half-space lattice estimates against the closed forms
    OracleLattice,
    /// Boundary-induced vacuum energy density
    Casimir,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Components => "components",
            Command::Scan => "scan",
            Command::FindMax => "find-max",
            Command::Verify => "verify",
            Command::OracleMomentum => "oracle-momentum",
            Command::OracleLattice => "oracle-lattice",
            Command::Casimir => "casimir",
        }
    }
}

/// Raw flag values. Every flag can also come from the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Height of the first box centre: value or start:stop:count
    #[arg(long, global = true)]
    pub z: Option<String>,
    /// Height of the second box centre: value or start:stop:count
    #[arg(long, global = true)]
    pub zprime: Option<String>,
    /// Transverse separation: value or start:stop:count
    #[arg(long, global = true)]
    pub r: Option<String>,
    /// Box edge: value or start:stop:count (default min(z, zprime)/20)
    #[arg(long = "L", global = true)]
    pub l: Option<String>,
    /// Output format: csv or json
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Seed for randomized suites
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Sample count for randomized suites
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// Quadrature nodes per axis for the smeared matrix
    #[arg(long, global = true)]
    pub nodes: Option<String>,
    /// Lattice spacing
    #[arg(long, global = true)]
    pub spacing: Option<String>,
    /// Wall-chain sites
    #[arg(long, global = true)]
    pub sites: Option<String>,
    /// Radial transverse-momentum nodes
    #[arg(long, global = true)]
    pub knodes: Option<String>,
    /// Search tolerance for find-max
    #[arg(long, global = true)]
    pub tolerance: Option<String>,
    /// Plain `key = value` file presetting any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Flags {
    fn slot(&mut self, key: &str) -> Option<&mut Option<String>> {
        Some(match key {
            "z" => &mut self.z,
            "zprime" => &mut self.zprime,
            "r" => &mut self.r,
            "L" => &mut self.l,
            "format" => &mut self.format,
            "out" => &mut self.out,
            "seed" => &mut self.seed,
            "samples" => &mut self.samples,
            "nodes" => &mut self.nodes,
            "spacing" => &mut self.spacing,
            "sites" => &mut self.sites,
            "knodes" => &mut self.knodes,
            "tolerance" => &mut self.tolerance,
            _ => return None,
        })
    }

    /// Fill unset flags from `key = value` text. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn merge_config_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            let key = key.trim().trim_start_matches("--");
            let value = value.trim();
            let slot = self
                .slot(key)
                .ok_or_else(|| CliError::Usage(format!("config line {}: unknown key `{key}`", lineno + 1)))?;
            if slot.is_none() {
                *slot = Some(value.to_string());
            }
        }
        Ok(())
    }

    pub fn merge_config_file(&mut self) -> Result<(), CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(());
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
        self.merge_config_text(&text)
    }

    /// Effective values in flag order, for the `inputs` block of reports.
    pub fn effective(&self) -> Vec<(&'static str, String)> {
        let pairs = [
            ("z", &self.z),
            ("zprime", &self.zprime),
            ("r", &self.r),
            ("L", &self.l),
            ("format", &self.format),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("nodes", &self.nodes),
            ("spacing", &self.spacing),
            ("sites", &self.sites),
            ("knodes", &self.knodes),
            ("tolerance", &self.tolerance),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A flag value: one number or an inclusive `start:stop:count` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueSpec {
    Single(f64),
    Range { start: f64, stop: f64, count: usize },
}

impl ValueSpec {
    pub fn parse(flag: &str, text: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Usage(format!("--{flag} {text}: {why}"));
        let number = |s: &str| -> Result<f64, CliError> {
            let x: f64 = s.trim().parse().map_err(|_| bad("not a number"))?;
            if !x.is_finite() {
                return Err(bad("must be finite"));
            }
            Ok(x)
        };
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [x] => Ok(ValueSpec::Single(number(x)?)),
            [a, b, n] => {
                let count: usize = n.trim().parse().map_err(|_| bad("count must be a positive integer"))?;
                if count == 0 {
                    return Err(bad("count must be a positive integer"));
                }
                let (start, stop) = (number(a)?, number(b)?);
                if count == 1 && start != stop {
                    return Err(bad("a one-point range needs start == stop"));
                }
                Ok(ValueSpec::Range { start, stop, count })
            }
            _ => Err(bad("expected a value or start:stop:count")),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            ValueSpec::Single(x) => vec![x],
            ValueSpec::Range { start, count: 1, .. } => vec![start],
            ValueSpec::Range { start, stop, count } => {
                let step = (stop - start) / (count - 1) as f64;
                (0..count)
                    .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
                    .collect()
            }
        }
    }

    /// `(lo, hi)` bounds; a single value is a degenerate interval.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            ValueSpec::Single(x) => (x, x),
            ValueSpec::Range { start, stop, .. } => (start.min(stop), start.max(stop)),
        }
    }
}

/// Typed configuration after merging flags and config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub z: Option<ValueSpec>,
    pub zprime: Option<ValueSpec>,
    pub r: Option<ValueSpec>,
    pub l: Option<ValueSpec>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub samples: usize,
    pub nodes: Option<usize>,
    pub spacing: Option<f64>,
    pub sites: Option<usize>,
    pub knodes: Option<usize>,
    pub tolerance: f64,
    /// Echoed into JSON reports.
    pub inputs: Vec<(&'static str, String)>,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

fn integer<T: std::str::FromStr>(flag: &str, text: &Option<String>) -> Result<Option<T>, CliError> {
    text.as_deref()
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--{flag} {t}: expected a non-negative integer")))
        })
        .transpose()
}

fn positive(flag: &str, text: &Option<String>) -> Result<Option<f64>, CliError> {
    text.as_deref()
        .map(|t| match t.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(CliError::Usage(format!("--{flag} {t}: expected a positive number"))),
        })
        .transpose()
}

impl RunConfig {
    pub fn from_flags(command: Command, flags: &Flags) -> Result<Self, CliError> {
        let spec = |flag: &str, v: &Option<String>| v.as_deref().map(|t| ValueSpec::parse(flag, t)).transpose();
        let format = match flags.format.as_deref().map(str::trim) {
            None if command == Command::Verify => Format::Json,
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(CliError::Usage(format!("--format {other}: expected csv or json"))),
        };
        let samples = integer::<usize>("samples", &flags.samples)?.unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        let mut inputs = flags.effective();
        let seed = integer::<u64>("seed", &flags.seed)?.unwrap_or(DEFAULT_SEED);
        if command == Command::Verify {
            // Randomized runs always record the seed they used.
            if flags.seed.is_none() {
                inputs.push(("seed", seed.to_string()));
            }
            if flags.samples.is_none() {
                inputs.push(("samples", samples.to_string()));
            }
        }
        Ok(Self {
            command,
            z: spec("z", &flags.z)?,
            zprime: spec("zprime", &flags.zprime)?,
            r: spec("r", &flags.r)?,
            l: spec("L", &flags.l)?,
            format,
            out: flags.out.as_deref().map(PathBuf::from),
            seed,
            samples,
            nodes: integer("nodes", &flags.nodes)?,
            spacing: positive("spacing", &flags.spacing)?,
            sites: integer("sites", &flags.sites)?,
            knodes: integer("knodes", &flags.knodes)?,
            tolerance: positive("tolerance", &flags.tolerance)?.unwrap_or(DEFAULT_TOLERANCE),
            inputs,
        })
    }

    pub fn require(&self, flag: &str, value: Option<ValueSpec>) -> Result<ValueSpec, CliError> {
        value.ok_or_else(|| CliError::Usage(format!("{} needs --{flag}", self.command.name())))
    }
}
