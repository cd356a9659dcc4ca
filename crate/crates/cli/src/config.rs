//! Experiment configuration: a JSON document, command-line flags layered on
//! top of it, and validation into a fully resolved form.

use crate::error::{invalid, CliError, Result};
use clap::Args;
use dulab_core::ensembles::{EnsembleKind, MAX_QUBITS};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable holding the default worker count.
pub const JOBS_ENV: &str = "DULAB_JOBS";
/// Largest L accepted by superoperator sweeps without `--allow-large`.
pub const DESK_MAX_QUBITS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaSpec {
    Single(f64),
    List(Vec<f64>),
    Grid { min: f64, max: f64, count: usize },
}

impl KappaSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            KappaSpec::Single(k) => vec![*k],
            KappaSpec::List(ks) => ks.clone(),
            KappaSpec::Grid { min, max, count } => {
                if *count == 0 {
                    return Err(invalid("κ grid needs at least one point"));
                }
                if !(min <= max) {
                    return Err(invalid(format!("κ grid has min {min} above max {max}")));
                }
                if *count == 1 {
                    vec![*min]
                } else {
                    let step = (max - min) / (*count - 1) as f64;
                    (0..*count)
                        .map(|i| if i + 1 == *count { *max } else { min + step * i as f64 })
                        .collect()
                }
            }
        };
        if v.is_empty() {
            return Err(invalid("empty κ list"));
        }
        if let Some(k) = v.iter().find(|k| !(0.0..=1.0).contains(*k)) {
            return Err(invalid(format!("κ = {k} outside [0, 1]")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master: u64,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

impl FromStr for SeedSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (master, count) = match s.split_once(':') {
            Some((m, c)) => (m, c.parse().map_err(|e| format!("bad seed count {c:?}: {e}"))?),
            None => (s, 1),
        };
        let master = master.parse().map_err(|e| format!("bad master seed {master:?}: {e}"))?;
        Ok(SeedSpec { master, count })
    }
}

fn parse_grid(s: &str) -> std::result::Result<KappaSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, count] = parts.as_slice() else {
        return Err(format!("expected min:max:count, got {s:?}"));
    };
    Ok(KappaSpec::Grid {
        min: min.parse().map_err(|e| format!("bad min {min:?}: {e}"))?,
        max: max.parse().map_err(|e| format!("bad max {max:?}: {e}"))?,
        count: count.parse().map_err(|e| format!("bad count {count:?}: {e}"))?,
    })
}

/// Everything a command may read, as stored in a config file. Absent
/// fields fall back to command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ensemble: Option<EnsembleKind>,
    #[serde(rename = "L")]
    pub qubits: Option<usize>,
    pub r: Option<usize>,
    pub kappa: Option<KappaSpec>,
    pub seeds: Option<SeedSpec>,
    pub theta: Option<f64>,
    pub depth: Option<usize>,
    pub gap_factor: Option<f64>,
    pub real_tol: Option<f64>,
    pub d_kappa_fraction: Option<f64>,
    pub epsilon: Option<f64>,
    pub baseline: Option<EnsembleKind>,
    pub target_n: Option<usize>,
    pub max_attempts: Option<usize>,
    pub layers: Option<usize>,
    pub realizations: Option<usize>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub allow_large: Option<bool>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    /// Field-wise override: every field set in `top` wins.
    pub fn overlay(self, top: ExperimentConfig) -> Self {
        macro_rules! pick {
            ($($f:ident),*) => { Self { $($f: top.$f.or(self.$f)),* } };
        }
        pick!(
            ensemble,
            qubits,
            r,
            kappa,
            seeds,
            theta,
            depth,
            gap_factor,
            real_tol,
            d_kappa_fraction,
            epsilon,
            baseline,
            target_n,
            max_attempts,
            layers,
            realizations,
            out,
            jobs,
            allow_large
        )
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON config file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// cue, clifford, spinchain, freefermion or qft
    #[arg(long)]
    pub ensemble: Option<EnsembleKind>,
    /// Number of qubits
    #[arg(long = "L")]
    pub qubits: Option<usize>,
    /// Kraus rank
    #[arg(long)]
    pub r: Option<usize>,
    /// Comma-separated κ values
    #[arg(long, value_delimiter = ',', conflicts_with = "kappa_grid")]
    pub kappa: Option<Vec<f64>>,
    /// Evenly spaced κ values, endpoints included
    #[arg(long, value_name = "MIN:MAX:COUNT", value_parser = parse_grid)]
    pub kappa_grid: Option<KappaSpec>,
    /// Master seed and number of realizations
    #[arg(long, value_name = "MASTER[:COUNT]")]
    pub seeds: Option<SeedSpec>,
    /// Fixed spin-chain angle in [0, π]
    #[arg(long)]
    pub theta: Option<f64>,
    /// Clifford word length
    #[arg(long)]
    pub depth: Option<usize>,
    /// Cluster boundary threshold in units of 2π/d³
    #[arg(long)]
    pub gap_factor: Option<f64>,
    /// Eigenvalues with |Im λ| below this are treated as real
    #[arg(long)]
    pub real_tol: Option<f64>,
    /// Velocity step dκ as a fraction of κ
    #[arg(long)]
    pub d_kappa_fraction: Option<f64>,
    /// Relative velocity gap that counts as overlapping
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Reference ensemble for velocity runs
    #[arg(long)]
    pub baseline: Option<EnsembleKind>,
    /// Required number of eigenphase clusters
    #[arg(long)]
    pub target_n: Option<usize>,
    /// Postselection draws before giving up
    #[arg(long)]
    pub max_attempts: Option<usize>,
    /// Circuit depth T for fidelity runs
    #[arg(long)]
    pub layers: Option<usize>,
    /// Monte Carlo realizations per κ
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: $DULAB_JOBS, then the number of CPUs)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Permit L = 6 superoperator sweeps
    #[arg(long)]
    pub allow_large: bool,
}

impl ConfigArgs {
    fn as_config(&self) -> ExperimentConfig {
        let kappa = match (&self.kappa, self.kappa_grid.clone()) {
            (Some(list), _) => Some(KappaSpec::List(list.clone())),
            (None, grid) => grid,
        };
        ExperimentConfig {
            ensemble: self.ensemble,
            qubits: self.qubits,
            r: self.r,
            kappa,
            seeds: self.seeds,
            theta: self.theta,
            depth: self.depth,
            gap_factor: self.gap_factor,
            real_tol: self.real_tol,
            d_kappa_fraction: self.d_kappa_fraction,
            epsilon: self.epsilon,
            baseline: self.baseline,
            target_n: self.target_n,
            max_attempts: self.max_attempts,
            layers: self.layers,
            realizations: self.realizations,
            out: self.out.clone(),
            jobs: self.jobs,
            allow_large: self.allow_large.then_some(true),
        }
    }

    /// The config file (if any) with these flags applied on top.
    pub fn merged(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        Ok(base.overlay(self.as_config()))
    }
}

pub(crate) fn resolve_jobs(cfg: &ExperimentConfig) -> Result<usize> {
    let jobs = match cfg.jobs {
        Some(j) => j,
        None => match std::env::var(JOBS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| invalid(format!("{JOBS_ENV}={v:?} is not a worker count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if jobs == 0 {
        return Err(invalid("jobs must be at least 1"));
    }
    Ok(jobs)
}

pub(crate) fn check_qubits(kind: EnsembleKind, qubits: usize) -> Result<()> {
    let min = match kind {
        EnsembleKind::SpinChain | EnsembleKind::FreeFermion => 2,
        _ => 1,
    };
    if qubits < min || qubits > MAX_QUBITS {
        return Err(invalid(format!("{kind} needs {min} ≤ L ≤ {MAX_QUBITS}, got {qubits}")));
    }
    if kind == EnsembleKind::SpinChain && qubits % 2 != 0 {
        return Err(invalid(format!("spinchain needs an even L, got {qubits}")));
    }
    Ok(())
}

pub(crate) fn check_rank(qubits: usize, r: usize) -> Result<()> {
    let d = 1usize << qubits;
    if r < 1 || r > d * d - 1 {
        return Err(invalid(format!("r = {r} outside 1..={} for L = {qubits}", d * d - 1)));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(invalid(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

pub(crate) fn check_desk_scale(qubits: usize, allow_large: bool) -> Result<()> {
    if qubits > DESK_MAX_QUBITS && !allow_large {
        return Err(invalid(format!(
            "L = {qubits} needs {0}x{0} eigenproblems; pass --allow-large to proceed",
            1usize << (2 * qubits)
        )));
    }
    Ok(())
}

pub(crate) fn check_seeds(seeds: &SeedSpec) -> Result<()> {
    if seeds.count == 0 {
        return Err(invalid("seed count must be at least 1"));
    }
    Ok(())
}
