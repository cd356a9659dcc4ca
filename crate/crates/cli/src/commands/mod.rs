pub mod clusters;
pub mod fidelity;
pub mod sample;
pub mod spectrum;
pub mod velocity;

use crate::config::{check_positive, check_qubits, ExperimentConfig, SeedSpec};
use crate::error::{invalid, CliError, Result};
use dulab_core::ensembles::{EnsembleKind, EnsembleParams, EnsembleSpec, UnitarySample};
use dulab_core::numkit::{write_cmat, ComplexMatrix};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

pub const DEFAULT_OUT: &str = "dulab-out";

/// What a finished command reports back.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Maps `f` over `items` on `jobs` threads. Results come back in input
/// order, and the first failure by index wins, so neither depends on
/// scheduling.
pub(crate) fn par_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let results: Vec<Result<R>> = pool.install(|| items.par_iter().map(&f).collect());
    results.into_iter().collect()
}

pub(crate) fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub(crate) fn seeds(cfg: &ExperimentConfig) -> Result<SeedSpec> {
    let s = cfg.seeds.unwrap_or(SeedSpec { master: 0, count: 1 });
    crate::config::check_seeds(&s)?;
    Ok(s)
}

/// Ensemble settings for `kind`, validated for `qubits`.
pub(crate) fn ensemble_spec(cfg: &ExperimentConfig, kind: EnsembleKind, qubits: usize) -> Result<EnsembleSpec> {
    check_qubits(kind, qubits)?;
    let mut spec = EnsembleSpec::new(kind);
    spec.clifford_depth = cfg.depth;
    spec.theta = cfg.theta;
    spec.target_clusters = cfg.target_n;
    if let Some(g) = cfg.gap_factor {
        check_positive("gap_factor", g)?;
        spec.gap_factor = g;
    }
    if let Some(m) = cfg.max_attempts {
        if m == 0 {
            return Err(invalid("max_attempts must be at least 1"));
        }
        spec.max_attempts = m;
    }
    if spec.clifford_depth == Some(0) {
        return Err(invalid("Clifford depth must be at least 1"));
    }
    if let Some(t) = spec.theta {
        if !t.is_finite() {
            return Err(invalid(format!("θ must be finite, got {t}")));
        }
    }
    if let Some(n) = spec.target_clusters {
        let d = 1usize << qubits;
        if n == 0 || n > d {
            return Err(invalid(format!("target_n = {n} outside 1..={d}")));
        }
    }
    Ok(spec)
}

pub(crate) fn config_echo<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}

pub(crate) fn write_matrix(dir: &Path, name: &str, m: &ComplexMatrix) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let path = dir.join(name);
    let io = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    let file = std::fs::File::create(&path).map_err(io)?;
    let mut w = std::io::BufWriter::new(file);
    write_cmat(m, &mut w).map_err(io)?;
    std::io::Write::flush(&mut w).map_err(io)?;
    Ok(path)
}

/// JSON description of how a unitary was drawn.
pub(crate) fn describe_unitary(u: &UnitarySample) -> serde_json::Value {
    let params = match &u.params {
        EnsembleParams::None => serde_json::Value::Null,
        EnsembleParams::Clifford(p) => serde_json::json!({ "depth": p.depth }),
        EnsembleParams::SpinChain(p) => serde_json::json!({
            "theta": p.theta,
            "layers": p.layers,
        }),
        EnsembleParams::FreeFermion(_) => serde_json::json!({ "sites": u.qubits }),
    };
    serde_json::json!({
        "ensemble": u.ensemble,
        "L": u.qubits,
        "seed": u.seed,
        "params": params,
    })
}
