use super::{config_echo, describe_unitary, ensemble_spec, out_dir, write_matrix, Outcome};
use crate::config::ExperimentConfig;
use crate::error::{invalid, Result};
use crate::output::{write_json, ResultRecord, BUILD_ID};
use dulab_core::ensembles::{EnsembleKind, EnsembleSpec};
use dulab_core::spectra::{count_clusters, ClusterReport};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

pub const MATRIX_FILE: &str = "clusters_unitary.cmat";

#[derive(Debug, Clone, Serialize)]
pub struct ClustersPlan {
    pub ensemble: EnsembleSpec,
    #[serde(rename = "L")]
    pub qubits: usize,
    pub master_seed: u64,
    pub out: PathBuf,
}

pub fn plan(cfg: &ExperimentConfig) -> Result<ClustersPlan> {
    let qubits = cfg.qubits.unwrap_or(4);
    if cfg.target_n.is_none() {
        return Err(invalid("clusters needs --target-n"));
    }
    let ensemble = ensemble_spec(cfg, cfg.ensemble.unwrap_or(EnsembleKind::Clifford), qubits)?;
    Ok(ClustersPlan {
        ensemble,
        qubits,
        master_seed: super::seeds(cfg)?.master,
        out: out_dir(cfg),
    })
}

#[derive(Debug, Serialize)]
struct ClustersMeta {
    target_n: usize,
    max_attempts: usize,
    unitary: serde_json::Value,
    matrix_file: &'static str,
    n: usize,
    gap_factor: f64,
    reference_spacing: f64,
    boundaries: Vec<f64>,
    eigenphases: Vec<f64>,
}

/// Postselected draw and its cluster report.
pub fn accept(plan: &ClustersPlan) -> Result<(dulab_core::UnitarySample, ClusterReport)> {
    let unitary = plan.ensemble.sample(plan.qubits, plan.master_seed)?;
    let report = count_clusters(&unitary, plan.ensemble.gap_factor)?;
    Ok((unitary, report))
}

pub fn execute(plan: &ClustersPlan) -> Result<Outcome> {
    let start = Instant::now();
    let (unitary, report) = accept(plan)?;
    let meta = ClustersMeta {
        target_n: plan.ensemble.target_clusters.unwrap_or(report.n),
        max_attempts: plan.ensemble.max_attempts,
        unitary: describe_unitary(&unitary),
        matrix_file: MATRIX_FILE,
        n: report.n,
        gap_factor: report.gap_factor,
        reference_spacing: report.reference_spacing,
        boundaries: report.boundaries,
        eigenphases: report.eigenphases,
    };
    let matrix = write_matrix(&plan.out, MATRIX_FILE, &unitary.matrix)?;
    let record = ResultRecord {
        command: "clusters",
        build: BUILD_ID,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        config: config_echo(plan),
        files: vec![MATRIX_FILE.to_owned()],
        metadata: meta,
    };
    let json = write_json(&plan.out, "clusters.json", &record)?;
    Ok(Outcome {
        summary: format!(
            "accepted a {} unitary with {} clusters (seed {})",
            unitary.ensemble, report.n, unitary.seed
        ),
        files: vec![matrix, json],
    })
}
