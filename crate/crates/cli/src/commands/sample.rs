use super::spectrum::draw_realization;
use super::{config_echo, describe_unitary, ensemble_spec, out_dir, write_matrix, Outcome};
use crate::config::{check_desk_scale, check_rank, ExperimentConfig};
use crate::error::{invalid, Result};
use crate::output::{write_json, ResultRecord, BUILD_ID};
use dulab_core::channels::build_superoperator;
use dulab_core::ensembles::{EnsembleKind, EnsembleSpec};
use dulab_core::DilutedMapSpec;
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

pub const UNITARY_FILE: &str = "unitary.cmat";
pub const SUPEROPERATOR_FILE: &str = "superoperator.cmat";

#[derive(Debug, Clone, Serialize)]
pub struct SamplePlan {
    pub ensemble: EnsembleSpec,
    #[serde(rename = "L")]
    pub qubits: usize,
    pub master_seed: u64,
    /// Rank and κ of a superoperator to persist alongside the unitary.
    pub superoperator: Option<(usize, f64)>,
    pub out: PathBuf,
}

pub fn plan(cfg: &ExperimentConfig) -> Result<SamplePlan> {
    let qubits = cfg.qubits.unwrap_or(4);
    let ensemble = ensemble_spec(cfg, cfg.ensemble.unwrap_or(EnsembleKind::Cue), qubits)?;
    let superoperator = match (&cfg.kappa, cfg.r) {
        (Some(spec), Some(r)) => {
            check_rank(qubits, r)?;
            check_desk_scale(qubits, cfg.allow_large.unwrap_or(false))?;
            match spec.values()?.as_slice() {
                [kappa] => Some((r, *kappa)),
                _ => return Err(invalid("sample takes a single κ")),
            }
        }
        (Some(_), None) => return Err(invalid("a superoperator needs --r as well as --kappa")),
        _ => None,
    };
    Ok(SamplePlan {
        ensemble,
        qubits,
        master_seed: super::seeds(cfg)?.master,
        superoperator,
        out: out_dir(cfg),
    })
}

#[derive(Debug, Serialize)]
struct SampleMeta {
    unitary: serde_json::Value,
    unitary_file: &'static str,
    superoperator: Option<serde_json::Value>,
}

pub fn execute(plan: &SamplePlan) -> Result<Outcome> {
    let start = Instant::now();
    let (unitary, phi) = match plan.superoperator {
        Some((r, kappa)) => {
            let (u, kraus) = draw_realization(&plan.ensemble, plan.qubits, r, plan.master_seed)?;
            let spec = DilutedMapSpec::new(u.clone(), kraus, kappa)?;
            let phi = build_superoperator(&spec)?;
            let meta = serde_json::json!({
                "r": r,
                "kappa": kappa,
                "kraus_seed": spec.kraus.seed,
                "file": SUPEROPERATOR_FILE,
            });
            (u, Some((phi, meta)))
        }
        None => (plan.ensemble.sample(plan.qubits, plan.master_seed)?, None),
    };

    let mut files = vec![write_matrix(&plan.out, UNITARY_FILE, &unitary.matrix)?];
    let mut listed = vec![UNITARY_FILE.to_owned()];
    let mut superoperator = None;
    if let Some((phi, meta)) = phi {
        files.push(write_matrix(&plan.out, SUPEROPERATOR_FILE, &phi)?);
        listed.push(SUPEROPERATOR_FILE.to_owned());
        superoperator = Some(meta);
    }
    let record = ResultRecord {
        command: "sample",
        build: BUILD_ID,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        config: config_echo(plan),
        files: listed,
        metadata: SampleMeta {
            unitary: describe_unitary(&unitary),
            unitary_file: UNITARY_FILE,
            superoperator,
        },
    };
    files.push(write_json(&plan.out, "sample.json", &record)?);
    Ok(Outcome {
        summary: format!("sampled a {}-qubit {} unitary", plan.qubits, unitary.ensemble),
        files,
    })
}
