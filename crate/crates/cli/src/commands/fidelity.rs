use super::{config_echo, ensemble_spec, out_dir, par_map, seeds, Outcome};
use crate::config::{check_rank, resolve_jobs, ExperimentConfig};
use crate::error::{invalid, Result};
use crate::output::{fmt_f64, persist, ResultRecord, Table, BUILD_ID};
use dulab_core::derive_seed;
use dulab_core::ensembles::{EnsembleKind, EnsembleSpec};
use dulab_core::fidelity::{analytic_fidelity, simulate_realization, FidelityRun};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

pub const HEADER: &[&str] = &[
    "ensemble",
    "L",
    "r",
    "kappa",
    "t",
    "mean_fidelity",
    "stderr",
    "n_realizations",
];
pub const FILE: &str = "fidelity.csv";

#[derive(Debug, Clone, Serialize)]
pub struct FidelityPlan {
    pub ensemble: EnsembleSpec,
    #[serde(rename = "L")]
    pub qubits: usize,
    pub r: usize,
    pub kappas: Vec<f64>,
    pub layers: usize,
    pub realizations: usize,
    pub master_seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
}

pub fn plan(cfg: &ExperimentConfig) -> Result<FidelityPlan> {
    let qubits = cfg.qubits.unwrap_or(4);
    let ensemble = ensemble_spec(cfg, cfg.ensemble.unwrap_or(EnsembleKind::Cue), qubits)?;
    let r = cfg.r.unwrap_or(5);
    check_rank(qubits, r)?;
    let kappas = cfg
        .kappa
        .as_ref()
        .ok_or_else(|| invalid("fidelity needs --kappa or --kappa-grid"))?
        .values()?;
    let layers = cfg.layers.unwrap_or(30);
    if layers == 0 {
        return Err(invalid("layers must be at least 1"));
    }
    // the realization count comes from --realizations, or else the seed count
    let seeds = seeds(cfg)?;
    let realizations = cfg
        .realizations
        .unwrap_or(if cfg.seeds.is_some() { seeds.count } else { 500 });
    if realizations == 0 {
        return Err(invalid("realizations must be at least 1"));
    }
    Ok(FidelityPlan {
        ensemble,
        qubits,
        r,
        kappas,
        layers,
        realizations,
        master_seed: seeds.master,
        out: out_dir(cfg),
        jobs: resolve_jobs(cfg)?,
    })
}

#[derive(Debug, Serialize)]
struct AnalyticCurve {
    kappa: f64,
    analytic: Vec<f64>,
    max_deviation: f64,
}

#[derive(Debug, Serialize)]
struct FidelityMeta {
    ensemble: EnsembleKind,
    #[serde(rename = "L")]
    qubits: usize,
    d: usize,
    r: usize,
    layers: usize,
    n_realizations: usize,
    curves: Vec<AnalyticCurve>,
}

/// Mean-fidelity runs, one per κ of the plan.
pub fn simulate(plan: &FidelityPlan) -> Result<Vec<FidelityRun>> {
    let n = plan.realizations;
    let jobs: Vec<(usize, usize)> = (0..plan.kappas.len())
        .flat_map(|k| (0..n).map(move |i| (k, i)))
        .collect();
    let curves = par_map(plan.jobs, &jobs, |&(k, i)| {
        Ok(simulate_realization(
            &plan.ensemble,
            plan.qubits,
            plan.r,
            plan.kappas[k],
            plan.layers,
            derive_seed(plan.master_seed, i as u64),
        )?)
    })?;
    curves
        .chunks(n)
        .zip(&plan.kappas)
        .map(|(chunk, &kappa)| {
            Ok(FidelityRun::from_realizations(
                plan.ensemble.kind,
                plan.qubits,
                plan.r,
                kappa,
                plan.layers,
                plan.master_seed,
                chunk,
            )?)
        })
        .collect()
}

pub fn execute(plan: &FidelityPlan) -> Result<Outcome> {
    let start = Instant::now();
    let runs = simulate(plan)?;
    let mut table = Table::new(FILE, HEADER);
    for run in &runs {
        for t in 0..run.layers {
            table.push(vec![
                run.ensemble.tag().to_owned(),
                run.qubits.to_string(),
                run.rank.to_string(),
                fmt_f64(run.kappa),
                (t + 1).to_string(),
                fmt_f64(run.mean_fidelity[t]),
                fmt_f64(run.stderr[t]),
                run.n_realizations.to_string(),
            ]);
        }
    }
    let d = 1usize << plan.qubits;
    let curves: Vec<AnalyticCurve> = runs
        .iter()
        .map(|run| AnalyticCurve {
            kappa: run.kappa,
            analytic: (1..=run.layers).map(|t| analytic_fidelity(d, run.kappa, t)).collect(),
            max_deviation: run.max_deviation_from_analytic(),
        })
        .collect();
    let worst = curves.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    let record = ResultRecord {
        command: "fidelity",
        build: BUILD_ID,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        config: config_echo(plan),
        files: vec![],
        metadata: FidelityMeta {
            ensemble: plan.ensemble.kind,
            qubits: plan.qubits,
            d,
            r: plan.r,
            layers: plan.layers,
            n_realizations: plan.realizations,
            curves,
        },
    };
    let files = persist(&plan.out, "fidelity.json", &[table], record)?;
    Ok(Outcome {
        summary: format!(
            "{} realizations x {} κ values; largest deviation from the closed form {worst:.4}",
            plan.realizations,
            plan.kappas.len()
        ),
        files,
    })
}
