use super::spectrum::draw_realization;
use super::{config_echo, ensemble_spec, out_dir, par_map, seeds, Outcome};
use crate::config::{check_desk_scale, check_positive, check_rank, resolve_jobs, ExperimentConfig, SeedSpec};
use crate::error::{invalid, Result};
use crate::output::{fmt_f64, persist, ResultRecord, Table, BUILD_ID};
use dulab_core::derive_seed;
use dulab_core::ensembles::{EnsembleKind, EnsembleSpec};
use dulab_core::spectra::{
    angular_velocity, detect_transition, kappa_cr, kappa_rd, VelocityCurve, VelocityOptions, DEFAULT_D_KAPPA_FRACTION,
    DEFAULT_REAL_TOL,
};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

pub const HEADER: &[&str] = &["ensemble", "L", "r", "kappa", "mean_velocity", "n_discarded", "n_seeds"];
pub const MODEL_FILE: &str = "velocity_model.csv";
pub const BASELINE_FILE: &str = "velocity_baseline.csv";
pub const DEFAULT_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, Serialize)]
pub struct VelocityPlan {
    pub model: EnsembleSpec,
    pub baseline: EnsembleSpec,
    #[serde(rename = "L")]
    pub qubits: usize,
    pub r: usize,
    pub kappas: Vec<f64>,
    pub seeds: SeedSpec,
    pub d_kappa_fraction: f64,
    pub real_tol: f64,
    pub epsilon: f64,
    pub out: PathBuf,
    pub jobs: usize,
}

impl VelocityPlan {
    fn options(&self) -> VelocityOptions {
        VelocityOptions {
            d_kappa_fraction: self.d_kappa_fraction,
            real_tol: self.real_tol,
        }
    }
}

pub fn plan(cfg: &ExperimentConfig) -> Result<VelocityPlan> {
    let qubits = cfg.qubits.unwrap_or(4);
    let model = ensemble_spec(cfg, cfg.ensemble.unwrap_or(EnsembleKind::Cue), qubits)?;
    let mut baseline = ensemble_spec(cfg, cfg.baseline.unwrap_or(EnsembleKind::Cue), qubits)?;
    // postselection targets the model only
    baseline.target_clusters = None;
    check_desk_scale(qubits, cfg.allow_large.unwrap_or(false))?;
    let r = cfg.r.unwrap_or(5);
    check_rank(qubits, r)?;

    let d_kappa_fraction = cfg.d_kappa_fraction.unwrap_or(DEFAULT_D_KAPPA_FRACTION);
    check_positive("d_kappa_fraction", d_kappa_fraction)?;
    let real_tol = cfg.real_tol.unwrap_or(DEFAULT_REAL_TOL);
    if !(real_tol >= 0.0 && real_tol.is_finite()) {
        return Err(invalid(format!("real_tol must be non-negative, got {real_tol}")));
    }
    let epsilon = cfg.epsilon.unwrap_or(DEFAULT_EPSILON);
    check_positive("epsilon", epsilon)?;

    let kappas = cfg
        .kappa
        .as_ref()
        .ok_or_else(|| invalid("velocity needs --kappa or --kappa-grid"))?
        .values()?;
    if let Some(k) = kappas
        .iter()
        .find(|&&k| !(k > 0.0 && k * (1.0 + d_kappa_fraction) <= 1.0))
    {
        return Err(invalid(format!(
            "κ = {k} must satisfy 0 < κ and κ(1 + d_kappa_fraction) ≤ 1"
        )));
    }
    if kappas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("velocity κ values must be strictly increasing"));
    }
    Ok(VelocityPlan {
        model,
        baseline,
        qubits,
        r,
        kappas,
        seeds: seeds(cfg)?,
        d_kappa_fraction,
        real_tol,
        epsilon,
        out: out_dir(cfg),
        jobs: resolve_jobs(cfg)?,
    })
}

#[derive(Debug, Serialize)]
struct VelocityMeta {
    model: EnsembleKind,
    baseline: EnsembleKind,
    #[serde(rename = "L")]
    qubits: usize,
    r: usize,
    /// Cluster count behind `predicted_kappa_cr`, when known.
    cluster_count: Option<usize>,
    predicted_kappa_cr: Option<f64>,
    predicted_kappa_rd: f64,
    epsilon: f64,
    detected_kappa: Option<f64>,
    d_kappa_fraction: f64,
    real_tol: f64,
    model_file: &'static str,
    baseline_file: &'static str,
}

fn curve_table(name: &str, curve: &VelocityCurve) -> Table {
    let mut t = Table::new(name, HEADER);
    for (k, kappa) in curve.kappas.iter().enumerate() {
        t.push(vec![
            curve.ensemble.tag().to_owned(),
            curve.qubits.to_string(),
            curve.rank.to_string(),
            fmt_f64(*kappa),
            fmt_f64(curve.mean_velocity[k]),
            curve.n_discarded[k].to_string(),
            curve.n_seeds.to_string(),
        ]);
    }
    t
}

/// Number of clusters the model is known to have: 4 for the QFT, else the
/// postselection target.
fn known_clusters(model: &EnsembleSpec) -> Option<usize> {
    match model.kind {
        EnsembleKind::Qft => Some(4),
        _ => model.target_clusters,
    }
}

pub fn execute(plan: &VelocityPlan) -> Result<Outcome> {
    let start = Instant::now();
    let opts = plan.options();
    let ensembles = [&plan.model, &plan.baseline];
    let realization_seeds: Vec<u64> = (0..plan.seeds.count as u64)
        .map(|i| derive_seed(plan.seeds.master, i))
        .collect();

    let draw_jobs: Vec<(usize, usize)> = (0..2)
        .flat_map(|e| (0..realization_seeds.len()).map(move |s| (e, s)))
        .collect();
    let draws = par_map(plan.jobs, &draw_jobs, |&(e, s)| {
        Ok(draw_realization(
            ensembles[e],
            plan.qubits,
            plan.r,
            realization_seeds[s],
        )?)
    })?;

    let n_seeds = realization_seeds.len();
    let n_k = plan.kappas.len();
    let jobs: Vec<(usize, usize)> = (0..draws.len()).flat_map(|d| (0..n_k).map(move |k| (d, k))).collect();
    let samples = par_map(plan.jobs, &jobs, |&(d, k)| {
        let (u, kraus) = &draws[d];
        Ok(angular_velocity(u, kraus, plan.kappas[k], &opts)?)
    })?;

    // samples are ordered (ensemble, seed, κ)
    let rows: Vec<Vec<_>> = samples.chunks(n_k).map(<[_]>::to_vec).collect();
    let curve = |e: usize| {
        VelocityCurve::from_samples(
            ensembles[e].kind,
            plan.qubits,
            plan.r,
            plan.kappas.clone(),
            plan.d_kappa_fraction,
            &rows[e * n_seeds..(e + 1) * n_seeds],
        )
    };
    let (model, baseline) = (curve(0)?, curve(1)?);
    let detected = detect_transition(&model, &baseline, plan.epsilon)?;

    let cluster_count = known_clusters(&plan.model);
    let meta = VelocityMeta {
        model: plan.model.kind,
        baseline: plan.baseline.kind,
        qubits: plan.qubits,
        r: plan.r,
        cluster_count,
        predicted_kappa_cr: cluster_count.map(|n| kappa_cr(n, plan.r as f64)).transpose()?,
        predicted_kappa_rd: kappa_rd(plan.r as f64)?,
        epsilon: plan.epsilon,
        detected_kappa: detected,
        d_kappa_fraction: plan.d_kappa_fraction,
        real_tol: plan.real_tol,
        model_file: MODEL_FILE,
        baseline_file: BASELINE_FILE,
    };
    let tables = [curve_table(MODEL_FILE, &model), curve_table(BASELINE_FILE, &baseline)];
    let record = ResultRecord {
        command: "velocity",
        build: BUILD_ID,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        config: config_echo(plan),
        files: vec![],
        metadata: meta,
    };
    let files = persist(&plan.out, "velocity.json", &tables, record)?;
    let detected = detected.map_or_else(|| "none".to_owned(), |k| format!("{k:.4}"));
    Ok(Outcome {
        summary: format!(
            "{} vs {} over {} κ values and {} seeds; detected transition at κ = {detected}",
            plan.model.kind, plan.baseline.kind, n_k, n_seeds
        ),
        files,
    })
}
