use super::{config_echo, ensemble_spec, out_dir, par_map, seeds, Outcome};
use crate::config::{check_desk_scale, check_rank, resolve_jobs, ExperimentConfig, SeedSpec};
use crate::error::{invalid, Result};
use crate::output::{fmt_f64, persist, ResultRecord, Table, BUILD_ID};
use dulab_core::channels::{sample_kraus, KrausSet};
use dulab_core::ensembles::{EnsembleKind, EnsembleSpec, UnitarySample};
use dulab_core::spectra::{compute_spectrum, kappa_rd, radii, Spectrum};
use dulab_core::{derive_seed, DilutedMapSpec};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

pub const HEADER: &[&str] = &["seed", "ensemble", "L", "r", "kappa", "re", "im", "is_trivial"];

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumPlan {
    pub ensemble: EnsembleSpec,
    #[serde(rename = "L")]
    pub qubits: usize,
    pub r: usize,
    pub kappas: Vec<f64>,
    pub seeds: SeedSpec,
    pub out: PathBuf,
    pub jobs: usize,
}

pub fn plan(cfg: &ExperimentConfig) -> Result<SpectrumPlan> {
    let kind = cfg.ensemble.unwrap_or(EnsembleKind::Cue);
    let qubits = cfg.qubits.unwrap_or(4);
    let ensemble = ensemble_spec(cfg, kind, qubits)?;
    check_desk_scale(qubits, cfg.allow_large.unwrap_or(false))?;
    let r = cfg.r.unwrap_or(5);
    check_rank(qubits, r)?;
    let kappas = cfg
        .kappa
        .as_ref()
        .ok_or_else(|| invalid("spectrum needs --kappa or --kappa-grid"))?
        .values()?;
    Ok(SpectrumPlan {
        ensemble,
        qubits,
        r,
        kappas,
        seeds: seeds(cfg)?,
        out: out_dir(cfg),
        jobs: resolve_jobs(cfg)?,
    })
}

/// Unitary and Kraus set of realization `seed`, shared by every κ.
pub(crate) fn draw_realization(
    ensemble: &EnsembleSpec,
    qubits: usize,
    r: usize,
    seed: u64,
) -> dulab_core::Result<(UnitarySample, KrausSet)> {
    let unitary = ensemble.sample(qubits, derive_seed(seed, 0))?;
    let kraus = sample_kraus(unitary.dim(), r, derive_seed(seed, 1))?;
    Ok((unitary, kraus))
}

#[derive(Debug, Serialize)]
struct KappaSummary {
    kappa: f64,
    r_minus_pred: f64,
    r_plus_pred: f64,
    cluster_radius: f64,
    center_distance: f64,
    r_minus_measured_mean: f64,
    r_plus_measured_mean: f64,
}

#[derive(Debug, Serialize)]
struct SpectrumFile {
    file: String,
    kappa: f64,
    seed_index: usize,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct SpectrumMeta {
    ensemble: EnsembleKind,
    #[serde(rename = "L")]
    qubits: usize,
    r: usize,
    kappa_rd: f64,
    predictions: Vec<KappaSummary>,
    spectra: Vec<SpectrumFile>,
}

pub fn file_name(kappa_index: usize, seed_index: usize) -> String {
    format!("spectrum_k{kappa_index:03}_s{seed_index:03}.csv")
}

pub fn execute(plan: &SpectrumPlan) -> Result<Outcome> {
    let start = Instant::now();
    let realization_seeds: Vec<u64> = (0..plan.seeds.count as u64)
        .map(|i| derive_seed(plan.seeds.master, i))
        .collect();
    let draws = par_map(plan.jobs, &realization_seeds, |&s| {
        Ok(draw_realization(&plan.ensemble, plan.qubits, plan.r, s)?)
    })?;

    let jobs: Vec<(usize, usize)> = (0..plan.kappas.len())
        .flat_map(|k| (0..draws.len()).map(move |s| (k, s)))
        .collect();
    let spectra: Vec<Spectrum> = par_map(plan.jobs, &jobs, |&(k, s)| {
        let (u, kraus) = &draws[s];
        let spec = DilutedMapSpec::new(u.clone(), kraus.clone(), plan.kappas[k])?;
        Ok(compute_spectrum(&spec)?)
    })?;

    let tag = plan.ensemble.kind.tag();
    let mut tables = Vec::with_capacity(jobs.len());
    let mut files = Vec::with_capacity(jobs.len());
    for (&(k, s), spectrum) in jobs.iter().zip(&spectra) {
        let mut t = Table::new(file_name(k, s), HEADER);
        let kappa = fmt_f64(plan.kappas[k]);
        for (i, z) in spectrum.eigenvalues.iter().enumerate() {
            t.push(vec![
                realization_seeds[s].to_string(),
                tag.to_owned(),
                plan.qubits.to_string(),
                plan.r.to_string(),
                kappa.clone(),
                fmt_f64(z.re),
                fmt_f64(z.im),
                u8::from(i == spectrum.trivial_index).to_string(),
            ]);
        }
        files.push(SpectrumFile {
            file: t.name.clone(),
            kappa: plan.kappas[k],
            seed_index: s,
            seed: realization_seeds[s],
        });
        tables.push(t);
    }

    let n = draws.len();
    let predictions = plan
        .kappas
        .iter()
        .enumerate()
        .map(|(k, &kappa)| {
            let est: Vec<_> = (0..n).map(|s| radii(&spectra[k * n + s], plan.r, kappa)).collect();
            let first = est[0];
            KappaSummary {
                kappa,
                r_minus_pred: first.r_minus_pred,
                r_plus_pred: first.r_plus_pred,
                cluster_radius: first.cluster_radius,
                center_distance: first.center_distance,
                r_minus_measured_mean: est.iter().map(|e| e.r_minus_measured).sum::<f64>() / n as f64,
                r_plus_measured_mean: est.iter().map(|e| e.r_plus_measured).sum::<f64>() / n as f64,
            }
        })
        .collect();

    let record = ResultRecord {
        command: "spectrum",
        build: BUILD_ID,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        config: config_echo(plan),
        files: vec![],
        metadata: SpectrumMeta {
            ensemble: plan.ensemble.kind,
            qubits: plan.qubits,
            r: plan.r,
            kappa_rd: kappa_rd(plan.r as f64)?,
            predictions,
            spectra: files,
        },
    };
    let files = persist(&plan.out, "spectrum.json", &tables, record)?;
    Ok(Outcome {
        summary: format!(
            "wrote {} spectra of {} eigenvalues to {}",
            tables.len(),
            spectra[0].len(),
            plan.out.display()
        ),
        files,
    })
}
