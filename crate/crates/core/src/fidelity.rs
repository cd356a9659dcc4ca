//! Fidelity decay of layered noisy circuits.
//!
//! Each layer applies a diluted map built from a fresh unitary and Kraus set;
//! the ideal state follows the same unitaries without noise. QFT and the
//! spin chain keep one unitary for all layers of a realization.

use crate::channels::{apply_channel, sample_kraus, DilutedMapSpec};
use crate::ensembles::{EnsembleKind, EnsembleSpec, UnitarySample};
use crate::error::{invalid, Error, Result};
use crate::numkit::ComplexMatrix;
use crate::rng::derive_seed;
use num_complex::Complex64 as C64;

/// `F(T) = 1/d + (1−κ)^T (1 − 1/d)`.
pub fn analytic_fidelity(d: usize, kappa: f64, layers: usize) -> f64 {
    let inv = 1.0 / d as f64;
    inv + (1.0 - kappa).powi(layers as i32) * (1.0 - inv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityRun {
    pub ensemble: EnsembleKind,
    pub qubits: usize,
    pub rank: usize,
    pub kappa: f64,
    pub layers: usize,
    pub n_realizations: usize,
    /// Entry `t − 1` holds the mean fidelity after layer `t`.
    pub mean_fidelity: Vec<f64>,
    pub stderr: Vec<f64>,
    pub seed: u64,
}

impl FidelityRun {
    /// Reduces per-realization curves in the order given.
    #[allow(clippy::too_many_arguments)]
    pub fn from_realizations(
        ensemble: EnsembleKind,
        qubits: usize,
        rank: usize,
        kappa: f64,
        layers: usize,
        seed: u64,
        curves: &[Vec<f64>],
    ) -> Result<Self> {
        if curves.is_empty() {
            return Err(invalid("need at least one realization"));
        }
        if curves.iter().any(|c| c.len() != layers) {
            return Err(Error::Shape("fidelity curves do not have one entry per layer".into()));
        }
        let n = curves.len() as f64;
        let mut mean_fidelity = Vec::with_capacity(layers);
        let mut stderr = Vec::with_capacity(layers);
        for t in 0..layers {
            let mean = curves.iter().map(|c| c[t]).sum::<f64>() / n;
            let var = if curves.len() > 1 {
                curves.iter().map(|c| (c[t] - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            mean_fidelity.push(mean);
            stderr.push((var / n).sqrt());
        }
        Ok(Self {
            ensemble,
            qubits,
            rank,
            kappa,
            layers,
            n_realizations: curves.len(),
            mean_fidelity,
            stderr,
            seed,
        })
    }

    /// Closed-form values aligned with `mean_fidelity`.
    pub fn analytic_curve(&self) -> Vec<f64> {
        let d = 1usize << self.qubits;
        (1..=self.layers).map(|t| analytic_fidelity(d, self.kappa, t)).collect()
    }

    pub fn max_deviation_from_analytic(&self) -> f64 {
        self.mean_fidelity
            .iter()
            .zip(self.analytic_curve())
            .map(|(m, a)| (m - a).abs())
            .fold(0.0, f64::max)
    }
}

fn check_params(qubits: usize, rank: usize, kappa: f64, layers: usize) -> Result<()> {
    crate::ensembles::check_qubits(qubits, 1)?;
    let d = 1usize << qubits;
    if rank < 1 || rank > d * d - 1 {
        return Err(invalid(format!("rank {rank} outside 1..={}", d * d - 1)));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(invalid(format!("κ = {kappa} outside [0, 1]")));
    }
    if layers == 0 {
        return Err(invalid("need at least one layer"));
    }
    Ok(())
}

fn keeps_unitary(kind: EnsembleKind) -> bool {
    matches!(kind, EnsembleKind::Qft | EnsembleKind::SpinChain)
}

/// One realization: the fidelity after each of `layers` layers, starting
/// from `|0…0⟩`. Layer `t` draws its unitary from `derive_seed(seed, 2t)` and
/// its Kraus set from `derive_seed(seed, 2t + 1)`.
pub fn simulate_realization(
    ensemble: &EnsembleSpec,
    qubits: usize,
    rank: usize,
    kappa: f64,
    layers: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_params(qubits, rank, kappa, layers)?;
    let d = 1usize << qubits;
    let mut psi = vec![C64::new(0.0, 0.0); d];
    psi[0] = C64::new(1.0, 0.0);
    let mut rho = ComplexMatrix::zeros(d, d);
    rho[(0, 0)] = C64::new(1.0, 0.0);

    let fixed: Option<UnitarySample> = if keeps_unitary(ensemble.kind) {
        Some(ensemble.sample(qubits, derive_seed(seed, 0))?)
    } else {
        None
    };

    let mut curve = Vec::with_capacity(layers);
    for t in 0..layers as u64 {
        let unitary = match &fixed {
            Some(u) => u.clone(),
            None => ensemble.sample(qubits, derive_seed(seed, 2 * t))?,
        };
        let kraus = sample_kraus(d, rank, derive_seed(seed, 2 * t + 1))?;
        psi = mat_vec(&unitary.matrix, &psi);
        let spec = DilutedMapSpec::new(unitary, kraus, kappa)?;
        rho = apply_channel(&rho, &spec)?;

        let drift = (rho.trace() - 1.0).norm();
        if drift > 1e-8 {
            return Err(Error::Numerical(format!(
                "trace drifted by {drift:e} at layer {}",
                t + 1
            )));
        }
        let f = expectation(&rho, &psi);
        if f.im.abs() >= 1e-10 {
            return Err(Error::Numerical(format!(
                "fidelity has imaginary part {:e} at layer {}",
                f.im,
                t + 1
            )));
        }
        curve.push(f.re);
    }
    Ok(curve)
}

fn mat_vec(m: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn expectation(rho: &ComplexMatrix, psi: &[C64]) -> C64 {
    let rho_psi = mat_vec(rho, psi);
    psi.iter().zip(&rho_psi).map(|(a, b)| a.conj() * b).sum()
}

/// Sequential Monte Carlo run; realization `i` uses `derive_seed(seed, i)`.
pub fn simulate_fidelity(
    ensemble: &EnsembleSpec,
    qubits: usize,
    rank: usize,
    kappa: f64,
    layers: usize,
    n_realizations: usize,
    seed: u64,
) -> Result<FidelityRun> {
    check_params(qubits, rank, kappa, layers)?;
    let curves = (0..n_realizations as u64)
        .map(|i| simulate_realization(ensemble, qubits, rank, kappa, layers, derive_seed(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    FidelityRun::from_realizations(ensemble.kind, qubits, rank, kappa, layers, seed, &curves)
}
