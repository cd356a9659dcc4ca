//! Unitary families `U_M` entering the diluted map.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! basis index. Spin-chain and fermion sites `1..=L` map to qubits `0..L`.

mod clifford;
mod cue;
mod free_fermion;
mod qft;
mod spin_chain;

pub use clifford::{clifford_from_gates, sample_clifford, CliffordGate, CliffordParams};
pub use cue::sample_cue;
pub use free_fermion::{
    build_free_fermion, many_body_hamiltonian, nambu_hamiltonian, sample_free_fermion, spec_from_majorana,
    FreeFermionSpec,
};
pub use qft::build_qft;
pub use spin_chain::{build_spin_chain_floquet, r_check, sample_spin_chain, spin_chain_layer, SpinChainParams};

use crate::error::{invalid, Error, Result};
use crate::numkit::ComplexMatrix;
use crate::rng::derive_seed;
use crate::spectra::count_clusters;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Cue,
    Clifford,
    SpinChain,
    FreeFermion,
    Qft,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 5] = [
        EnsembleKind::Cue,
        EnsembleKind::Clifford,
        EnsembleKind::SpinChain,
        EnsembleKind::FreeFermion,
        EnsembleKind::Qft,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            EnsembleKind::Cue => "cue",
            EnsembleKind::Clifford => "clifford",
            EnsembleKind::SpinChain => "spinchain",
            EnsembleKind::FreeFermion => "freefermion",
            EnsembleKind::Qft => "qft",
        }
    }

    /// Whether the unitary is independent of the seed.
    pub fn is_deterministic(self) -> bool {
        matches!(self, EnsembleKind::Qft)
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnsembleKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| invalid(format!("unknown ensemble {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleParams {
    None,
    Clifford(CliffordParams),
    SpinChain(SpinChainParams),
    FreeFermion(FreeFermionSpec),
}

#[derive(Debug, Clone)]
pub struct UnitarySample {
    pub ensemble: EnsembleKind,
    pub qubits: usize,
    pub matrix: ComplexMatrix,
    pub seed: u64,
    pub params: EnsembleParams,
}

impl UnitarySample {
    /// Wraps a matrix after checking `d = 2^L` and `‖U†U − I‖_F < 1e−10`.
    pub fn new(
        ensemble: EnsembleKind,
        qubits: usize,
        matrix: ComplexMatrix,
        seed: u64,
        params: EnsembleParams,
    ) -> Result<Self> {
        let d = 1usize << qubits;
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::Shape(format!(
                "{} qubits need a {d}x{d} unitary, got {}x{}",
                qubits,
                matrix.rows(),
                matrix.cols()
            )));
        }
        let residual = matrix.unitarity_residual();
        if !(residual < 1e-10) {
            return Err(Error::Numerical(format!(
                "{ensemble} sample is not unitary: ‖U†U − I‖_F = {residual:e}"
            )));
        }
        Ok(Self {
            ensemble,
            qubits,
            matrix,
            seed,
            params,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

pub(crate) fn check_qubits(qubits: usize, min: usize) -> Result<()> {
    if qubits < min || qubits > MAX_QUBITS {
        return Err(invalid(format!(
            "L = {qubits} outside the supported range {min}..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Everything needed to draw a unitary from a seed, including optional
/// postselection on the number of eigenphase clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    /// Clifford word length; `12·L²` when absent.
    pub clifford_depth: Option<usize>,
    /// Fixed spin-chain angle; drawn uniformly from `[0, π]` when absent.
    pub theta: Option<f64>,
    /// Keep only unitaries with exactly this many clusters.
    pub target_clusters: Option<usize>,
    pub gap_factor: f64,
    pub max_attempts: usize,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind) -> Self {
        Self {
            kind,
            clifford_depth: None,
            theta: None,
            target_clusters: None,
            gap_factor: crate::spectra::DEFAULT_GAP_FACTOR,
            max_attempts: 500,
        }
    }

    pub fn with_target_clusters(mut self, n: usize) -> Self {
        self.target_clusters = Some(n);
        self
    }

    /// Draws one unitary without postselection.
    pub fn sample_raw(&self, qubits: usize, seed: u64) -> Result<UnitarySample> {
        match self.kind {
            EnsembleKind::Cue => sample_cue(qubits, seed),
            EnsembleKind::Clifford => {
                let depth = self.clifford_depth.unwrap_or(12 * qubits * qubits);
                sample_clifford(qubits, depth, seed)
            }
            EnsembleKind::SpinChain => match self.theta {
                Some(theta) => {
                    let mut s = build_spin_chain_floquet(qubits, &SpinChainParams::new(theta, qubits))?;
                    s.seed = seed;
                    Ok(s)
                }
                None => sample_spin_chain(qubits, seed),
            },
            EnsembleKind::FreeFermion => sample_free_fermion(qubits, seed),
            EnsembleKind::Qft => {
                let mut s = build_qft(qubits)?;
                s.seed = seed;
                Ok(s)
            }
        }
    }

    /// Draws a unitary, retrying with derived seeds until the cluster count
    /// matches `target_clusters` (when set).
    pub fn sample(&self, qubits: usize, seed: u64) -> Result<UnitarySample> {
        let Some(target) = self.target_clusters else {
            return self.sample_raw(qubits, seed);
        };
        let attempts = if self.kind.is_deterministic() {
            1
        } else {
            self.max_attempts.max(1)
        };
        postselect(target, attempts, self.gap_factor, |attempt| {
            self.sample_raw(qubits, derive_seed(seed, attempt as u64))
        })
    }
}

/// Calls `draw(0), draw(1), …` until a sample with exactly `target` clusters
/// appears; on failure reports the histogram of observed counts.
pub fn postselect(
    target: usize,
    max_attempts: usize,
    gap_factor: f64,
    mut draw: impl FnMut(usize) -> Result<UnitarySample>,
) -> Result<UnitarySample> {
    let mut histogram = BTreeMap::new();
    for attempt in 0..max_attempts {
        let sample = draw(attempt)?;
        let n = count_clusters(&sample, gap_factor)?.n;
        if n == target {
            return Ok(sample);
        }
        *histogram.entry(n).or_insert(0) += 1;
    }
    Err(Error::Postselection {
        target,
        attempts: max_attempts,
        histogram,
    })
}
