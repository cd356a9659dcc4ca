//! Numerical laboratory for diluted-unitary quantum maps.
//!
//! A diluted unitary is the convex mixture
//!
//! ```text
//! Φ = (1 − κ) U ⊗ U* + κ Σ_j K_j ⊗ K_j*
//! ```
//!
//! of a structured unitary `U` and a random rank-`r` Kraus channel. This crate
//! samples the unitary families (CUE, Clifford, integrable spin chain, free
//! fermions, QFT), builds the superoperator, and measures how dissipation
//! erases integrability signatures: ring radii, cluster counts, eigenvalue
//! angular velocities and fidelity decay.

pub mod channels;
pub mod ensembles;
mod error;
pub mod fidelity;
pub mod numkit;
pub mod rng;
pub mod spectra;

pub use channels::{DilutedMapSpec, KrausSet};
pub use ensembles::{EnsembleKind, EnsembleSpec, UnitarySample};
pub use error::{Error, Result};
pub use fidelity::FidelityRun;
pub use numkit::{ComplexMatrix, EigenDecomposition};
pub use rng::{derive_seed, LabRng};
pub use spectra::{ClusterReport, RadiiEstimate, Spectrum, VelocityCurve};

pub use num_complex::Complex64 as C64;
