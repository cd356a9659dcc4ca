use super::{check_qubits, EnsembleKind, EnsembleParams, UnitarySample};
use crate::error::Result;
use crate::numkit::ComplexMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

/// Discrete Fourier transform on `d = 2^L` levels:
/// `U_jk = d^{−1/2} exp(2πi·jk/d)`.
pub fn build_qft(qubits: usize) -> Result<UnitarySample> {
    check_qubits(qubits, 1)?;
    let d = 1usize << qubits;
    let norm = 1.0 / (d as f64).sqrt();
    // jk mod d keeps the phase argument small and exact
    let u = ComplexMatrix::from_fn(d, d, |j, k| {
        C64::from_polar(norm, TAU * ((j * k) % d) as f64 / d as f64)
    });
    UnitarySample::new(EnsembleKind::Qft, qubits, u, 0, EnsembleParams::None)
}
