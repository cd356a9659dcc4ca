use super::{check_qubits, EnsembleKind, EnsembleParams, UnitarySample};
use crate::error::{Error, Result};
use crate::numkit::{qr_phase_fixed, ComplexMatrix};
use crate::rng::LabRng;

const MAX_DRAWS: usize = 3;

/// Haar-random unitary: phase-fixed QR of a `2^L × 2^L` Ginibre matrix.
pub fn sample_cue(qubits: usize, seed: u64) -> Result<UnitarySample> {
    check_qubits(qubits, 1)?;
    let d = 1usize << qubits;
    let mut rng = LabRng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..MAX_DRAWS {
        let g = ComplexMatrix::from_fn(d, d, |_, _| rng.complex_gaussian());
        match qr_phase_fixed(&g) {
            Ok(u) => return UnitarySample::new(EnsembleKind::Cue, qubits, u, seed, EnsembleParams::None),
            Err(e @ Error::DegenerateInput(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one draw"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_is_unitary() {
        for seed in 0..5 {
            assert!(sample_cue(1, seed).unwrap().matrix.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = sample_cue(3, 99).unwrap();
        let b = sample_cue(3, 99).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_ne!(a.matrix, sample_cue(3, 100).unwrap().matrix);
    }

    #[test]
    fn rejects_out_of_range_sizes() {
        assert!(sample_cue(0, 1).is_err());
        assert!(sample_cue(7, 1).is_err());
    }
}
