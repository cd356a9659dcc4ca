//! Fixed inputs shared by the benchmarks.

use dulab_core::channels::sample_kraus;
use dulab_core::ensembles::sample_cue;
use dulab_core::{ComplexMatrix, DilutedMapSpec};

/// CUE unitary plus rank-`r` Kraus set on `qubits` qubits at `kappa`.
pub fn diluted_map(qubits: usize, r: usize, kappa: f64) -> DilutedMapSpec {
    let d = 1 << qubits;
    let u = sample_cue(qubits, 1).expect("valid qubit count");
    let kraus = sample_kraus(d, r, 2).expect("valid rank");
    DilutedMapSpec::new(u, kraus, kappa).expect("valid κ")
}

/// A dense non-Hermitian matrix of side `n` with a reproducible pattern.
pub fn dense(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let x = ((i * 31 + j * 17) % 97) as f64 / 97.0 - 0.5;
        let y = ((i * 13 + j * 29) % 89) as f64 / 89.0 - 0.5;
        dulab_core::C64::new(x, y)
    })
}
