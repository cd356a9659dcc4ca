use super::{check_qubits, EnsembleKind, EnsembleParams, UnitarySample};
use crate::error::{invalid, Result};
use crate::numkit::ComplexMatrix;
use crate::rng::LabRng;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinChainParams {
    /// Coupling angle; the XXX coupling is `δ = tan θ`.
    pub theta: f64,
    /// Number of Floquet layers `T`.
    pub layers: usize,
    /// Optional per-layer angles overriding `theta`; length must equal `layers`.
    pub layer_thetas: Option<Vec<f64>>,
}

impl SpinChainParams {
    pub fn new(theta: f64, layers: usize) -> Self {
        Self {
            theta,
            layers,
            layer_thetas: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let in_range = |t: f64| (0.0..=PI).contains(&t);
        if !in_range(self.theta) {
            return Err(invalid(format!("theta = {} outside [0, π]", self.theta)));
        }
        if self.layers == 0 {
            return Err(invalid("spin chain needs at least one layer"));
        }
        if let Some(ts) = &self.layer_thetas {
            if ts.len() != self.layers || !ts.iter().copied().all(in_range) {
                return Err(invalid("per-layer angles must number `layers` and lie in [0, π]"));
            }
        }
        Ok(())
    }
}

/// Two-site XXX R-matrix `Ř(tan θ) = (I + i tan θ · P)/(1 + i tan θ)` with `P`
/// the swap, written as `e^{−iθ}(cos θ · I + i sin θ · P)` so that `θ = π/2`
/// is regular.
pub fn r_check(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let pre = C64::from_polar(1.0, -theta);
    let diag = pre * C64::new(c, 0.0);
    let swap = pre * C64::new(0.0, s);
    let mut r = ComplexMatrix::zeros(4, 4);
    // |00⟩ and |11⟩ are fixed by the swap
    r[(0, 0)] = diag + swap;
    r[(3, 3)] = diag + swap;
    r[(1, 1)] = diag;
    r[(2, 2)] = diag;
    r[(1, 2)] = swap;
    r[(2, 1)] = swap;
    r
}

/// Replaces `m` by `G·m` for a two-qubit gate `G` on qubits `(a, b)`,
/// local basis ordered `|q_a q_b⟩`.
fn apply_two_qubit(qubits: usize, gate: &ComplexMatrix, a: usize, b: usize, m: &mut ComplexMatrix) {
    let ma = 1usize << (qubits - 1 - a);
    let mb = 1usize << (qubits - 1 - b);
    for base in (0..m.rows()).filter(|i| i & ma == 0 && i & mb == 0) {
        let idx = [base, base | mb, base | ma, base | ma | mb];
        for c in 0..m.cols() {
            let old = idx.map(|i| m[(i, c)]);
            for (r, &target) in idx.iter().enumerate() {
                m[(target, c)] = (0..4).map(|k| gate[(r, k)] * old[k]).sum();
            }
        }
    }
}

/// One brickwork layer on a periodic chain of even length: bonds
/// `(1,2), (3,4), …` act first, then `(2,3), …, (L,1)`.
pub fn spin_chain_layer(qubits: usize, theta: f64) -> Result<ComplexMatrix> {
    if qubits < 2 || qubits % 2 != 0 {
        return Err(invalid(format!("spin chain needs an even L >= 2, got {qubits}")));
    }
    let r = r_check(theta);
    let mut layer = ComplexMatrix::identity(1 << qubits);
    for j in (0..qubits).step_by(2) {
        apply_two_qubit(qubits, &r, j, j + 1, &mut layer);
    }
    for j in (1..qubits).step_by(2) {
        apply_two_qubit(qubits, &r, j, (j + 1) % qubits, &mut layer);
    }
    Ok(layer)
}

/// Floquet unitary `U = 𝒰_T ⋯ 𝒰_1`.
pub fn build_spin_chain_floquet(qubits: usize, params: &SpinChainParams) -> Result<UnitarySample> {
    check_qubits(qubits, 2)?;
    params.validate()?;
    let thetas: Vec<f64> = match &params.layer_thetas {
        Some(ts) => ts.clone(),
        None => vec![params.theta; params.layers],
    };
    let mut u = ComplexMatrix::identity(1 << qubits);
    let mut cached: Option<(f64, ComplexMatrix)> = None;
    for theta in thetas {
        let layer = match &cached {
            Some((t, l)) if *t == theta => l.clone(),
            _ => {
                let l = spin_chain_layer(qubits, theta)?;
                cached = Some((theta, l.clone()));
                l
            }
        };
        u = layer.matmul(&u);
    }
    UnitarySample::new(
        EnsembleKind::SpinChain,
        qubits,
        u,
        0,
        EnsembleParams::SpinChain(params.clone()),
    )
}

/// Draws `θ ∈ [0, π]` once and builds `T = L` identical layers.
pub fn sample_spin_chain(qubits: usize, seed: u64) -> Result<UnitarySample> {
    let mut rng = LabRng::seed_from_u64(seed);
    let theta = PI * rng.uniform();
    let mut s = build_spin_chain_floquet(qubits, &SpinChainParams::new(theta, qubits))?;
    s.seed = seed;
    Ok(s)
}
