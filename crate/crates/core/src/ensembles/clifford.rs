use super::{check_qubits, EnsembleKind, EnsembleParams, UnitarySample};
use crate::error::{invalid, Result};
use crate::numkit::ComplexMatrix;
use crate::rng::LabRng;
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
}

impl CliffordGate {
    fn validate(self, qubits: usize) -> Result<()> {
        let ok = match self {
            CliffordGate::H(q) | CliffordGate::S(q) => q < qubits,
            CliffordGate::Cnot { control, target } => control < qubits && target < qubits && control != target,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("{self:?} is not a valid gate on {qubits} qubits")))
        }
    }

    /// Every generator on `qubits` qubits, in a fixed order.
    pub fn all(qubits: usize) -> Vec<CliffordGate> {
        let mut gates: Vec<CliffordGate> = (0..qubits).map(CliffordGate::H).collect();
        gates.extend((0..qubits).map(CliffordGate::S));
        for control in 0..qubits {
            for target in 0..qubits {
                if control != target {
                    gates.push(CliffordGate::Cnot { control, target });
                }
            }
        }
        gates
    }

    /// Replaces `m` by `G·m`.
    pub fn apply_left(self, qubits: usize, m: &mut ComplexMatrix) {
        let bit = |q: usize| 1usize << (qubits - 1 - q);
        let dim = m.rows();
        let cols = m.cols();
        match self {
            CliffordGate::H(q) => {
                let mask = bit(q);
                for i in (0..dim).filter(|i| i & mask == 0) {
                    let j = i | mask;
                    for c in 0..cols {
                        let (a, b) = (m[(i, c)], m[(j, c)]);
                        m[(i, c)] = (a + b) * FRAC_1_SQRT_2;
                        m[(j, c)] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            CliffordGate::S(q) => {
                let mask = bit(q);
                for i in (0..dim).filter(|i| i & mask != 0) {
                    for c in 0..cols {
                        m[(i, c)] *= C64::new(0.0, 1.0);
                    }
                }
            }
            CliffordGate::Cnot { control, target } => {
                let (cm, tm) = (bit(control), bit(target));
                for i in (0..dim).filter(|i| i & cm != 0 && i & tm == 0) {
                    let j = i | tm;
                    for c in 0..cols {
                        let tmp = m[(i, c)];
                        m[(i, c)] = m[(j, c)];
                        m[(j, c)] = tmp;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordParams {
    pub depth: usize,
    /// Gates in application order: the first entry acts first.
    pub gate_log: Vec<CliffordGate>,
}

/// The unitary `G_n ⋯ G_1` of an explicit gate word.
pub fn clifford_from_gates(qubits: usize, gates: &[CliffordGate], seed: u64) -> Result<UnitarySample> {
    check_qubits(qubits, 1)?;
    if gates.is_empty() {
        return Err(invalid("a Clifford word needs at least one gate"));
    }
    for g in gates {
        g.validate(qubits)?;
    }
    let mut u = ComplexMatrix::identity(1 << qubits);
    for g in gates {
        g.apply_left(qubits, &mut u);
    }
    let params = CliffordParams {
        depth: gates.len(),
        gate_log: gates.to_vec(),
    };
    UnitarySample::new(
        EnsembleKind::Clifford,
        qubits,
        u,
        seed,
        EnsembleParams::Clifford(params),
    )
}

/// Random word of `depth` generators drawn uniformly from `{H(q), S(q), CNOT(c, t)}`.
pub fn sample_clifford(qubits: usize, depth: usize, seed: u64) -> Result<UnitarySample> {
    check_qubits(qubits, 1)?;
    if depth == 0 {
        return Err(invalid("Clifford depth must be at least 1"));
    }
    let generators = CliffordGate::all(qubits);
    let mut rng = LabRng::seed_from_u64(seed);
    let word: Vec<CliffordGate> = (0..depth).map(|_| generators[rng.below(generators.len())]).collect();
    clifford_from_gates(qubits, &word, seed)
}
