//! Random Kraus channels and the diluted-unitary superoperator
//! `Φ = (1 − κ) U ⊗ U* + κ Σ_j K_j ⊗ K_j*`.

use crate::ensembles::UnitarySample;
use crate::error::{invalid, Error, Result};
use crate::numkit::{accumulate_kron, qr_phase_fixed, ComplexMatrix};
use crate::rng::LabRng;
use num_complex::Complex64 as C64;

/// Largest Hilbert-space dimension for which `Φ` is materialized.
pub const MAX_SUPEROPERATOR_DIM: usize = 64;
const MAX_DRAWS: usize = 3;

#[derive(Debug, Clone)]
pub struct KrausSet {
    pub d: usize,
    pub ops: Vec<ComplexMatrix>,
    pub seed: u64,
}

impl KrausSet {
    /// Checks shapes and `‖Σ K†K − I‖_F < 1e−10`.
    pub fn new(ops: Vec<ComplexMatrix>, seed: u64) -> Result<Self> {
        let d = ops.first().ok_or_else(|| invalid("empty Kraus set"))?.rows();
        if ops.iter().any(|k| k.rows() != d || k.cols() != d) {
            return Err(Error::Shape("Kraus operators must all be d×d".into()));
        }
        let set = Self { d, ops, seed };
        let residual = set.completeness_residual();
        if !(residual < 1e-10) {
            return Err(Error::Numerical(format!(
                "Kraus set violates completeness: ‖ΣK†K − I‖_F = {residual:e}"
            )));
        }
        Ok(set)
    }

    pub fn rank(&self) -> usize {
        self.ops.len()
    }

    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d, self.d);
        for k in &self.ops {
            sum = sum.add(&k.adjoint().matmul(k));
        }
        sum.distance(&ComplexMatrix::identity(self.d))
    }
}

fn check_rank(d: usize, r: usize) -> Result<()> {
    if d == 0 || r == 0 || r > d * d - 1 {
        return Err(invalid(format!("Kraus rank r = {r} outside 1..=d²−1 for d = {d}")));
    }
    Ok(())
}

/// Samples `r` Kraus operators from one phase-fixed QR of an `rd × d`
/// Ginibre matrix, cutting the isometry into `r` consecutive `d × d` blocks.
pub fn sample_kraus(d: usize, r: usize, seed: u64) -> Result<KrausSet> {
    check_rank(d, r)?;
    let mut rng = LabRng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..MAX_DRAWS {
        let g = ComplexMatrix::from_fn(r * d, d, |_, _| rng.complex_gaussian());
        match qr_phase_fixed(&g) {
            Ok(q) => {
                let ops = (0..r).map(|j| q.row_block(j * d, (j + 1) * d)).collect();
                return KrausSet::new(ops, seed);
            }
            Err(e @ Error::DegenerateInput(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one draw"))
}

/// Reference sampler: first block column of an `rd × rd` CUE matrix,
/// `(K_j)_ab = W_{(j−1)d+a, b}`. Quadratically more expensive than
/// [`sample_kraus`]; kept to cross-check its distribution.
pub fn sample_kraus_reference(d: usize, r: usize, seed: u64) -> Result<KrausSet> {
    check_rank(d, r)?;
    let n = r * d;
    let mut rng = LabRng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian());
    let w = qr_phase_fixed(&g)?;
    let ops = (0..r)
        .map(|j| ComplexMatrix::from_fn(d, d, |a, b| w[(j * d + a, b)]))
        .collect();
    KrausSet::new(ops, seed)
}

#[derive(Debug, Clone)]
pub struct DilutedMapSpec {
    pub unitary: UnitarySample,
    pub kraus: KrausSet,
    pub kappa: f64,
}

impl DilutedMapSpec {
    pub fn new(unitary: UnitarySample, kraus: KrausSet, kappa: f64) -> Result<Self> {
        if unitary.dim() != kraus.d {
            return Err(Error::Shape(format!(
                "unitary dimension {} differs from Kraus dimension {}",
                unitary.dim(),
                kraus.d
            )));
        }
        if !(0.0..=1.0).contains(&kappa) {
            return Err(invalid(format!("κ = {kappa} outside [0, 1]")));
        }
        Ok(Self { unitary, kraus, kappa })
    }

    pub fn dim(&self) -> usize {
        self.kraus.d
    }

    /// Same unitary and Kraus set at a different dissipation strength.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.unitary.clone(), self.kraus.clone(), kappa)
    }
}

/// Materializes `Φ` as a `d² × d²` matrix acting on row-major `vec(ρ)`.
pub fn build_superoperator(spec: &DilutedMapSpec) -> Result<ComplexMatrix> {
    let d = spec.dim();
    if d > MAX_SUPEROPERATOR_DIM {
        return Err(Error::SizedInput {
            rows: d * d,
            cols: d * d,
            cap: MAX_SUPEROPERATOR_DIM * MAX_SUPEROPERATOR_DIM,
        });
    }
    let mut phi = ComplexMatrix::zeros(d * d, d * d);
    let u = &spec.unitary.matrix;
    if spec.kappa < 1.0 {
        accumulate_kron(&mut phi, C64::new(1.0 - spec.kappa, 0.0), u, &u.conj());
    }
    if spec.kappa > 0.0 {
        for k in &spec.kraus.ops {
            accumulate_kron(&mut phi, C64::new(spec.kappa, 0.0), k, &k.conj());
        }
    }
    Ok(phi)
}

/// `(1 − κ) UρU† + κ Σ_j K_j ρ K_j†` without building `Φ`.
pub fn apply_channel(rho: &ComplexMatrix, spec: &DilutedMapSpec) -> Result<ComplexMatrix> {
    let d = spec.dim();
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::Shape(format!(
            "state is {}x{}, channel acts on {d}x{d}",
            rho.rows(),
            rho.cols()
        )));
    }
    let sandwich = |a: &ComplexMatrix| a.matmul(rho).matmul(&a.adjoint());
    let mut out = ComplexMatrix::zeros(d, d);
    if spec.kappa < 1.0 {
        out.add_scaled(C64::new(1.0 - spec.kappa, 0.0), &sandwich(&spec.unitary.matrix));
    }
    if spec.kappa > 0.0 {
        for k in &spec.kraus.ops {
            out.add_scaled(C64::new(spec.kappa, 0.0), &sandwich(k));
        }
    }
    Ok(out)
}

/// Choi matrix by reshuffling: `C[(i,j),(k,l)] = Φ[(i,k),(j,l)]`.
/// Hermitian and positive semidefinite exactly when `Φ` is completely positive.
pub fn choi_matrix(phi: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = phi.rows();
    let d = (n as f64).sqrt().round() as usize;
    if !phi.is_square() || d * d != n {
        return Err(Error::Shape("superoperator must be d²×d²".into()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, j) = (row / d, row % d);
        let (k, l) = (col / d, col % d);
        phi[(i * d + k, j * d + l)]
    }))
}
