//! Random matchgate circuits: `U = exp(−i H_FF)` for a random quadratic
//! fermionic Hamiltonian, assembled on the full `2^L` many-body space.
//!
//! Conventions: site `k` is qubit `k`; an occupied site is the basis bit `1`
//! (spin down), so `c_k† c_k = (1 − σ^z_k)/2`. With the Nambu vector
//! `C = (c_1 … c_L, c_1† … c_L†)` the Hamiltonian is `H_FF = C† 𝐇 C` where
//!
//! ```text
//! 𝐇 = [  h    Δ  ]      h = h†,  Δ = −Δᵀ
//!     [ −Δ*  −h* ]
//! ```
//!
//! which equals `Σ 2h_jk c_j†c_k + Σ (Δ_jk c_j†c_k† − Δ*_jk c_j c_k) − tr h`.
//! Its many-body spectrum is `{Σ_k s_k ε_k : s ∈ {±1}^L}` for the
//! nonnegative Nambu eigenvalues `ε_k`.

use super::{check_qubits, EnsembleKind, EnsembleParams, UnitarySample};
use crate::error::{invalid, Error, Result};
use crate::numkit::{expm_hermitian_i, logm_special_orthogonal, orthogonal_qr_real, ComplexMatrix};
use crate::rng::LabRng;
use num_complex::Complex64 as C64;

const MAX_LOG_ATTEMPTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct FreeFermionSpec {
    /// Hermitian hopping matrix.
    pub h: ComplexMatrix,
    /// Antisymmetric pairing matrix.
    pub delta: ComplexMatrix,
}

impl FreeFermionSpec {
    pub fn new(h: ComplexMatrix, delta: ComplexMatrix) -> Result<Self> {
        let l = h.rows();
        if !h.is_square() || delta.rows() != l || delta.cols() != l {
            return Err(Error::Shape("h and Δ must both be L×L".into()));
        }
        if h.hermiticity_residual() >= 1e-10 {
            return Err(invalid("hopping matrix is not Hermitian"));
        }
        if delta.add(&delta.transpose()).frobenius_norm() >= 1e-10 {
            return Err(invalid("pairing matrix is not antisymmetric"));
        }
        Ok(Self { h, delta })
    }

    pub fn zero(sites: usize) -> Self {
        Self {
            h: ComplexMatrix::zeros(sites, sites),
            delta: ComplexMatrix::zeros(sites, sites),
        }
    }

    pub fn sites(&self) -> usize {
        self.h.rows()
    }
}

/// Single-particle Nambu matrix `𝐇` (2L × 2L).
pub fn nambu_hamiltonian(spec: &FreeFermionSpec) -> ComplexMatrix {
    let l = spec.sites();
    ComplexMatrix::from_fn(2 * l, 2 * l, |i, j| match (i < l, j < l) {
        (true, true) => spec.h[(i, j)],
        (true, false) => spec.delta[(i, j - l)],
        (false, true) => -spec.delta[(i - l, j)].conj(),
        (false, false) => -spec.h[(i - l, j - l)].conj(),
    })
}

/// `V = (1/√2)[[I, I], [−iI, iI]]`, mapping complex fermions to Majoranas.
fn majorana_rotation(sites: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(2 * sites, 2 * sites, |i, j| {
        if i % sites != j % sites {
            return C64::new(0.0, 0.0);
        }
        match (i < sites, j < sites) {
            (true, _) => C64::new(s, 0.0),
            (false, true) => C64::new(0.0, -s),
            (false, false) => C64::new(0.0, s),
        }
    })
}

/// Rotates a Majorana-basis Hamiltonian back to complex fermions,
/// `𝐇 = V† H_Majo V`, and reads off `h` and `Δ`.
pub fn spec_from_majorana(h_majorana: &ComplexMatrix) -> Result<FreeFermionSpec> {
    if !h_majorana.is_square() || h_majorana.rows() % 2 != 0 {
        return Err(Error::Shape("Majorana Hamiltonian must be 2L×2L".into()));
    }
    let l = h_majorana.rows() / 2;
    let v = majorana_rotation(l);
    let nambu = v.adjoint().matmul(h_majorana).matmul(&v);
    let h = nambu.row_block(0, l).col_block(0, l);
    let delta = nambu.row_block(0, l).col_block(l, 2 * l);
    let h = h.add(&h.adjoint()).scale_real(0.5);
    let delta = delta.sub(&delta.transpose()).scale_real(0.5);
    let spec = FreeFermionSpec::new(h, delta)?;
    let mismatch = nambu_hamiltonian(&spec).distance(&nambu);
    if mismatch > 1e-8 * nambu.frobenius_norm().max(1.0) {
        return Err(Error::Numerical(format!(
            "rotated Hamiltonian lacks particle-hole structure (mismatch {mismatch:e})"
        )));
    }
    Ok(spec)
}

/// Many-body `H_FF` on `2^L` states from its Jordan–Wigner matrix elements.
pub fn many_body_hamiltonian(spec: &FreeFermionSpec) -> ComplexMatrix {
    let l = spec.sites();
    let d = 1usize << l;
    let bit = |k: usize| 1usize << (l - 1 - k);
    let mut out = ComplexMatrix::zeros(d, d);
    for s in 0..d {
        let occupied = |k: usize| s & bit(k) != 0;
        let diag: f64 = (0..l)
            .map(|k| spec.h[(k, k)].re * if occupied(k) { 1.0 } else { -1.0 })
            .sum();
        out[(s, s)] += diag;
        for k in 0..l {
            for m in k + 1..l {
                let between = (k + 1..m).filter(|&j| occupied(j)).count();
                let sign = if between % 2 == 0 { 2.0 } else { -2.0 };
                let target = s ^ bit(k) ^ bit(m);
                let amp = match (occupied(k), occupied(m)) {
                    (false, true) => spec.h[(k, m)],
                    (true, false) => spec.h[(k, m)].conj(),
                    (false, false) => spec.delta[(k, m)],
                    (true, true) => spec.delta[(k, m)].conj(),
                };
                out[(target, s)] += amp * sign;
            }
        }
    }
    out
}

/// `U = exp(−i H_FF)` for an explicit quadratic Hamiltonian.
pub fn build_free_fermion(spec: FreeFermionSpec, seed: u64) -> Result<UnitarySample> {
    let qubits = spec.sites();
    check_qubits(qubits, 1)?;
    let u = expm_hermitian_i(&many_body_hamiltonian(&spec))?;
    UnitarySample::new(
        EnsembleKind::FreeFermion,
        qubits,
        u,
        seed,
        EnsembleParams::FreeFermion(spec),
    )
}

/// Haar-random element of SO(n): phase-fixed QR of a real Gaussian matrix,
/// with the last column negated when the determinant is −1.
fn sample_special_orthogonal(n: usize, rng: &mut LabRng) -> Result<ComplexMatrix> {
    let data: Vec<f64> = (0..n * n).map(|_| rng.gaussian()).collect();
    let mut u = orthogonal_qr_real(n, &data)?;
    if u.determinant().re < 0.0 {
        for i in 0..n {
            u[(i, n - 1)] = -u[(i, n - 1)];
        }
    }
    Ok(u)
}

/// Random free-fermion unitary: `u ∈ SO(2L)` → `H_Majo = i log u` →
/// `(h, Δ)` → many-body `H_FF` → `exp(−i H_FF)`.
pub fn sample_free_fermion(qubits: usize, seed: u64) -> Result<UnitarySample> {
    check_qubits(qubits, 2)?;
    let mut rng = LabRng::seed_from_u64(seed);
    for _ in 0..MAX_LOG_ATTEMPTS {
        let u = sample_special_orthogonal(2 * qubits, &mut rng)?;
        match logm_special_orthogonal(&u) {
            Ok(h_majorana) => return build_free_fermion(spec_from_majorana(&h_majorana)?, seed),
            Err(Error::BranchAmbiguity) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BranchAmbiguity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{eig_hermitian, kron};

    /// Annihilation operator with explicit Z strings: c_k = Z⊗…⊗Z⊗|0⟩⟨1|⊗I⊗…
    fn annihilation(sites: usize, k: usize) -> ComplexMatrix {
        let z = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let lower = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let mut m = ComplexMatrix::identity(1);
        for j in 0..sites {
            let f = match j.cmp(&k) {
                std::cmp::Ordering::Less => z.clone(),
                std::cmp::Ordering::Equal => lower.clone(),
                std::cmp::Ordering::Greater => ComplexMatrix::identity(2),
            };
            m = kron(&m, &f).unwrap();
        }
        m
    }

    /// `C† 𝐇 C` by explicit operator products.
    fn operator_route(spec: &FreeFermionSpec) -> ComplexMatrix {
        let l = spec.sites();
        let nambu = nambu_hamiltonian(spec);
        let c: Vec<ComplexMatrix> = (0..l).map(|k| annihilation(l, k)).collect();
        let nambu_ops: Vec<ComplexMatrix> = c.iter().cloned().chain(c.iter().map(|m| m.adjoint())).collect();
        let mut h = ComplexMatrix::zeros(1 << l, 1 << l);
        for (a, ca) in nambu_ops.iter().enumerate() {
            for (b, cb) in nambu_ops.iter().enumerate() {
                h.add_scaled(nambu[(a, b)], &ca.adjoint().matmul(cb));
            }
        }
        h
    }

    fn random_spec(sites: usize, seed: u64) -> FreeFermionSpec {
        let mut rng = LabRng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(sites, sites, |_, _| rng.complex_gaussian());
        let p = ComplexMatrix::from_fn(sites, sites, |_, _| rng.complex_gaussian());
        FreeFermionSpec::new(
            g.add(&g.adjoint()).scale_real(0.5),
            p.sub(&p.transpose()).scale_real(0.5),
        )
        .unwrap()
    }

    fn parity(sites: usize) -> ComplexMatrix {
        let values: Vec<C64> = (0..1usize << sites)
            .map(|i| C64::new(if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        ComplexMatrix::diagonal(&values)
    }

    #[test]
    fn anticommutation_of_explicit_operators() {
        let c0 = annihilation(3, 0);
        let c2 = annihilation(3, 2);
        let anti = c0.matmul(&c2.adjoint()).add(&c2.adjoint().matmul(&c0));
        assert!(anti.frobenius_norm() < 1e-14);
        let number = c2.adjoint().matmul(&c2);
        // occupied = bit 1 on the last qubit
        assert_eq!(number[(1, 1)], C64::new(1.0, 0.0));
        assert_eq!(number[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn matrix_elements_match_operator_products() {
        for (sites, seed) in [(2, 1), (3, 2), (4, 3)] {
            let spec = random_spec(sites, seed);
            let direct = many_body_hamiltonian(&spec);
            let oracle = operator_route(&spec);
            assert!(direct.distance(&oracle) < 1e-12, "L = {sites}");
            assert!(direct.hermiticity_residual() < 1e-12);
        }
    }

    #[test]
    fn many_body_spectrum_is_sign_sum_at_two_sites() {
        let spec = random_spec(2, 8);
        let (nambu_values, _) = eig_hermitian(&nambu_hamiltonian(&spec)).unwrap();
        let eps: Vec<f64> = nambu_values[2..].to_vec();
        let mut expected: Vec<f64> = (0..4)
            .map(|s: usize| (0..2).map(|k| if s >> k & 1 == 1 { eps[k] } else { -eps[k] }).sum())
            .collect();
        expected.sort_by(f64::total_cmp);
        let (got, _) = eig_hermitian(&many_body_hamiltonian(&spec)).unwrap();
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-10, "{got:?} vs {expected:?}");
        }
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let u = build_free_fermion(FreeFermionSpec::zero(3), 0).unwrap();
        assert!(u.matrix.distance(&ComplexMatrix::identity(8)) < 1e-14);
    }

    #[test]
    fn majorana_round_trip_recovers_spec() {
        let spec = random_spec(3, 5);
        let v = majorana_rotation(3);
        let h_majorana = v.matmul(&nambu_hamiltonian(&spec)).matmul(&v.adjoint());
        // purely imaginary and antisymmetric
        assert!(h_majorana.as_slice().iter().all(|z| z.re.abs() < 1e-12));
        assert!(h_majorana.add(&h_majorana.transpose()).frobenius_norm() < 1e-12);
        let back = spec_from_majorana(&h_majorana).unwrap();
        assert!(back.h.distance(&spec.h) < 1e-12);
        assert!(back.delta.distance(&spec.delta) < 1e-12);
    }

    #[test]
    fn sampled_unitary_conserves_parity() {
        for seed in 0..4 {
            let s = sample_free_fermion(3, seed).unwrap();
            let p = parity(3);
            let comm = s.matrix.matmul(&p).sub(&p.matmul(&s.matrix));
            assert!(comm.frobenius_norm() < 1e-10);
            let EnsembleParams::FreeFermion(spec) = &s.params else {
                panic!()
            };
            assert!(many_body_hamiltonian(spec).hermiticity_residual() < 1e-10);
        }
    }

    #[test]
    fn spec_validation() {
        let g = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(FreeFermionSpec::new(g.clone(), ComplexMatrix::zeros(2, 2)).is_err());
        assert!(FreeFermionSpec::new(ComplexMatrix::zeros(2, 2), g).is_err());
    }
}
