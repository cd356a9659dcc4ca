use super::ComplexMatrix;
use crate::error::{Error, Result};
use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;

const RANK_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Right eigenvectors; column `k` pairs with `values[k]`.
    pub vectors: Option<ComplexMatrix>,
}

/// Thin QR of `g` with the column phases of `Q` rotated by `Λ = diag(R_kk/|R_kk|)`.
///
/// Applied to a Ginibre matrix this yields a Haar-distributed isometry.
pub fn qr_phase_fixed(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    if g.rows() < g.cols() {
        return Err(Error::Shape(format!(
            "qr_phase_fixed needs rows >= cols, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let qr = g.to_faer().qr();
    let r = qr.thin_R();
    let mut phases = Vec::with_capacity(g.cols());
    for k in 0..g.cols() {
        let rkk = r[(k, k)];
        let modulus = rkk.norm();
        if !(modulus >= RANK_FLOOR) {
            return Err(Error::DegenerateInput(format!(
                "|R[{k},{k}]| = {modulus:e} below rank floor"
            )));
        }
        phases.push(rkk / modulus);
    }
    let q = qr.compute_thin_Q();
    let mut out = ComplexMatrix::from_faer(q.as_ref())?;
    for i in 0..out.rows() {
        for (k, &p) in phases.iter().enumerate() {
            out[(i, k)] *= p;
        }
    }
    Ok(out)
}

/// Real counterpart of [`qr_phase_fixed`] for an `n × n` row-major matrix:
/// returns `Q · diag(sign R_kk)`, an orthogonal matrix.
pub fn orthogonal_qr_real(n: usize, data: &[f64]) -> Result<ComplexMatrix> {
    if data.len() != n * n {
        return Err(Error::Shape(format!("{} entries for {n}x{n}", data.len())));
    }
    let g = Mat::<f64>::from_fn(n, n, |i, j| data[i * n + j]);
    let qr = g.qr();
    let r = qr.thin_R();
    let mut signs = Vec::with_capacity(n);
    for k in 0..n {
        let rkk = r[(k, k)];
        if !(rkk.abs() >= RANK_FLOOR) {
            return Err(Error::DegenerateInput(format!("|R[{k},{k}]| below rank floor")));
        }
        signs.push(rkk.signum());
    }
    let q = qr.compute_thin_Q();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| C64::new(q[(i, j)] * signs[j], 0.0)))
}

/// Eigenvalues (and optionally right eigenvectors) of a general square matrix.
pub fn eig_general(m: &ComplexMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let dim = m.rows();
    let a = m.to_faer();
    if want_vectors {
        let evd = a.eigen().map_err(|_| Error::NoConvergence { dim })?;
        let values: Vec<C64> = evd.S().column_vector().iter().copied().collect();
        let vectors = ComplexMatrix::from_faer(evd.U()).map_err(|_| Error::NoConvergence { dim })?;
        check_finite(&values, dim)?;
        Ok(EigenDecomposition {
            values,
            vectors: Some(vectors),
        })
    } else {
        let values = a.eigenvalues().map_err(|_| Error::NoConvergence { dim })?;
        check_finite(&values, dim)?;
        Ok(EigenDecomposition { values, vectors: None })
    }
}

fn check_finite(values: &[C64], dim: usize) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NoConvergence { dim })
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
/// Only the lower triangle is read.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::Shape(
            "Hermitian eigendecomposition of a non-square matrix".into(),
        ));
    }
    let dim = h.rows();
    let evd = h
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence { dim })?;
    let values: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
    let vectors = ComplexMatrix::from_faer(evd.U()).map_err(|_| Error::NoConvergence { dim })?;
    Ok((values, vectors))
}

/// `exp(−i·h)` for Hermitian `h`, via its spectral decomposition.
pub fn expm_hermitian_i(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::Shape("matrix exponential of a non-square matrix".into()));
    }
    let residual = h.hermiticity_residual();
    if residual > 1e-10 * h.frobenius_norm() {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian: ‖h − h†‖_F = {residual:e}"
        )));
    }
    let (energies, v) = eig_hermitian(h)?;
    let phases: Vec<C64> = energies.iter().map(|&e| C64::from_polar(1.0, -e)).collect();
    Ok(scaled_columns(&v, &phases).matmul(&v.adjoint()))
}

fn scaled_columns(v: &ComplexMatrix, s: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * s[j])
}

/// `H = i·log(u)` for a real special-orthogonal `u`, with eigenphases in (−π, π].
///
/// `H` is purely imaginary and antisymmetric, and `exp(−iH) = u`.
pub fn logm_special_orthogonal(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !u.is_square() {
        return Err(Error::Shape("matrix logarithm of a non-square matrix".into()));
    }
    let n = u.rows();
    let imag = u.as_slice().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let orth = u.transpose().matmul(u).distance(&ComplexMatrix::identity(n));
    if imag > 1e-12 || orth > 1e-10 {
        return Err(Error::Contract(format!(
            "matrix is not real orthogonal (max |Im| = {imag:e}, ‖uᵀu − I‖_F = {orth:e})"
        )));
    }
    let det = u.determinant();
    if det.re <= 0.0 {
        return Err(Error::Contract(format!("determinant {det} is not +1")));
    }

    let evd = eig_general(u, true)?;
    if evd.values.iter().any(|&z| (z + 1.0).norm() < 1e-8) {
        return Err(Error::BranchAmbiguity);
    }
    let vectors = evd.vectors.expect("vectors requested");
    let inverse = ComplexMatrix::from_faer(vectors.to_faer().partial_piv_lu().inverse().as_ref())?;
    let logs: Vec<C64> = evd.values.iter().map(|z| C64::new(z.norm().ln(), z.arg())).collect();
    let log_u = scaled_columns(&vectors, &logs).matmul(&inverse);
    let h = log_u.scale(C64::new(0.0, 1.0));

    // i·log of a real orthogonal matrix is i times a real antisymmetric matrix
    let scale = h.frobenius_norm().max(1.0);
    let real_part = h.as_slice().iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
    let asym = h.add(&h.transpose()).frobenius_norm();
    if real_part > 1e-8 * scale || asym > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "logarithm lost its structure (‖Re H‖ = {real_part:e}, ‖H + Hᵀ‖ = {asym:e})"
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        C64::new(0.0, 0.5 * (h[(i, j)].im - h[(j, i)].im))
    }))
}
