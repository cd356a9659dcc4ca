//! Dense complex linear algebra shared by every other module.
//!
//! [`ComplexMatrix`] stores entries row-major. The vectorization convention is
//! pinned by the identity `(A ⊗ B*) vec(ρ) = vec(A ρ B†)`, which holds with
//! [`kron`] as defined here and a row-major [`vec`].

mod cmat;
mod decomp;

pub use cmat::{read_cmat, write_cmat, CmatError};
pub use decomp::{
    eig_general, eig_hermitian, expm_hermitian_i, logm_special_orthogonal, orthogonal_qr_real, qr_phase_fixed,
    EigenDecomposition,
};

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::ops::{Index, IndexMut, Mul};

/// Largest admissible row or column count.
pub const SIZE_CAP: usize = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

fn check_size(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape(format!("empty {rows}x{cols} matrix")));
    }
    if rows > SIZE_CAP || cols > SIZE_CAP {
        return Err(Error::SizedInput {
            rows,
            cols,
            cap: SIZE_CAP,
        });
    }
    Ok(())
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        check_size(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        check_size(rows, cols).expect("matrix shape");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy of the rows `start..end`.
    pub fn row_block(&self, start: usize, end: usize) -> ComplexMatrix {
        assert!(start < end && end <= self.rows);
        Self {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    /// Copy of the columns `start..end`.
    pub fn col_block(&self, start: usize, end: usize) -> ComplexMatrix {
        assert!(start < end && end <= self.cols);
        Self::from_fn(self.rows, end - start, |i, j| self[(i, start + j)])
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> ComplexMatrix {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> ComplexMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.map(|z| z * s)
    }

    fn assert_same_shape(&self, other: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        self.assert_same_shape(other);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        self.assert_same_shape(other);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self += s · other`
    pub fn add_scaled(&mut self, s: C64, other: &ComplexMatrix) {
        self.assert_same_shape(other);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let n = other.cols;
        let mut out = Self::zeros(self.rows, n);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖self − other‖_F`
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        self.assert_same_shape(other);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖U†U − I‖_F`
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().matmul(self).distance(&Self::identity(self.cols))
    }

    /// `‖M − M†‖_F`
    pub fn hermiticity_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    pub fn determinant(&self) -> C64 {
        assert!(self.is_square());
        self.to_faer().determinant()
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<C64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, C64>) -> Result<Self> {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        Self::new(m.nrows(), m.ncols(), data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product: entry `(i·b.rows + k, j·b.cols + l)` is `a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => {
            return Err(Error::SizedInput {
                rows: usize::MAX,
                cols: usize::MAX,
                cap: SIZE_CAP,
            })
        }
    };
    check_size(rows, cols)?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    accumulate_kron(&mut out, C64::new(1.0, 0.0), a, b);
    Ok(out)
}

/// `out += s · (a ⊗ b)` without materializing the product.
pub(crate) fn accumulate_kron(out: &mut ComplexMatrix, s: C64, a: &ComplexMatrix, b: &ComplexMatrix) {
    debug_assert_eq!(out.rows, a.rows * b.rows);
    debug_assert_eq!(out.cols, a.cols * b.cols);
    let cols = out.cols;
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = s * a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..b.rows {
                let base = (i * b.rows + k) * cols + j * b.cols;
                let dst = &mut out.data[base..base + b.cols];
                for (o, &bkl) in dst.iter_mut().zip(b.row(k)) {
                    *o += aij * bkl;
                }
            }
        }
    }
}

/// Row-major stacking of a square matrix into a `d² × 1` column.
pub fn vec(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "vec expects a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    ComplexMatrix::new(m.rows * m.cols, 1, m.data.clone())
}

/// Inverse of [`vec`]; accepts a column or row of length `d²`.
pub fn unvec(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let len = v.rows * v.cols;
    if v.rows != 1 && v.cols != 1 {
        return Err(Error::Shape(format!(
            "unvec expects a vector, got {}x{}",
            v.rows, v.cols
        )));
    }
    let d = (len as f64).sqrt().round() as usize;
    if d * d != len {
        return Err(Error::Shape(format!("length {len} is not a perfect square")));
    }
    ComplexMatrix::new(d, d, v.data.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn construction_rejects_non_finite() {
        let err = ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 0, col: 1 }));
    }

    #[test]
    fn construction_rejects_wrong_length_and_size_cap() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            ComplexMatrix::new(SIZE_CAP + 1, 1, vec![c(0.0, 0.0); SIZE_CAP + 1]),
            Err(Error::SizedInput { .. })
        ));
    }

    #[test]
    fn kron_identities_give_identity() {
        let id = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(id, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_pauli_entries() {
        let m = kron(&pauli_x(), &pauli_z()).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 2)] = c(1.0, 0.0);
        expected[(1, 3)] = c(-1.0, 0.0);
        expected[(2, 0)] = c(1.0, 0.0);
        expected[(3, 1)] = c(-1.0, 0.0);
        assert_eq!(m, expected);
    }

    #[test]
    fn kron_shape_rule() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(4, 5);
        let m = kron(&a, &b).unwrap();
        assert_eq!((m.rows(), m.cols()), (8, 15));
    }

    #[test]
    fn kron_refuses_oversized_products() {
        let a = ComplexMatrix::zeros(128, 1);
        let b = ComplexMatrix::zeros(128, 1);
        assert!(matches!(kron(&a, &b), Err(Error::SizedInput { .. })));
    }

    #[test]
    fn vec_of_identity() {
        let v = vec(&ComplexMatrix::identity(2)).unwrap();
        let got: Vec<f64> = v.as_slice().iter().map(|z| z.re).collect();
        assert_eq!(got, vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!((v.rows(), v.cols()), (4, 1));
    }

    #[test]
    fn unvec_rejects_non_square_length() {
        let v = ComplexMatrix::zeros(5, 1);
        assert!(matches!(unvec(&v), Err(Error::Shape(_))));
        assert!(matches!(unvec(&ComplexMatrix::zeros(2, 2)), Err(Error::Shape(_))));
    }

    #[test]
    fn matmul_and_trace() {
        let x = pauli_x();
        assert_eq!(x.matmul(&x), ComplexMatrix::identity(2));
        assert_eq!(pauli_z().trace(), c(0.0, 0.0));
        assert_eq!((&x * &pauli_z())[(0, 1)], c(-1.0, 0.0));
    }
}
