//! Dense complex matrices and the handful of operations the Lie closure needs.
//!
//! Everything here works on small (N ≤ a few dozen) square matrices in model
//! units with ħ = 1. Storage is an `nalgebra` column-major matrix; the wrapper
//! exists so the rest of the crate talks about skew-Hermitian generators and
//! real coordinates rather than raw storage.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

/// Real coordinates of a complex matrix: real parts of all entries in
/// column-major order followed by the imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealVector(pub Vec<f64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    /// Builds a matrix from `f(row, col)` with zero-based indices.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            data: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        Ok(Self::from_fn(n, |r, c| rows[r][c]))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn from_nalgebra(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::NotSquare);
        }
        Ok(Self { data })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: self.data.map(|z| z * s),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            data: self.data.map(|z| z * s),
        }
    }

    /// `self + s * other`, in place.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter_mut()
            .zip(other.data.iter())
            .for_each(|(a, b)| *a += b * s);
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(Self {
            data: &self.data * &other.data,
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> Complex64 {
        self.data.clone().determinant()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_deviation(&self.adjoint()) <= tol
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.max_deviation(&self.adjoint().neg()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = &self.adjoint().data * &self.data;
        let eye = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        prod.iter()
            .zip(eye.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            <= tol
    }

    /// Real-linear coordinates, length `2 N²`.
    pub fn vectorize(&self) -> RealVector {
        let mut out = Vec::with_capacity(2 * self.data.len());
        out.extend(self.data.iter().map(|z| z.re));
        out.extend(self.data.iter().map(|z| z.im));
        RealVector(out)
    }

    /// Inverse of [`ComplexMatrix::vectorize`].
    pub fn devectorize(dim: usize, v: &RealVector) -> Result<Self> {
        let n2 = dim * dim;
        if v.0.len() != 2 * n2 {
            return Err(Error::DimensionMismatch {
                left: v.0.len(),
                right: 2 * n2,
            });
        }
        let (re, im) = v.0.split_at(n2);
        let data = DMatrix::from_iterator(
            dim,
            dim,
            re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)),
        );
        Ok(Self { data })
    }

    /// Matrix exponential of a skew-Hermitian matrix.
    ///
    /// Writes `s = iH`, diagonalises the Hermitian `H = V diag(λ) V†` and
    /// returns `V diag(e^{iλ}) V†`. `tol` bounds the skew-Hermitian defect
    /// relative to the largest entry.
    pub fn expm_skew(&self, tol: f64) -> Result<Self> {
        let scale = self.max_abs().max(1.0);
        let defect = self.max_deviation(&self.adjoint().neg());
        if defect > tol * scale {
            return Err(Error::NotSkewHermitian { defect });
        }
        let n = self.dim();
        // H = -i s, symmetrised so rounding cannot leak into the eigensolver.
        let h = self.data.map(|z| -I * z);
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let v = eig.eigenvectors;
        let phases = DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::from_polar(1.0, eig.eigenvalues[r])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self {
            data: &v * phases * v.adjoint(),
        })
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a, b)?;
    Ok(ComplexMatrix {
        data: &a.data * &b.data - &b.data * &a.data,
    })
}

impl RealVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.0
            .iter_mut()
            .zip(&other.0)
            .for_each(|(a, b)| *a += s * b);
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a *= s);
        self
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.data[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.data[idx]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in add");
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in sub");
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in mul");
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { data: -self.data }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.data[(r, c)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generator, GeneratorKind};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = ComplexMatrix::from_fn(3, |r, k| c(r as f64 + 0.5, k as f64 - 1.0));
        assert_eq!(commutator(&a, &a).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn commutator_of_real_and_imag_pair_is_diagonal() {
        let er = generator(GeneratorKind::ER, 1, 2, 2).unwrap();
        let ei = generator(GeneratorKind::EI, 1, 2, 2).unwrap();
        let got = commutator(&er, &ei).unwrap();
        let want = ComplexMatrix::from_fn(2, |r, k| match (r, k) {
            (0, 0) => c(0.0, 2.0),
            (1, 1) => c(0.0, -2.0),
            _ => c(0.0, 0.0),
        });
        assert!(got.max_deviation(&want) < 1e-15);
    }

    #[test]
    fn commutator_chains_real_generators() {
        let a = generator(GeneratorKind::ER, 1, 2, 3).unwrap();
        let b = generator(GeneratorKind::ER, 2, 3, 3).unwrap();
        let want = generator(GeneratorKind::ER, 1, 3, 3).unwrap();
        assert!(commutator(&a, &b).unwrap().max_deviation(&want) < 1e-15);
    }

    #[test]
    fn commutator_rejects_mismatched_dims() {
        let err = commutator(&ComplexMatrix::zeros(2), &ComplexMatrix::zeros(3)).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch { left: 2, right: 3 }
        ));
    }

    #[test]
    fn vectorize_layout() {
        assert_eq!(
            ComplexMatrix::zeros(2).vectorize(),
            RealVector(vec![0.0; 8])
        );

        let ii = ComplexMatrix::identity(2).scale_complex(I);
        let v = ii.vectorize();
        // column-major: (1,1)=0, (2,1)=1, (1,2)=2, (2,2)=3; imaginary block starts at 4
        assert_eq!(v.0, vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);

        let er = generator(GeneratorKind::ER, 1, 2, 2).unwrap();
        let v = er.vectorize();
        assert_eq!(v.0, vec![0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_relative_eq!(v.norm(), 2f64.sqrt());
    }

    #[test]
    fn devectorize_rejects_bad_length() {
        assert!(ComplexMatrix::devectorize(2, &RealVector(vec![0.0; 7])).is_err());
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let u = ComplexMatrix::zeros(3).expm_skew(1e-12).unwrap();
        assert!(u.max_deviation(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn expm_rotation_block() {
        let theta = 0.7_f64;
        let s = generator(GeneratorKind::EI, 1, 2, 4).unwrap().scale(theta);
        let u = s.expm_skew(1e-12).unwrap();
        let (ct, st) = (theta.cos(), theta.sin());
        let want = ComplexMatrix::from_fn(4, |r, k| match (r, k) {
            (0, 0) | (1, 1) => c(ct, 0.0),
            (0, 1) | (1, 0) => c(0.0, st),
            (2, 2) | (3, 3) => c(1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        assert!(u.max_deviation(&want) < 1e-13);
    }

    #[test]
    fn expm_i_pi_is_minus_identity() {
        let s = ComplexMatrix::identity(2).scale_complex(c(0.0, std::f64::consts::PI));
        let u = s.expm_skew(1e-12).unwrap();
        assert!(u.max_deviation(&ComplexMatrix::identity(2).scale(-1.0)) < 1e-14);
    }

    #[test]
    fn expm_rejects_hermitian_input() {
        let h = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(matches!(
            h.expm_skew(1e-10),
            Err(Error::NotSkewHermitian { .. })
        ));
    }

    #[test]
    fn trace_and_norm() {
        assert_eq!(ComplexMatrix::identity(3).trace(), c(3.0, 0.0));
        let h0 = ComplexMatrix::from_real_diagonal(&[0.5, 1.5]);
        assert_eq!(h0.trace(), c(2.0, 0.0));
        let ei = generator(GeneratorKind::EI, 1, 2, 2).unwrap();
        assert_relative_eq!(ei.frobenius_norm(), 2f64.sqrt());
    }

    #[test]
    fn predicates() {
        let ei = generator(GeneratorKind::EI, 1, 2, 3).unwrap();
        assert!(ei.is_skew_hermitian(0.0));
        assert!(!ei.is_hermitian(1e-3));
        assert!(ei.scale_complex(-I).is_hermitian(0.0));
        assert!(ComplexMatrix::identity(3).is_unitary(0.0));
        assert!(!ComplexMatrix::identity(3).scale(2.0).is_unitary(1e-3));
    }
}
