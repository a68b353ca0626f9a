//! Dense complex linear algebra at desk scale.
//!
//! Matrices are row-major and small (up to a few hundred rows), so every
//! routine here favours clarity over blocking or vectorization.

mod jacobi;
mod spectral;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Result};

pub use jacobi::{eigh, null_space, null_space_abs, svd, HermitianEigen, SvdResult};
pub use spectral::{gram_factor, gram_factor_default, psd_project, schatten_norm, Schatten};

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Matrix unit `E_{ij}` of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = ONE;
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(shape_err("ragged rows"));
        }
        Ok(Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Column vector from a slice.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex64]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(shape_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMatrix {
        self.map(|z| z.conj())
    }

    /// Kronecker product; row index is `i_a * rows_b + i_b`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (rb, cb) = other.shape();
        CMatrix::from_fn(self.rows * rb, self.cols * cb, |i, j| {
            self[(i / rb, j / cb)] * other[(i % rb, j % cb)]
        })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        self.map(|z| z * c)
    }

    pub fn scale_real(&self, c: f64) -> CMatrix {
        self.map(|z| z * c)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm, computed from the entries.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `tr(A* B)`.
    pub fn inner(&self, other: &CMatrix) -> Complex64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Entrywise `self += c * other`.
    pub fn axpy(&mut self, c: Complex64, other: &CMatrix) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// `(H + H*)/2`.
    pub fn hermitian_part(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Largest entrywise distance to `other`.
    pub fn max_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix add shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sub shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

/// Panicking product, for internal code where shapes are known to agree.
impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hybrid comparison `|x − y| ≤ atol + rtol·max(|x|,|y|)`.
pub fn approx_eq(x: f64, y: f64, atol: f64, rtol: f64) -> bool {
    (x - y).abs() <= atol + rtol * x.abs().max(y.abs())
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Bilinear pairing `Σ a_k b_k` (no conjugation).
pub fn pair(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn naive_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
        CMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            let mut s = ZERO;
            for k in 0..a.cols() {
                s += a[(i, k)] * b[(k, j)];
            }
            s
        })
    }

    #[test]
    fn identity_product() {
        let mut r = rng::seeded(1, 0);
        let m = rng::gaussian_matrix(&mut r, 2, 3);
        assert_eq!(&CMatrix::identity(2) * &m, m);
    }

    #[test]
    fn matrix_units_multiply() {
        let e12 = CMatrix::unit(2, 2, 0, 1);
        let e21 = CMatrix::unit(2, 2, 1, 0);
        assert_eq!(&e12 * &e21, CMatrix::unit(2, 2, 0, 0));
    }

    #[test]
    fn product_matches_triple_loop() {
        let mut r = rng::seeded(2, 0);
        let a = rng::gaussian_matrix(&mut r, 3, 4);
        let b = rng::gaussian_matrix(&mut r, 4, 2);
        assert!(a.matmul(&b).unwrap().max_diff(&naive_product(&a, &b)) < 1e-14);
    }

    #[test]
    fn product_shape_error() {
        let a = CMatrix::zeros(2, 3);
        let err = a.matmul(&a).unwrap_err();
        assert_eq!(err.code(), "shape");
    }

    #[test]
    fn adjoint_cases() {
        let s = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 5.0]]).unwrap();
        assert_eq!(s.adjoint(), s);
        let i = CMatrix::from_vec(1, 1, vec![Complex64::new(0.0, 1.0)]).unwrap();
        assert_eq!(i.adjoint()[(0, 0)], Complex64::new(0.0, -1.0));

        let mut r = rng::seeded(3, 0);
        let a = rng::gaussian_matrix(&mut r, 3, 3);
        let b = rng::gaussian_matrix(&mut r, 3, 3);
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!(lhs.max_diff(&rhs) < 1e-14);
    }

    #[test]
    fn kron_cases() {
        assert_eq!(
            CMatrix::identity(2).kron(&CMatrix::identity(3)),
            CMatrix::identity(6)
        );
        let e = CMatrix::unit(2, 2, 0, 0).kron(&CMatrix::unit(2, 2, 1, 1));
        assert_eq!(e, CMatrix::unit(4, 4, 1, 1));

        let mut r = rng::seeded(4, 0);
        let [a, b, c, d] = [0, 1, 2, 3].map(|_| rng::gaussian_matrix(&mut r, 2, 2));
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        assert!(lhs.max_diff(&rhs) < 1e-13);
    }

    #[test]
    fn kron_associative() {
        let mut r = rng::seeded(5, 0);
        let a = rng::gaussian_matrix(&mut r, 2, 1);
        let b = rng::gaussian_matrix(&mut r, 1, 3);
        let c = rng::gaussian_matrix(&mut r, 2, 2);
        let lhs = a.kron(&b).kron(&c);
        let rhs = a.kron(&b.kron(&c));
        assert!(lhs.max_diff(&rhs) < 1e-15);
    }

    #[test]
    fn hybrid_tolerance() {
        assert!(approx_eq(1.0, 1.0 + 1e-10, 0.0, 1e-9));
        assert!(!approx_eq(1.0, 1.1, 1e-3, 1e-3));
        assert!(approx_eq(0.0, 1e-13, 1e-12, 0.0));
    }
}
