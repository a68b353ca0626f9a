//! Multiplier symbols.
//!
//! A [`Symbol3`] stores `φ = Σ φ[a1,b1,a2,b2,a3,b3] · E¹_{a1b1} ⊗ E²_{a2b2} ⊗ E³_{a3b3}`
//! in that fixed row-major index order. The middle leg belongs to the opposite
//! algebra, but that only matters when symbols are multiplied, which happens in
//! [`crate::factorize::opmul_symbol`]; storage is the plain tensor.
//!
//! A [`SchurSymbol`] is a function `φ(t1,t2,t3)` on finite sets with counting
//! measure.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::algebra::AlgebraTriple;
use crate::error::{shape_err, Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol3 {
    dims: [usize; 3],
    data: Vec<Complex64>,
}

impl Symbol3 {
    pub fn zeros(d1: usize, d2: usize, d3: usize) -> Self {
        let len = (d1 * d2 * d3).pow(2);
        Self {
            dims: [d1, d2, d3],
            data: vec![ZERO; len],
        }
    }

    pub fn from_vec(dims: [usize; 3], data: Vec<Complex64>) -> Result<Self> {
        let want = (dims[0] * dims[1] * dims[2]).pow(2);
        if data.len() != want {
            return Err(shape_err(format!(
                "symbol with dims {dims:?} needs {want} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut([usize; 6]) -> Complex64) -> Self {
        let mut s = Self::zeros(dims[0], dims[1], dims[2]);
        for (k, v) in s.data.iter_mut().enumerate() {
            *v = f(s_unflatten(dims, k));
        }
        s
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn offset(&self, [a1, b1, a2, b2, a3, b3]: [usize; 6]) -> usize {
        let [d1, d2, d3] = self.dims;
        ((((a1 * d1 + b1) * d2 + a2) * d2 + b2) * d3 + a3) * d3 + b3
    }

    /// Euclidean norm of the coefficient array.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Symbol3 {
        Symbol3 {
            dims: self.dims,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Symbol3) -> Result<Symbol3> {
        self.check_same(other)?;
        Ok(Symbol3 {
            dims: self.dims,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Symbol3) -> Result<Symbol3> {
        self.add(&other.scale(-ONE))
    }

    pub fn max_diff(&self, other: &Symbol3) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_same(&self, other: &Symbol3) -> Result<()> {
        if self.dims != other.dims {
            return Err(shape_err(format!(
                "symbol dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }
}

fn s_unflatten([d1, d2, d3]: [usize; 3], mut k: usize) -> [usize; 6] {
    let b3 = k % d3;
    k /= d3;
    let a3 = k % d3;
    k /= d3;
    let b2 = k % d2;
    k /= d2;
    let a2 = k % d2;
    k /= d2;
    let b1 = k % d1;
    k /= d1;
    [k, b1, a2, b2, a3, b3]
}

impl Index<[usize; 6]> for Symbol3 {
    type Output = Complex64;

    #[inline]
    fn index(&self, idx: [usize; 6]) -> &Complex64 {
        &self.data[self.offset(idx)]
    }
}

impl IndexMut<[usize; 6]> for Symbol3 {
    #[inline]
    fn index_mut(&mut self, idx: [usize; 6]) -> &mut Complex64 {
        let o = self.offset(idx);
        &mut self.data[o]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchurSymbol {
    dims: [usize; 3],
    data: Vec<Complex64>,
}

impl SchurSymbol {
    pub fn from_vec(dims: [usize; 3], data: Vec<Complex64>) -> Result<Self> {
        let want = dims[0] * dims[1] * dims[2];
        if data.len() != want {
            return Err(shape_err(format!(
                "schur symbol with dims {dims:?} needs {want} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for t1 in 0..dims[0] {
            for t2 in 0..dims[1] {
                for t3 in 0..dims[2] {
                    data.push(f(t1, t2, t3));
                }
            }
        }
        Self { dims, data }
    }

    pub fn constant(dims: [usize; 3], c: Complex64) -> Self {
        Self::from_fn(dims, |_, _, _| c)
    }

    /// Entries with independent complex Gaussian coefficients.
    pub fn random(dims: [usize; 3], seed: u64) -> Self {
        let mut g = rng::seeded(seed, 0);
        Self::from_fn(dims, |_, _, _| rng::complex_normal(&mut g))
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, t1: usize, t2: usize, t3: usize) -> Complex64 {
        self.data[(t1 * self.dims[1] + t2) * self.dims[2] + t3]
    }

    pub fn set(&mut self, t1: usize, t2: usize, t3: usize, v: Complex64) {
        let k = (t1 * self.dims[1] + t2) * self.dims[2] + t3;
        self.data[k] = v;
    }

    pub fn scale(&self, c: Complex64) -> SchurSymbol {
        SchurSymbol {
            dims: self.dims,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }
}

/// The diagonal symbol `φ[a1,a1,a2,a2,a3,a3] = s[a1,a2,a3]` realizing `Λ_s` as `τ_φ`.
pub fn embed_schur(s: &SchurSymbol) -> Symbol3 {
    let [n1, n2, n3] = s.dims();
    let mut out = Symbol3::zeros(n1, n2, n3);
    for t1 in 0..n1 {
        for t2 in 0..n2 {
            for t3 in 0..n3 {
                out[[t1, t1, t2, t2, t3, t3]] = s.get(t1, t2, t3);
            }
        }
    }
    out
}

/// The `n1 × n3` matrix `M[t1,t3] = s[t1,t2,t3]`.
pub fn slice(s: &SchurSymbol, t2: usize) -> Result<CMatrix> {
    let [n1, n2, n3] = s.dims();
    if t2 >= n2 {
        return Err(Error::IndexOutOfRange { index: t2, len: n2 });
    }
    Ok(CMatrix::from_fn(n1, n3, |t1, t3| s.get(t1, t2, t3)))
}

/// Inverse of taking all slices.
pub fn from_slices(slices: &[CMatrix]) -> Result<SchurSymbol> {
    let first = slices.first().ok_or_else(|| shape_err("no slices"))?;
    let (n1, n3) = first.shape();
    if slices.iter().any(|m| m.shape() != (n1, n3)) {
        return Err(shape_err("slices differ in shape"));
    }
    Ok(SchurSymbol::from_fn(
        [n1, slices.len(), n3],
        |t1, t2, t3| slices[t2][(t1, t3)],
    ))
}

pub fn sup_norm(s: &SchurSymbol) -> f64 {
    s.data().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The symbol of `R ⊗ S ⊗ T`.
pub fn elementary_symbol(r: &CMatrix, s: &CMatrix, t: &CMatrix) -> Result<Symbol3> {
    for (name, m) in [("r", r), ("s", s), ("t", t)] {
        if !m.is_square() {
            return Err(shape_err(format!(
                "{name} must be square, got {:?}",
                m.shape()
            )));
        }
    }
    let dims = [r.rows(), s.rows(), t.rows()];
    Ok(Symbol3::from_fn(dims, |[a1, b1, a2, b2, a3, b3]| {
        r[(a1, b1)] * s[(a2, b2)] * t[(a3, b3)]
    }))
}

/// Seeded random element of `M₁ ⊗ M₂ ⊗ M₃`: Gaussian coefficients on the
/// product basis `b1 ⊗ b2 ⊗ b3`.
pub fn random_symbol_in(t: &AlgebraTriple, seed: u64) -> Symbol3 {
    let mut g = rng::seeded(seed, 0);
    let [m1, m2, m3] = t.legs();
    let dims = t.dims();
    let mut out = Symbol3::zeros(dims[0], dims[1], dims[2]);
    for b1 in m1.basis() {
        for b2 in m2.basis() {
            for b3 in m3.basis() {
                let c = rng::complex_normal(&mut g);
                let e = elementary_symbol(b1, b2, b3).expect("basis elements are square");
                for (o, v) in out.data.iter_mut().zip(e.data()) {
                    *o += c * v;
                }
            }
        }
    }
    out
}
