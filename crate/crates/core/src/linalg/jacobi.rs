//! Jacobi-rotation kernels: one-sided (Hestenes) SVD and the cyclic
//! Hermitian eigensolver. Both use the same 2×2 rotation.

use num_complex::Complex64;

use super::{vec_norm, CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;
const OFF_TOL: f64 = 1e-14;

/// `A = U · diag(σ) · V*`, thin: `k = min(rows, cols)` columns.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> CMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            for i in 0..us.rows() {
                us[(i, j)] *= *s;
            }
        }
        &us * &self.v.adjoint()
    }

    /// Sum of the singular values.
    pub fn nuclear(&self) -> f64 {
        self.sigma.iter().sum()
    }
}

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Unitary acting on coordinates `(p, q)`:
/// column p = `(c, −s·ω)`, column q = `(s, c·ω)` with `|ω| = 1`.
///
/// Chosen so that `G* [[α, h], [h̄, β]] G` is diagonal.
#[derive(Debug, Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    omega: Complex64,
}

impl Rotation {
    fn annihilating(alpha: f64, beta: f64, h: Complex64) -> Rotation {
        let mag = h.norm();
        let omega = (h / mag).conj();
        let zeta = (beta - alpha) / (2.0 * mag);
        let t = if zeta >= 0.0 {
            1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
        } else {
            -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Rotation { c, s: c * t, omega }
    }

    #[inline]
    fn apply_pair(&self, xp: Complex64, xq: Complex64) -> (Complex64, Complex64) {
        let wq = self.omega * xq;
        (xp * self.c - wq * self.s, xp * self.s + wq * self.c)
    }

    /// Right-multiply columns p, q of a column-major store.
    fn apply_columns(&self, cols: &mut [Vec<Complex64>], p: usize, q: usize) {
        let (lo, hi) = cols.split_at_mut(q);
        let (cp, cq) = (&mut lo[p], &mut hi[0]);
        for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
            let (np, nq) = self.apply_pair(*xp, *xq);
            *xp = np;
            *xq = nq;
        }
    }
}

fn column_store(a: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..a.cols()).map(|j| a.col(j)).collect()
}

fn from_columns(rows: usize, cols: &[Vec<Complex64>]) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_col(j, c);
    }
    m
}

/// Hestenes iteration on a matrix with `rows >= cols`.
/// Returns the rotated columns `A·V` and the accumulated `V` (both column-major).
fn hestenes(a: &CMatrix) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let n = a.cols();
    let mut work = column_store(a);
    let mut v = column_store(&CMatrix::identity(n));
    let fro2 = a.frobenius().powi(2);
    let negligible = 1e-32 * fro2;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = work[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = work[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma: Complex64 = work[p]
                    .iter()
                    .zip(&work[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                if gamma.norm() <= OFF_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(alpha, beta, gamma);
                rot.apply_columns(&mut work, p, q);
                rot.apply_columns(&mut v, p, q);
            }
        }
        if !rotated {
            return Ok((work, v));
        }
    }
    Err(Error::SvdConvergence { sweeps: MAX_SWEEPS })
}

/// Extend orthonormal columns to `target` columns using standard basis vectors.
fn complete_orthonormal(cols: &mut Vec<Vec<Complex64>>, dim: usize, target: usize) {
    let mut e = 0;
    while cols.len() < target && e < dim {
        let mut cand = vec![ZERO; dim];
        cand[e] = ONE;
        e += 1;
        for _ in 0..2 {
            for c in cols.iter() {
                let proj: Complex64 = c.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
                for (z, x) in cand.iter_mut().zip(c) {
                    *z -= proj * x;
                }
            }
        }
        let nrm = vec_norm(&cand);
        if nrm > 1e-8 {
            cols.push(cand.iter().map(|z| z / nrm).collect());
        }
    }
}

fn svd_tall(a: &CMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let (work, v) = hestenes(a)?;
    let fro = a.frobenius();
    let norms: Vec<f64> = work.iter().map(|c| vec_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v_sorted: Vec<Vec<Complex64>> = order.iter().map(|&j| v[j].clone()).collect();

    let mut u_cols = Vec::with_capacity(n);
    for (&j, &s) in order.iter().zip(&sigma) {
        if s > 1e-15 * fro && s > 0.0 {
            u_cols.push(work[j].iter().map(|z| z / s).collect::<Vec<_>>());
        } else {
            break;
        }
    }
    complete_orthonormal(&mut u_cols, m, n);

    Ok(SvdResult {
        u: from_columns(m, &u_cols),
        sigma,
        v: from_columns(n, &v_sorted),
    })
}

/// Thin singular value decomposition by one-sided Jacobi rotations.
pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint())?;
        Ok(SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

/// Orthonormal basis of `{v : A v = 0}`, using the cutoff `σ ≤ rel·σ_max`.
pub fn null_space(a: &CMatrix, rel: f64) -> Result<Vec<Vec<Complex64>>> {
    null_space_with(a, |smax| rel * smax)
}

/// Same as [`null_space`] with the absolute cutoff `σ ≤ tol`.
pub fn null_space_abs(a: &CMatrix, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    null_space_with(a, |_| tol)
}

fn null_space_with(a: &CMatrix, cutoff: impl Fn(f64) -> f64) -> Result<Vec<Vec<Complex64>>> {
    let n = a.cols();
    let padded;
    let tall = if a.rows() >= n {
        a
    } else {
        let mut p = CMatrix::zeros(n, n);
        p.set_block(0, 0, a);
        padded = p;
        &padded
    };
    let (work, v) = hestenes(tall)?;
    let norms: Vec<f64> = work.iter().map(|c| vec_norm(c)).collect();
    let smax = norms.iter().cloned().fold(0.0, f64::max);
    let tol = cutoff(smax);
    Ok((0..n)
        .filter(|&j| norms[j] <= tol)
        .map(|j| v[j].clone())
        .collect())
}

/// Hermitian eigendecomposition by cyclic two-sided Jacobi rotations.
/// The input is symmetrized first.
pub fn eigh(h: &CMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(crate::error::shape_err("eigh needs a square matrix"));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = column_store(&CMatrix::identity(n));
    let scale = a.frobenius();
    let skip = 1e-17 * scale;

    let off = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off(&a) <= OFF_TOL * scale {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = a[(p, q)];
                if hpq.norm() <= skip {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(a[(p, p)].re, a[(q, q)].re, hpq);
                for k in 0..n {
                    let (np, nq) = rot.apply_pair(a[(k, p)], a[(k, q)]);
                    a[(k, p)] = np;
                    a[(k, q)] = nq;
                }
                let adj = Rotation {
                    omega: rot.omega.conj(),
                    ..rot
                };
                for k in 0..n {
                    let (np, nq) = adj.apply_pair(a[(p, k)], a[(q, k)]);
                    a[(p, k)] = np;
                    a[(q, k)] = nq;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                rot.apply_columns(&mut v, p, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged && off(&a) > OFF_TOL * scale {
        return Err(Error::EigConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let cols: Vec<Vec<Complex64>> = order.iter().map(|&i| v[i].clone()).collect();
    Ok(HermitianEigen {
        values,
        vectors: from_columns(n, &cols),
    })
}
