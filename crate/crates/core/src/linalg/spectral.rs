use super::{eigh, svd, CMatrix};
use crate::error::{shape_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schatten {
    /// Trace norm `Σσᵢ`.
    One,
    /// Hilbert–Schmidt norm, taken from the entries.
    Two,
    /// Operator norm `σ₁`.
    Inf,
}

pub fn schatten_norm(a: &CMatrix, p: Schatten) -> Result<f64> {
    match p {
        Schatten::Two => Ok(a.frobenius()),
        Schatten::One => Ok(svd(a)?.nuclear()),
        Schatten::Inf => Ok(svd(a)?.sigma.first().copied().unwrap_or(0.0)),
    }
}

/// Nearest positive semidefinite matrix in Frobenius distance.
pub fn psd_project(h: &CMatrix) -> Result<CMatrix> {
    if !h.is_square() {
        return Err(shape_err("psd_project needs a square matrix"));
    }
    let e = eigh(h)?;
    let n = h.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in e.values.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = e.vectors[(i, k)] * lam;
            for j in 0..n {
                out[(i, j)] += vi * e.vectors[(j, k)].conj();
            }
        }
    }
    Ok(out.hermitian_part())
}

/// Factor `p ≈ G*·G`. Each column of `G` is one factor vector; eigenvalues
/// at or below `floor` are dropped, so `G` has one row per kept eigenvalue
/// (at least one row, all zero when nothing is kept).
pub fn gram_factor(p: &CMatrix, floor: f64) -> Result<CMatrix> {
    if !p.is_square() {
        return Err(shape_err("gram_factor needs a square matrix"));
    }
    let n = p.rows();
    let e = eigh(p)?;
    let lmax = e.values.first().copied().unwrap_or(0.0);
    let lmin = e.values.last().copied().unwrap_or(0.0);
    if lmin < -1e-10 * lmax.abs().max(1.0) {
        return Err(Error::NotPsd { min_eig: lmin });
    }
    let kept: Vec<usize> = (0..n)
        .filter(|&k| e.values[k] > floor && e.values[k] > 0.0)
        .collect();
    if kept.is_empty() {
        return Ok(CMatrix::zeros(1, n));
    }
    let mut g = CMatrix::zeros(kept.len(), n);
    for (r, &k) in kept.iter().enumerate() {
        let s = e.values[k].sqrt();
        for j in 0..n {
            g[(r, j)] = e.vectors[(j, k)].conj() * s;
        }
    }
    Ok(g)
}

/// `gram_factor` with the floor at `1e-10·λ_max`.
pub fn gram_factor_default(p: &CMatrix) -> Result<CMatrix> {
    let lmax = eigh(p)?.values.first().copied().unwrap_or(0.0).max(0.0);
    gram_factor(p, 1e-10 * lmax)
}
