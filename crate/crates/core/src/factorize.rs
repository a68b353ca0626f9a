//! Factorizations `φ = Σ (aᵢ⊗1)(1⊗bᵢ)`.
//!
//! For Schur symbols the construction is explicit: every slice
//! `M_{t2} = s(·,t2,·)` gets an optimal `γ₂` factorization, the factor vectors
//! are padded into a common ambient space, and their coordinates become
//! diagonal pair symbols. General symbols are only verified, not factorized.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraTriple, MatrixAlgebra};
use crate::error::{shape_err, Result};
use crate::linalg::{pair, svd, vec_norm, CMatrix, ZERO};
use crate::multiplier::{tau1_apply, tau3_apply, OpLeg, PairSymbol};
use crate::norms::{gamma2, NormEstimate};
use crate::rng;
use crate::symbols::{slice, sup_norm, SchurSymbol, Symbol3};

/// Vectors in `ℂ^k` indexed by a grid `(ta, tb)`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub dims: [usize; 2],
    pub k: usize,
    pub vectors: Vec<Vec<Complex64>>,
}

impl VectorField {
    pub fn zeros(dims: [usize; 2], k: usize) -> Self {
        Self {
            dims,
            k,
            vectors: vec![vec![ZERO; k]; dims[0] * dims[1]],
        }
    }

    pub fn get(&self, ta: usize, tb: usize) -> &[Complex64] {
        &self.vectors[ta * self.dims[1] + tb]
    }

    pub fn get_mut(&mut self, ta: usize, tb: usize) -> &mut Vec<Complex64> {
        let nb = self.dims[1];
        &mut self.vectors[ta * nb + tb]
    }

    pub fn sup_norm(&self) -> f64 {
        self.vectors.iter().map(|v| vec_norm(v)).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vectors.len() != self.dims[0] * self.dims[1] {
            return Err(shape_err(format!(
                "vector field on {:?} needs {} vectors, got {}",
                self.dims,
                self.dims[0] * self.dims[1],
                self.vectors.len()
            )));
        }
        if self.vectors.iter().any(|v| v.len() != self.k) {
            return Err(shape_err(format!(
                "vector field vectors must have length {}",
                self.k
            )));
        }
        if self.vectors.iter().flatten().any(|z| !z.is_finite()) {
            return Err(shape_err("vector field has non-finite entries"));
        }
        Ok(())
    }
}

/// Families `A = (aᵢ) ⊂ M₁⊗M₂^op` and `B = (bᵢ) ⊂ M₂^op⊗M₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorFamily {
    pub count: usize,
    pub a_list: Vec<PairSymbol>,
    pub b_list: Vec<PairSymbol>,
}

impl FactorFamily {
    pub fn new(a_list: Vec<PairSymbol>, b_list: Vec<PairSymbol>) -> Result<Self> {
        if a_list.len() != b_list.len() {
            return Err(shape_err(format!(
                "family has {} a-terms and {} b-terms",
                a_list.len(),
                b_list.len()
            )));
        }
        if let (Some(a0), Some(b0)) = (a_list.first(), b_list.first()) {
            let (da, db) = (a0.dims(), b0.dims());
            if da[1] != db[0] {
                return Err(shape_err(format!(
                    "middle legs differ: {} vs {}",
                    da[1], db[0]
                )));
            }
            if a_list
                .iter()
                .any(|a| a.dims() != da || a.op() != OpLeg::Second)
                || b_list
                    .iter()
                    .any(|b| b.dims() != db || b.op() != OpLeg::First)
            {
                return Err(shape_err("family terms must share dims and op placement"));
            }
        }
        Ok(Self {
            count: a_list.len(),
            a_list,
            b_list,
        })
    }

    /// Leg dimensions `(d1, d2, d3)`, if the family is non-empty.
    pub fn dims(&self) -> Option<[usize; 3]> {
        let a = self.a_list.first()?.dims();
        let b = self.b_list.first()?.dims();
        Some([a[0], a[1], b[1]])
    }

    /// First `m` terms.
    pub fn truncated(&self, m: usize) -> FactorFamily {
        let m = m.min(self.count);
        FactorFamily {
            count: m,
            a_list: self.a_list[..m].to_vec(),
            b_list: self.b_list[..m].to_vec(),
        }
    }
}

/// Slice-wise factorization `s(t1,t2,t3) = Σ_k a(t1,t2)[k] · b(t2,t3)[k]`
/// with `sup‖a‖ · sup‖b‖ = max_t2 γ₂(slice t2)`.
pub fn schur_s1_factorize(s: &SchurSymbol, tol: f64) -> Result<(VectorField, VectorField)> {
    let [n1, n2, n3] = s.dims();
    let per_slice = (0..n2)
        .into_par_iter()
        .map(|t2| gamma2(&slice(s, t2)?, tol))
        .collect::<Result<Vec<_>>>()?;
    let k = per_slice
        .iter()
        .flat_map(|g| g.a_vecs.iter().chain(&g.b_vecs).map(Vec::len))
        .max()
        .unwrap_or(0)
        .max(1);

    let pad = |v: &[Complex64]| {
        let mut out = v.to_vec();
        out.resize(k, ZERO);
        out
    };
    let mut a = VectorField::zeros([n1, n2], k);
    let mut b = VectorField::zeros([n2, n3], k);
    for (t2, g) in per_slice.iter().enumerate() {
        for t1 in 0..n1 {
            *a.get_mut(t1, t2) = pad(&g.a_vecs[t1]);
        }
        for t3 in 0..n3 {
            *b.get_mut(t2, t3) = pad(&g.b_vecs[t3]);
        }
    }
    Ok((a, b))
}

/// `max |s[t1,t2,t3] − Σ_k a(t1,t2)[k] b(t2,t3)[k]|`.
pub fn reconstruction_error(s: &SchurSymbol, a: &VectorField, b: &VectorField) -> Result<f64> {
    let [n1, n2, n3] = s.dims();
    if a.dims != [n1, n2] || b.dims != [n2, n3] || a.k != b.k {
        return Err(shape_err("vector fields do not match the symbol"));
    }
    let mut err = 0.0f64;
    for t1 in 0..n1 {
        for t2 in 0..n2 {
            for t3 in 0..n3 {
                err = err.max((s.get(t1, t2, t3) - pair(a.get(t1, t2), b.get(t2, t3))).norm());
            }
        }
    }
    Ok(err)
}

/// Coordinates of the fields as diagonal pair symbols:
/// `aᵢ[p1,p1,p2,p2] = a(p1,p2)[i]` and `bᵢ[r2,r2,r3,r3] = b(r2,r3)[i]`.
pub fn to_weak_factorization(a: &VectorField, b: &VectorField) -> Result<FactorFamily> {
    a.validate()?;
    b.validate()?;
    let [n1, n2] = a.dims;
    let [m2, n3] = b.dims;
    if n2 != m2 || a.k != b.k {
        return Err(shape_err(format!(
            "fields on {:?}/k={} and {:?}/k={} do not compose",
            a.dims, a.k, b.dims, b.k
        )));
    }
    let mut a_list = Vec::with_capacity(a.k);
    let mut b_list = Vec::with_capacity(a.k);
    for i in 0..a.k {
        let mut ai = PairSymbol::zeros(OpLeg::Second, n1, n2);
        for p1 in 0..n1 {
            for p2 in 0..n2 {
                ai.set([p1, p1, p2, p2], a.get(p1, p2)[i]);
            }
        }
        let mut bi = PairSymbol::zeros(OpLeg::First, n2, n3);
        for r2 in 0..n2 {
            for r3 in 0..n3 {
                bi.set([r2, r2, r3, r3], b.get(r2, r3)[i]);
            }
        }
        a_list.push(ai);
        b_list.push(bi);
    }
    FactorFamily::new(a_list, b_list)
}

/// `(a⊗1)(1⊗b)` with the middle leg multiplied in reverse:
/// `out[p1,q1,r2,q2,r3,s3] = Σ_{p2} a[p1,q1,p2,q2] · b[r2,p2,r3,s3]`.
pub fn opmul_symbol(a: &PairSymbol, b: &PairSymbol) -> Result<Symbol3> {
    let [d1, d2] = a.dims();
    let [e2, d3] = b.dims();
    if d2 != e2 {
        return Err(shape_err(format!("middle legs differ: {d2} vs {e2}")));
    }
    let mut out = Symbol3::zeros(d1, d2, d3);
    accumulate_opmul(&mut out, a, b);
    Ok(out)
}

fn accumulate_opmul(out: &mut Symbol3, a: &PairSymbol, b: &PairSymbol) {
    let [d1, d2] = a.dims();
    let d3 = b.dims()[1];
    for p1 in 0..d1 {
        for q1 in 0..d1 {
            for p2 in 0..d2 {
                for q2 in 0..d2 {
                    let av = a.get([p1, q1, p2, q2]);
                    if av == ZERO {
                        continue;
                    }
                    for r2 in 0..d2 {
                        for r3 in 0..d3 {
                            for s3 in 0..d3 {
                                out[[p1, q1, r2, q2, r3, s3]] += av * b.get([r2, p2, r3, s3]);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// `u_{A,B} = Σᵢ (aᵢ⊗1)(1⊗bᵢ)`; `dims` is used for an empty family.
pub fn synthesize_u(f: &FactorFamily, dims: [usize; 3]) -> Result<Symbol3> {
    if let Some(d) = f.dims() {
        if d != dims {
            return Err(shape_err(format!(
                "family dims {d:?} vs requested {dims:?}"
            )));
        }
    }
    let mut out = Symbol3::zeros(dims[0], dims[1], dims[2]);
    for (a, b) in f.a_list.iter().zip(&f.b_list) {
        accumulate_opmul(&mut out, a, b);
    }
    Ok(out)
}

fn op_norm(m: &CMatrix) -> f64 {
    svd(m)
        .map(|s| s.sigma.first().copied().unwrap_or(0.0))
        .unwrap_or(f64::NAN)
}

fn gram_norm(terms: &[PairSymbol], adjoint_first: bool) -> f64 {
    let Some(first) = terms.first() else {
        return 0.0;
    };
    let [da, db] = first.dims();
    let mut acc = PairSymbol::zeros(first.op(), da, db);
    for t in terms {
        let p = if adjoint_first {
            t.adjoint().product(t)
        } else {
            t.product(&t.adjoint())
        }
        .expect("family terms share dims");
        acc = acc.add(&p).expect("same dims");
    }
    op_norm(&acc.to_matrix()).max(0.0).sqrt()
}

/// `‖Σᵢ aᵢ aᵢ*‖^{1/2}`.
pub fn row_wnorm(f: &FactorFamily) -> f64 {
    gram_norm(&f.a_list, false)
}

/// `‖Σᵢ bᵢ* bᵢ‖^{1/2}`.
pub fn col_wnorm(f: &FactorFamily) -> f64 {
    gram_norm(&f.b_list, true)
}

/// Projects each leg of a pair symbol onto the given algebras.
fn project_pair(p: &PairSymbol, alg_a: &MatrixAlgebra, alg_b: &MatrixAlgebra) -> PairSymbol {
    let [da, db] = p.dims();
    let mut out = p.clone();
    for r in 0..db {
        for s in 0..db {
            let m = CMatrix::from_fn(da, da, |i, j| out.get([i, j, r, s]));
            let pm = alg_a.project(&m);
            for i in 0..da {
                for j in 0..da {
                    out.set([i, j, r, s], pm[(i, j)]);
                }
            }
        }
    }
    for pi in 0..da {
        for q in 0..da {
            let m = CMatrix::from_fn(db, db, |i, j| out.get([pi, q, i, j]));
            let pm = alg_b.project(&m);
            for i in 0..db {
                for j in 0..db {
                    out.set([pi, q, i, j], pm[(i, j)]);
                }
            }
        }
    }
    out
}

fn membership_residual(p: &PairSymbol, alg_a: &MatrixAlgebra, alg_b: &MatrixAlgebra) -> f64 {
    let proj = project_pair(p, alg_a, alg_b);
    p.add(&proj.scale(Complex64::new(-1.0, 0.0)))
        .expect("same dims")
        .norm()
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    /// `‖φ − u_{A,B}‖`, Euclidean over all six indices.
    pub residual: f64,
    pub residual_ok: bool,
    /// Largest relative membership residual of an `aᵢ` in `M₁⊗M₂^op`.
    pub membership_a: f64,
    /// Largest relative membership residual of a `bᵢ` in `M₂^op⊗M₃`.
    pub membership_b: f64,
    pub membership_ok: bool,
    pub row_wnorm: f64,
    pub col_wnorm: f64,
    pub measured_norm: f64,
    pub bound: f64,
    pub bound_ok: bool,
    /// `min (‖A‖²‖x‖² − Σᵢ‖τ¹_{aᵢ}(x)‖²)` over the sampled `x`.
    pub square_sum_row_slack: f64,
    /// `min (‖B‖²‖y‖² − Σᵢ‖τ³_{bᵢ}(y)‖²)` over the sampled `y`.
    pub square_sum_col_slack: f64,
    pub square_sum_ok: bool,
}

impl FactorizationReport {
    pub fn all_pass(&self) -> bool {
        self.residual_ok && self.membership_ok && self.bound_ok && self.square_sum_ok
    }
}

/// Number of random unit inputs used for the square-sum checks.
pub const SQUARE_SUM_TRIALS: usize = 10;

/// `Σᵢ‖τ¹_{aᵢ}(x)‖₂²` and `Σᵢ‖τ³_{bᵢ}(y)‖₂²`.
pub fn square_sums(f: &FactorFamily, x: &CMatrix, y: &CMatrix) -> Result<(f64, f64)> {
    let mut sa = 0.0;
    let mut sb = 0.0;
    for (a, b) in f.a_list.iter().zip(&f.b_list) {
        sa += tau1_apply(a, x)?.frobenius().powi(2);
        sb += tau3_apply(b, y)?.frobenius().powi(2);
    }
    Ok((sa, sb))
}

pub fn verify_factorization(
    phi: &Symbol3,
    f: &FactorFamily,
    t: &AlgebraTriple,
    measured: &NormEstimate,
) -> Result<FactorizationReport> {
    verify_factorization_seeded(phi, f, t, measured, 0)
}

pub fn verify_factorization_seeded(
    phi: &Symbol3,
    f: &FactorFamily,
    t: &AlgebraTriple,
    measured: &NormEstimate,
    seed: u64,
) -> Result<FactorizationReport> {
    let dims = phi.dims();
    if t.dims() != dims {
        return Err(shape_err(format!(
            "symbol dims {dims:?} vs algebra dims {:?}",
            t.dims()
        )));
    }
    let u = synthesize_u(f, dims)?;
    let residual = phi.sub(&u)?.norm();

    let [m1, m2, m3] = t.legs();
    let rel = |p: &PairSymbol, r: f64| r / (1.0 + p.norm());
    let membership_a = f
        .a_list
        .iter()
        .map(|a| rel(a, membership_residual(a, m1, m2)))
        .fold(0.0, f64::max);
    let membership_b = f
        .b_list
        .iter()
        .map(|b| rel(b, membership_residual(b, m2, m3)))
        .fold(0.0, f64::max);

    let rw = row_wnorm(f);
    let cw = col_wnorm(f);
    let bound = rw * cw;

    let mut g = rng::seeded(seed, 0x5155);
    let [d1, d2, d3] = dims;
    let mut row_slack = f64::INFINITY;
    let mut col_slack = f64::INFINITY;
    for _ in 0..SQUARE_SUM_TRIALS {
        let x = rng::gaussian_matrix(&mut g, d2, d1);
        let y = rng::gaussian_matrix(&mut g, d3, d2);
        let x = x.scale_real(1.0 / x.frobenius());
        let y = y.scale_real(1.0 / y.frobenius());
        let (sa, sb) = square_sums(f, &x, &y)?;
        row_slack = row_slack.min(rw * rw - sa);
        col_slack = col_slack.min(cw * cw - sb);
    }

    Ok(FactorizationReport {
        residual,
        residual_ok: residual <= 1e-6 * (1.0 + phi.norm()),
        membership_a,
        membership_b,
        membership_ok: membership_a <= 1e-8 && membership_b <= 1e-8,
        row_wnorm: rw,
        col_wnorm: cw,
        measured_norm: measured.value,
        bound,
        bound_ok: measured.value <= bound * (1.0 + 1e-6),
        square_sum_row_slack: row_slack,
        square_sum_col_slack: col_slack,
        square_sum_ok: row_slack >= -1e-10 * (1.0 + rw * rw)
            && col_slack >= -1e-10 * (1.0 + cw * cw),
    })
}

/// Product of the factor sup norms against the slice bound
/// `max_t2 γ₂(slice t2)`, as a convenience for reports.
pub fn factor_sup_product(a: &VectorField, b: &VectorField) -> f64 {
    a.sup_norm() * b.sup_norm()
}

/// `1 + sup|s|`, the scale for reconstruction tolerances.
pub fn reconstruction_scale(s: &SchurSymbol) -> f64 {
    1.0 + sup_norm(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::multiplier::apply_tau;
    use crate::norms::{gamma2, norm_tau, Target};
    use crate::symbols::{elementary_symbol, embed_schur};

    fn rand_pair(g: &mut rng::Rng, op: OpLeg, da: usize, db: usize) -> PairSymbol {
        let n = (da * db).pow(2);
        PairSymbol::from_vec(op, [da, db], rng::gaussian_vec(g, n)).unwrap()
    }

    #[test]
    fn constant_symbol_factors_to_unit_vectors() {
        let s = SchurSymbol::constant([2, 3, 2], ONE);
        let (a, b) = schur_s1_factorize(&s, 1e-9).unwrap();
        assert!((a.sup_norm() * b.sup_norm() - 1.0).abs() < 1e-6);
        for v in a.vectors.iter().chain(&b.vectors) {
            assert!((vec_norm(v) - 1.0).abs() < 1e-6);
        }
        assert!(reconstruction_error(&s, &a, &b).unwrap() < 1e-6);
    }

    #[test]
    fn identity_slice_gives_orthonormal_pairs() {
        let s = SchurSymbol::from_fn([2, 1, 2], |t1, _, t3| if t1 == t3 { ONE } else { ZERO });
        let (a, b) = schur_s1_factorize(&s, 1e-9).unwrap();
        assert!((a.sup_norm() - 1.0).abs() < 1e-6);
        assert!((b.sup_norm() - 1.0).abs() < 1e-6);
        assert!(pair(a.get(0, 0), b.get(0, 1)).norm() < 1e-6);
        assert!((pair(a.get(1, 0), b.get(0, 1)) - ONE).norm() < 1e-6);
    }

    #[test]
    fn random_symbol_reconstructs() {
        let s = SchurSymbol::random([3, 2, 3], 7);
        let (a, b) = schur_s1_factorize(&s, 1e-8).unwrap();
        assert!(reconstruction_error(&s, &a, &b).unwrap() <= 1e-6 * reconstruction_scale(&s));
        let gmax = (0..2)
            .map(|t2| gamma2(&slice(&s, t2).unwrap(), 1e-8).unwrap().value)
            .fold(0.0, f64::max);
        assert!(factor_sup_product(&a, &b) <= (1.0 + 1e-4) * gmax);
    }

    #[test]
    fn weak_factorization_of_unit_fields() {
        let a = VectorField {
            dims: [2, 2],
            k: 1,
            vectors: vec![vec![ONE]; 4],
        };
        let b = a.clone();
        let f = to_weak_factorization(&a, &b).unwrap();
        assert_eq!(f.count, 1);
        assert_eq!(f.a_list[0], PairSymbol::identity(OpLeg::Second, 2, 2));
        assert_eq!(f.b_list[0], PairSymbol::identity(OpLeg::First, 2, 2));
    }

    #[test]
    fn zero_fields_give_zero_family() {
        let a = VectorField::zeros([2, 3], 2);
        let b = VectorField::zeros([3, 2], 2);
        let f = to_weak_factorization(&a, &b).unwrap();
        assert!(f.a_list.iter().chain(&f.b_list).all(|p| p.norm() == 0.0));
        assert_eq!(synthesize_u(&f, [2, 3, 2]).unwrap().norm(), 0.0);
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = VectorField::zeros([2, 3], 2);
        let b = VectorField::zeros([2, 2], 2);
        assert_eq!(to_weak_factorization(&a, &b).unwrap_err().code(), "shape");
    }

    #[test]
    fn round_trip_to_embedded_symbol() {
        let s = SchurSymbol::random([3, 2, 2], 21);
        let (a, b) = schur_s1_factorize(&s, 1e-8).unwrap();
        let f = to_weak_factorization(&a, &b).unwrap();
        let u = synthesize_u(&f, s.dims()).unwrap();
        assert!(u.max_diff(&embed_schur(&s)).unwrap() <= 1e-6);
    }

    #[test]
    fn opmul_of_elementary_pairs() {
        let mut g = rng::seeded(1, 0);
        let r = rng::gaussian_matrix(&mut g, 2, 2);
        let s = rng::gaussian_matrix(&mut g, 3, 3);
        let s2 = rng::gaussian_matrix(&mut g, 3, 3);
        let t = rng::gaussian_matrix(&mut g, 2, 2);
        let a = PairSymbol::elementary(OpLeg::Second, &r, &s).unwrap();
        let b = PairSymbol::elementary(OpLeg::First, &s2, &t).unwrap();
        let got = opmul_symbol(&a, &b).unwrap();
        let want = elementary_symbol(&r, &(&s2 * &s), &t).unwrap();
        assert!(got.max_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn opmul_with_identity_keeps_b() {
        let mut g = rng::seeded(2, 0);
        let b = rand_pair(&mut g, OpLeg::First, 2, 2);
        let a = PairSymbol::identity(OpLeg::Second, 2, 2);
        let u = opmul_symbol(&a, &b).unwrap();
        let want = Symbol3::from_fn([2, 2, 2], |[a1, b1, a2, b2, a3, b3]| {
            if a1 == b1 {
                b.get([a2, b2, a3, b3])
            } else {
                ZERO
            }
        });
        assert!(u.max_diff(&want).unwrap() < 1e-14);
    }

    #[test]
    fn opmul_is_bilinear() {
        let mut g = rng::seeded(3, 0);
        let a1 = rand_pair(&mut g, OpLeg::Second, 2, 3);
        let a2 = rand_pair(&mut g, OpLeg::Second, 2, 3);
        let b = rand_pair(&mut g, OpLeg::First, 3, 2);
        let c = Complex64::new(0.3, -1.2);
        let lhs = opmul_symbol(&a1.add(&a2.scale(c)).unwrap(), &b).unwrap();
        let rhs = opmul_symbol(&a1, &b)
            .unwrap()
            .add(&opmul_symbol(&a2, &b).unwrap().scale(c))
            .unwrap();
        assert!(lhs.max_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn magic_identity() {
        let mut g = rng::seeded(4, 0);
        for dims in [[2, 2, 2], [2, 3, 2]] {
            for _ in 0..20 {
                let a = rand_pair(&mut g, OpLeg::Second, dims[0], dims[1]);
                let b = rand_pair(&mut g, OpLeg::First, dims[1], dims[2]);
                let x = rng::gaussian_matrix(&mut g, dims[1], dims[0]);
                let y = rng::gaussian_matrix(&mut g, dims[2], dims[1]);
                let lhs = apply_tau(&opmul_symbol(&a, &b).unwrap(), &y, &x).unwrap();
                let rhs = &tau3_apply(&b, &y).unwrap() * &tau1_apply(&a, &x).unwrap();
                assert!(lhs.max_diff(&rhs) < 1e-12 * (1.0 + rhs.max_abs()));
            }
        }
    }

    #[test]
    fn empty_family_synthesizes_zero() {
        let f = FactorFamily::new(vec![], vec![]).unwrap();
        assert_eq!(
            synthesize_u(&f, [2, 1, 3]).unwrap(),
            Symbol3::zeros(2, 1, 3)
        );
        assert_eq!(row_wnorm(&f), 0.0);
    }

    #[test]
    fn wnorms_basic_cases() {
        let one = FactorFamily::new(
            vec![PairSymbol::identity(OpLeg::Second, 2, 3)],
            vec![PairSymbol::identity(OpLeg::First, 3, 2)],
        )
        .unwrap();
        assert!((row_wnorm(&one) - 1.0).abs() < 1e-12);
        assert!((col_wnorm(&one) - 1.0).abs() < 1e-12);

        let s = SchurSymbol::random([2, 3, 2], 5);
        let (a, b) = schur_s1_factorize(&s, 1e-8).unwrap();
        let f = to_weak_factorization(&a, &b).unwrap();
        assert!((row_wnorm(&f) - a.sup_norm()).abs() < 1e-10);
        assert!((col_wnorm(&f) - b.sup_norm()).abs() < 1e-10);

        let c = Complex64::new(-2.0, 1.0);
        let scaled = FactorFamily::new(
            f.a_list.iter().map(|p| p.scale(c)).collect(),
            f.b_list.clone(),
        )
        .unwrap();
        assert!((row_wnorm(&scaled) - c.norm() * row_wnorm(&f)).abs() < 1e-10);
    }

    #[test]
    fn wnorms_permutation_invariant() {
        let mut g = rng::seeded(6, 0);
        let a: Vec<_> = (0..3)
            .map(|_| rand_pair(&mut g, OpLeg::Second, 2, 2))
            .collect();
        let b: Vec<_> = (0..3)
            .map(|_| rand_pair(&mut g, OpLeg::First, 2, 2))
            .collect();
        let f = FactorFamily::new(a.clone(), b.clone()).unwrap();
        let p = FactorFamily::new(
            vec![a[2].clone(), a[0].clone(), a[1].clone()],
            vec![b[1].clone(), b[2].clone(), b[0].clone()],
        )
        .unwrap();
        assert!((row_wnorm(&f) - row_wnorm(&p)).abs() < 1e-12);
        assert!((col_wnorm(&f) - col_wnorm(&p)).abs() < 1e-12);
    }

    #[test]
    fn schur_pipeline_verifies() {
        let s = SchurSymbol::random([2, 2, 3], 9);
        let phi = embed_schur(&s);
        let (a, b) = schur_s1_factorize(&s, 1e-8).unwrap();
        let f = to_weak_factorization(&a, &b).unwrap();
        let t = AlgebraTriple::from_presets(["diagonal"; 3], s.dims()).unwrap();
        let est = norm_tau(&phi, Target::S1, 4, 0).unwrap();
        let rep = verify_factorization(&phi, &f, &t, &est).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn zeroed_term_shows_residual() {
        let s = SchurSymbol::random([2, 2, 2], 10);
        let phi = embed_schur(&s);
        let (a, b) = schur_s1_factorize(&s, 1e-8).unwrap();
        let mut f = to_weak_factorization(&a, &b).unwrap();
        f.b_list[0] = PairSymbol::zeros(OpLeg::First, 2, 2);
        let t = AlgebraTriple::from_presets(["full"; 3], s.dims()).unwrap();
        let rep = verify_factorization(&phi, &f, &t, &NormEstimate::exact(0.0)).unwrap();
        assert!(rep.residual > 1e-3);
        assert!(!rep.residual_ok);
    }

    #[test]
    fn elementary_pair_bound_check() {
        let mut g = rng::seeded(12, 0);
        let r = rng::gaussian_matrix(&mut g, 2, 2);
        let s = rng::gaussian_matrix(&mut g, 2, 2);
        let s2 = rng::gaussian_matrix(&mut g, 2, 2);
        let t = rng::gaussian_matrix(&mut g, 2, 2);
        let f = FactorFamily::new(
            vec![PairSymbol::elementary(OpLeg::Second, &r, &s).unwrap()],
            vec![PairSymbol::elementary(OpLeg::First, &s2, &t).unwrap()],
        )
        .unwrap();
        let phi = synthesize_u(&f, [2, 2, 2]).unwrap();
        let est = norm_tau(&phi, Target::S1, 4, 3).unwrap();
        let on = |m: &CMatrix| svd(m).unwrap().sigma[0];
        // ‖TyS'SxR‖₁ ≤ ‖T‖‖S'S‖‖R‖ for unit Hilbert–Schmidt x, y
        assert!(est.value <= on(&t) * on(&(&s2 * &s)) * on(&r) * (1.0 + 1e-9));
        let tri = AlgebraTriple::from_presets(["full"; 3], [2, 2, 2]).unwrap();
        let rep = verify_factorization(&phi, &f, &tri, &est).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn membership_detects_wrong_algebra() {
        let mut g = rng::seeded(13, 0);
        let f = FactorFamily::new(
            vec![rand_pair(&mut g, OpLeg::Second, 2, 2)],
            vec![rand_pair(&mut g, OpLeg::First, 2, 2)],
        )
        .unwrap();
        let phi = synthesize_u(&f, [2, 2, 2]).unwrap();
        let t = AlgebraTriple::from_presets(["diagonal"; 3], [2, 2, 2]).unwrap();
        let rep = verify_factorization(&phi, &f, &t, &NormEstimate::exact(0.0)).unwrap();
        assert!(!rep.membership_ok);
        assert!(rep.residual_ok);
    }
}
