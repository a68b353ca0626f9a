//! Multiplier actions.
//!
//! Operators are stored target × source: `x ∈ S²(H₁,H₂)` is a `d2 × d1`
//! matrix, `y ∈ S²(H₂,H₃)` is `d3 × d2`, and `τ_φ(y, x)` is `d3 × d1`.
//! For Schur symbols the kernel convention is `x[t2,t1] = f(t1,t2)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{conditional_expectation, AlgebraTriple};
use crate::error::{shape_err, Error, Result};
use crate::linalg::{CMatrix, ZERO};
use crate::symbols::{SchurSymbol, Symbol3};

/// Which leg of a two-leg symbol carries the opposite multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpLeg {
    /// `b ∈ M₂^op ⊗ M₃`.
    First,
    /// `a ∈ M₁ ⊗ M₂^op`.
    Second,
}

/// `Σ c[p,q,r,s] · E_{pq} ⊗ E_{rs}` over legs of sizes `(da, db)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSymbol {
    dims: [usize; 2],
    op: OpLeg,
    data: Vec<Complex64>,
}

impl PairSymbol {
    pub fn zeros(op: OpLeg, da: usize, db: usize) -> Self {
        Self {
            dims: [da, db],
            op,
            data: vec![ZERO; (da * db).pow(2)],
        }
    }

    pub fn from_vec(op: OpLeg, dims: [usize; 2], data: Vec<Complex64>) -> Result<Self> {
        let want = (dims[0] * dims[1]).pow(2);
        if data.len() != want {
            return Err(shape_err(format!(
                "pair symbol with dims {dims:?} needs {want} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, op, data })
    }

    /// `r ⊗ s`.
    pub fn elementary(op: OpLeg, r: &CMatrix, s: &CMatrix) -> Result<Self> {
        if !r.is_square() || !s.is_square() {
            return Err(shape_err("pair symbol legs must be square"));
        }
        let (da, db) = (r.rows(), s.rows());
        let mut out = Self::zeros(op, da, db);
        for p in 0..da {
            for q in 0..da {
                for i in 0..db {
                    for j in 0..db {
                        out.set([p, q, i, j], r[(p, q)] * s[(i, j)]);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn identity(op: OpLeg, da: usize, db: usize) -> Self {
        Self::elementary(op, &CMatrix::identity(da), &CMatrix::identity(db)).expect("square")
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn op(&self) -> OpLeg {
        self.op
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    fn offset(&self, [p, q, r, s]: [usize; 4]) -> usize {
        let [da, db] = self.dims;
        ((p * da + q) * db + r) * db + s
    }

    #[inline]
    pub fn get(&self, idx: [usize; 4]) -> Complex64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: [usize; 4], v: Complex64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn scale(&self, c: Complex64) -> PairSymbol {
        PairSymbol {
            data: self.data.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &PairSymbol) -> Result<PairSymbol> {
        self.check_compatible(other)?;
        Ok(PairSymbol {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_compatible(&self, other: &PairSymbol) -> Result<()> {
        if self.dims != other.dims || self.op != other.op {
            return Err(shape_err(format!(
                "pair symbols {:?}/{:?} vs {:?}/{:?}",
                self.dims, self.op, other.dims, other.op
            )));
        }
        Ok(())
    }

    /// `(R⊗S)* = R*⊗S*`.
    pub fn adjoint(&self) -> PairSymbol {
        let [da, db] = self.dims;
        let mut out = Self::zeros(self.op, da, db);
        for p in 0..da {
            for q in 0..da {
                for r in 0..db {
                    for s in 0..db {
                        out.set([p, q, r, s], self.get([q, p, s, r]).conj());
                    }
                }
            }
        }
        out
    }

    /// Product in the algebra where one leg multiplies in reverse:
    /// `(R⊗S)(R'⊗S') = RR'⊗S'S` for [`OpLeg::Second`],
    /// `(S⊗T)(S'⊗T') = S'S⊗TT'` for [`OpLeg::First`].
    pub fn product(&self, other: &PairSymbol) -> Result<PairSymbol> {
        self.check_compatible(other)?;
        let [da, db] = self.dims;
        let mut out = Self::zeros(self.op, da, db);
        for p in 0..da {
            for q in 0..da {
                for r in 0..db {
                    for s in 0..db {
                        let mut acc = ZERO;
                        match self.op {
                            OpLeg::Second => {
                                for k in 0..da {
                                    for l in 0..db {
                                        acc += self.get([p, k, l, s]) * other.get([k, q, r, l]);
                                    }
                                }
                            }
                            OpLeg::First => {
                                for k in 0..da {
                                    for l in 0..db {
                                        acc += self.get([k, q, r, l]) * other.get([p, k, l, s]);
                                    }
                                }
                            }
                        }
                        out.set([p, q, r, s], acc);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Faithful `*`-representation on `ℂ^{da·db}`: the opposite leg is
    /// realized by transposing that Kronecker factor.
    pub fn to_matrix(&self) -> CMatrix {
        let [da, db] = self.dims;
        let n = da * db;
        let mut m = CMatrix::zeros(n, n);
        for p in 0..da {
            for q in 0..da {
                for r in 0..db {
                    for s in 0..db {
                        let v = self.get([p, q, r, s]);
                        match self.op {
                            OpLeg::Second => m[(p * db + s, q * db + r)] = v,
                            OpLeg::First => m[(q * db + r, p * db + s)] = v,
                        }
                    }
                }
            }
        }
        m
    }
}

fn check_shape(what: &str, m: &CMatrix, want: (usize, usize)) -> Result<()> {
    if m.shape() != want {
        return Err(shape_err(format!(
            "{what} must be {}x{}, got {}x{}",
            want.0,
            want.1,
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// `Λ_s(y, x)[t3,t1] = Σ_{t2} s[t1,t2,t3] · x[t2,t1] · y[t3,t2]`.
pub fn apply_schur(s: &SchurSymbol, y: &CMatrix, x: &CMatrix) -> Result<CMatrix> {
    let [n1, n2, n3] = s.dims();
    check_shape("x", x, (n2, n1))?;
    check_shape("y", y, (n3, n2))?;
    Ok(CMatrix::from_fn(n3, n1, |t3, t1| {
        let mut acc = ZERO;
        for t2 in 0..n2 {
            acc += s.get(t1, t2, t3) * x[(t2, t1)] * y[(t3, t2)];
        }
        acc
    }))
}

/// `τ_φ(y, x)`, the linear extension of `τ_{R⊗S⊗T}(y, x) = T·y·S·x·R`:
/// `out[i,j] = Σ φ[a1,j,a2,b2,i,b3] · y[b3,a2] · x[b2,a1]`.
pub fn apply_tau(phi: &Symbol3, y: &CMatrix, x: &CMatrix) -> Result<CMatrix> {
    let [d1, d2, d3] = phi.dims();
    check_shape("x", x, (d2, d1))?;
    check_shape("y", y, (d3, d2))?;
    let mut out = CMatrix::zeros(d3, d1);
    let data = phi.data();
    let mut k = 0;
    for a1 in 0..d1 {
        for j in 0..d1 {
            for a2 in 0..d2 {
                for b2 in 0..d2 {
                    let xv = x[(b2, a1)];
                    for i in 0..d3 {
                        let mut acc = ZERO;
                        for b3 in 0..d3 {
                            acc += data[k] * y[(b3, a2)];
                            k += 1;
                        }
                        out[(i, j)] += acc * xv;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `τ¹_a(x)`; for `a = R⊗S` this is `S·x·R`.
pub fn tau1_apply(a: &PairSymbol, x: &CMatrix) -> Result<CMatrix> {
    if a.op() != OpLeg::Second {
        return Err(shape_err("tau1 needs a symbol in M1 ⊗ M2^op"));
    }
    let [d1, d2] = a.dims();
    check_shape("x", x, (d2, d1))?;
    Ok(CMatrix::from_fn(d2, d1, |i, j| {
        let mut acc = ZERO;
        for p1 in 0..d1 {
            for q2 in 0..d2 {
                acc += a.get([p1, j, i, q2]) * x[(q2, p1)];
            }
        }
        acc
    }))
}

/// `τ³_b(y)`; for `b = S⊗T` this is `T·y·S`.
pub fn tau3_apply(b: &PairSymbol, y: &CMatrix) -> Result<CMatrix> {
    if b.op() != OpLeg::First {
        return Err(shape_err("tau3 needs a symbol in M2^op ⊗ M3"));
    }
    let [d2, d3] = b.dims();
    check_shape("y", y, (d3, d2))?;
    Ok(CMatrix::from_fn(d3, d2, |i, j| {
        let mut acc = ZERO;
        for p2 in 0..d2 {
            for q3 in 0..d3 {
                acc += b.get([p2, j, i, q3]) * y[(q3, p2)];
            }
        }
        acc
    }))
}

/// A bilinear map `S²(H₂,H₃) × S²(H₁,H₂) → M_{d3×d1}` with the two partial
/// adjoints needed for ascent methods.
///
/// `grad_x(y, g)` is the matrix `G` with `⟨g, u(y,x)⟩ = ⟨G, x⟩` for every `x`
/// (trace inner product), and likewise for `grad_y`.
pub trait BilinearMap: Sync {
    /// `(d1, d2, d3)`.
    fn dims(&self) -> [usize; 3];
    fn apply(&self, y: &CMatrix, x: &CMatrix) -> CMatrix;
    fn grad_x(&self, y: &CMatrix, g: &CMatrix) -> CMatrix;
    fn grad_y(&self, x: &CMatrix, g: &CMatrix) -> CMatrix;
}

impl BilinearMap for SchurSymbol {
    fn dims(&self) -> [usize; 3] {
        SchurSymbol::dims(self)
    }

    fn apply(&self, y: &CMatrix, x: &CMatrix) -> CMatrix {
        apply_schur(self, y, x).expect("shapes fixed by the caller")
    }

    fn grad_x(&self, y: &CMatrix, g: &CMatrix) -> CMatrix {
        let [n1, n2, n3] = SchurSymbol::dims(self);
        CMatrix::from_fn(n2, n1, |t2, t1| {
            let mut acc = ZERO;
            for t3 in 0..n3 {
                acc += g[(t3, t1)] * (self.get(t1, t2, t3) * y[(t3, t2)]).conj();
            }
            acc
        })
    }

    fn grad_y(&self, x: &CMatrix, g: &CMatrix) -> CMatrix {
        let [n1, n2, n3] = SchurSymbol::dims(self);
        CMatrix::from_fn(n3, n2, |t3, t2| {
            let mut acc = ZERO;
            for t1 in 0..n1 {
                acc += g[(t3, t1)] * (self.get(t1, t2, t3) * x[(t2, t1)]).conj();
            }
            acc
        })
    }
}

impl BilinearMap for Symbol3 {
    fn dims(&self) -> [usize; 3] {
        Symbol3::dims(self)
    }

    fn apply(&self, y: &CMatrix, x: &CMatrix) -> CMatrix {
        apply_tau(self, y, x).expect("shapes fixed by the caller")
    }

    fn grad_x(&self, y: &CMatrix, g: &CMatrix) -> CMatrix {
        let [d1, d2, d3] = Symbol3::dims(self);
        let mut out = CMatrix::zeros(d2, d1);
        for a1 in 0..d1 {
            for j in 0..d1 {
                for a2 in 0..d2 {
                    for b2 in 0..d2 {
                        let mut acc = ZERO;
                        for i in 0..d3 {
                            for b3 in 0..d3 {
                                acc +=
                                    g[(i, j)] * (self[[a1, j, a2, b2, i, b3]] * y[(b3, a2)]).conj();
                            }
                        }
                        out[(b2, a1)] += acc;
                    }
                }
            }
        }
        out
    }

    fn grad_y(&self, x: &CMatrix, g: &CMatrix) -> CMatrix {
        let [d1, d2, d3] = Symbol3::dims(self);
        let mut out = CMatrix::zeros(d3, d2);
        for a1 in 0..d1 {
            for j in 0..d1 {
                for a2 in 0..d2 {
                    for b2 in 0..d2 {
                        let xv = x[(b2, a1)];
                        for i in 0..d3 {
                            let gv = g[(i, j)];
                            for b3 in 0..d3 {
                                out[(b3, a2)] += gv * (self[[a1, j, a2, b2, i, b3]] * xv).conj();
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Values of one of the 4-linear maps `U₁, U₂, U₃` on basis vectors.
///
/// Keys follow the argument order of the map: for `U₁` the key is
/// `(ξ₂, η₂, ξ₃, η₃)`, for `U₂` it is `(ξ₁, η₁, ξ₃, η₃)` and for `U₃`
/// `(ξ₁, η₁, ξ₂, η₂)`, each entry being a basis index. The value is a
/// `d_i × d_i` matrix with `(row, col) = (ξ_i, η_i)`.
#[derive(Debug, Clone)]
pub struct UTable {
    pub which: usize,
    pub entries: Vec<([usize; 4], CMatrix)>,
}

/// Evaluates `⟨[τ_φ(ξ̄₂⊗η₃, ξ̄₁⊗η₂)](η₁), ξ₃⟩` on all basis vectors.
/// Indexed `[ξ₁, η₁, ξ₂, η₂, ξ₃, η₃]`.
fn rank_one_table(phi: &Symbol3) -> Symbol3 {
    let [d1, d2, d3] = phi.dims();
    let mut ev = Symbol3::zeros(d1, d2, d3);
    for xi1 in 0..d1 {
        for xi2 in 0..d2 {
            for eta2 in 0..d2 {
                for eta3 in 0..d3 {
                    // ξ̄₂⊗η₃ : e_{ξ₂} ↦ e_{η₃}, ξ̄₁⊗η₂ : e_{ξ₁} ↦ e_{η₂}
                    let y = CMatrix::unit(d3, d2, eta3, xi2);
                    let x = CMatrix::unit(d2, d1, eta2, xi1);
                    let out = apply_tau(phi, &y, &x).expect("unit shapes");
                    for eta1 in 0..d1 {
                        for xi3 in 0..d3 {
                            ev[[xi1, eta1, xi2, eta2, xi3, eta3]] = out[(xi3, eta1)];
                        }
                    }
                }
            }
        }
    }
    ev
}

pub fn extract_u(phi: &Symbol3, which: usize) -> Result<UTable> {
    if !(1..=3).contains(&which) {
        return Err(Error::InvalidArgument(format!(
            "U index must be 1, 2 or 3, got {which}"
        )));
    }
    let ev = rank_one_table(phi);
    let dims = phi.dims();
    let leg = which - 1;
    let others: Vec<usize> = (0..3).filter(|&l| l != leg).collect();
    let (da, db) = (dims[others[0]], dims[others[1]]);
    let d = dims[leg];
    let mut entries = Vec::with_capacity((da * db).pow(2));
    for p in 0..da {
        for q in 0..da {
            for r in 0..db {
                for s in 0..db {
                    let m = CMatrix::from_fn(d, d, |i, j| {
                        let mut ix = [0usize; 6];
                        ix[2 * leg] = i;
                        ix[2 * leg + 1] = j;
                        ix[2 * others[0]] = p;
                        ix[2 * others[0] + 1] = q;
                        ix[2 * others[1]] = r;
                        ix[2 * others[1] + 1] = s;
                        ev[ix]
                    });
                    entries.push(([p, q, r, s], m));
                }
            }
        }
    }
    Ok(UTable { which, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularityReport {
    pub modular: bool,
    /// Larger of the two residuals below.
    pub max_violation: f64,
    /// Distance of the `U_i` values from `M_i`, worst leg.
    pub projection_residual: f64,
    /// Worst failure of the module identities over commutant basis elements.
    pub direct_violation: f64,
}

/// Checks whether `τ_φ` is an `(M₃', M₂', M₁')`-module map, both through the
/// values of `U₁, U₂, U₃` and directly from the module identities
/// `u(Ty,x) = T·u(y,x)`, `u(y,xR) = u(y,x)·R`, `u(yS,x) = u(y,Sx)`.
pub fn is_modular(phi: &Symbol3, t: &AlgebraTriple) -> Result<ModularityReport> {
    if phi.dims() != t.dims() {
        return Err(shape_err(format!(
            "symbol dims {:?} vs algebra dims {:?}",
            phi.dims(),
            t.dims()
        )));
    }
    let [d1, d2, d3] = phi.dims();

    let mut projection = 0.0f64;
    for which in 1..=3 {
        let table = extract_u(phi, which)?;
        let alg = t.leg(which - 1);
        let mut sq = 0.0;
        for (_, m) in &table.entries {
            let p = conditional_expectation(m, alg)?;
            sq += (m - &p).frobenius().powi(2);
        }
        projection = projection.max(sq.sqrt());
    }

    let comm = t.commutants()?;
    let mut units = Vec::with_capacity(d1 * d2 * d2 * d3);
    for a in 0..d1 {
        for b in 0..d2 {
            for c in 0..d2 {
                for e in 0..d3 {
                    let x = CMatrix::unit(d2, d1, b, a);
                    let y = CMatrix::unit(d3, d2, e, c);
                    let u = apply_tau(phi, &y, &x)?;
                    units.push((x, y, u));
                }
            }
        }
    }
    let mut direct = 0.0f64;
    for r in comm.leg(0).basis() {
        let mut sq = 0.0;
        for (x, y, u) in &units {
            let lhs = apply_tau(phi, y, &(x * r))?;
            sq += (&lhs - &(u * r)).frobenius().powi(2);
        }
        direct = direct.max(sq.sqrt());
    }
    for s in comm.leg(1).basis() {
        let mut sq = 0.0;
        for (x, y, _) in &units {
            let lhs = apply_tau(phi, &(y * s), x)?;
            let rhs = apply_tau(phi, y, &(s * x))?;
            sq += (&lhs - &rhs).frobenius().powi(2);
        }
        direct = direct.max(sq.sqrt());
    }
    for tt in comm.leg(2).basis() {
        let mut sq = 0.0;
        for (x, y, u) in &units {
            let lhs = apply_tau(phi, &(tt * y), x)?;
            sq += (&lhs - &(tt * u)).frobenius().powi(2);
        }
        direct = direct.max(sq.sqrt());
    }

    let scale = 1.0 + phi.norm();
    let tol = 1e-8 * scale;
    let lo = projection.min(direct);
    let hi = projection.max(direct);
    if lo <= tol && hi > 1e-7 * scale {
        return Err(Error::ModularityMethodMismatch { projection, direct });
    }
    Ok(ModularityReport {
        modular: hi <= tol,
        max_violation: hi,
        projection_residual: projection,
        direct_violation: direct,
    })
}
