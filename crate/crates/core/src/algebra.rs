//! Finite-dimensional von Neumann algebras: unital `*`-subalgebras of `M_d`.
//!
//! Every algebra carries a basis that is orthonormal for the normalized trace
//! inner product `⟨A,B⟩ = tr(A*B)/d`, so the identity is a unit vector and
//! the conditional expectation is a plain orthogonal projection.

use num_complex::Complex64;

use crate::error::{shape_err, Error, Result};
use crate::linalg::{null_space_abs, CMatrix, ONE};
use crate::symbols::Symbol3;

const ADMIT_TOL: f64 = 1e-10;
const NULL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct MatrixAlgebra {
    dim: usize,
    generators: Vec<CMatrix>,
    basis: Vec<CMatrix>,
}

fn ninner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.inner(b) / a.rows() as f64
}

fn nnorm(a: &CMatrix) -> f64 {
    a.frobenius() / (a.rows() as f64).sqrt()
}

impl MatrixAlgebra {
    /// Smallest unital `*`-algebra containing `generators`.
    pub fn generate(dim: usize, generators: Vec<CMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(shape_err("algebra dimension must be positive"));
        }
        if let Some(g) = generators.iter().find(|g| g.shape() != (dim, dim)) {
            return Err(shape_err(format!(
                "generator of shape {:?} in a {dim}x{dim} algebra",
                g.shape()
            )));
        }
        let mut basis: Vec<CMatrix> = Vec::new();
        let cap = dim * dim;
        admit(&mut basis, CMatrix::identity(dim));
        for g in &generators {
            admit(&mut basis, g.clone());
            admit(&mut basis, g.adjoint());
        }
        loop {
            if basis.len() >= cap {
                break;
            }
            let before = basis.len();
            let snapshot = basis.clone();
            'outer: for a in &snapshot {
                for b in &snapshot {
                    admit(&mut basis, a * b);
                    if basis.len() >= cap {
                        break 'outer;
                    }
                }
            }
            if basis.len() == before {
                break;
            }
        }
        Ok(Self {
            dim,
            generators,
            basis,
        })
    }

    pub fn full(dim: usize) -> Self {
        let gens = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| CMatrix::unit(dim, dim, i, j)))
            .collect();
        Self::generate(dim, gens).expect("units are square")
    }

    pub fn diagonal(dim: usize) -> Self {
        let gens = (0..dim).map(|i| CMatrix::unit(dim, dim, i, i)).collect();
        Self::generate(dim, gens).expect("units are square")
    }

    pub fn scalar(dim: usize) -> Self {
        Self::generate(dim, Vec::new()).expect("dimension checked by caller")
    }

    /// Block-diagonal algebra `M_{k1} ⊕ M_{k2} ⊕ …`.
    pub fn block(sizes: &[usize]) -> Self {
        let dim: usize = sizes.iter().sum();
        let mut gens = Vec::new();
        let mut off = 0;
        for &k in sizes {
            for i in 0..k {
                for j in 0..k {
                    gens.push(CMatrix::unit(dim, dim, off + i, off + j));
                }
            }
            off += k;
        }
        Self::generate(dim, gens).expect("units are square")
    }

    /// Parses `full`, `diagonal`, `scalar` or `block:k1+k2+…`.
    pub fn from_preset(name: &str, dim: usize) -> Result<Self> {
        let name = name.trim();
        match name {
            "full" => Ok(Self::full(dim)),
            "diagonal" | "diag" => Ok(Self::diagonal(dim)),
            "scalar" => Ok(Self::scalar(dim)),
            _ => {
                let spec = name
                    .strip_prefix("block:")
                    .ok_or_else(|| Error::Parse(format!("unknown algebra preset '{name}'")))?;
                let sizes = spec
                    .split('+')
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Parse(format!("bad block sizes '{spec}': {e}")))?;
                if sizes.contains(&0) {
                    return Err(Error::Parse(format!("zero block in '{spec}'")));
                }
                let total: usize = sizes.iter().sum();
                if total != dim {
                    return Err(shape_err(format!(
                        "block sizes sum to {total} but the leg has dimension {dim}"
                    )));
                }
                Ok(Self::block(&sizes))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Linear dimension of the algebra.
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// Worst deviations of the stored basis from the structural invariants:
    /// `(orthonormality, identity residual, product-closure residual)`.
    pub fn invariant_defects(&self) -> (f64, f64, f64) {
        let mut ortho = 0.0f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let want = if i == j {
                    ONE
                } else {
                    Complex64::new(0.0, 0.0)
                };
                ortho = ortho.max((ninner(a, b) - want).norm());
            }
        }
        let id = CMatrix::identity(self.dim);
        let id_res = nnorm(&(&id - &self.project(&id)));
        let mut closure = 0.0f64;
        for a in &self.basis {
            let adj = a.adjoint();
            closure = closure.max(nnorm(&(&adj - &self.project(&adj))));
            for b in &self.basis {
                let p = a * b;
                closure = closure.max(nnorm(&(&p - &self.project(&p))));
            }
        }
        (ortho, id_res, closure)
    }

    /// Orthogonal projection onto the algebra (trace inner product).
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            out.axpy(ninner(b, x), b);
        }
        out
    }

    /// Whether the span of `other` lies in this algebra, as a residual.
    pub fn containment_residual(&self, other: &MatrixAlgebra) -> f64 {
        other
            .basis
            .iter()
            .map(|b| nnorm(&(b - &self.project(b))))
            .fold(0.0, f64::max)
    }
}

/// Gram–Schmidt step (with one reorthogonalization pass).
fn admit(basis: &mut Vec<CMatrix>, x: CMatrix) {
    let scale = nnorm(&x);
    let mut r = x;
    for _ in 0..2 {
        for b in basis.iter() {
            let c = ninner(b, &r);
            r.axpy(-c, b);
        }
    }
    let n = nnorm(&r);
    if n > ADMIT_TOL * (1.0 + scale) {
        basis.push(r.scale_real(1.0 / n));
    }
}

/// `{X : XG = GX}` for every generator `G` and its adjoint.
pub fn commutant(a: &MatrixAlgebra) -> Result<MatrixAlgebra> {
    let d = a.dim();
    let n = d * d;
    let mut gens: Vec<CMatrix> = Vec::new();
    for g in a.generators() {
        let n = g.frobenius();
        if n > 0.0 {
            gens.push(g.scale_real(1.0 / n));
            gens.push(g.adjoint().scale_real(1.0 / n));
        }
    }
    // Row block for generator G: vec(XG − GX) as a linear function of vec(X),
    // with row-major vectorization index i*d + j.
    let mut k = CMatrix::zeros(gens.len() * n, n);
    for (gi, g) in gens.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                let row = gi * n + i * d + j;
                for m in 0..d {
                    // X[i,m] G[m,j]
                    k[(row, i * d + m)] += g[(m, j)];
                    // −G[i,m] X[m,j]
                    k[(row, m * d + j)] -= g[(i, m)];
                }
            }
        }
    }
    // generators are normalized, so an absolute cutoff keeps scalar
    // generators (whose commutators are pure roundoff) from shrinking the result
    let null = null_space_abs(&k, NULL_TOL * k.frobenius().max(1.0))?;
    let mats = null
        .into_iter()
        .map(|v| CMatrix::from_vec(d, d, v).expect("length d*d"))
        .collect();
    MatrixAlgebra::generate(d, mats)
}

/// Trace-orthogonal projection onto the algebra.
pub fn conditional_expectation(x: &CMatrix, a: &MatrixAlgebra) -> Result<CMatrix> {
    if x.shape() != (a.dim(), a.dim()) {
        return Err(shape_err(format!(
            "{:?} matrix against a {}-dimensional algebra",
            x.shape(),
            a.dim()
        )));
    }
    Ok(a.project(x))
}

#[derive(Debug, Clone)]
pub struct AlgebraTriple {
    legs: [MatrixAlgebra; 3],
}

impl AlgebraTriple {
    pub fn new(m1: MatrixAlgebra, m2: MatrixAlgebra, m3: MatrixAlgebra) -> Self {
        Self { legs: [m1, m2, m3] }
    }

    /// Presets such as `["diagonal", "full", "block:1+2"]`.
    pub fn from_presets(names: [&str; 3], dims: [usize; 3]) -> Result<Self> {
        Ok(Self::new(
            MatrixAlgebra::from_preset(names[0], dims[0])?,
            MatrixAlgebra::from_preset(names[1], dims[1])?,
            MatrixAlgebra::from_preset(names[2], dims[2])?,
        ))
    }

    pub fn legs(&self) -> [&MatrixAlgebra; 3] {
        [&self.legs[0], &self.legs[1], &self.legs[2]]
    }

    pub fn leg(&self, i: usize) -> &MatrixAlgebra {
        &self.legs[i]
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.legs[0].dim(), self.legs[1].dim(), self.legs[2].dim()]
    }

    pub fn commutants(&self) -> Result<AlgebraTriple> {
        Ok(Self::new(
            commutant(&self.legs[0])?,
            commutant(&self.legs[1])?,
            commutant(&self.legs[2])?,
        ))
    }
}

/// Applies `f` to every `d_leg × d_leg` slice of `phi` along `leg` (0, 1 or 2).
pub fn map_leg(phi: &Symbol3, leg: usize, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Symbol3 {
    let dims = phi.dims();
    let d = dims[leg];
    let mut out = phi.clone();
    let others: Vec<usize> = (0..3).filter(|&l| l != leg).collect();
    let (da, db) = (dims[others[0]], dims[others[1]]);
    for p in 0..da * da {
        for q in 0..db * db {
            let idx = |i: usize, j: usize| -> [usize; 6] {
                let mut ix = [0usize; 6];
                ix[2 * leg] = i;
                ix[2 * leg + 1] = j;
                ix[2 * others[0]] = p / da;
                ix[2 * others[0] + 1] = p % da;
                ix[2 * others[1]] = q / db;
                ix[2 * others[1] + 1] = q % db;
                ix
            };
            let m = CMatrix::from_fn(d, d, |i, j| phi[idx(i, j)]);
            let r = f(&m);
            for i in 0..d {
                for j in 0..d {
                    out[idx(i, j)] = r[(i, j)];
                }
            }
        }
    }
    out
}

/// Orthogonal projection of `phi` onto `M₁ ⊗ M₂ ⊗ M₃`.
pub fn project_symbol(phi: &Symbol3, t: &AlgebraTriple) -> Result<Symbol3> {
    if phi.dims() != t.dims() {
        return Err(shape_err(format!(
            "symbol dims {:?} vs algebra dims {:?}",
            phi.dims(),
            t.dims()
        )));
    }
    let mut p = phi.clone();
    for leg in 0..3 {
        let a = t.leg(leg);
        p = map_leg(&p, leg, |m| a.project(m));
    }
    Ok(p)
}

/// Membership of `phi` in `M₁ ⊗ M₂^op ⊗ M₃` (the opposite structure does not
/// change the underlying subspace), with the Euclidean projection residual.
pub fn tensor_membership(phi: &Symbol3, t: &AlgebraTriple) -> Result<(bool, f64)> {
    let p = project_symbol(phi, t)?;
    let resid = phi.sub(&p)?.norm();
    Ok((resid <= 1e-8 * (1.0 + phi.norm()), resid))
}
