//! Norms of bilinear multipliers into `S²`, `B` and `S¹`, the `γ₂`
//! factorization norm, and level-n amplifications.

mod ascent;
mod gamma2;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::symbols::{slice, SchurSymbol, Symbol3};

pub use ascent::{ascend, evaluate, AscentOptions};
pub use gamma2::{balance, gamma2, Gamma2Result};

/// Norm on the range of the bilinear map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Hilbert–Schmidt.
    S2,
    /// Operator norm.
    B,
    /// Trace norm.
    S1,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s2" => Ok(Target::S2),
            "b" | "op" | "sinf" => Ok(Target::B),
            "s1" => Ok(Target::S1),
            other => Err(Error::InvalidArgument(format!("unknown target '{other}'"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::S2 => "s2",
            Target::B => "b",
            Target::S1 => "s1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    UpperBound,
    LowerBound,
    Exact,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::UpperBound => "upper_bound",
            NormKind::LowerBound => "lower_bound",
            NormKind::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: NormKind,
    pub witness_x: Vec<CMatrix>,
    pub witness_y: Vec<CMatrix>,
    pub restarts_used: usize,
    pub iterations: usize,
}

impl NormEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            kind: NormKind::Exact,
            witness_x: Vec::new(),
            witness_y: Vec::new(),
            restarts_used: 0,
            iterations: 0,
        }
    }
}

fn check_restarts(restarts: usize) -> Result<()> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    Ok(())
}

/// Lower bound for `sup ‖Λ_s(y, x)‖_target` over unit Hilbert–Schmidt `x, y`.
pub fn norm_bilinear(
    s: &SchurSymbol,
    target: Target,
    restarts: usize,
    seed: u64,
) -> Result<NormEstimate> {
    check_restarts(restarts)?;
    Ok(ascend(s, 1, target, &AscentOptions::new(restarts, seed)))
}

/// Same as [`norm_bilinear`] for a general symbol.
pub fn norm_tau(phi: &Symbol3, target: Target, restarts: usize, seed: u64) -> Result<NormEstimate> {
    check_restarts(restarts)?;
    Ok(ascend(phi, 1, target, &AscentOptions::new(restarts, seed)))
}

/// Lower bound for the level-`n` amplification
/// `sup ‖[τ_φ(y_i, x_j)]_{ij}‖₁` over `Σ‖x_j‖₂² ≤ 1`, `Σ‖y_i‖₂² ≤ 1`.
pub fn amplified_norm(
    phi: &Symbol3,
    n: usize,
    target: Target,
    restarts: usize,
    seed: u64,
) -> Result<NormEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "amplification level must be at least 1".into(),
        ));
    }
    check_restarts(restarts)?;
    Ok(ascend(phi, n, target, &AscentOptions::new(restarts, seed)))
}

/// Same as [`amplified_norm`] evaluated through the Schur action, which is
/// much cheaper than the embedded symbol.
pub fn amplified_norm_schur(
    s: &SchurSymbol,
    n: usize,
    target: Target,
    restarts: usize,
    seed: u64,
) -> Result<NormEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "amplification level must be at least 1".into(),
        ));
    }
    check_restarts(restarts)?;
    Ok(ascend(s, n, target, &AscentOptions::new(restarts, seed)))
}

#[derive(Debug, Clone)]
pub struct S1Bounds {
    /// `max_t2 γ₂(slice t2)`.
    pub upper: f64,
    pub lower: NormEstimate,
    pub slice_values: Vec<f64>,
}

/// Upper and lower bounds for the norm of `Λ_s` into `S¹`.
pub fn s1_norm_schur(s: &SchurSymbol, tol: f64) -> Result<S1Bounds> {
    s1_norm_schur_with(s, tol, &AscentOptions::default())
}

pub fn s1_norm_schur_with(s: &SchurSymbol, tol: f64, opts: &AscentOptions) -> Result<S1Bounds> {
    let n2 = s.dims()[1];
    let slice_values = (0..n2)
        .map(|t2| gamma2(&slice(s, t2)?, tol).map(|g| g.value))
        .collect::<Result<Vec<f64>>>()?;
    let upper = slice_values.iter().copied().fold(0.0, f64::max);
    let lower = ascend(s, 1, Target::S1, opts);
    Ok(S1Bounds {
        upper,
        lower,
        slice_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pair, psd_project, vec_norm, ONE};
    use crate::rng;
    use crate::symbols::{embed_schur, sup_norm};
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn target_parsing() {
        assert_eq!("S2".parse::<Target>().unwrap(), Target::S2);
        assert_eq!("b".parse::<Target>().unwrap(), Target::B);
        assert_eq!("s1".parse::<Target>().unwrap(), Target::S1);
        assert!("s3".parse::<Target>().is_err());
    }

    #[test]
    fn scalar_symbol_all_targets() {
        let s = SchurSymbol::constant([1, 1, 1], Complex64::new(0.6, -0.8) * 2.0);
        for t in [Target::S2, Target::B, Target::S1] {
            let e = norm_bilinear(&s, t, 3, 1).unwrap();
            assert!((e.value - 2.0).abs() < 1e-9, "{t}: {}", e.value);
        }
    }

    #[test]
    fn s2_target_reaches_sup_norm() {
        for seed in 0..5 {
            let s = SchurSymbol::random([3, 2, 4], seed);
            let e = norm_bilinear(&s, Target::S2, 20, seed).unwrap();
            let sup = sup_norm(&s);
            assert!(e.value <= sup * (1.0 + 1e-9));
            assert!(e.value >= sup - 1e-3, "{} vs {}", e.value, sup);
        }
    }

    #[test]
    fn b_target_on_constant_symbol() {
        // Λ(y, x) = y·x and sup ‖yx‖ over unit Hilbert–Schmidt x, y is 1
        let s = SchurSymbol::constant([2, 2, 2], ONE);
        let e = norm_bilinear(&s, Target::B, 10, 3).unwrap();
        assert!((e.value - 1.0).abs() < 1e-6, "{}", e.value);
        // sampling oracle never beats it
        let mut g = rng::seeded(99, 0);
        for _ in 0..500 {
            let x = rng::gaussian_matrix(&mut g, 2, 2);
            let y = rng::gaussian_matrix(&mut g, 2, 2);
            let x = x.scale_real(1.0 / x.frobenius());
            let y = y.scale_real(1.0 / y.frobenius());
            let v = crate::linalg::svd(&(&y * &x)).unwrap().sigma[0];
            assert!(v <= e.value + 1e-9);
        }
    }

    #[test]
    fn witness_reproduces_value() {
        let s = SchurSymbol::random([3, 3, 2], 11);
        for t in [Target::S2, Target::B, Target::S1] {
            let e = norm_bilinear(&s, t, 4, 5).unwrap();
            let v = evaluate(&s, t, &e.witness_x, &e.witness_y);
            assert!((v - e.value).abs() <= 1e-9 * (1.0 + v));
            assert_eq!(e.kind, NormKind::LowerBound);
        }
    }

    #[test]
    fn amplified_level_one_matches_schur_path() {
        let s = SchurSymbol::random([2, 2, 3], 4);
        let phi = embed_schur(&s);
        let a = amplified_norm(&phi, 1, Target::S1, 5, 8).unwrap();
        let b = norm_bilinear(&s, Target::S1, 5, 8).unwrap();
        assert!((a.value - b.value).abs() <= 1e-9 * (1.0 + b.value));
    }

    #[test]
    fn amplified_zero_symbol() {
        let phi = Symbol3::zeros(2, 2, 2);
        assert_eq!(
            amplified_norm(&phi, 2, Target::S1, 2, 0).unwrap().value,
            0.0
        );
        assert!(amplified_norm(&phi, 0, Target::S1, 2, 0).is_err());
    }

    #[test]
    fn more_restarts_never_worse() {
        let phi = embed_schur(&SchurSymbol::random([2, 2, 2], 6));
        let a = amplified_norm(&phi, 2, Target::S1, 2, 1).unwrap();
        let b = amplified_norm(&phi, 2, Target::S1, 6, 1).unwrap();
        assert!(b.value >= a.value);
    }

    #[test]
    fn gamma2_trivial_values() {
        let ones = CMatrix::from_fn(4, 4, |_, _| ONE);
        let g = gamma2(&ones, 1e-8).unwrap();
        assert!((g.value - 1.0).abs() < 1e-6, "{}", g.value);
        let id = CMatrix::identity(2);
        let g = gamma2(&id, 1e-8).unwrap();
        assert!((g.value - 1.0).abs() < 1e-6, "{}", g.value);
    }

    fn check_certificate(m: &CMatrix, g: &Gamma2Result) {
        let block = g.block(m);
        let p = psd_project(&block).unwrap();
        assert!(
            block.max_diff(&p) <= 1e-8,
            "not PSD: {}",
            block.max_diff(&p)
        );
        for i in 0..g.x_cert.rows() {
            assert!(g.x_cert[(i, i)].re <= g.value + 1e-6);
        }
        for j in 0..g.y_cert.rows() {
            assert!(g.y_cert[(j, j)].re <= g.value + 1e-6);
        }
        assert!(g.primal_residual <= 1e-6, "residual {}", g.primal_residual);
        for (i, a) in g.a_vecs.iter().enumerate() {
            for (j, b) in g.b_vecs.iter().enumerate() {
                assert!((pair(a, b) - m[(i, j)]).norm() <= 1e-6);
            }
        }
        assert!(g.max_a_norm() * g.max_b_norm() <= g.value * (1.0 + 1e-6) + 1e-9);
    }

    #[test]
    fn gamma2_certificates_on_random_matrices() {
        let mut r = rng::seeded(3, 0);
        for _ in 0..5 {
            let m = rng::gaussian_matrix(&mut r, 3, 4);
            let g = gamma2(&m, 1e-7).unwrap();
            check_certificate(&m, &g);
            assert!(g.value >= m.max_abs() - 1e-6);
            let op = crate::linalg::svd(&m).unwrap().sigma[0];
            let (rows, cols) = m.shape();
            // ‖M‖ ≤ ‖M‖_F ≤ √(rows·cols)·max|M_ij| ≤ √(rows·cols)·γ₂(M)
            assert!(op <= ((rows * cols) as f64).sqrt() * g.value + 1e-6);
        }
    }

    #[test]
    fn gamma2_invariances() {
        let mut r = rng::seeded(5, 0);
        let m = rng::gaussian_matrix(&mut r, 3, 3);
        let base = gamma2(&m, 1e-8).unwrap().value;

        let scaled = gamma2(&m.scale(Complex64::new(-1.5, 2.0)), 1e-8)
            .unwrap()
            .value;
        assert!((scaled - 2.5 * base).abs() < 1e-6 * (1.0 + base));

        let d1 = CMatrix::diag(&[
            Complex64::from_polar(1.0, 0.3),
            Complex64::from_polar(1.0, 2.0),
            ONE,
        ]);
        let d2 = CMatrix::diag(&[
            ONE,
            Complex64::from_polar(1.0, -1.0),
            Complex64::from_polar(1.0, 0.7),
        ]);
        let rotated = gamma2(&(&(&d1 * &m) * &d2), 1e-8).unwrap().value;
        assert!((rotated - base).abs() < 1e-6);

        let perm = CMatrix::from_fn(3, 3, |i, j| {
            if j == (i + 1) % 3 {
                ONE
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let permuted = gamma2(&(&(&perm * &m) * &perm.transpose()), 1e-8)
            .unwrap()
            .value;
        assert!((permuted - base).abs() < 1e-6);
    }

    #[test]
    fn gamma2_submultiplicative_under_schur_product() {
        let mut r = rng::seeded(8, 0);
        let m = rng::gaussian_matrix(&mut r, 3, 3);
        let n = rng::gaussian_matrix(&mut r, 3, 3);
        let hadamard = CMatrix::from_fn(3, 3, |i, j| m[(i, j)] * n[(i, j)]);
        let gm = gamma2(&m, 1e-8).unwrap().value;
        let gn = gamma2(&n, 1e-8).unwrap().value;
        let gh = gamma2(&hadamard, 1e-8).unwrap().value;
        assert!(gh <= gm * gn + 1e-6);
    }

    #[test]
    fn gamma2_rejects_tiny_tolerance() {
        assert!(gamma2(&CMatrix::identity(2), 1e-12).is_err());
    }

    #[test]
    fn gamma2_of_zero() {
        let g = gamma2(&CMatrix::zeros(2, 3), 1e-8).unwrap();
        assert_eq!(g.value, 0.0);
        assert_eq!(g.a_vecs.len(), 2);
        assert_eq!(g.b_vecs.len(), 3);
    }

    #[test]
    fn balance_equalizes_sup_norms() {
        let mut a = vec![vec![c(4.0)], vec![c(1.0)]];
        let mut b = vec![vec![c(0.25)]];
        balance(&mut a, &mut b);
        let ma = a.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
        let mb = b.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
        assert!((ma - mb).abs() < 1e-12);
        assert!((ma * mb - 1.0).abs() < 1e-12);
    }

    #[test]
    fn s1_bounds_on_slice_constant_symbol() {
        let alphas = [c(0.5), Complex64::new(0.0, -2.0), c(1.0)];
        let s = SchurSymbol::from_fn([2, 3, 2], |_, t2, _| alphas[t2]);
        let b = s1_norm_schur(&s, 1e-8).unwrap();
        assert!((b.upper - 2.0).abs() < 1e-6, "{}", b.upper);
        assert!(b.lower.value <= b.upper * (1.0 + 1e-6));
    }

    #[test]
    fn s1_bounds_zero() {
        let s = SchurSymbol::constant([2, 2, 2], Complex64::new(0.0, 0.0));
        let b = s1_norm_schur(&s, 1e-8).unwrap();
        assert_eq!(b.upper, 0.0);
        assert_eq!(b.lower.value, 0.0);
    }
}
