//! Bundled verification suites run by `bimult selftest`.

use rand::Rng as _;
use serde::Serialize;

use crate::algebra::{tensor_membership, AlgebraTriple};
use crate::error::Result;
use crate::factorize::{col_wnorm, opmul_symbol, row_wnorm, square_sums, FactorFamily};
use crate::linalg::CMatrix;
use crate::multiplier::{
    apply_schur, apply_tau, is_modular, tau1_apply, tau3_apply, OpLeg, PairSymbol,
};
use crate::rng::{self, Rng};
use crate::symbols::{elementary_symbol, embed_schur, random_symbol_in, SchurSymbol};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SuiteResult {
    fn new(name: &'static str, trials: usize, max_violation: f64, tolerance: f64) -> Self {
        Self {
            name,
            trials,
            max_violation,
            tolerance,
            pass: max_violation <= tolerance,
        }
    }
}

pub const TRIALS: usize = 50;
const PRESETS: [&str; 4] = ["full", "diagonal", "scalar", "block:1+2"];

fn random_pair(g: &mut Rng, op: OpLeg, da: usize, db: usize) -> PairSymbol {
    PairSymbol::from_vec(op, [da, db], rng::gaussian_vec(g, (da * db).pow(2)))
        .expect("length matches")
}

/// `τ_{R⊗S⊗T}(y, x) = T·y·S·x·R`, relative to the size of the right side.
fn elementary_tensor(seed: u64, fault: bool) -> Result<SuiteResult> {
    let mut g = rng::seeded(seed, 1);
    let mut worst = 0.0f64;
    for trial in 0..TRIALS {
        let [d1, d2, d3] = if trial % 2 == 0 { [2, 3, 2] } else { [3, 2, 4] };
        let r = rng::gaussian_matrix(&mut g, d1, d1);
        let s = rng::gaussian_matrix(&mut g, d2, d2);
        let t = rng::gaussian_matrix(&mut g, d3, d3);
        let x = rng::gaussian_matrix(&mut g, d2, d1);
        let y = rng::gaussian_matrix(&mut g, d3, d2);
        let got = apply_tau(&elementary_symbol(&r, &s, &t)?, &y, &x)?;
        let mut want = &(&(&(&t * &y) * &s) * &x) * &r;
        if fault && trial == 0 {
            want[(0, 0)] += 1e-6;
        }
        worst = worst.max(got.max_diff(&want) / (1.0 + want.max_abs()));
    }
    Ok(SuiteResult::new("elementary_tensor", TRIALS, worst, 1e-12))
}

/// `τ` of the embedded symbol agrees with the Schur action.
fn schur_consistency(seed: u64) -> Result<SuiteResult> {
    let mut g = rng::seeded(seed, 2);
    let mut worst = 0.0f64;
    for trial in 0..TRIALS {
        let dims = [
            g.random_range(1..=4),
            g.random_range(1..=4),
            g.random_range(1..=4),
        ];
        let s = SchurSymbol::random(dims, seed.wrapping_add(trial as u64));
        let x = rng::gaussian_matrix(&mut g, dims[1], dims[0]);
        let y = rng::gaussian_matrix(&mut g, dims[2], dims[1]);
        let a = apply_tau(&embed_schur(&s), &y, &x)?;
        let b = apply_schur(&s, &y, &x)?;
        worst = worst.max(a.max_diff(&b) / (1.0 + b.max_abs()));
    }
    Ok(SuiteResult::new("schur_consistency", TRIALS, worst, 1e-12))
}

/// `τ_{(a⊗1)(1⊗b)}(y, x) = τ³_b(y)·τ¹_a(x)`.
fn magic_identity(seed: u64) -> Result<SuiteResult> {
    let mut g = rng::seeded(seed, 3);
    let mut worst = 0.0f64;
    for trial in 0..TRIALS {
        let [d1, d2, d3] = if trial % 2 == 0 { [2, 2, 2] } else { [2, 3, 2] };
        let a = random_pair(&mut g, OpLeg::Second, d1, d2);
        let b = random_pair(&mut g, OpLeg::First, d2, d3);
        let x = rng::gaussian_matrix(&mut g, d2, d1);
        let y = rng::gaussian_matrix(&mut g, d3, d2);
        let lhs = apply_tau(&opmul_symbol(&a, &b)?, &y, &x)?;
        let rhs = &tau3_apply(&b, &y)? * &tau1_apply(&a, &x)?;
        worst = worst.max(lhs.max_diff(&rhs) / (1.0 + rhs.max_abs()));
    }
    Ok(SuiteResult::new("magic_identity", TRIALS, worst, 1e-12))
}

fn random_triple(g: &mut Rng) -> Result<AlgebraTriple> {
    let mut names = [""; 3];
    let mut dims = [0usize; 3];
    for leg in 0..3 {
        let name = PRESETS[g.random_range(0..PRESETS.len())];
        names[leg] = name;
        dims[leg] = if name.starts_with("block") {
            3
        } else {
            g.random_range(1..=3)
        };
    }
    AlgebraTriple::from_presets(names, dims)
}

/// Tensor membership and modularity decide the same thing. Counts
/// disagreements (a method mismatch inside `is_modular` counts too).
fn modularity_equivalence(seed: u64) -> Result<SuiteResult> {
    let mut g = rng::seeded(seed, 4);
    let trials = 30;
    let mut disagreements = 0usize;
    for trial in 0..trials {
        let t = random_triple(&mut g)?;
        let dims = t.dims();
        let sym_seed = seed.wrapping_mul(31).wrapping_add(trial as u64);
        let phi = match trial % 3 {
            0 => random_symbol_in(&t, sym_seed),
            1 => {
                let full = AlgebraTriple::from_presets(["full"; 3], dims)?;
                random_symbol_in(&full, sym_seed)
            }
            _ => {
                // member plus a small generic perturbation
                let full = AlgebraTriple::from_presets(["full"; 3], dims)?;
                let noise = random_symbol_in(&full, sym_seed ^ 0xabcd);
                random_symbol_in(&t, sym_seed)
                    .add(&noise.scale(crate::Complex64::new(1e-3, 0.0)))?
            }
        };
        let (member, _) = tensor_membership(&phi, &t)?;
        match is_modular(&phi, &t) {
            Ok(rep) if rep.modular == member => {}
            _ => disagreements += 1,
        }
    }
    Ok(SuiteResult::new(
        "modularity_equivalence",
        trials,
        disagreements as f64,
        0.0,
    ))
}

/// `Σ‖τ¹_{aᵢ}(x)‖² ≤ ‖A‖²_row` and `Σ‖τ³_{bᵢ}(y)‖² ≤ ‖B‖²_col` for unit `x, y`;
/// the violation is the largest negative slack.
fn square_sums_suite(seed: u64) -> Result<SuiteResult> {
    let mut g = rng::seeded(seed, 5);
    let mut worst = 0.0f64;
    for _ in 0..TRIALS {
        let dims = [
            g.random_range(1..=3),
            g.random_range(1..=3),
            g.random_range(1..=3),
        ];
        let m = g.random_range(1..=4);
        let a = (0..m)
            .map(|_| random_pair(&mut g, OpLeg::Second, dims[0], dims[1]))
            .collect();
        let b = (0..m)
            .map(|_| random_pair(&mut g, OpLeg::First, dims[1], dims[2]))
            .collect();
        let f = FactorFamily::new(a, b)?;
        let unit = |m: CMatrix| {
            let n = m.frobenius();
            m.scale_real(1.0 / n)
        };
        let x = unit(rng::gaussian_matrix(&mut g, dims[1], dims[0]));
        let y = unit(rng::gaussian_matrix(&mut g, dims[2], dims[1]));
        let (sa, sb) = square_sums(&f, &x, &y)?;
        let (rw, cw) = (row_wnorm(&f), col_wnorm(&f));
        worst = worst.max(sa - rw * rw).max(sb - cw * cw);
    }
    Ok(SuiteResult::new(
        "square_sums",
        TRIALS,
        worst.max(0.0),
        1e-10,
    ))
}

pub fn run_all(seed: u64, inject_fault: bool) -> Result<Vec<SuiteResult>> {
    Ok(vec![
        elementary_tensor(seed, inject_fault)?,
        schur_consistency(seed)?,
        magic_identity(seed)?,
        modularity_equivalence(seed)?,
        square_sums_suite(seed)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_and_fault_is_caught() {
        let res = run_all(0, false).unwrap();
        assert!(res.iter().all(|r| r.pass), "{res:?}");
        let res = run_all(0, true).unwrap();
        assert!(!res[0].pass);
    }
}
