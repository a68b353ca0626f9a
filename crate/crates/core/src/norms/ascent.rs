//! Alternating ascent for `sup ‖[u(y_i, x_j)]_{ij}‖` over the product of
//! unit spheres `Σ‖x_j‖₂² = Σ‖y_i‖₂² = 1`.
//!
//! With `y` fixed the block matrix is linear in `x`, so for any subgradient
//! `G` of the target norm at the current block, `x ← L*(G)/‖L*(G)‖` never
//! decreases the objective. For the Hilbert–Schmidt target the exact
//! maximizer (top right-singular vector of `L`) is used instead.

use rayon::prelude::*;

use super::{NormEstimate, NormKind, Target};
use crate::linalg::{svd, CMatrix};
use crate::multiplier::BilinearMap;
use crate::rng;

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            max_iter: 500,
            rel_tol: 1e-9,
        }
    }
}

impl AscentOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            ..Self::default()
        }
    }
}

pub(crate) fn block_matrix<M: BilinearMap + ?Sized>(
    map: &M,
    xs: &[CMatrix],
    ys: &[CMatrix],
) -> CMatrix {
    let [d1, _, d3] = map.dims();
    let n = xs.len();
    let mut z = CMatrix::zeros(n * d3, n * d1);
    for (i, y) in ys.iter().enumerate() {
        for (j, x) in xs.iter().enumerate() {
            z.set_block(i * d3, j * d1, &map.apply(y, x));
        }
    }
    z
}

pub(crate) fn target_norm(z: &CMatrix, target: Target) -> f64 {
    match target {
        Target::S2 => z.frobenius(),
        Target::B => svd(z)
            .map(|s| s.sigma.first().copied().unwrap_or(0.0))
            .unwrap_or(f64::NAN),
        Target::S1 => svd(z).map(|s| s.nuclear()).unwrap_or(f64::NAN),
    }
}

/// Re-evaluates the objective at a witness.
pub fn evaluate<M: BilinearMap + ?Sized>(
    map: &M,
    target: Target,
    xs: &[CMatrix],
    ys: &[CMatrix],
) -> f64 {
    target_norm(&block_matrix(map, xs, ys), target)
}

/// Element `G` of the subdifferential of the target norm at `z`, so that
/// `Re⟨G, z⟩ = ‖z‖` and the dual norm of `G` is at most one.
fn subgradient(z: &CMatrix, target: Target) -> Option<CMatrix> {
    match target {
        Target::S2 => {
            let f = z.frobenius();
            (f > 0.0).then(|| z.scale_real(1.0 / f))
        }
        Target::B => {
            let s = svd(z).ok()?;
            let u = CMatrix::column(&s.u.col(0));
            let v = CMatrix::column(&s.v.col(0));
            Some(&u * &v.adjoint())
        }
        Target::S1 => {
            let s = svd(z).ok()?;
            Some(&s.u * &s.v.adjoint())
        }
    }
}

fn split_blocks(g: &CMatrix, n: usize, rows: usize, cols: usize) -> Vec<Vec<CMatrix>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| g.block(i * rows, j * cols, rows, cols))
                .collect()
        })
        .collect()
}

fn joint_norm(ms: &[CMatrix]) -> f64 {
    ms.iter().map(|m| m.frobenius().powi(2)).sum::<f64>().sqrt()
}

fn normalize(ms: &mut [CMatrix]) -> bool {
    let nrm = joint_norm(ms);
    if nrm == 0.0 || !nrm.is_finite() {
        return false;
    }
    for m in ms.iter_mut() {
        *m = m.scale_real(1.0 / nrm);
    }
    true
}

/// Exact maximizer of `‖Z‖_F` over the sphere in the free variable:
/// top right-singular vector of the linear map.
fn top_singular_input(
    apply: impl Fn(&[CMatrix]) -> CMatrix,
    n: usize,
    rows: usize,
    cols: usize,
) -> Option<Vec<CMatrix>> {
    let dim = n * rows * cols;
    let mut columns = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut inputs = vec![CMatrix::zeros(rows, cols); n];
        let j = k / (rows * cols);
        let r = (k / cols) % rows;
        let c = k % cols;
        inputs[j][(r, c)] = crate::linalg::ONE;
        columns.push(apply(&inputs).into_data());
    }
    let out_len = columns[0].len();
    let l = CMatrix::from_fn(out_len, dim, |i, k| columns[k][i]);
    let s = svd(&l).ok()?;
    if s.sigma.first().copied().unwrap_or(0.0) == 0.0 {
        return None;
    }
    let v = s.v.col(0);
    Some(
        (0..n)
            .map(|j| CMatrix::from_fn(rows, cols, |r, c| v[j * rows * cols + r * cols + c]))
            .collect(),
    )
}

struct RestartOutcome {
    value: f64,
    xs: Vec<CMatrix>,
    ys: Vec<CMatrix>,
    iterations: usize,
}

fn run_restart<M: BilinearMap + ?Sized>(
    map: &M,
    n: usize,
    target: Target,
    opts: &AscentOptions,
    restart: usize,
) -> RestartOutcome {
    let [d1, d2, d3] = map.dims();
    let mut g = rng::seeded(opts.seed, restart as u64);
    let mut xs: Vec<CMatrix> = (0..n)
        .map(|_| rng::gaussian_matrix(&mut g, d2, d1))
        .collect();
    let mut ys: Vec<CMatrix> = (0..n)
        .map(|_| rng::gaussian_matrix(&mut g, d3, d2))
        .collect();
    normalize(&mut xs);
    normalize(&mut ys);

    let mut value = evaluate(map, target, &xs, &ys);
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;

        let new_xs = match target {
            Target::S2 => top_singular_input(|xin| block_matrix(map, xin, &ys), n, d2, d1),
            _ => subgradient(&block_matrix(map, &xs, &ys), target).and_then(|gz| {
                let blocks = split_blocks(&gz, n, d3, d1);
                let mut grads: Vec<CMatrix> = (0..n)
                    .map(|j| {
                        let mut acc = CMatrix::zeros(d2, d1);
                        for (i, y) in ys.iter().enumerate() {
                            acc.axpy(crate::linalg::ONE, &map.grad_x(y, &blocks[i][j]));
                        }
                        acc
                    })
                    .collect();
                normalize(&mut grads).then_some(grads)
            }),
        };
        if let Some(nx) = new_xs {
            xs = nx;
        }

        let new_ys = match target {
            Target::S2 => top_singular_input(|yin| block_matrix(map, &xs, yin), n, d3, d2),
            _ => subgradient(&block_matrix(map, &xs, &ys), target).and_then(|gz| {
                let blocks = split_blocks(&gz, n, d3, d1);
                let mut grads: Vec<CMatrix> = (0..n)
                    .map(|i| {
                        let mut acc = CMatrix::zeros(d3, d2);
                        for (j, x) in xs.iter().enumerate() {
                            acc.axpy(crate::linalg::ONE, &map.grad_y(x, &blocks[i][j]));
                        }
                        acc
                    })
                    .collect();
                normalize(&mut grads).then_some(grads)
            }),
        };
        if let Some(ny) = new_ys {
            ys = ny;
        }

        let next = evaluate(map, target, &xs, &ys);
        let improved = next - value;
        value = value.max(next);
        if improved <= opts.rel_tol * value.abs() {
            break;
        }
    }
    // report exactly what the witness evaluates to
    let value = evaluate(map, target, &xs, &ys);
    RestartOutcome {
        value,
        xs,
        ys,
        iterations,
    }
}

/// Best-of-restarts lower bound for the level-`n` norm of `map`.
pub fn ascend<M: BilinearMap + ?Sized>(
    map: &M,
    n: usize,
    target: Target,
    opts: &AscentOptions,
) -> NormEstimate {
    let restarts = opts.restarts.max(1);
    let n = n.max(1);
    let outcomes: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| run_restart(map, n, target, opts, r))
        .collect();
    let iterations = outcomes.iter().map(|o| o.iterations).sum();
    // first maximal restart wins, independent of scheduling
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    NormEstimate {
        value: best.value,
        kind: NormKind::LowerBound,
        witness_x: best.xs,
        witness_y: best.ys,
        restarts_used: restarts,
        iterations,
    }
}
