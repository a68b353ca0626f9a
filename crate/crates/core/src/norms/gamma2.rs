//! The factorization norm `γ₂(M) = min max_i‖a_i‖ · max_j‖b_j‖` over
//! `M_ij = Σ_k a_i[k] b_j[k]`, computed as the semidefinite program
//!
//! ```text
//! min t  s.t.  [[X, M], [M*, Y]] ⪰ 0,  diag(X) ≤ t,  diag(Y) ≤ t
//! ```
//!
//! with a log-barrier path-following method over the Hermitian diagonal
//! blocks `X, Y` and `t`. The dual program
//! `max ‖diag(u)·M·diag(v)‖₁` over unit `u, v ≥ 0` supplies a lower bound.

use num_complex::Complex64;

use crate::error::{shape_err, Error, Result};
use crate::linalg::{gram_factor, pair, svd, vec_norm, CMatrix, ONE, ZERO};

const MAX_CENTERING: usize = 100;
const MAX_NEWTON: usize = 2000;

#[derive(Debug, Clone)]
pub struct Gamma2Result {
    pub value: f64,
    /// PSD, rows side; `max diag ≤ value`.
    pub x_cert: CMatrix,
    /// PSD, columns side; `max diag ≤ value`.
    pub y_cert: CMatrix,
    /// One vector per row of `M`.
    pub a_vecs: Vec<Vec<Complex64>>,
    /// One vector per column of `M`.
    pub b_vecs: Vec<Vec<Complex64>>,
    /// `max |M_ij − Σ_k a_i[k] b_j[k]|`.
    pub primal_residual: f64,
    /// Dual lower bound; `value − lower_bound` brackets the optimum.
    pub lower_bound: f64,
}

impl Gamma2Result {
    pub fn max_a_norm(&self) -> f64 {
        self.a_vecs.iter().map(|v| vec_norm(v)).fold(0.0, f64::max)
    }

    pub fn max_b_norm(&self) -> f64 {
        self.b_vecs.iter().map(|v| vec_norm(v)).fold(0.0, f64::max)
    }

    /// Full block certificate `[[X, M], [M*, Y]]`.
    pub fn block(&self, m: &CMatrix) -> CMatrix {
        assemble(&self.x_cert, m, &self.y_cert)
    }
}

fn assemble(x: &CMatrix, m: &CMatrix, y: &CMatrix) -> CMatrix {
    let (r, c) = m.shape();
    let mut p = CMatrix::zeros(r + c, r + c);
    p.set_block(0, 0, x);
    p.set_block(0, r, m);
    p.set_block(r, 0, &m.adjoint());
    p.set_block(r, r, y);
    p
}

fn max_diag(m: &CMatrix) -> f64 {
    (0..m.rows()).map(|i| m[(i, i)].re).fold(0.0, f64::max)
}

/// Exactly feasible certificate `(X, Y)` for `M`, with diagonals balanced
/// so that `max diag X = max diag Y`.
#[derive(Debug, Clone)]
struct Certificate {
    x: CMatrix,
    y: CMatrix,
    value: f64,
}

impl Certificate {
    fn balanced(x: CMatrix, y: CMatrix) -> Certificate {
        let (dx, dy) = (max_diag(&x), max_diag(&y));
        if dx <= 0.0 || dy <= 0.0 {
            let v = dx.max(dy);
            return Certificate { x, y, value: v };
        }
        let c = (dy / dx).sqrt();
        Certificate {
            x: x.scale_real(c),
            y: y.scale_real(1.0 / c),
            value: (dx * dy).sqrt(),
        }
    }
}

/// Lower-triangular `L` with `L L* = p`, or `None` if `p` is not positive
/// definite.
fn cholesky(p: &CMatrix) -> Option<CMatrix> {
    let n = p.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = p[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut v = p[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / d;
        }
    }
    Some(l)
}

/// Inverse from a Cholesky factor.
fn cholesky_inverse(l: &CMatrix) -> CMatrix {
    let n = l.rows();
    // L⁻¹ by forward substitution, then P⁻¹ = L⁻* L⁻¹
    let mut li = CMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut v = if i == c { ONE } else { ZERO };
            for k in c..i {
                v -= l[(i, k)] * li[(k, c)];
            }
            li[(i, c)] = v / l[(i, i)];
        }
    }
    &li.adjoint() * &li
}

/// Solves `H z = g` for symmetric positive definite real `H`, adding a small
/// ridge when the factorization breaks down.
fn solve_spd(h: &[f64], g: &[f64], n: usize) -> Option<Vec<f64>> {
    let scale = (0..n)
        .map(|i| h[i * n + i].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    for ridge in [0.0, 1e-14, 1e-12, 1e-10] {
        let mut l = vec![0.0; n * n];
        let mut ok = true;
        'outer: for j in 0..n {
            let mut d = h[j * n + j] + ridge * scale;
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 || !d.is_finite() {
                ok = false;
                break 'outer;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut v = h[i * n + j];
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / d;
            }
        }
        if !ok {
            continue;
        }
        let mut z = g.to_vec();
        for i in 0..n {
            for k in 0..i {
                z[i] -= l[i * n + k] * z[k];
            }
            z[i] /= l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                z[i] -= l[k * n + i] * z[k];
            }
            z[i] /= l[i * n + i];
        }
        return Some(z);
    }
    None
}

/// A real coordinate of the Hermitian diagonal blocks: the matrix
/// `Σ v·E_{kl}` it moves.
type Direction = Vec<(usize, usize, Complex64)>;

fn directions(r: usize, c: usize) -> Vec<Direction> {
    let mut out = Vec::with_capacity(r * r + c * c);
    for (off, k) in [(0, r), (r, c)] {
        for i in 0..k {
            out.push(vec![(off + i, off + i, ONE)]);
            for j in i + 1..k {
                let (a, b) = (off + i, off + j);
                out.push(vec![(a, b, ONE), (b, a, ONE)]);
                let im = Complex64::new(0.0, 1.0);
                out.push(vec![(a, b, im), (b, a, -im)]);
            }
        }
    }
    out
}

/// Barrier objective `t/μ − log det P − Σ log(t − P_ii)`; infinite outside
/// the interior.
fn barrier(p: &CMatrix, t: f64, mu: f64) -> f64 {
    let Some(l) = cholesky(p) else {
        return f64::INFINITY;
    };
    let mut f = t / mu;
    for i in 0..p.rows() {
        let slack = t - p[(i, i)].re;
        if slack <= 0.0 {
            return f64::INFINITY;
        }
        f -= 2.0 * l[(i, i)].re.ln() + slack.ln();
    }
    f
}

fn moved(p: &CMatrix, t: f64, dirs: &[Direction], dz: &[f64], step: f64) -> (CMatrix, f64) {
    let mut out = p.clone();
    for (d, &z) in dirs.iter().zip(dz) {
        for &(k, l, v) in d {
            out[(k, l)] += v * (step * z);
        }
    }
    (out, t + step * dz[dirs.len()])
}

/// One Newton step on the barrier at fixed `μ`. Returns the new point and
/// half the squared Newton decrement.
fn newton_step(p: &CMatrix, t: f64, mu: f64, dirs: &[Direction]) -> Option<(CMatrix, f64, f64)> {
    let n = p.rows();
    let w = cholesky_inverse(&cholesky(p)?);
    let slack: Vec<f64> = (0..n).map(|i| t - p[(i, i)].re).collect();
    let nv = dirs.len() + 1;
    let mut g = vec![0.0; nv];
    let mut h = vec![0.0; nv * nv];
    for (a, da) in dirs.iter().enumerate() {
        let mut ga = 0.0;
        for &(k, l, v) in da {
            ga -= (v * w[(l, k)]).re;
            if k == l {
                ga += v.re / slack[k];
                h[a * nv + nv - 1] -= v.re / slack[k].powi(2);
            }
        }
        g[a] = ga;
        for (b, db) in dirs.iter().enumerate().skip(a) {
            let mut hab = ZERO;
            for &(k, l, v) in da {
                for &(m, q, u) in db {
                    hab += v * u * w[(l, m)] * w[(q, k)];
                    if k == l && m == q && k == m {
                        hab += v * u / slack[k].powi(2);
                    }
                }
            }
            h[a * nv + b] = hab.re;
            h[b * nv + a] = hab.re;
        }
        h[(nv - 1) * nv + a] = h[a * nv + nv - 1];
    }
    g[nv - 1] = 1.0 / mu - slack.iter().map(|s| 1.0 / s).sum::<f64>();
    h[nv * nv - 1] = slack.iter().map(|s| s.powi(-2)).sum();

    let mut dz = solve_spd(&h, &g, nv)?;
    dz.iter_mut().for_each(|z| *z = -*z);
    let lam2 = -g.iter().zip(&dz).map(|(a, b)| a * b).sum::<f64>();
    if !(lam2 >= 0.0) {
        return None;
    }
    let f0 = barrier(p, t, mu);
    let mut step = 1.0;
    while step > 1e-12 {
        let (pn, tn) = moved(p, t, dirs, &dz, step);
        if barrier(&pn, tn, mu) <= f0 - 0.25 * step * lam2 {
            return Some((pn.hermitian_part(), tn, lam2 / 2.0));
        }
        step *= 0.5;
    }
    None
}

/// Path-following barrier method for the SDP. Every iterate is strictly
/// feasible, so the current block matrix is always a valid certificate.
fn barrier_solve(m: &CMatrix, tol: f64) -> Result<(CMatrix, f64)> {
    let (r, c) = m.shape();
    let n = r + c;
    let dirs = directions(r, c);
    let s = 1.1 * svd(m)?.sigma[0] + 1e-3 * (1.0 + m.max_abs());
    let mut p = assemble(
        &CMatrix::identity(r).scale_real(s),
        m,
        &CMatrix::identity(c).scale_real(s),
    );
    let mut t = 1.5 * s + 1.0;
    // barrier parameter ν: log det of an n×n block plus n scalar slacks
    let nu = 2.0 * n as f64;
    let mut mu = t / nu;
    let mut steps = 0;
    'path: loop {
        for _ in 0..MAX_CENTERING {
            steps += 1;
            match newton_step(&p, t, mu, &dirs) {
                Some((pn, tn, dec)) => {
                    p = pn;
                    t = tn;
                    if dec < 1e-10 {
                        break;
                    }
                }
                // numerically stuck: the current interior point still certifies
                None => break 'path,
            }
            if steps >= MAX_NEWTON {
                break 'path;
            }
        }
        if nu * mu < 0.5 * tol {
            break;
        }
        mu /= 8.0;
    }
    Ok((p, t))
}

/// `γ₂(m)` to within `tol`, with certificates and factor vectors.
pub fn gamma2(m: &CMatrix, tol: f64) -> Result<Gamma2Result> {
    if tol < 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "gamma2 tolerance {tol:e} below 1e-10"
        )));
    }
    if !m.is_finite() {
        return Err(shape_err("gamma2 input has non-finite entries"));
    }
    let (r, c) = m.shape();
    if m.max_abs() == 0.0 {
        return Ok(Gamma2Result {
            value: 0.0,
            x_cert: CMatrix::zeros(r, r),
            y_cert: CMatrix::zeros(c, c),
            a_vecs: vec![vec![ZERO]; r],
            b_vecs: vec![vec![ZERO]; c],
            primal_residual: 0.0,
            lower_bound: 0.0,
        });
    }
    // t = ‖M‖_F is feasible with X = Y = t·I since ‖M‖ ≤ ‖M‖_F
    let hi = m.frobenius();
    let trivial = Certificate::balanced(
        CMatrix::identity(r).scale_real(hi),
        CMatrix::identity(c).scale_real(hi),
    );
    assert!(trivial.value >= m.max_abs(), "gamma2 bracket is empty");

    let (p, t) = barrier_solve(m, tol)?;
    let cert = Certificate::balanced(p.block(0, 0, r, r), p.block(r, r, c, c));
    let cert = if cert.value < trivial.value {
        cert
    } else {
        trivial
    };
    let lower = dual_bound(m, &p, t)?;
    extract(m, cert, lower)
}

/// `max_{u,v} ‖diag(u)·M·diag(v)‖₁` over unit `u, v ≥ 0` is a lower bound
/// for `γ₂(M)`. Weights start from the certificate diagonals, are refined
/// by the fixed-point update `u_i² ∝ (UΣU*)_ii`, then polished by
/// alternately maximizing `Re tr(G*·diag(u)·M·diag(v))` with `G = UV*`,
/// which never decreases the trace norm.
pub fn dual_lower_bound(m: &CMatrix, p0: &[f64], q0: &[f64], iters: usize) -> Result<f64> {
    let (r, c) = m.shape();
    let norm1 = |v: &[f64]| -> Vec<f64> {
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            v.iter().map(|x| x / s).collect()
        } else {
            vec![1.0 / v.len() as f64; v.len()]
        }
    };
    let weighted = |u: &[f64], v: &[f64]| CMatrix::from_fn(r, c, |i, j| m[(i, j)] * (u[i] * v[j]));
    let mut p = norm1(p0);
    let mut q = norm1(q0);
    let mut best = 0.0f64;
    let mut best_uv = (Vec::new(), Vec::new());
    for _ in 0..iters.max(1) {
        let (u, v): (Vec<f64>, Vec<f64>) = (
            p.iter().map(|x| x.sqrt()).collect(),
            q.iter().map(|x| x.sqrt()).collect(),
        );
        let s = svd(&weighted(&u, &v))?;
        let total: f64 = s.sigma.iter().sum();
        if total > best {
            best = total;
            best_uv = (u, v);
        }
        if total == 0.0 {
            return Ok(best);
        }
        let k = s.sigma.len();
        p = (0..r)
            .map(|i| {
                (0..k)
                    .map(|l| s.sigma[l] * s.u[(i, l)].norm_sqr())
                    .sum::<f64>()
                    / total
            })
            .collect();
        q = (0..c)
            .map(|j| {
                (0..k)
                    .map(|l| s.sigma[l] * s.v[(j, l)].norm_sqr())
                    .sum::<f64>()
                    / total
            })
            .collect();
    }

    let unit = |w: Vec<f64>| -> Option<Vec<f64>> {
        let n = vec_norm_real(&w);
        (n > 0.0).then(|| w.into_iter().map(|x| x / n).collect())
    };
    let (mut u, mut v) = best_uv;
    for _ in 0..iters.max(1) {
        let s = svd(&weighted(&u, &v))?;
        let g = &s.u * &s.v.adjoint();
        let Some(nu) = unit(
            (0..r)
                .map(|i| {
                    (0..c)
                        .map(|j| (g[(i, j)].conj() * m[(i, j)]).re * v[j])
                        .sum::<f64>()
                        .max(0.0)
                })
                .collect(),
        ) else {
            break;
        };
        u = nu;
        let s = svd(&weighted(&u, &v))?;
        let g = &s.u * &s.v.adjoint();
        let Some(nv) = unit(
            (0..c)
                .map(|j| {
                    (0..r)
                        .map(|i| (g[(i, j)].conj() * m[(i, j)]).re * u[i])
                        .sum::<f64>()
                        .max(0.0)
                })
                .collect(),
        ) else {
            break;
        };
        v = nv;
        let total: f64 = svd(&weighted(&u, &v))?.sigma.iter().sum();
        let gain = total - best;
        best = best.max(total);
        if gain <= 1e-15 * best {
            break;
        }
    }
    Ok(best)
}

fn vec_norm_real(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Seeds the dual weights with the barrier multipliers `1/(t − P_ii)`,
/// which approach the optimal dual weights along the central path.
fn dual_bound(m: &CMatrix, p: &CMatrix, t: f64) -> Result<f64> {
    let (r, c) = m.shape();
    let w: Vec<f64> = (0..r + c)
        .map(|i| 1.0 / (t - p[(i, i)].re).max(f64::MIN_POSITIVE))
        .collect();
    dual_lower_bound(m, &w[..r], &w[r..], 200)
}

/// Factor vectors from a certificate, balanced so both sides have sup norm
/// `√value`.
fn extract(m: &CMatrix, cert: Certificate, lower_bound: f64) -> Result<Gamma2Result> {
    let (r, c) = m.shape();
    let block = assemble(&cert.x, m, &cert.y);
    let lmax = crate::linalg::eigh(&block)?.values[0].max(0.0);
    let g = gram_factor(&block, 1e-10 * lmax)?;
    // ⟨col i, col r+j⟩ = P_{i, r+j} = M_ij, so conjugate the row side to
    // get the bilinear pairing.
    let mut a_vecs: Vec<Vec<Complex64>> = (0..r)
        .map(|i| g.col(i).iter().map(|z| z.conj()).collect())
        .collect();
    let mut b_vecs: Vec<Vec<Complex64>> = (r..r + c).map(|j| g.col(j)).collect();
    balance(&mut a_vecs, &mut b_vecs);

    let mut resid = 0.0f64;
    for i in 0..r {
        for j in 0..c {
            resid = resid.max((m[(i, j)] - pair(&a_vecs[i], &b_vecs[j])).norm());
        }
    }
    Ok(Gamma2Result {
        value: cert.value,
        x_cert: cert.x,
        y_cert: cert.y,
        a_vecs,
        b_vecs,
        primal_residual: resid,
        lower_bound,
    })
}

/// Rescales `a ↦ a·κ`, `b ↦ b/κ` with `κ = (max‖b‖/max‖a‖)^{1/2}`.
pub fn balance(a: &mut [Vec<Complex64>], b: &mut [Vec<Complex64>]) {
    let ma = a.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
    let mb = b.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
    if ma == 0.0 || mb == 0.0 {
        return;
    }
    let k = (mb / ma).sqrt();
    for v in a.iter_mut() {
        for z in v.iter_mut() {
            *z *= k;
        }
    }
    for v in b.iter_mut() {
        for z in v.iter_mut() {
            *z /= k;
        }
    }
}
