//! Diamond-norm evaluation: an interior-point solver for the semidefinite
//! program, a closed form for pairs of unitary channels, and a sampled lower
//! bound for cross-checking.
//!
//! The program solved, for a Hermitian-preserving map with (unnormalized)
//! Choi matrix `J` on out (x) in:
//!
//!   ‖Θ‖⋄ = max { Tr[J X] : −(1 (x) ρ) ⪯ X ⪯ (1 (x) ρ), ρ a state },
//!
//! handled by a log-barrier Newton method over the Hermitian coordinates of
//! `X` and the traceless coordinates of `ρ` (positivity of `ρ` is implied by
//! the two slack blocks, whose sum is `2(1 (x) ρ)`).

use crate::channel::KrausMap;
use crate::error::{Error, Result};
use crate::exec;
use crate::matcore::{
    cholesky, hermitian_eig, outer, unitary_eigenvalues, ComplexMatrix,
};
use crate::sampling::{derived_rng, ginibre};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest out·in block the interior-point solver accepts.
pub const MAX_SDP_BLOCK: usize = 32;

pub struct DiamondOptions {
    /// Absolute duality-gap target on the returned value.
    pub gap_tol: f64,
    /// Newton iterations allowed per barrier stage.
    pub max_newton: usize,
}

impl Default for DiamondOptions {
    fn default() -> Self {
        DiamondOptions {
            gap_tol: 1e-9,
            max_newton: 60,
        }
    }
}

pub struct DiamondReport {
    pub value: f64,
    /// Certified bound on the remaining optimality gap.
    pub gap: f64,
}

type Sparse = Vec<(usize, usize, Complex64)>;

fn hermitian_sparse_basis(d: usize) -> Vec<Sparse> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        out.push(vec![(k, k, Complex64::new(1.0, 0.0))]);
    }
    let inv = 1.0 / 2f64.sqrt();
    for a in 0..d {
        for b in (a + 1)..d {
            out.push(vec![
                (a, b, Complex64::new(inv, 0.0)),
                (b, a, Complex64::new(inv, 0.0)),
            ]);
            out.push(vec![
                (a, b, Complex64::new(0.0, inv)),
                (b, a, Complex64::new(0.0, -inv)),
            ]);
        }
    }
    out
}

fn traceless_sparse_basis(d: usize) -> Vec<Sparse> {
    let mut out = Vec::with_capacity(d * d - 1);
    let inv = 1.0 / 2f64.sqrt();
    for a in 0..d {
        for b in (a + 1)..d {
            out.push(vec![
                (a, b, Complex64::new(inv, 0.0)),
                (b, a, Complex64::new(inv, 0.0)),
            ]);
            out.push(vec![
                (a, b, Complex64::new(0.0, inv)),
                (b, a, Complex64::new(0.0, -inv)),
            ]);
        }
    }
    for k in 1..d {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut ent: Sparse = (0..k)
            .map(|j| (j, j, Complex64::new(norm, 0.0)))
            .collect();
        ent.push((k, k, Complex64::new(-(k as f64) * norm, 0.0)));
        out.push(ent);
    }
    out
}

/// `1_m (x) G` as sparse entries on an m·n space.
fn lift_second(g: &Sparse, m: usize, n: usize) -> Sparse {
    let mut out = Vec::with_capacity(g.len() * m);
    for e in 0..m {
        for &(r, c, v) in g {
            out.push((e * n + r, e * n + c, v));
        }
    }
    out
}

/// `Tr[P A]` for Hermitian `P` and sparse Hermitian `A`.
fn trace_with(p: &ComplexMatrix, a: &Sparse) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(r, c, v) in a {
        acc += v * p.get(c, r);
    }
    acc.re
}

/// `Tr[P A P B]`, using `Tr[P E_ab P E_cd] = P[d,a]·P[b,c]`.
fn pair_trace(p: &ComplexMatrix, a: &Sparse, b: &Sparse) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(r1, c1, va) in a {
        for &(r2, c2, vb) in b {
            acc += va * vb * p.get(c2, r1) * p.get(c1, r2);
        }
    }
    acc.re
}

/// Inverse and log-determinant of a positive-definite matrix via Cholesky;
/// `None` when not positive definite (doubles as the feasibility test).
fn pd_inverse(s: &ComplexMatrix) -> Option<(ComplexMatrix, f64)> {
    let l = cholesky(s).ok()?;
    let n = s.rows();
    let mut logdet = 0.0;
    for j in 0..n {
        logdet += 2.0 * l.get(j, j).re.ln();
    }
    let mut y = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        for i in col..n {
            let mut acc = if i == col {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            for k in col..i {
                acc -= l.get(i, k) * y.get(k, col);
            }
            y.set(i, col, acc / l.get(i, i));
        }
    }
    Some((y.adjoint().matmul(&y), logdet))
}

fn logdet_pd(s: &ComplexMatrix) -> Option<f64> {
    let l = cholesky(s).ok()?;
    Some((0..s.rows()).map(|j| 2.0 * l.get(j, j).re.ln()).sum())
}

/// Solves `A x = b` for symmetric positive-definite `A` (in place Cholesky);
/// retries with a small ridge if rounding spoils definiteness.
fn solve_spd(a: Vec<Vec<f64>>, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    // Jacobi equilibration: barrier Hessians are ill-conditioned mostly by
    // scale, so normalize to a unit diagonal before factoring. The ridge
    // ladder is then relative.
    let d: Vec<f64> = (0..n).map(|j| a[j][j].abs().sqrt().max(1e-150)).collect();
    let base: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] / (d[i] * d[j])).collect())
        .collect();
    let bs: Vec<f64> = (0..n).map(|i| b[i] / d[i]).collect();
    for ridge in [0.0, 1e-14, 1e-11, 1e-8, 1e-5] {
        let mut m = base.clone();
        for (j, row) in m.iter_mut().enumerate() {
            row[j] += ridge;
        }
        if let Some(y) = try_chol_solve(&mut m, &bs) {
            return Some((0..n).map(|i| y[i] / d[i]).collect());
        }
    }
    None
}

fn try_chol_solve(a: &mut [Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if d <= 0.0 {
            return None;
        }
        let rjj = d.sqrt();
        a[j][j] = rjj;
        for i in (j + 1)..n {
            let mut acc = a[i][j];
            for k in 0..j {
                acc -= a[i][k] * a[j][k];
            }
            a[i][j] = acc / rjj;
        }
    }
    let mut x = b.to_vec();
    for i in 0..n {
        let mut acc = x[i];
        for k in 0..i {
            acc -= a[i][k] * x[k];
        }
        x[i] = acc / a[i][i];
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for k in (i + 1)..n {
            acc -= a[k][i] * x[k];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

struct BarrierProblem {
    j: ComplexMatrix,
    out_dim: usize,
    in_dim: usize,
    x_basis: Vec<Sparse>,
    rho_basis: Vec<Sparse>,
    rho_lift: Vec<Sparse>,
}

impl BarrierProblem {
    fn block(&self, xc: &[f64], sc: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
        let dd = self.out_dim * self.in_dim;
        let mut x = ComplexMatrix::zeros(dd, dd);
        for (i, basis) in self.x_basis.iter().enumerate() {
            if xc[i] == 0.0 {
                continue;
            }
            for &(r, c, v) in basis {
                x.set(r, c, x.get(r, c) + v * xc[i]);
            }
        }
        let mut rho = ComplexMatrix::identity(self.in_dim)
            .scale_re(1.0 / self.in_dim as f64);
        for (k, basis) in self.rho_basis.iter().enumerate() {
            if sc[k] == 0.0 {
                continue;
            }
            for &(r, c, v) in basis {
                rho.set(r, c, rho.get(r, c) + v * sc[k]);
            }
        }
        let lifted = ComplexMatrix::identity(self.out_dim).tensor(&rho);
        (lifted.sub_m(&x), lifted.add_m(&x))
    }

    fn barrier_value(&self, xc: &[f64], sc: &[f64], mu: f64) -> Option<f64> {
        let (sp, sm) = self.block(xc, sc);
        let lp = logdet_pd(&sp)?;
        let lm = logdet_pd(&sm)?;
        Some(self.linear_value(xc) + mu * (lp + lm))
    }

    fn linear_value(&self, xc: &[f64]) -> f64 {
        self.x_basis
            .iter()
            .enumerate()
            .map(|(i, basis)| xc[i] * trace_with(&self.j, basis))
            .sum()
    }
}

/// Diamond norm from an unnormalized Choi matrix on out (x) in.
pub fn diamond_norm_choi(
    j_hat: &ComplexMatrix,
    out_dim: usize,
    in_dim: usize,
    opts: &DiamondOptions,
) -> Result<DiamondReport> {
    let dd = out_dim * in_dim;
    if j_hat.dim()? != dd {
        return Err(Error::DimMismatch(format!(
            "Choi block is {}x{}, expected side {}",
            j_hat.rows(),
            j_hat.cols(),
            dd
        )));
    }
    if dd > MAX_SDP_BLOCK {
        return Err(Error::DimTooLarge {
            dim: dd,
            max: MAX_SDP_BLOCK,
        });
    }
    if !j_hat.is_hermitian(1e-9) {
        return Err(Error::InvalidInput(
            "diamond-norm argument must be Hermitian (a difference of CP maps)".into(),
        ));
    }
    let scale = j_hat.max_abs();
    if scale < 1e-300 {
        return Ok(DiamondReport { value: 0.0, gap: 0.0 });
    }

    let problem = BarrierProblem {
        j: j_hat.scale_re(1.0 / scale),
        out_dim,
        in_dim,
        x_basis: hermitian_sparse_basis(dd),
        rho_basis: traceless_sparse_basis(in_dim),
        rho_lift: traceless_sparse_basis(in_dim)
            .iter()
            .map(|g| lift_second(g, out_dim, in_dim))
            .collect(),
    };
    let px = problem.x_basis.len();
    let ps = problem.rho_basis.len();
    let p = px + ps;
    let mut xc = vec![0.0; px];
    let mut sc = vec![0.0; ps];

    let barrier_dim = 2.0 * dd as f64;
    let mut mu = 1.0f64;
    let mut solver_stalled = false;
    loop {
        // Newton re-centering at the current barrier weight.
        for _ in 0..opts.max_newton {
            let (sp, sm) = problem.block(&xc, &sc);
            let (pp, _) = pd_inverse(&sp)
                .ok_or_else(|| Error::Numerical("iterate left the cone".into()))?;
            let pm = pd_inverse(&sm)
                .ok_or_else(|| Error::Numerical("iterate left the cone".into()))?
                .0;

            let mut grad = vec![0.0; p];
            for i in 0..px {
                let basis = &problem.x_basis[i];
                grad[i] = trace_with(&problem.j, basis)
                    + mu * (trace_with(&pm, basis) - trace_with(&pp, basis));
            }
            for k in 0..ps {
                let basis = &problem.rho_lift[k];
                grad[px + k] = mu * (trace_with(&pp, basis) + trace_with(&pm, basis));
            }

            // Negated Hessian (positive definite): the derivative of S+ is
            // −F_i / +G̃_k, of S− is +F_i / +G̃_k; signs cancel pairwise
            // except in the X–ρ cross block.
            let rows: Vec<Vec<f64>> = exec::indexed_map(p, |a| {
                let (da_p, da_m): (&Sparse, &Sparse) = if a < px {
                    (&problem.x_basis[a], &problem.x_basis[a])
                } else {
                    (&problem.rho_lift[a - px], &problem.rho_lift[a - px])
                };
                let a_sign = if a < px { -1.0 } else { 1.0 };
                let mut row = vec![0.0; p];
                for b in 0..=a {
                    let (db_p, db_m): (&Sparse, &Sparse) = if b < px {
                        (&problem.x_basis[b], &problem.x_basis[b])
                    } else {
                        (&problem.rho_lift[b - px], &problem.rho_lift[b - px])
                    };
                    let b_sign = if b < px { -1.0 } else { 1.0 };
                    let tp = pair_trace(&pp, da_p, db_p) * a_sign * b_sign;
                    let tm = pair_trace(&pm, da_m, db_m);
                    row[b] = mu * (tp + tm);
                }
                row
            });
            let mut hneg = vec![vec![0.0; p]; p];
            for a in 0..p {
                for b in 0..=a {
                    hneg[a][b] = rows[a][b];
                    hneg[b][a] = rows[a][b];
                }
            }

            let delta = match solve_spd(hneg, &grad) {
                Some(delta) => delta,
                // Past float resolution for this barrier weight: keep the
                // last centered iterate and report the looser gap.
                None if mu < 1.0 => {
                    solver_stalled = true;
                    break;
                }
                None => {
                    return Err(Error::Numerical("Newton system not definite".into()))
                }
            };
            let base = problem
                .barrier_value(&xc, &sc, mu)
                .ok_or_else(|| Error::Numerical("iterate left the cone".into()))?;
            let decrement: f64 = grad.iter().zip(&delta).map(|(g, d)| g * d).sum();
            if !decrement.is_finite() || decrement <= 1e-12 * (1.0 + base.abs()) {
                break;
            }
            let mut t = 1.0;
            let mut stepped = false;
            for _ in 0..60 {
                let xt: Vec<f64> =
                    xc.iter().zip(&delta[..px]).map(|(v, d)| v + t * d).collect();
                let st: Vec<f64> = sc
                    .iter()
                    .zip(&delta[px..])
                    .map(|(v, d)| v + t * d)
                    .collect();
                if let Some(cand) = problem.barrier_value(&xt, &st, mu) {
                    if cand >= base + 0.25 * t * decrement {
                        xc = xt;
                        sc = st;
                        stepped = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !stepped {
                break;
            }
        }
        if solver_stalled || barrier_dim * mu * scale <= 0.5 * opts.gap_tol {
            break;
        }
        mu /= 5.0;
    }

    Ok(DiamondReport {
        value: problem.linear_value(&xc) * scale,
        gap: barrier_dim * mu * scale,
    })
}

/// Unnormalized Choi matrix of a weighted Kraus map on out (x) in.
pub fn choi_hat(map: &KrausMap) -> ComplexMatrix {
    let dd = map.out_dim() * map.in_dim();
    let mut j = ComplexMatrix::zeros(dd, dd);
    for (w, k) in map.terms() {
        let v = k.vectorize();
        j = j.add_m(&outer(&v, &v).scale(*w));
    }
    j
}

/// Diamond norm of a (difference of) weighted Kraus map(s).
pub fn diamond_norm(map: &KrausMap, opts: &DiamondOptions) -> Result<DiamondReport> {
    diamond_norm_choi(&choi_hat(map), map.out_dim(), map.in_dim(), opts)
}

/// `‖a − b‖⋄` for two maps with matching dimensions.
pub fn diamond_distance(
    a: &KrausMap,
    b: &KrausMap,
    opts: &DiamondOptions,
) -> Result<DiamondReport> {
    diamond_norm(&KrausMap::difference(a, b)?, opts)
}

/// Distance from the origin to the convex hull of the eigenvalues of a
/// unitary: 0 when no open half-plane contains the spectrum, otherwise the
/// chord distance set by the largest gap between consecutive eigenphases.
pub fn hull_distance(u: &ComplexMatrix) -> Result<f64> {
    let eigs = unitary_eigenvalues(u)?;
    let mut phases: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = phases.len();
    let mut max_gap = phases[0] + 2.0 * PI - phases[n - 1];
    for i in 1..n {
        max_gap = max_gap.max(phases[i] - phases[i - 1]);
    }
    Ok(if max_gap <= PI {
        0.0
    } else {
        ((2.0 * PI - max_gap) / 2.0).cos().clamp(0.0, 1.0)
    })
}

/// `‖Ad_u − Ad_v‖⋄ = 2·sqrt(1 − ν²)` with `ν` the hull distance of `u†v`.
pub fn unitary_pair_diamond(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let d = u.dim()?;
    if v.dim()? != d {
        return Err(Error::DimMismatch(
            "unitary pair differs in dimension".into(),
        ));
    }
    let nu = hull_distance(&u.adjoint().matmul(v))?;
    Ok(2.0 * (1.0 - nu * nu).max(0.0).sqrt())
}

/// Lower bound on the diamond norm by sampling input states on the doubled
/// space: the maximally entangled probe first, then Hilbert–Schmidt random
/// pure states.
pub fn mc_lower_bound(map: &KrausMap, trials: usize, seed: u64) -> Result<f64> {
    let n = map.in_dim();
    let values = exec::indexed_map(trials + 1, |i| -> Result<f64> {
        let psi = if i == 0 {
            ComplexMatrix::identity(n).scale_re(1.0 / (n as f64).sqrt())
        } else {
            let g = ginibre(n, n, &mut derived_rng(seed, i as u64));
            g.scale_re(1.0 / g.frobenius_norm())
        };
        // (Θ (x) id)(|ψ><ψ|) with vec(ψ) the state vector.
        let dd = map.out_dim() * n;
        let mut h = ComplexMatrix::zeros(dd, dd);
        for (w, k) in map.terms() {
            let v = k.matmul(&psi).vectorize();
            h = h.add_m(&outer(&v, &v).scale(*w));
        }
        let eig = hermitian_eig(&h)?;
        Ok(eig.values.iter().map(|v| v.abs()).sum())
    });
    let mut best = 0.0f64;
    for v in values {
        best = best.max(v?);
    }
    Ok(best)
}
