//! Derivative-free local search used by the measure evaluators:
//! finite-difference ascent over tuples of unitaries (polar retraction) and
//! over density matrices (Cholesky chart), both monotone under backtracking.

use crate::error::Result;
use crate::matcore::{cholesky, polar_unitary, ComplexMatrix};
use num_complex::Complex64;

pub struct AscentOptions {
    pub max_iters: usize,
    pub fd_step: f64,
    pub tol: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            max_iters: 120,
            fd_step: 1e-5,
            tol: 1e-9,
        }
    }
}

/// Hermitian basis of a d×d space: diagonal units, then the real and
/// imaginary combinations of each off-diagonal pair.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m.set(k, k, Complex64::new(1.0, 0.0));
        out.push(m);
    }
    let inv = 1.0 / 2f64.sqrt();
    for a in 0..d {
        for b in (a + 1)..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s.set(a, b, Complex64::new(inv, 0.0));
            s.set(b, a, Complex64::new(inv, 0.0));
            out.push(s);
            let mut t = ComplexMatrix::zeros(d, d);
            t.set(a, b, Complex64::new(0.0, inv));
            t.set(b, a, Complex64::new(0.0, -inv));
            out.push(t);
        }
    }
    out
}

/// Geodesic-like step `U · polar(1 + itH)`; `1 + itH` is never singular for
/// Hermitian `H`, so the retraction always lands back on the unitary group.
fn retract(u: &ComplexMatrix, h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let step =
        ComplexMatrix::identity(u.rows()).add_m(&h.scale(Complex64::new(0.0, t)));
    polar_unitary(&u.matmul(&step))
}

/// Monotone maximization of `f` over a tuple of unitaries from the given
/// start. Returns the best point and value; stalls (no backtracked step that
/// improves) terminate early.
pub fn maximize_over_unitaries(
    start: &[ComplexMatrix],
    f: &dyn Fn(&[ComplexMatrix]) -> Result<f64>,
    opts: &AscentOptions,
) -> Result<(Vec<ComplexMatrix>, f64)> {
    let mut current = start.to_vec();
    let mut value = f(&current)?;
    let bases: Vec<Vec<ComplexMatrix>> =
        current.iter().map(|u| hermitian_basis(u.rows())).collect();
    for _ in 0..opts.max_iters {
        let mut dirs = Vec::with_capacity(current.len());
        let mut grad_norm2 = 0.0;
        for b in 0..current.len() {
            let mut g = ComplexMatrix::zeros(current[b].rows(), current[b].cols());
            for h in &bases[b] {
                let mut probe = current.clone();
                probe[b] = retract(&current[b], h, opts.fd_step)?;
                let df = (f(&probe)? - value) / opts.fd_step;
                g = g.add_m(&h.scale_re(df));
                grad_norm2 += df * df;
            }
            dirs.push(g);
        }
        if grad_norm2.sqrt() <= opts.tol {
            break;
        }
        let mut t = 1.0 / (1.0 + grad_norm2.sqrt());
        let mut improved = false;
        for _ in 0..40 {
            let mut cand = Vec::with_capacity(current.len());
            for (u, g) in current.iter().zip(&dirs) {
                cand.push(retract(u, g, t)?);
            }
            let fv = f(&cand)?;
            if fv > value + 1e-14 {
                current = cand;
                value = fv;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((current, value))
}

fn state_of(l: &ComplexMatrix) -> ComplexMatrix {
    let m = l.matmul(&l.adjoint());
    let tr = m.trace().re;
    m.scale_re(1.0 / tr.max(1e-300))
}

/// Monotone maximization of `f` over density matrices, moving the entries of
/// a lower-triangular factor `L` with `tau = LL†/Tr`. The chart is smooth and
/// surjective onto full-rank states; the start is regularized to keep it so.
pub fn maximize_over_states(
    start: &ComplexMatrix,
    f: &dyn Fn(&ComplexMatrix) -> Result<f64>,
    opts: &AscentOptions,
) -> Result<(ComplexMatrix, f64)> {
    let n = start.rows();
    let reg = start.add_m(&ComplexMatrix::identity(n).scale_re(1e-8));
    let reg = reg.scale_re(1.0 / reg.trace().re);
    let mut l = cholesky(&reg)?;
    let mut value = f(&state_of(&l))?;
    // One parameter per (entry, component) of the lower triangle.
    let params: Vec<(usize, usize, bool)> = (0..n)
        .flat_map(|r| (0..=r).flat_map(move |c| [(r, c, false), (r, c, true)]))
        .collect();
    for _ in 0..opts.max_iters {
        let mut grad = vec![0.0; params.len()];
        let mut grad_norm2 = 0.0;
        for (p, &(r, c, imag)) in params.iter().enumerate() {
            let mut probe = l.clone();
            let delta = if imag {
                Complex64::new(0.0, opts.fd_step)
            } else {
                Complex64::new(opts.fd_step, 0.0)
            };
            probe.set(r, c, probe.get(r, c) + delta);
            let df = (f(&state_of(&probe))? - value) / opts.fd_step;
            grad[p] = df;
            grad_norm2 += df * df;
        }
        if grad_norm2.sqrt() <= opts.tol {
            break;
        }
        let mut t = 1.0 / (1.0 + grad_norm2.sqrt());
        let mut improved = false;
        for _ in 0..40 {
            let mut cand = l.clone();
            for (p, &(r, c, imag)) in params.iter().enumerate() {
                let delta = if imag {
                    Complex64::new(0.0, t * grad[p])
                } else {
                    Complex64::new(t * grad[p], 0.0)
                };
                cand.set(r, c, cand.get(r, c) + delta);
            }
            let fv = f(&state_of(&cand))?;
            if fv > value + 1e-14 {
                l = cand;
                value = fv;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((state_of(&l), value))
}
