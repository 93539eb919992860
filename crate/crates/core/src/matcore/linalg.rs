//! Dense decompositions on small complex matrices: Hermitian eigensolver
//! (cyclic Jacobi), singular values, polar factor, PSD square root, Cholesky,
//! Schatten norms, state fidelity, and eigenvalues of unitaries.
//!
//! Everything here is deterministic: sweep order, sorting, tie-breaking, and
//! eigenvector phase fixing are all fully specified, so repeated runs (and
//! parallel/sequential builds) produce bit-identical results.

use super::{ComplexMatrix, MAX_DIM};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Decompositions operate on derived spaces (vectorized operators, Choi
/// matrices), which can be quadratically larger than a system dimension.
const MAX_EIG_DIM: usize = MAX_DIM * MAX_DIM;

/// Hermitian eigendecomposition, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigH {
    /// Real eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`; each column's
    /// largest-magnitude entry is made real positive.
    pub vectors: ComplexMatrix,
}

fn offdiag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                acc += a.get(p, q).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// The non-Hermitian part of the input is discarded up front. Fails only on
/// shape problems or (in principle) non-convergence.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigH> {
    let n = m.dim()?;
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if n > MAX_EIG_DIM {
        return Err(Error::DimTooLarge {
            dim: n,
            max: MAX_EIG_DIM,
        });
    }
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);
    let mut converged = false;
    for _sweep in 0..150 {
        if offdiag_norm(&a) <= 1e-14 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a.get(p, q);
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let gamma = a.get(q, q).re;
                let delta = gamma - alpha;
                let dd = (delta * delta + 4.0 * babs * babs).sqrt();
                // Inner root of |b| t^2 - delta t - |b| = 0, so |t| <= 1.
                let t = if delta >= 0.0 {
                    -2.0 * babs / (dd + delta)
                } else {
                    2.0 * babs / (dd - delta)
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = b / babs;
                let sigma = phase.conj() * s;
                // A <- G† A G and V <- V G with G the identity outside the
                // (p,q) block, where it is [[c, -conj(sigma)], [sigma, c]].
                for r in 0..n {
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    a.set(r, p, arp * c + arq * sigma);
                    a.set(r, q, arp * (-sigma.conj()) + arq * c);
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, vrp * c + vrq * sigma);
                    v.set(r, q, vrp * (-sigma.conj()) + vrq * c);
                }
                for cc in 0..n {
                    let apc = a.get(p, cc);
                    let aqc = a.get(q, cc);
                    a.set(p, cc, apc * c + aqc * sigma.conj());
                    a.set(q, cc, apc * (-sigma) + aqc * c);
                }
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, Complex64::new(app.re, 0.0));
                a.set(q, q, Complex64::new(aqq.re, 0.0));
            }
        }
    }
    if !converged && offdiag_norm(&a) > 1e-10 * scale {
        return Err(Error::Numerical("Jacobi eigensolver did not converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .re
            .partial_cmp(&a.get(i, i).re)
            .unwrap()
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        // Phase-fix: make the largest-magnitude entry real positive.
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for r in 0..n {
            let ab = v.get(r, src).norm();
            if ab > best_abs {
                best_abs = ab;
                best = r;
            }
        }
        let pivot = v.get(best, src);
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for r in 0..n {
            vectors.set(r, col, v.get(r, src) * phase);
        }
    }
    Ok(EigH { values, vectors })
}

/// Singular values in descending order, via the Gram matrix of the smaller side.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = if m.rows() <= m.cols() {
        m.matmul(&m.adjoint())
    } else {
        m.adjoint().matmul(m)
    };
    let eig = hermitian_eig(&gram)?;
    Ok(eig.values.iter().map(|&v| v.max(0.0).sqrt()).collect())
}

/// Schatten p-norm for `p >= 1`; pass `f64::INFINITY` for the operator norm.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if p < 1.0 || p.is_nan() {
        return Err(Error::InvalidInput(format!("Schatten order {p} must be >= 1")));
    }
    let sv = singular_values(m)?;
    if p.is_infinite() {
        return Ok(sv.first().copied().unwrap_or(0.0));
    }
    Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Unitary factor of the polar decomposition `M = U P`, `P` PSD.
///
/// On the kernel of `M` the factor is completed deterministically
/// (greedy Gram-Schmidt over standard basis vectors), so singular inputs
/// still yield a well-defined unitary; `polar_unitary(diag(2, 0)) = 1`.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.dim()?;
    let eig = hermitian_eig(&m.adjoint().matmul(m))?;
    let cutoff = 1e-12 * eig.values.first().copied().unwrap_or(0.0).max(1e-30).sqrt();
    let mut left: Vec<ComplexMatrix> = Vec::with_capacity(n);
    for (i, &lam) in eig.values.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        if s <= cutoff {
            break;
        }
        let vi = column(&eig.vectors, i);
        let mut ui = m.matmul(&vi).scale_re(1.0 / s);
        // Re-orthonormalize against earlier columns to stop drift.
        for prev in &left {
            let ov = super::inner(prev, &ui);
            ui = ui.sub_m(&prev.scale(ov));
        }
        let norm = ui.frobenius_norm();
        if norm <= 1e-8 {
            return Err(Error::Numerical("polar factor column collapsed".into()));
        }
        left.push(ui.scale_re(1.0 / norm));
    }
    let left = complete_orthonormal(left, n)?;
    // U = sum_i u_i v_i†.
    let mut u = ComplexMatrix::zeros(n, n);
    for (i, ui) in left.iter().enumerate() {
        let vi = column(&eig.vectors, i);
        u = u.add_m(&super::outer(ui, &vi));
    }
    Ok(u)
}

/// PSD square root; negative eigenvalues from numerical noise are clamped.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.dim()?;
    let eig = hermitian_eig(m)?;
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, &lam) in eig.values.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        let vi = column(&eig.vectors, i);
        out = out.add_m(&super::outer(&vi, &vi).scale_re(s));
    }
    Ok(out)
}

/// Cholesky factor `L` (lower triangular, `M = L L†`) of a Hermitian
/// positive-definite matrix; fails on any non-positive pivot, which doubles
/// as a strict positive-definiteness test.
pub fn cholesky(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.dim()?;
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if d <= 0.0 {
            return Err(Error::Numerical(format!("non-positive pivot at {j}")));
        }
        let ljj = d.sqrt();
        l.set(j, j, Complex64::new(ljj, 0.0));
        for i in (j + 1)..n {
            let mut acc = m.get(i, j);
            for k in 0..j {
                acc -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, acc / ljj);
        }
    }
    Ok(l)
}

/// Uhlmann fidelity `F(rho, sigma) = (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2`.
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let n = rho.dim()?;
    if sigma.dim()? != n {
        return Err(Error::DimMismatch("fidelity arguments differ in size".into()));
    }
    let s = sqrt_psd(sigma)?;
    let inner = s.matmul(rho).matmul(&s);
    let eig = hermitian_eig(&inner)?;
    let root_sum: f64 = eig.values.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok(root_sum * root_sum)
}

/// Sine metric `sqrt(1 - F(rho, sigma))`, a distance on states.
pub fn sine_metric(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let f = fidelity(rho, sigma)?.min(1.0);
    Ok((1.0 - f).sqrt())
}

/// Closest maximally entangled state vector to `psi` (length `d*d`), in
/// fidelity: `vec(polar_unitary(unvec(psi)))/sqrt(d)`.
pub fn nearest_max_entangled(psi: &ComplexMatrix) -> Result<ComplexMatrix> {
    if psi.cols() != 1 {
        return Err(Error::InvalidInput("expected a column vector".into()));
    }
    let dd = psi.rows();
    let d = (dd as f64).sqrt().round() as usize;
    if d * d != dd {
        return Err(Error::DimMismatch(format!(
            "vector length {dd} is not a perfect square"
        )));
    }
    let m = ComplexMatrix::unvectorize(psi, d, d)?;
    let u = polar_unitary(&m)?;
    Ok(u.vectorize().scale_re(1.0 / (d as f64).sqrt()))
}

/// Eigenvalues of a unitary matrix, sorted by descending real part then
/// descending imaginary part.
///
/// Strategy: diagonalize the Hermitian part, then split near-degenerate
/// clusters with the anti-Hermitian part; every Rayleigh quotient is
/// residual-checked against the input.
pub fn unitary_eigenvalues(u: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = u.dim()?;
    if !u.is_unitary(1e-8) {
        let dev = u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(n));
        return Err(Error::NotUnitary(dev));
    }
    let h1 = u.add_m(&u.adjoint()).scale_re(0.5);
    let h2 = u.sub_m(&u.adjoint()).scale(Complex64::new(0.0, -0.5));
    let eig = hermitian_eig(&h1)?;
    let mut basis = eig.vectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig.values[end - 1] - eig.values[end]).abs() <= 1e-6 {
            end += 1;
        }
        if end - start > 1 {
            // Refine the cluster with the anti-Hermitian part.
            let k = end - start;
            let mut block = ComplexMatrix::zeros(k, k);
            let cols: Vec<ComplexMatrix> =
                (start..end).map(|j| column(&basis, j)).collect();
            for (bi, ci) in cols.iter().enumerate() {
                let h2ci = h2.matmul(ci);
                for (bj, cj) in cols.iter().enumerate() {
                    block.set(bj, bi, super::inner(cj, &h2ci));
                }
            }
            let sub = hermitian_eig(&block)?;
            for bj in 0..k {
                let mut newcol = ComplexMatrix::zeros(n, 1);
                for (bi, ci) in cols.iter().enumerate() {
                    newcol = newcol.add_m(&ci.scale(sub.vectors.get(bi, bj)));
                }
                for r in 0..n {
                    basis.set(r, start + bj, newcol.get(r, 0));
                }
            }
        }
        start = end;
    }
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let vj = column(&basis, j);
        let uvj = u.matmul(&vj);
        let lam = super::inner(&vj, &uvj);
        if uvj.sub_m(&vj.scale(lam)).frobenius_norm() > 1e-6 {
            return Err(Error::Numerical(
                "unitary eigenvector residual too large".into(),
            ));
        }
        out.push(lam);
    }
    out.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    Ok(out)
}

/// Extends an orthonormal list of column vectors to a full orthonormal basis,
/// greedily picking the standard basis vector with the largest residual
/// (ties to the lowest index) at every step.
pub fn complete_orthonormal(mut cols: Vec<ComplexMatrix>, n: usize) -> Result<Vec<ComplexMatrix>> {
    for v in &cols {
        if v.cols() != 1 || v.rows() != n {
            return Err(Error::DimMismatch("frame vector of wrong shape".into()));
        }
    }
    while cols.len() < n {
        let mut best_vec: Option<ComplexMatrix> = None;
        let mut best_norm = -1.0;
        for k in 0..n {
            let mut e = ComplexMatrix::zeros(n, 1);
            e.set(k, 0, Complex64::new(1.0, 0.0));
            for prev in &cols {
                let ov = super::inner(prev, &e);
                e = e.sub_m(&prev.scale(ov));
            }
            let norm = e.frobenius_norm();
            if norm > best_norm + 1e-12 {
                best_norm = norm;
                best_vec = Some(e);
            }
        }
        if best_norm <= 1e-8 {
            return Err(Error::Numerical("orthonormal completion degenerated".into()));
        }
        cols.push(best_vec.expect("nonempty candidate set").scale_re(1.0 / best_norm));
    }
    Ok(cols)
}

/// Unitary sending each `from[i]` to `to[i]`; both lists must be orthonormal.
/// The action on the orthogonal complement is fixed by deterministic
/// completion of the two frames.
pub fn frame_unitary(from: &[ComplexMatrix], to: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if from.len() != to.len() {
        return Err(Error::InvalidInput("frame lists differ in length".into()));
    }
    if from.is_empty() {
        return Err(Error::InvalidInput("empty frame".into()));
    }
    let n = from[0].rows();
    for list in [from, to] {
        for (i, a) in list.iter().enumerate() {
            for (j, b) in list.iter().enumerate() {
                let ov = super::inner(a, b);
                let want = if i == j { 1.0 } else { 0.0 };
                if (ov - Complex64::new(want, 0.0)).norm() > 1e-8 {
                    return Err(Error::InvalidInput("frame is not orthonormal".into()));
                }
            }
        }
    }
    let full_from = complete_orthonormal(from.to_vec(), n)?;
    let full_to = complete_orthonormal(to.to_vec(), n)?;
    let mut u = ComplexMatrix::zeros(n, n);
    for (f, t) in full_from.iter().zip(&full_to) {
        u = u.add_m(&super::outer(t, f));
    }
    Ok(u)
}

fn column(m: &ComplexMatrix, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), 1, |r, _| m.get(r, j))
}
