//! Constructive witnesses and falsifiers for the dynamics-tensor and
//! perfect-tensor hierarchy: every normalized operator is a dynamics tensor
//! under some transposition (and a proper one under a unital transposition in
//! even dimension), no operator survives all transpositions, none but scalars
//! survive all unital ones, and symmetric/antisymmetric operators survive the
//! full fractional family.

use crate::error::{Error, Result};
use crate::exec;
use crate::gentrans::fractional_transpose;
use crate::matcore::{
    frame_unitary, gates, inner, phi_plus_vector, ComplexMatrix, MAX_DIM,
};
use num_complex::Complex64;
use std::f64::consts::PI;

/// An n-leg tensor stored flat, big-endian in the leg order.
pub struct TensorNode {
    entries: Vec<Complex64>,
    leg_dims: Vec<usize>,
}

impl TensorNode {
    /// Wraps a matrix as a tensor; entries are read row-major, so a
    /// `d (x) d` matrix with legs `[d, d]` keeps (row, col) indexing.
    pub fn new(data: &ComplexMatrix, leg_dims: Vec<usize>) -> Result<Self> {
        let total: usize = leg_dims.iter().product();
        if leg_dims.is_empty() || leg_dims.contains(&0) {
            return Err(Error::InvalidInput("legs must have nonzero dimension".into()));
        }
        if leg_dims.iter().any(|&d| d > MAX_DIM) {
            return Err(Error::DimTooLarge {
                dim: *leg_dims.iter().max().unwrap(),
                max: MAX_DIM,
            });
        }
        if total != data.rows() * data.cols() || total > MAX_DIM * MAX_DIM {
            return Err(Error::DimMismatch(format!(
                "legs {:?} do not flatten to a {}x{} matrix",
                leg_dims,
                data.rows(),
                data.cols()
            )));
        }
        let mut entries = Vec::with_capacity(total);
        for r in 0..data.rows() {
            for c in 0..data.cols() {
                entries.push(data.get(r, c));
            }
        }
        Ok(TensorNode { entries, leg_dims })
    }

    pub fn leg_dims(&self) -> &[usize] {
        &self.leg_dims
    }

    pub fn leg_count(&self) -> usize {
        self.leg_dims.len()
    }

    /// Reshapes into a matrix whose rows are indexed by `row_legs` (ascending)
    /// and columns by the remaining legs (ascending).
    pub fn bipartition_matrix(&self, row_legs: &[usize]) -> Result<ComplexMatrix> {
        let n = self.leg_dims.len();
        let mut rows: Vec<usize> = row_legs.to_vec();
        rows.sort_unstable();
        rows.dedup();
        if rows.len() != row_legs.len() || rows.iter().any(|&k| k >= n) {
            return Err(Error::InvalidInput("row legs must be distinct and in range".into()));
        }
        let cols: Vec<usize> = (0..n).filter(|k| !rows.contains(k)).collect();
        let rdim: usize = rows.iter().map(|&k| self.leg_dims[k]).product();
        let cdim: usize = cols.iter().map(|&k| self.leg_dims[k]).product();
        let mut m = ComplexMatrix::zeros(rdim, cdim);
        let mut digits = vec![0usize; n];
        for (flat, &value) in self.entries.iter().enumerate() {
            let mut rem = flat;
            for k in (0..n).rev() {
                digits[k] = rem % self.leg_dims[k];
                rem /= self.leg_dims[k];
            }
            let r = rows.iter().fold(0, |acc, &k| acc * self.leg_dims[k] + digits[k]);
            let c = cols.iter().fold(0, |acc, &k| acc * self.leg_dims[k] + digits[k]);
            m.set(r, c, value);
        }
        Ok(m)
    }
}

/// Unitary on the space of `u`, `v` (unit vectors) sending `u` to `v`:
/// a global phase aligning the overlap followed by a Householder reflection.
fn vector_mapper(u: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    let n = u.rows();
    let overlap = inner(v, u);
    let beta = if overlap.norm() > 0.0 { -overlap.arg() } else { 0.0 };
    let phase = Complex64::from_polar(1.0, beta);
    let aligned = u.scale(phase);
    let z = aligned.sub_m(v);
    let zz = inner(&z, &z).re;
    if zz < 1e-28 {
        return ComplexMatrix::identity(n).scale(phase);
    }
    let mut h = ComplexMatrix::identity(n);
    for r in 0..n {
        for c in 0..n {
            let add = z.get(r, 0) * z.get(c, 0).conj() * (-2.0 / zz);
            h.set(r, c, h.get(r, c) + add);
        }
    }
    h.scale(phase)
}

/// Kernel `W` with `x^{T[W]} = (‖x‖₂/√d)·1`: maps the normalized
/// vectorization of `x` onto the maximally entangled vector.
pub fn dynamics_tensor_witness(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = x.dim()?;
    let norm = x.frobenius_norm();
    if norm < 1e-14 {
        return Err(Error::InvalidInput("zero matrix has no dynamics witness".into()));
    }
    let u = x.vectorize().scale_re(1.0 / norm);
    Ok(vector_mapper(&u, &phi_plus_vector(d)))
}

/// Traceless antisymmetric (and anti-Hermitian) unitary: a direct sum of
/// `iσ_Y` blocks. Needs even dimension.
pub fn antisymmetric_unitary(d: usize) -> Result<ComplexMatrix> {
    if !d.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "no antisymmetric unitary in odd dimension {d}"
        )));
    }
    let mut j = ComplexMatrix::zeros(d, d);
    for k in 0..d / 2 {
        j.set(2 * k, 2 * k + 1, Complex64::new(1.0, 0.0));
        j.set(2 * k + 1, 2 * k, Complex64::new(-1.0, 0.0));
    }
    Ok(j)
}

/// Unital kernel `W` making `x^{T[W]}` proportional to a unitary, for even
/// dimension: after the global phase `e^{iγ}x = a·1 + J` (a real ≥ 0), the
/// J-direction is steered onto a traceless anti-Hermitian unitary while the
/// maximally entangled vector stays fixed. Returns `(W, γ)`.
pub fn proper_dynamics_witness(x: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let d = x.dim()?;
    if d % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "proper dynamics witness needs even dimension, got {d}"
        )));
    }
    if x.frobenius_norm() < 1e-14 {
        return Err(Error::InvalidInput("zero matrix has no dynamics witness".into()));
    }
    let t = x.trace() / d as f64;
    let gamma = if t.norm() > 0.0 { -t.arg() } else { 0.0 };
    let phased = x.scale(Complex64::from_polar(1.0, gamma));
    let traceless = phased.sub_m(&ComplexMatrix::identity(d).scale(t * Complex64::from_polar(1.0, gamma)));
    let jnorm = traceless.frobenius_norm();

    let phi = phi_plus_vector(d);
    let mut from = vec![phi.clone()];
    let mut to = vec![phi];
    if jnorm > 1e-12 {
        from.push(traceless.vectorize().scale_re(1.0 / jnorm));
        let target = antisymmetric_unitary(d)?;
        to.push(target.vectorize().scale_re(1.0 / (d as f64).sqrt()));
    }
    Ok((frame_unitary(&from, &to)?, gamma))
}

/// The controlled un-shift `V = Σ_i S^{-i} ⊗ |i⟩⟨i|`; its defining property
/// is `1^{T[V]} = |0⟩(Σ_i ⟨i|)`, a rank-1 operator.
pub fn controlled_unshift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |rc, cc| {
        let (a, b) = (rc / d, rc % d);
        let (ap, bp) = (cc / d, cc % d);
        if b == bp && a == (ap + d - b % d) % d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Kernel `W = V(m†⊗1)` driving the unitary `m` to the rank-1 image
/// `1^{T[V]}`, so no unitary stays unitary under every transposition.
pub fn totally_perfect_falsifier(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = m.dim()?;
    if !m.is_unitary(1e-8) {
        return Err(Error::NotUnitary(
            m.adjoint().matmul(m).max_abs_diff(&ComplexMatrix::identity(d)),
        ));
    }
    let v = controlled_unshift(d);
    Ok(v.matmul(&m.adjoint().tensor(&ComplexMatrix::identity(d))))
}

/// Unital kernel under which the non-scalar unitary `m` acquires a
/// non-unitary image; scalars admit none (they are fixed by every unital
/// kernel up to phase). The trace part is kept on the identity direction and
/// the traceless direction is steered to the cyclic shift — or, when the
/// trace (nearly) vanishes and the shift image would stay unitary, to a
/// rank-deficient target instead.
pub fn properly_perfect_falsifier(
    m: &ComplexMatrix,
    tol: f64,
) -> Result<Option<ComplexMatrix>> {
    let d = m.dim()?;
    if !m.is_unitary(1e-8) {
        return Err(Error::NotUnitary(
            m.adjoint().matmul(m).max_abs_diff(&ComplexMatrix::identity(d)),
        ));
    }
    let t = m.trace() / d as f64;
    let scalar_dev = m
        .sub_m(&ComplexMatrix::identity(d).scale(t))
        .frobenius_norm();
    if scalar_dev <= tol * (d as f64).sqrt() {
        return Ok(None);
    }
    let gamma = if t.norm() > 0.0 { -t.arg() } else { 0.0 };
    let phased = m.scale(Complex64::from_polar(1.0, gamma));
    let a = t.norm();
    let traceless = phased.sub_m(&ComplexMatrix::identity(d).scale_re(a));
    let jnorm = traceless.frobenius_norm();

    let phi = phi_plus_vector(d);
    let target = if a > 1e-6 {
        gates::shift(d).vectorize().scale_re(1.0 / (d as f64).sqrt())
    } else {
        let mut hop = ComplexMatrix::zeros(d, d);
        hop.set(0, 1, Complex64::new(1.0, 0.0));
        hop.vectorize()
    };
    let from = vec![phi.clone(), traceless.vectorize().scale_re(1.0 / jnorm)];
    let to = vec![phi, target];
    Ok(Some(frame_unitary(&from, &to)?))
}

/// Balanced bipartitions of `0..n` that contain leg 0; the complements give
/// transposed reshapes, so these cover all unitarity checks.
fn balanced_bipartitions(n: usize) -> Vec<Vec<usize>> {
    let half = n / 2;
    let mut out = Vec::new();
    let mut cur = vec![0usize];
    fn grow(cur: &mut Vec<usize>, next: usize, n: usize, half: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == half {
            out.push(cur.clone());
            return;
        }
        for k in next..n {
            cur.push(k);
            grow(cur, k + 1, n, half, out);
            cur.pop();
        }
    }
    grow(&mut cur, 1, n, half, &mut out);
    out
}

/// True when every balanced bipartition reshapes to a unitary after the
/// global normalization fixed by the Schatten-2 norm.
pub fn is_perfect_tensor(t: &TensorNode, tol: f64) -> Result<bool> {
    let n = t.leg_count();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidInput("perfect tensors need an even leg count".into()));
    }
    let q = t.leg_dims()[0];
    if t.leg_dims().iter().any(|&d| d != q) {
        return Err(Error::InvalidInput("perfect tensors need equal leg dimensions".into()));
    }
    let parts = balanced_bipartitions(n);
    let checks = exec::indexed_map(parts.len(), |i| {
        let m = t.bipartition_matrix(&parts[i]).expect("valid bipartition");
        let norm = m.frobenius_norm();
        if norm < 1e-14 {
            return false;
        }
        let scale = (q as f64).powi((n / 2) as i32).sqrt() / norm;
        m.scale_re(scale).is_unitary(tol)
    });
    Ok(checks.into_iter().all(|ok| ok))
}

/// θ-grid with Chebyshev spacing over (0, 2π): denser near the endpoints,
/// where fractional images approach the original operator and its transpose.
pub fn chebyshev_thetas(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| PI * (1.0 - ((k as f64 + 0.5) * PI / count as f64).cos()))
        .collect()
}

/// True when the fractional image stays unitary at every grid angle.
pub fn is_rotationally_perfect(m: &ComplexMatrix, grid: &[f64], tol: f64) -> bool {
    let verdicts = exec::indexed_map(grid.len(), |i| {
        fractional_transpose(m, grid[i])
            .map(|n| n.is_unitary(tol))
            .unwrap_or(false)
    });
    verdicts.into_iter().all(|ok| ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gentrans::{gen_transpose, is_unital_gt};
    use crate::matcore::singular_values;
    use crate::sampling::{derived_rng, ginibre, random_unitary};

    fn image(x: &ComplexMatrix, w: &ComplexMatrix) -> ComplexMatrix {
        gen_transpose(x, w).unwrap()
    }

    #[test]
    fn dynamics_witness_flattens_to_identity() {
        let x = ComplexMatrix::diagonal(&[
            Complex64::new(2f64.sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let w = dynamics_tensor_witness(&x).unwrap();
        assert!(w.is_unitary(1e-12));
        assert!(image(&x, &w).approx_eq(&ComplexMatrix::identity(2), 1e-12));

        let mut rng = derived_rng(11, 0);
        for d in [2usize, 3, 5] {
            let x = ginibre(d, d, &mut rng);
            let w = dynamics_tensor_witness(&x).unwrap();
            let scaled = image(&x, &w);
            let factor = x.frobenius_norm() / (d as f64).sqrt();
            assert!(scaled.approx_eq(&ComplexMatrix::identity(d).scale_re(factor), 1e-10));
        }
    }

    #[test]
    fn proper_witness_is_unital_and_unitarizes_normalized_input() {
        let x = gates::x();
        let (w, gamma) = proper_dynamics_witness(&x).unwrap();
        assert!(w.is_unitary(1e-12));
        assert!(is_unital_gt(&w, 1e-12).unwrap());
        assert_eq!(gamma, 0.0);
        // Traceless input lands exactly on the antisymmetric unitary.
        assert!(image(&x, &w).approx_eq(&antisymmetric_unitary(2).unwrap(), 1e-12));

        let y = ComplexMatrix::diagonal(&[
            Complex64::new(2f64.sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let (w, _) = proper_dynamics_witness(&y).unwrap();
        assert!(is_unital_gt(&w, 1e-12).unwrap());
        assert!(image(&y, &w).is_unitary(1e-10));

        let mut rng = derived_rng(11, 1);
        for d in [2usize, 4] {
            let raw = ginibre(d, d, &mut rng);
            let x = raw.scale_re((d as f64).sqrt() / raw.frobenius_norm());
            let (w, _) = proper_dynamics_witness(&x).unwrap();
            assert!(is_unital_gt(&w, 1e-10).unwrap());
            assert!(image(&x, &w).is_unitary(1e-9));
        }
    }

    #[test]
    fn proper_witness_rejects_odd_dimension() {
        assert!(proper_dynamics_witness(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn totally_perfect_falsifier_yields_rank_one_images() {
        let expected = ComplexMatrix::from_fn(2, 2, |r, _| {
            Complex64::new(if r == 0 { 1.0 } else { 0.0 }, 0.0)
        });
        let w = totally_perfect_falsifier(&ComplexMatrix::identity(2)).unwrap();
        assert!(image(&ComplexMatrix::identity(2), &w).approx_eq(&expected, 1e-12));

        let mut rng = derived_rng(11, 2);
        let m = random_unitary(3, &mut rng);
        let w = totally_perfect_falsifier(&m).unwrap();
        let img = image(&m, &w);
        let sv = singular_values(&img).unwrap();
        assert!((sv[0] - 3f64.sqrt()).abs() < 1e-10);
        assert!(sv[1].abs() < 1e-10 && sv[2].abs() < 1e-10);
    }

    #[test]
    fn properly_perfect_falsifier_spares_only_scalars() {
        let scalar = ComplexMatrix::identity(3).scale(Complex64::from_polar(1.0, 0.9));
        assert!(properly_perfect_falsifier(&scalar, 1e-9).unwrap().is_none());

        // Trace-carrying case: the image realizes cosθ·1 + sinθ·shift.
        let s = ComplexMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        let w = properly_perfect_falsifier(&s, 1e-9).unwrap().unwrap();
        assert!(is_unital_gt(&w, 1e-12).unwrap());
        let n = image(&s, &w);
        assert!(!n.is_unitary(1e-6));
        let gram = n.adjoint().matmul(&n);
        let expected = ComplexMatrix::identity(2).add_m(&gates::x());
        assert!(gram.approx_eq(&expected, 1e-10));

        // Traceless case (the shift image would stay unitary): rank drop.
        let h = gates::h();
        let w = properly_perfect_falsifier(&h, 1e-9).unwrap().unwrap();
        assert!(is_unital_gt(&w, 1e-12).unwrap());
        let img = image(&h, &w);
        assert!(!img.is_unitary(1e-6));
        let sv = singular_values(&img).unwrap();
        assert!(sv[1].abs() < 1e-10);
    }

    #[test]
    fn perfect_tensor_verdicts() {
        // Any unitary is perfect as a 2-leg tensor.
        let mut rng = derived_rng(11, 3);
        let u = random_unitary(4, &mut rng);
        let node = TensorNode::new(&u, vec![4, 4]).unwrap();
        assert!(is_perfect_tensor(&node, 1e-10).unwrap());

        // The 4-leg qutrit code tensor |i, j, i+j, i+2j⟩ is perfect.
        let ame = ComplexMatrix::from_fn(81, 1, |f, _| {
            let (i, r1) = (f / 27, f % 27);
            let (j, r2) = (r1 / 9, r1 % 9);
            let (k, l) = (r2 / 3, r2 % 3);
            if k == (i + j) % 3 && l == (i + 2 * j) % 3 {
                Complex64::new(1.0 / 3.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let node = TensorNode::new(&ame, vec![3, 3, 3, 3]).unwrap();
        assert!(is_perfect_tensor(&node, 1e-10).unwrap());

        // Swap as a 4-leg tensor fails (the reshuffle bipartition is rank 1).
        let node = TensorNode::new(&gates::swap(2), vec![2, 2, 2, 2]).unwrap();
        assert!(!is_perfect_tensor(&node, 1e-10).unwrap());
    }

    #[test]
    fn perfect_tensor_is_leg_permutation_invariant() {
        // Relabel the code tensor legs by the cycle (0 1 2 3) -> (1 2 3 0).
        let relabeled = ComplexMatrix::from_fn(81, 1, |f, _| {
            let (l, r1) = (f / 27, f % 27);
            let (i, r2) = (r1 / 9, r1 % 9);
            let (j, k) = (r2 / 3, r2 % 3);
            if k == (i + j) % 3 && l == (i + 2 * j) % 3 {
                Complex64::new(1.0 / 3.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let node = TensorNode::new(&relabeled, vec![3, 3, 3, 3]).unwrap();
        assert!(is_perfect_tensor(&node, 1e-10).unwrap());
    }

    #[test]
    fn rotational_perfection_grid_verdicts() {
        let grid = chebyshev_thetas(64);
        assert_eq!(grid.len(), 64);
        assert!(grid.iter().all(|&t| t > 0.0 && t < 2.0 * PI));
        assert!(grid.windows(2).all(|w| w[0] < w[1]));

        // Symmetric unitaries are invariant; antisymmetric ones pick up a phase.
        assert!(is_rotationally_perfect(&gates::h(), &grid, 1e-10));
        let xz = gates::x().matmul(&gates::z());
        assert!(is_rotationally_perfect(&xz, &grid, 1e-10));

        // A symmetric (+) antisymmetric block mix still passes.
        let mut block = ComplexMatrix::identity(4);
        let a = antisymmetric_unitary(2).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                block.set(2 + r, 2 + c, a.get(r, c));
            }
        }
        assert!(is_rotationally_perfect(&block, &grid, 1e-10));

        // Mixing symmetric and antisymmetric parts on the same support fails,
        // with a concrete failure angle at π/4 where N†N = 1 + (i/√2)XZ.
        let mixed = ComplexMatrix::identity(2)
            .add_m(&xz.scale(Complex64::new(0.0, 1.0)))
            .scale_re(1.0 / 2f64.sqrt());
        assert!(!is_rotationally_perfect(&mixed, &grid, 1e-10));
        let quarter = fractional_transpose(&mixed, PI / 4.0).unwrap();
        let defect = quarter
            .adjoint()
            .matmul(&quarter)
            .max_abs_diff(&ComplexMatrix::identity(2));
        assert!((defect - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bipartition_matrix_reshapes_consistently() {
        let m = ComplexMatrix::from_fn(4, 4, |r, c| Complex64::new((4 * r + c) as f64, 0.0));
        let node = TensorNode::new(&m, vec![2, 2, 2, 2]).unwrap();
        // Row legs {0,1} reproduce the original matrix.
        assert!(node.bipartition_matrix(&[0, 1]).unwrap().approx_eq(&m, 0.0));
        // Row legs {0,2} give the standard reshuffle: entry ((a,b),(c,d)) -> ((a,c),(b,d)).
        let resh = node.bipartition_matrix(&[0, 2]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        assert_eq!(
                            resh.get(2 * a + c, 2 * b + d),
                            m.get(2 * a + b, 2 * c + d)
                        );
                    }
                }
            }
        }
    }
}
