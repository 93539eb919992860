//! Two-sided representations: given unitaries `u`, `v` on a bipartite space,
//! decide whether `u` is a partial generalized transposition of `v` on the
//! second leg, and construct the kernel when it is.
//!
//! The decision reduces to comparing purification marginals. Writing
//! `psi_u = vec(u)/sqrt(d_a d_b)` as a state on (A, A', B, B'), the kernel
//! exists iff the (A, A') marginals of `psi_u` and `psi_v` coincide, and in
//! that case mapping the Schmidt vectors of `psi_v` on (B, B') onto those of
//! `psi_u` yields it.

use crate::error::{Error, Result};
use crate::gentrans::partial_gen_transpose;
use crate::matcore::{
    frame_unitary, hermitian_eig, outer, permute_vector_systems, ComplexMatrix,
    DimensionSpec,
};
use num_complex::Complex64;

pub struct TwoSidedRep {
    /// Unitary kernel on the doubled second leg, side `d_b * d_b`.
    pub kernel: ComplexMatrix,
    /// Reconstruction error `max |u - v^{T_B[kernel]}|`.
    pub residual: f64,
}

/// Normalized vectorization of `u`, reordered to (A, A', B, B').
fn paired_state(u: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    let d = d_a * d_b;
    let psi = u.vectorize().scale_re(1.0 / (d as f64).sqrt());
    let dims = DimensionSpec::new(vec![d_a, d_b, d_a, d_b])?;
    permute_vector_systems(&psi, &dims, &[0, 2, 1, 3])
}

/// Marginal of the paired state on (A, A'). Equals the Choi matrix of the
/// channel `rho -> Tr_B[u (rho (x) 1/d_b) u†]`, so two unitaries admit a
/// two-sided representation exactly when they induce the same channel under
/// a maximally mixed second input.
pub fn two_sided_marginal(
    u: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
) -> Result<ComplexMatrix> {
    let psi = paired_state(u, d_a, d_b)?;
    let split = DimensionSpec::pair(d_a * d_a, d_b * d_b);
    outer(&psi, &psi).partial_trace(&split, &[0])
}

/// Schmidt vectors of `psi` on the (B, B') side against a fixed eigenbasis
/// of the (A, A') marginal: `f_i = (<e_i| (x) 1) psi / sqrt(lambda_i)`.
fn conditional_vectors(
    psi: &ComplexMatrix,
    basis: &ComplexMatrix,
    kept: &[(usize, f64)],
    beta_dim: usize,
) -> Vec<ComplexMatrix> {
    let alpha_dim = basis.rows();
    kept.iter()
        .map(|&(i, lambda)| {
            let scale = 1.0 / lambda.sqrt();
            ComplexMatrix::from_fn(beta_dim, 1, |b, _| {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..alpha_dim {
                    acc += basis.get(a, i).conj() * psi.get(a * beta_dim + b, 0);
                }
                acc * scale
            })
        })
        .collect()
}

/// Finds a unitary kernel `w` with `u = v^{T_B[w]}`, or reports that none
/// exists. Both inputs must be unitaries on a `d_a (x) d_b` space.
pub fn two_sided_kernel(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    tol: f64,
) -> Result<Option<TwoSidedRep>> {
    let d = d_a * d_b;
    if u.dim()? != d || v.dim()? != d {
        return Err(Error::DimMismatch("operators do not match the leg split".into()));
    }
    for m in [u, v] {
        if !m.is_unitary(1e-8) {
            return Err(Error::NotUnitary(m.max_abs_diff(
                &ComplexMatrix::identity(d),
            )));
        }
    }

    let psi_u = paired_state(u, d_a, d_b)?;
    let psi_v = paired_state(v, d_a, d_b)?;
    let split = DimensionSpec::pair(d_a * d_a, d_b * d_b);
    let m_u = outer(&psi_u, &psi_u).partial_trace(&split, &[0])?;
    let m_v = outer(&psi_v, &psi_v).partial_trace(&split, &[0])?;
    if m_u.max_abs_diff(&m_v) > tol {
        return Ok(None);
    }

    // A common eigenbasis for both contractions; degeneracies are harmless
    // because the same vectors are used on both sides.
    let eig = hermitian_eig(&m_u)?;
    let cutoff = 1e-12 * eig.values[0].max(1e-300);
    let kept: Vec<(usize, f64)> = eig
        .values
        .iter()
        .enumerate()
        .filter(|&(_, &l)| l > cutoff)
        .map(|(i, &l)| (i, l))
        .collect();

    let beta_dim = d_b * d_b;
    let f = conditional_vectors(&psi_u, &eig.vectors, &kept, beta_dim);
    let g = conditional_vectors(&psi_v, &eig.vectors, &kept, beta_dim);
    let kernel = frame_unitary(&g, &f)?;

    let dims = DimensionSpec::pair(d_a, d_b);
    let rebuilt = partial_gen_transpose(v, &dims, 1, &kernel)?;
    let residual = rebuilt.max_abs_diff(u);
    if residual > tol.max(1e-9) {
        return Err(Error::Numerical(format!(
            "kernel reconstruction residual {residual:.3e}"
        )));
    }
    Ok(Some(TwoSidedRep { kernel, residual }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::factorizable::{controlled_pauli_dilation, padded_swap_dilation};
    use crate::channel::{feed_second_input, trace_second_output, KrausMap};
    use crate::matcore::{gates, max_mixed};
    use crate::sampling::{derived_rng, random_unitary};

    #[test]
    fn marginal_is_the_effective_channel_choi() {
        let mut rng = derived_rng(41, 0);
        let u = random_unitary(6, &mut rng);
        let m = two_sided_marginal(&u, 2, 3).unwrap();
        let big = KrausMap::unitary(&u).unwrap();
        let fed = feed_second_input(&big, 2, &max_mixed(3)).unwrap();
        let eff = trace_second_output(&fed, 3).unwrap();
        assert!(m.approx_eq(eff.choi().matrix(), 1e-12));
    }

    #[test]
    fn recovers_a_local_sandwich_kernel() {
        let mut rng = derived_rng(41, 1);
        let v = random_unitary(6, &mut rng);
        let m = random_unitary(3, &mut rng);
        let n = random_unitary(3, &mut rng);
        let one = ComplexMatrix::identity(2);
        let u = one.tensor(&m).matmul(&v).matmul(&one.tensor(&n));
        let rep = two_sided_kernel(&u, &v, 2, 3, 1e-9).unwrap().unwrap();
        assert!(rep.residual < 1e-9);
        assert!(rep.kernel.is_unitary(1e-9));
        // The sandwich corresponds to the product kernel m (x) n^T.
        let expected = m.tensor(&n.transpose());
        let dims = DimensionSpec::pair(2, 3);
        let via_expected = partial_gen_transpose(&v, &dims, 1, &expected).unwrap();
        assert!(via_expected.approx_eq(&u, 1e-12));
    }

    #[test]
    fn relates_two_dilations_of_the_same_channel() {
        let u = controlled_pauli_dilation();
        let v = padded_swap_dilation();
        let rep = two_sided_kernel(&u, &v, 2, 4, 1e-9).unwrap().unwrap();
        assert!(rep.residual < 1e-9);
        assert!(rep.kernel.is_unitary(1e-9));
    }

    #[test]
    fn unrelated_pair_has_no_kernel() {
        let u = gates::cnot();
        let v = ComplexMatrix::identity(4);
        assert!(two_sided_kernel(&u, &v, 2, 2, 1e-9).unwrap().is_none());
    }
}
