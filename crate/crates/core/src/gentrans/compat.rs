//! Compatibility predicates: when a bipartite unitary can absorb a
//! generalized transposition on one leg, and when a kernel commutes with
//! state preparation on its column factor.

use super::{kernel_system_dim, partial_gen_transpose};
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, DimensionSpec};

/// Image of the dynamics under the absorbed kernel: `u^{T_2[w†]}`, the
/// generalized transposition with kernel `w†` applied to the second leg of
/// `u`. The pair `(u, w)` is compatible exactly when this is unitary.
pub fn compatible_transform(
    u: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    w: &ComplexMatrix,
) -> Result<(ComplexMatrix, f64)> {
    if u.dim()? != d_a * d_b {
        return Err(Error::DimMismatch(format!(
            "dynamics is {}x{}, expected side {}",
            u.rows(),
            u.cols(),
            d_a * d_b
        )));
    }
    if !u.is_unitary(1e-8) {
        let dev = u
            .adjoint()
            .matmul(u)
            .max_abs_diff(&ComplexMatrix::identity(u.rows()));
        return Err(Error::NotUnitary(dev));
    }
    let dims = DimensionSpec::pair(d_a, d_b);
    let transformed = partial_gen_transpose(u, &dims, 1, &w.adjoint())?;
    let dev = transformed
        .adjoint()
        .matmul(&transformed)
        .max_abs_diff(&ComplexMatrix::identity(u.rows()));
    Ok((transformed, dev))
}

/// Whether the bipartite unitary `u` is compatible with the kernel `w` on
/// its second leg.
pub fn is_compatible(
    u: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    w: &ComplexMatrix,
    tol: f64,
) -> Result<bool> {
    let (_, dev) = compatible_transform(u, d_a, d_b, w)?;
    Ok(dev <= tol)
}

/// Preparation compatibility of a kernel with a state on its column factor.
///
/// Checks whether `W (1 (x) sigma^T) W† = 1 (x) tau^T` for some state `tau`,
/// and returns `tau` when it does. Feeding `sigma` before the transposition
/// is then the same as feeding `tau` after it.
pub fn prep_compat(
    w: &ComplexMatrix,
    sigma: &ComplexMatrix,
    tol: f64,
) -> Result<Option<ComplexMatrix>> {
    let d = kernel_system_dim(w)?;
    if sigma.dim()? != d {
        return Err(Error::DimMismatch(format!(
            "state dimension {} does not match kernel system dimension {}",
            sigma.rows(),
            d
        )));
    }
    if !sigma.is_state(1e-8) {
        return Err(Error::NotState("preparation input is not a state".into()));
    }
    let lifted = ComplexMatrix::identity(d).tensor(&sigma.transpose());
    let m = w.matmul(&lifted).matmul(&w.adjoint());
    let dims = DimensionSpec::pair(d, d);
    let tau_t = m.partial_trace(&dims, &[1])?.scale_re(1.0 / d as f64);
    let reassembled = ComplexMatrix::identity(d).tensor(&tau_t);
    if m.max_abs_diff(&reassembled) <= tol {
        Ok(Some(tau_t.transpose()))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gentrans::fractional_kernel;
    use crate::matcore::{gates, max_mixed, ComplexMatrix};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_kernels_are_compatible_with_everything() {
        let u = gates::cz().matmul(&gates::h().tensor(&gates::s()));
        let w = gates::h().tensor(&gates::z().transpose());
        assert!(is_compatible(&u, 2, 2, &w, 1e-10).unwrap());
    }

    #[test]
    fn swap_kernel_compatibility_is_partial_transpose_unitarity() {
        // CZ stays unitary under partial transposition, hence is compatible
        // with the plain-transpose kernel; the swap dynamics is not (its
        // partial transpose is rank one).
        let f = gates::swap(2);
        assert!(is_compatible(&gates::cz(), 2, 2, &f, 1e-10).unwrap());
        assert!(!is_compatible(&gates::swap(2), 2, 2, &f, 1e-10).unwrap());
    }

    #[test]
    fn fractional_kernel_compatible_with_second_leg_symmetric_dynamics() {
        // u = (1 (x) b) D (1 (x) b^T) has a symmetric second-leg block
        // structure, so every fractional kernel is absorbed.
        let b = gates::h();
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]);
        let u = ComplexMatrix::identity(2)
            .tensor(&b)
            .matmul(&d)
            .matmul(&ComplexMatrix::identity(2).tensor(&b.transpose()));
        assert!(u.is_unitary(1e-12));
        let w = fractional_kernel(2, 0.77);
        assert!(is_compatible(&u, 2, 2, &w, 1e-9).unwrap());
        // The swap dynamics is not compatible with a strict fraction.
        assert!(!is_compatible(&gates::swap(2), 2, 2, &w, 1e-6).unwrap());
    }

    #[test]
    fn prep_compat_swap_only_accepts_max_mixed() {
        let f = gates::swap(2);
        let tau = prep_compat(&f, &max_mixed(2), 1e-9).unwrap().unwrap();
        assert!(tau.approx_eq(&max_mixed(2), 1e-12));
        // A state close to (but not at) the maximally mixed one fails.
        let near = ComplexMatrix::diagonal(&[c(0.501, 0.0), c(0.499, 0.0)]);
        assert!(prep_compat(&f, &near, 1e-9).unwrap().is_none());
        // With a loose tolerance the same near-miss is accepted.
        assert!(prep_compat(&f, &near, 1e-2).unwrap().is_some());
    }

    #[test]
    fn prep_compat_product_kernel_conjugates_the_state() {
        let w2 = gates::h();
        let w = gates::s().tensor(&w2.transpose());
        let sigma = ComplexMatrix::new(
            2,
            2,
            vec![c(0.7, 0.0), c(0.1, 0.05), c(0.1, -0.05), c(0.3, 0.0)],
        )
        .unwrap();
        let tau = prep_compat(&w, &sigma, 1e-9).unwrap().unwrap();
        let want = w2.adjoint().matmul(&sigma).matmul(&w2);
        assert!(tau.approx_eq(&want, 1e-12));
        assert!(tau.is_state(1e-9));
    }

    #[test]
    fn prep_compat_max_mixed_works_for_any_kernel() {
        for w in [gates::cnot_flipped(), gates::cz(), fractional_kernel(2, 1.3)] {
            let tau = prep_compat(&w, &max_mixed(2), 1e-9).unwrap().unwrap();
            assert!(tau.approx_eq(&max_mixed(2), 1e-12));
        }
    }
}
