//! Search for unitary-to-unitary pairs of a kernel: unitaries `(U, V)` with
//! `T[W](U) = V`, found by alternating projections onto the maximally
//! entangled manifold. Such a pair also turns the kernel into a unital one
//! by local corrections.

use super::kernel_system_dim;
use crate::error::{Error, Result};
use crate::matcore::{
    gamma_vector, nearest_max_entangled, phi_plus_vector, ComplexMatrix,
};
use crate::sampling::random_unitary;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A unitary-to-unitary pair of a kernel, with the exactness of the relation
/// `T[W](u) = v`.
#[derive(Debug, Clone)]
pub struct UbbPair {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub residual: f64,
}

/// Search controls; the defaults match the library-wide conventions.
#[derive(Debug, Clone)]
pub struct UbbOptions {
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
    /// Fixed-point detection: slack on the per-step residual decrease.
    pub fixpoint_tol: f64,
    /// Acceptance threshold on `||W mu - nu||`.
    pub success_tol: f64,
}

impl Default for UbbOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            max_iter: 10_000,
            restarts: 32,
            fixpoint_tol: 1e-12,
            success_tol: 1e-8,
        }
    }
}

/// Whether the kernel maps the given maximally entangled vector to another
/// maximally entangled vector.
pub fn preserves_max_entangled(w: &ComplexMatrix, mu: &ComplexMatrix, tol: f64) -> Result<bool> {
    let d = kernel_system_dim(w)?;
    let img = w.matmul(mu);
    let m = ComplexMatrix::unvectorize(&img, d, d)?.scale_re((d as f64).sqrt());
    Ok(m.is_unitary(tol))
}

/// Alternating search for a unitary-to-unitary pair of `w`.
///
/// Starts from the maximally entangled vector of the identity, then from
/// seeded random maximally entangled vectors. Each step projects `W mu`
/// (resp. `W† nu`) back onto the maximally entangled manifold; the overlap
/// `|<nu|W|mu>|` is nondecreasing and the iteration stops at a fixed point.
/// Returns `None` when no restart reaches an exact pair.
pub fn ubb_search(w: &ComplexMatrix, opts: &UbbOptions) -> Result<Option<UbbPair>> {
    let d = kernel_system_dim(w)?;
    if !w.is_unitary(1e-8) {
        let dev = w
            .adjoint()
            .matmul(w)
            .max_abs_diff(&ComplexMatrix::identity(w.rows()));
        return Err(Error::NotUnitary(dev));
    }
    for restart in 0..=opts.restarts {
        let mut mu = if restart == 0 {
            phi_plus_vector(d)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
            random_unitary(d, &mut rng).vectorize().scale_re(1.0 / (d as f64).sqrt())
        };
        let mut nu = nearest_max_entangled(&w.matmul(&mu))?;
        let mut residual = w.matmul(&mu).sub_m(&nu).frobenius_norm();
        // Track the residual, not the overlap: near a fixed point the
        // overlap sits at 1 - residual^2/2, which saturates double
        // precision while the directly computed residual still resolves.
        let mut stalled = 0;
        for _ in 0..opts.max_iter {
            if residual <= opts.success_tol {
                break;
            }
            mu = nearest_max_entangled(&w.adjoint().matmul(&nu))?;
            nu = nearest_max_entangled(&w.matmul(&mu))?;
            let new_residual = w.matmul(&mu).sub_m(&nu).frobenius_norm();
            if new_residual + opts.fixpoint_tol >= residual {
                stalled += 1;
            } else {
                stalled = 0;
            }
            residual = new_residual;
            if stalled >= 3 {
                break;
            }
        }
        if residual <= opts.success_tol {
            let scale = (d as f64).sqrt();
            return Ok(Some(UbbPair {
                u: ComplexMatrix::unvectorize(&mu, d, d)?.scale_re(scale),
                v: ComplexMatrix::unvectorize(&nu, d, d)?.scale_re(scale),
                residual,
            }));
        }
    }
    Ok(None)
}

/// Unital kernel built from a unitary-to-unitary pair:
/// `W' = (v† (x) 1) W (u (x) 1)` satisfies `T[W'](1) = 1`.
pub fn unitalize(w: &ComplexMatrix, pair: &UbbPair) -> Result<ComplexMatrix> {
    let d = kernel_system_dim(w)?;
    if pair.u.rows() != d || pair.v.rows() != d {
        return Err(Error::DimMismatch("pair does not match kernel system".into()));
    }
    let left = pair.v.adjoint().tensor(&ComplexMatrix::identity(d));
    let right = pair.u.tensor(&ComplexMatrix::identity(d));
    let out = left.matmul(w).matmul(&right);
    let g = gamma_vector(d);
    let defect = out.matmul(&g).sub_m(&g).frobenius_norm();
    if defect > 1e-6 {
        return Err(Error::Numerical(format!(
            "unitalization defect {defect:.2e}; pair is not exact"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gentrans::{gen_transpose, is_unital_gt};
    use crate::matcore::gates;

    #[test]
    fn ubb_pair_for_flipped_cnot_exists_and_unitalizes() {
        let w = gates::cnot_flipped();
        let pair = ubb_search(&w, &UbbOptions::default()).unwrap().unwrap();
        assert!(pair.residual < 1e-10);
        assert!(pair.u.is_unitary(1e-9));
        assert!(pair.v.is_unitary(1e-9));
        // The defining relation T[W](u) = v holds exactly.
        let img = gen_transpose(&pair.u, &w).unwrap();
        assert!(img.approx_eq(&pair.v, 1e-9));
        // The kernel itself is not unital, the corrected kernel is.
        assert!(!is_unital_gt(&w, 1e-9).unwrap());
        let unital = unitalize(&w, &pair).unwrap();
        assert!(unital.is_unitary(1e-9));
        assert!(is_unital_gt(&unital, 1e-8).unwrap());
    }

    #[test]
    fn hadamard_pair_verifies_against_flipped_cnot() {
        // (H, XH) is a known unitary-to-unitary pair of the flipped CNOT.
        let w = gates::cnot_flipped();
        let img = gen_transpose(&gates::h(), &w).unwrap();
        assert!(img.approx_eq(&gates::x().matmul(&gates::h()), 1e-13));
        let mu = gates::h().vectorize().scale_re(0.5f64.sqrt());
        assert!(preserves_max_entangled(&w, &mu, 1e-10).unwrap());
    }

    #[test]
    fn unital_kernels_converge_immediately() {
        // The swap kernel fixes vec(1): the first iterate already succeeds.
        let w = gates::swap(3);
        let pair = ubb_search(&w, &UbbOptions::default()).unwrap().unwrap();
        assert!(pair.residual < 1e-12);
        let img = gen_transpose(&pair.u, &w).unwrap();
        assert!(img.approx_eq(&pair.v, 1e-10));
    }
}
