//! Seeded random instances: Haar-ish unitaries via Gram-Schmidt on Gaussian
//! matrices, states, and channels via Stinespring slices. All samplers take
//! an explicit generator so results are reproducible across runs and across
//! the parallel/sequential execution modes.

use crate::channel::KrausMap;
use crate::matcore::ComplexMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Square matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        data.push(Complex64::new(re, im));
    }
    ComplexMatrix::new(rows, cols, data).expect("shape by construction")
}

/// Haar-distributed (up to numerical orthonormalization) random unitary.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        let g = ginibre(d, d, rng);
        let mut cols: Vec<ComplexMatrix> = Vec::with_capacity(d);
        let mut ok = true;
        for j in 0..d {
            let mut v = ComplexMatrix::from_fn(d, 1, |r, _| g.get(r, j));
            for prev in &cols {
                let ov = crate::matcore::inner(prev, &v);
                v = v.sub_m(&prev.scale(ov));
            }
            let norm = v.frobenius_norm();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.scale_re(1.0 / norm));
        }
        if !ok {
            continue;
        }
        let mut u = ComplexMatrix::zeros(d, d);
        for (j, col) in cols.iter().enumerate() {
            for r in 0..d {
                u.set(r, j, col.get(r, 0));
            }
        }
        return u;
    }
}

/// Random pure state as a column vector.
pub fn random_pure(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        let g = ginibre(d, 1, rng);
        let n = g.frobenius_norm();
        if n > 1e-8 {
            return g.scale_re(1.0 / n);
        }
    }
}

/// Random full-rank density operator `G G† / Tr[G G†]`.
pub fn random_state(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.scale_re(1.0 / t)
}

/// Random channel with `kraus_count` terms from a Stinespring isometry:
/// Gram-Schmidt extends nothing here, the isometry columns themselves are
/// orthonormalized Gaussian vectors.
pub fn random_cptp(
    in_dim: usize,
    out_dim: usize,
    kraus_count: usize,
    rng: &mut impl Rng,
) -> KrausMap {
    let env = kraus_count.max(1);
    assert!(
        out_dim * env >= in_dim,
        "environment too small for an isometry"
    );
    loop {
        // Orthonormal columns of a (out*env) x in isometry.
        let g = ginibre(out_dim * env, in_dim, rng);
        let mut cols: Vec<ComplexMatrix> = Vec::with_capacity(in_dim);
        let mut ok = true;
        for j in 0..in_dim {
            let mut v = ComplexMatrix::from_fn(out_dim * env, 1, |r, _| g.get(r, j));
            for prev in &cols {
                let ov = crate::matcore::inner(prev, &v);
                v = v.sub_m(&prev.scale(ov));
            }
            let norm = v.frobenius_norm();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.scale_re(1.0 / norm));
        }
        if !ok {
            continue;
        }
        // K_e[a, b] = V[(a, e), b] with the environment least significant.
        let mut kraus = vec![ComplexMatrix::zeros(out_dim, in_dim); env];
        for (b, col) in cols.iter().enumerate() {
            for a in 0..out_dim {
                for e in 0..env {
                    kraus[e].set(a, b, col.get(a * env + e, 0));
                }
            }
        }
        return KrausMap::channel(kraus).expect("shapes by construction");
    }
}

/// Random maximally entangled vector on a `d*d` space.
pub fn random_max_entangled(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_unitary(d, rng)
        .vectorize()
        .scale_re(1.0 / (d as f64).sqrt())
}

/// Deterministic per-index generator derived from a base seed, so batched
/// work gives identical results in any execution order.
pub fn derived_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(4, &mut rng);
        assert!(u.is_unitary(1e-10));
        let mut rng2 = ChaCha8Rng::seed_from_u64(11);
        let u2 = random_unitary(4, &mut rng2);
        assert!(u.approx_eq(&u2, 0.0));
    }

    #[test]
    fn random_state_and_channel_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_state(3, &mut rng);
        assert!(rho.is_state(1e-10));
        let m = random_cptp(2, 3, 2, &mut rng);
        assert!(m.is_cptp(1e-9));
        let out = m.apply(&crate::matcore::max_mixed(2)).unwrap();
        assert!(out.is_state(1e-9));
    }

    #[test]
    fn derived_rngs_differ_by_index() {
        let a = random_pure(4, &mut derived_rng(5, 0));
        let b = random_pure(4, &mut derived_rng(5, 1));
        assert!(a.max_abs_diff(&b) > 1e-3);
    }
}
