//! Randomized property sweeps: the structural identities the kernel action
//! must satisfy for arbitrary inputs, with shrinkable seeds.

use chronoglass::channel::supertrace;
use chronoglass::gentrans::compat::prep_compat;
use chronoglass::gentrans::{
    fractional_transpose, gen_transpose, gen_transpose_channel, is_unital_gt,
};
use chronoglass::matcore::{gamma_vector, hermitian_eig, ComplexMatrix};
use chronoglass::sampling::{ginibre, random_cptp, random_state, random_unitary};
use chronoglass::tensors::{dynamics_tensor_witness, proper_dynamics_witness};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn kernel_action_preserves_pairings(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let a = ginibre(d, d, &mut r);
        let b = ginibre(d, d, &mut r);
        let w = random_unitary(d * d, &mut r);
        let ta = gen_transpose(&a, &w).unwrap();
        let tb = gen_transpose(&b, &w).unwrap();
        let pairing = a.hs_inner(&b);
        prop_assert!((ta.hs_inner(&tb) - pairing).norm() <= 1e-10 * (1.0 + pairing.norm()));
        let norm = a.frobenius_norm();
        prop_assert!((ta.frobenius_norm() - norm).abs() <= 1e-10 * (1.0 + norm));
    }

    #[test]
    fn fractional_transposes_compose_and_repeat(
        seed in any::<u64>(),
        theta in -7.0f64..7.0,
        phi in -7.0f64..7.0,
    ) {
        let mut r = rng(seed);
        let m = ginibre(3, 3, &mut r);
        let scale = 1.0 + m.max_abs();
        let stepwise = fractional_transpose(&fractional_transpose(&m, theta).unwrap(), phi).unwrap();
        let joint = fractional_transpose(&m, theta + phi).unwrap();
        prop_assert!(stepwise.max_abs_diff(&joint) <= 1e-12 * scale);
        let shifted = fractional_transpose(&m, theta + std::f64::consts::TAU).unwrap();
        prop_assert!(shifted.max_abs_diff(&fractional_transpose(&m, theta).unwrap()) <= 1e-12 * scale);
    }

    #[test]
    fn symmetric_matrices_are_fixed_points(seed in any::<u64>(), theta in -7.0f64..7.0) {
        let mut r = rng(seed);
        let g = ginibre(3, 3, &mut r);
        let sym = g.add_m(&g.transpose());
        let moved = fractional_transpose(&sym, theta).unwrap();
        prop_assert!(moved.max_abs_diff(&sym) <= 1e-12 * (1.0 + sym.max_abs()));
    }

    #[test]
    fn kernel_action_is_linear_in_the_kernel(
        seed in any::<u64>(),
        ar in -2.0f64..2.0, ai in -2.0f64..2.0,
        br in -2.0f64..2.0, bi in -2.0f64..2.0,
    ) {
        let mut r = rng(seed);
        let m = ginibre(2, 2, &mut r);
        let w1 = random_unitary(4, &mut r);
        let w2 = random_unitary(4, &mut r);
        let alpha = Complex64::new(ar, ai);
        let beta = Complex64::new(br, bi);
        let mixed = w1.scale(alpha).add_m(&w2.scale(beta));
        let lhs = gen_transpose(&m, &mixed).unwrap();
        let rhs = gen_transpose(&m, &w1).unwrap().scale(alpha)
            .add_m(&gen_transpose(&m, &w2).unwrap().scale(beta));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn supertrace_is_unit_and_kernel_invariant(
        seed in any::<u64>(),
        d in 2usize..4,
        kraus in 1usize..4,
    ) {
        let mut r = rng(seed);
        let n = random_cptp(d, d, kraus, &mut r);
        prop_assert!((supertrace(&n) - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
        let w = random_unitary(d * d, &mut r);
        let lifted = gen_transpose_channel(&n, &w).unwrap();
        prop_assert!((supertrace(&lifted) - supertrace(&n)).norm() <= 1e-10);
    }

    #[test]
    fn dynamics_witnesses_are_unitary(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let x = ginibre(d, d, &mut r);
        let w = dynamics_tensor_witness(&x).unwrap();
        prop_assert!(w.is_unitary(1e-9));
        // The witness flattens the seed matrix onto the identity direction.
        let img = gen_transpose(&x, &w).unwrap();
        let target = ComplexMatrix::identity(d)
            .scale_re(x.frobenius_norm() / (d as f64).sqrt());
        prop_assert!(img.max_abs_diff(&target) <= 1e-9 * (1.0 + x.max_abs()));
    }

    #[test]
    fn proper_witnesses_are_unital_too(seed in any::<u64>(), half in 1usize..3) {
        let d = 2 * half;
        let mut r = rng(seed);
        let x = ginibre(d, d, &mut r);
        let (w, _gamma) = proper_dynamics_witness(&x).unwrap();
        prop_assert!(w.is_unitary(1e-9));
        prop_assert!(is_unital_gt(&w, 1e-9).unwrap());
        // The image is proportional to a unitary: img† img is scalar.
        let img = gen_transpose(&x, &w).unwrap();
        let gram = img.adjoint().matmul(&img);
        let factor = gram.trace().re / d as f64;
        let scalar = ComplexMatrix::identity(d).scale_re(factor);
        prop_assert!(gram.max_abs_diff(&scalar) <= 1e-9 * (1.0 + factor));
    }

    #[test]
    fn unitality_is_exactly_trace_preservation(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let w = random_unitary(d * d, &mut r);
        let g = gamma_vector(d);
        let fixed_defect = w.matmul(&g).sub_m(&g).frobenius_norm();
        let mut trace_defect = 0f64;
        for i in 0..d {
            for j in 0..d {
                let mut e = ComplexMatrix::zeros(d, d);
                e.set(i, j, Complex64::new(1.0, 0.0));
                let t = gen_transpose(&e, &w).unwrap();
                trace_defect = trace_defect.max((t.trace() - e.trace()).norm());
            }
        }
        // Basis trace defects are the components of (W† - 1) vec(1), whose
        // norm equals the unitality defect for unitary kernels.
        prop_assert!(trace_defect <= fixed_defect + 1e-12);
        prop_assert!(fixed_defect <= d as f64 * trace_defect + 1e-12);
        prop_assert_eq!(is_unital_gt(&w, 1e-9).unwrap(), fixed_defect <= 1e-9);
    }

    #[test]
    fn product_kernel_preparations_keep_the_spectrum(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let w = random_unitary(d, &mut r).tensor(&random_unitary(d, &mut r).transpose());
        let sigma = random_state(d, &mut r);
        let tau = prep_compat(&w, &sigma, 1e-9).unwrap()
            .expect("product kernels commute with every preparation");
        let mut ls = hermitian_eig(&sigma).unwrap().values;
        let mut lt = hermitian_eig(&tau).unwrap().values;
        ls.sort_by(f64::total_cmp);
        lt.sort_by(f64::total_cmp);
        for (a, b) in ls.iter().zip(&lt) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }
}
