//! Dilations of channels through an auxiliary system: Stinespring isometries,
//! their unitary completions, factorizations through the maximally mixed
//! state, and the catalyticity of a dilation.

use super::{maps_equal, trace_second_output, KrausMap};
use crate::error::{Error, Result};
use crate::gentrans::partial_gen_transpose;
use crate::matcore::{
    complete_orthonormal, gates, max_mixed, ComplexMatrix, DimensionSpec,
};
use num_complex::Complex64;

/// Stinespring isometry `V = sum_k K_k (x) |k>` of a channel, mapping
/// `in -> out (x) env` with the environment leg least significant.
pub fn stinespring_isometry(m: &KrausMap) -> Result<ComplexMatrix> {
    for (w, _) in m.terms() {
        if (w - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::NotChannel(
                "Stinespring form needs plain Kraus terms".into(),
            ));
        }
    }
    if !m.is_tp(1e-8) {
        return Err(Error::NotChannel("map is not trace-preserving".into()));
    }
    let env = m.kraus_count();
    let mut v = ComplexMatrix::zeros(m.out_dim() * env, m.in_dim());
    for (e, (_, k)) in m.terms().iter().enumerate() {
        for a in 0..m.out_dim() {
            for b in 0..m.in_dim() {
                v.set(a * env + e, b, k.get(a, b));
            }
        }
    }
    Ok(v)
}

/// Unitary dilation of a channel with equal input and output dimension:
/// `U` on `d (x) env` with `M(rho) = Tr_env[U (rho (x) |0><0|) U†]`.
pub fn dilation_unitary(m: &KrausMap) -> Result<(ComplexMatrix, usize)> {
    if m.in_dim() != m.out_dim() {
        return Err(Error::DimMismatch(
            "unitary dilation needs equal input and output dimensions".into(),
        ));
    }
    let d = m.in_dim();
    let v = stinespring_isometry(m)?;
    let env = v.rows() / d;
    // Columns of U at environment-input |0> are the isometry columns; the
    // rest is a deterministic orthonormal completion. Note the completion
    // columns are indexed (b, e) with e > 0.
    let mut cols = Vec::with_capacity(d * env);
    for b in 0..d {
        cols.push(ComplexMatrix::from_fn(d * env, 1, |r, _| v.get(r, b)));
    }
    let full = complete_orthonormal(cols, d * env)?;
    let mut u = ComplexMatrix::zeros(d * env, d * env);
    // Input ordering: column (b, e); e = 0 carries the isometry.
    for b in 0..d {
        for r in 0..d * env {
            u.set(r, b * env, full[b].get(r, 0));
        }
    }
    let mut extra = d;
    for b in 0..d {
        for e in 1..env {
            for r in 0..d * env {
                u.set(r, b * env + e, full[extra].get(r, 0));
            }
            extra += 1;
        }
    }
    Ok((u, env))
}

/// Checks that `u` on `d_a (x) d_b` reproduces `m` when the auxiliary leg is
/// fed the maximally mixed state and discarded:
/// `M(rho) = Tr_B[u (rho (x) 1/d_b) u†]`.
pub fn factors_through_max_mixed(
    u: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    m: &KrausMap,
    tol: f64,
) -> Result<bool> {
    if u.dim()? != d_a * d_b {
        return Err(Error::DimMismatch("dilation does not match leg split".into()));
    }
    let big = KrausMap::unitary(u)?;
    let fed = super::feed_second_input(&big, d_a, &max_mixed(d_b))?;
    let eff = trace_second_output(&fed, d_b)?;
    Ok(maps_equal(&eff, m, tol))
}

/// A dilation is catalytic when its partial transpose on the auxiliary leg
/// is still unitary; the auxiliary state then passes through unchanged in a
/// time-reversed reading of the circuit.
pub fn is_catalytic_dilation(
    u: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    tol: f64,
) -> Result<bool> {
    if u.dim()? != d_a * d_b {
        return Err(Error::DimMismatch("dilation does not match leg split".into()));
    }
    let dims = DimensionSpec::pair(d_a, d_b);
    let pt = partial_gen_transpose(u, &dims, 1, &gates::swap(d_b))?;
    Ok(pt.is_unitary(tol))
}

/// Controlled-Pauli dilation of the qubit completely depolarizing channel:
/// `U = sum_k P_k (x) |k><k|` on a 2 (x) 4 split.
pub fn controlled_pauli_dilation() -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(8, 8);
    for (k, p) in gates::paulis().iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                u.set(r * 4 + k, c * 4 + k, p.get(r, c));
            }
        }
    }
    u
}

/// Padded-swap dilation of the same channel: swap the system with the first
/// auxiliary qubit, ignore the second, again on a 2 (x) 4 split.
pub fn padded_swap_dilation() -> ComplexMatrix {
    gates::swap(2).tensor(&ComplexMatrix::identity(2))
}

/// Channel presented as a sectored dilation through maximally mixed
/// auxiliaries: `M(rho) = sum_i p_i Tr_{Y_i}[U_i (rho (x) pi_{Y_i}) U_i†]`,
/// with each `U_i` unitary on `sys (x) Y_i` and the `Y_i` of possibly
/// different sizes.
pub struct FactorizableMap {
    sys_dim: usize,
    sectors: Vec<(f64, ComplexMatrix)>,
}

impl FactorizableMap {
    pub fn new(sys_dim: usize, sectors: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        if sys_dim == 0 {
            return Err(Error::InvalidInput("zero system dimension".into()));
        }
        if sectors.is_empty() {
            return Err(Error::InvalidInput("no sectors".into()));
        }
        let mut total = 0.0;
        for (i, (p, u)) in sectors.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "sector {i}: weight {p} is not a probability"
                )));
            }
            total += p;
            let d = u.dim()?;
            if d % sys_dim != 0 {
                return Err(Error::DimMismatch(format!(
                    "sector {i}: {d} does not split off a system of dimension {sys_dim}"
                )));
            }
            if !u.is_unitary(1e-8) {
                return Err(Error::NotUnitary(
                    u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(d)),
                ));
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "sector weights sum to {total}, not 1"
            )));
        }
        Ok(Self { sys_dim, sectors })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn sectors(&self) -> &[(f64, ComplexMatrix)] {
        &self.sectors
    }
}

/// Evaluates the sectored dilation on a state directly.
pub fn factorizable_apply(f: &FactorizableMap, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = f.sys_dim();
    if rho.dim()? != d {
        return Err(Error::DimMismatch(format!(
            "state is {}x{}, map acts on {d}",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for (p, u) in f.sectors() {
        let env = u.rows() / d;
        let big = u.matmul(&rho.tensor(&max_mixed(env))).matmul(&u.adjoint());
        let kept = big.partial_trace(&DimensionSpec::pair(d, env), &[0])?;
        out = out.add_m(&kept.scale_re(*p));
    }
    Ok(out)
}

/// Kraus form of the sectored dilation; unital because each sector maps the
/// maximally mixed state to itself.
pub fn factorizable_channel(f: &FactorizableMap) -> Result<KrausMap> {
    let d = f.sys_dim();
    let mut terms = Vec::new();
    for (p, u) in f.sectors() {
        let env = u.rows() / d;
        let fed = super::feed_second_input(&KrausMap::unitary(u)?, d, &max_mixed(env))?;
        let sector = trace_second_output(&fed, env)?;
        for (w, k) in sector.terms() {
            terms.push((w * Complex64::new(*p, 0.0), k.clone()));
        }
    }
    KrausMap::new(d, d, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stinespring_reproduces_the_channel() {
        let m = super::super::dephasing(2).unwrap();
        let v = stinespring_isometry(&m).unwrap();
        assert!(v.adjoint().matmul(&v).is_identity(1e-12));
        let rho = ComplexMatrix::from_fn(2, 2, |r, c| {
            Complex64::new(0.5 - 0.1 * (r as f64 - c as f64), 0.2 * (r as f64 - c as f64))
        });
        // Tr_env[V rho V†] with env least significant.
        let big = v.matmul(&rho).matmul(&v.adjoint());
        let dims = DimensionSpec::pair(2, 2);
        let out = big.partial_trace(&dims, &[0]).unwrap();
        assert!(out.approx_eq(&m.apply(&rho).unwrap(), 1e-12));
    }

    #[test]
    fn dilation_unitary_reproduces_channel_on_zero_ancilla() {
        let m = super::super::dephasing(2).unwrap();
        let (u, env) = dilation_unitary(&m).unwrap();
        assert_eq!(env, 2);
        assert!(u.is_unitary(1e-10));
        let rho = crate::matcore::max_mixed(2);
        let mut anc = ComplexMatrix::zeros(env, env);
        anc.set(0, 0, Complex64::new(1.0, 0.0));
        let big = u
            .matmul(&rho.tensor(&anc))
            .matmul(&u.adjoint());
        let dims = DimensionSpec::pair(2, env);
        let out = big.partial_trace(&dims, &[0]).unwrap();
        assert!(out.approx_eq(&m.apply(&rho).unwrap(), 1e-10));
    }

    #[test]
    fn both_depolarizing_dilations_factor_through_max_mixed() {
        let dep = KrausMap::completely_depolarizing(2).unwrap();
        for u in [controlled_pauli_dilation(), padded_swap_dilation()] {
            assert!(u.is_unitary(1e-12));
            assert!(factors_through_max_mixed(&u, 2, 4, &dep, 1e-10).unwrap());
        }
    }

    #[test]
    fn catalyticity_separates_the_two_dilations() {
        assert!(is_catalytic_dilation(&controlled_pauli_dilation(), 2, 4, 1e-10).unwrap());
        assert!(!is_catalytic_dilation(&padded_swap_dilation(), 2, 4, 1e-10).unwrap());
    }

    #[test]
    fn single_swap_sector_is_completely_depolarizing() {
        let f = FactorizableMap::new(2, vec![(1.0, gates::swap(2))]).unwrap();
        let dep = KrausMap::completely_depolarizing(2).unwrap();
        assert!(maps_equal(&factorizable_channel(&f).unwrap(), &dep, 1e-12));
        let rho = ComplexMatrix::from_fn(2, 2, |r, c| {
            Complex64::new(if r == c { 0.7 - 0.4 * r as f64 } else { 0.1 }, 0.3 * (c as f64 - r as f64))
        });
        assert!(factorizable_apply(&f, &rho).unwrap().approx_eq(&max_mixed(2), 1e-12));
    }

    #[test]
    fn controlled_pauli_sector_is_completely_depolarizing() {
        let f = FactorizableMap::new(2, vec![(1.0, controlled_pauli_dilation())]).unwrap();
        let dep = KrausMap::completely_depolarizing(2).unwrap();
        assert!(maps_equal(&factorizable_channel(&f).unwrap(), &dep, 1e-12));
    }

    #[test]
    fn two_sectors_average_the_state_with_max_mixed() {
        let f = FactorizableMap::new(
            2,
            vec![(0.5, ComplexMatrix::identity(2)), (0.5, gates::swap(2))],
        )
        .unwrap();
        let rho = ComplexMatrix::from_fn(2, 2, |r, c| {
            Complex64::new(0.5 + 0.25 * (r as f64 - c as f64), 0.2 * (c as f64 - r as f64))
        });
        let want = rho.scale_re(0.5).add_m(&max_mixed(2).scale_re(0.5));
        assert!(factorizable_apply(&f, &rho).unwrap().approx_eq(&want, 1e-12));
        let m = factorizable_channel(&f).unwrap();
        assert!(m.apply(&rho).unwrap().approx_eq(&want, 1e-12));
    }

    #[test]
    fn sectored_channels_are_unital() {
        let u = gates::cz().matmul(&gates::h().tensor(&gates::h()));
        let f = FactorizableMap::new(
            2,
            vec![(0.25, u), (0.35, controlled_pauli_dilation()), (0.4, gates::swap(2))],
        )
        .unwrap();
        let m = factorizable_channel(&f).unwrap();
        assert!(m.is_cptp(1e-10));
        assert!(m.apply(&ComplexMatrix::identity(2)).unwrap().is_identity(1e-10));
        let rho = max_mixed(2);
        assert!(factorizable_apply(&f, &rho).unwrap().approx_eq(&rho, 1e-12));
    }

    #[test]
    fn bad_sector_weights_are_rejected() {
        let id = ComplexMatrix::identity(2);
        assert!(matches!(
            FactorizableMap::new(2, vec![(0.7, id.clone()), (0.2, id.clone())]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            FactorizableMap::new(2, vec![(1.5, id.clone()), (-0.5, id.clone())]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            FactorizableMap::new(2, vec![]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            FactorizableMap::new(2, vec![(1.0, ComplexMatrix::identity(3))]),
            Err(Error::DimMismatch(_))
        ));
        assert!(matches!(
            FactorizableMap::new(2, vec![(1.0, id.scale_re(2.0))]),
            Err(Error::NotUnitary(_))
        ));
    }
}
