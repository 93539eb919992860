//! Maps on maps: superchannels in pre/post form, register plumbing that
//! turns bipartite channels into effective single-system channels, and the
//! supertrace calculus.

use super::{ChoiMatrix, KrausMap};
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, max_mixed, ComplexMatrix};
use num_complex::Complex64;

/// Superchannel in pre/post form with a memory register:
/// `Theta(M) = post ∘ (M (x) id_mem) ∘ pre`.
#[derive(Debug, Clone)]
pub struct Superchannel {
    pre: KrausMap,
    post: KrausMap,
    mem_dim: usize,
}

impl Superchannel {
    pub fn new(pre: KrausMap, post: KrausMap, mem_dim: usize) -> Result<Self> {
        if mem_dim == 0 {
            return Err(Error::InvalidInput("zero memory dimension".into()));
        }
        if !pre.out_dim().is_multiple_of(mem_dim) || !post.in_dim().is_multiple_of(mem_dim) {
            return Err(Error::DimMismatch(
                "pre/post legs are not divisible by the memory dimension".into(),
            ));
        }
        Ok(Self { pre, post, mem_dim })
    }

    pub fn mem_dim(&self) -> usize {
        self.mem_dim
    }

    /// Input dimension expected of the argument channel.
    pub fn arg_in_dim(&self) -> usize {
        self.pre.out_dim() / self.mem_dim
    }

    /// Output dimension expected of the argument channel.
    pub fn arg_out_dim(&self) -> usize {
        self.post.in_dim() / self.mem_dim
    }

    pub fn apply(&self, m: &KrausMap) -> Result<KrausMap> {
        if m.in_dim() != self.arg_in_dim() || m.out_dim() != self.arg_out_dim() {
            return Err(Error::DimMismatch(format!(
                "argument channel is {}->{}, superchannel expects {}->{}",
                m.in_dim(),
                m.out_dim(),
                self.arg_in_dim(),
                self.arg_out_dim()
            )));
        }
        let lifted = m.tensor(&KrausMap::identity(self.mem_dim)?)?;
        self.post.compose(&lifted)?.compose(&self.pre)
    }
}

/// Matrix of a linear action on Choi space: column `(r, c)` holds the
/// vectorized image of the matrix-unit Choi `E_rc`. Together with
/// [`ChoiMatrix`] this represents an arbitrary supermap numerically.
pub fn choi_action_matrix<F>(in_dim: usize, out_dim: usize, theta: F) -> Result<ComplexMatrix>
where
    F: Fn(&ChoiMatrix) -> Result<ChoiMatrix>,
{
    let side = in_dim * out_dim;
    let mut action = ComplexMatrix::zeros(side * side, side * side);
    for r in 0..side {
        for c in 0..side {
            let mut e = ComplexMatrix::zeros(side, side);
            e.set(r, c, Complex64::new(1.0, 0.0));
            let image = theta(&ChoiMatrix::new(in_dim, out_dim, e)?)?;
            if image.matrix().rows() != side {
                return Err(Error::DimMismatch(
                    "supermap changed the Choi shape".into(),
                ));
            }
            let col = image.matrix().vectorize();
            for row in 0..side * side {
                action.set(row, r * side + c, col.get(row, 0));
            }
        }
    }
    Ok(action)
}

/// Fixes the second input of a bipartite map to the state `sigma`:
/// `rho -> M(rho (x) sigma)`. `first_dim` is the dimension of the remaining
/// (first) input factor.
pub fn feed_second_input(
    m: &KrausMap,
    first_dim: usize,
    sigma: &ComplexMatrix,
) -> Result<KrausMap> {
    let d_b = sigma.dim()?;
    if m.in_dim() != first_dim * d_b {
        return Err(Error::DimMismatch(format!(
            "map input {} is not {} x {}",
            m.in_dim(),
            first_dim,
            d_b
        )));
    }
    if !sigma.is_state(1e-8) {
        return Err(Error::NotState("fed input is not a state".into()));
    }
    let eig = hermitian_eig(sigma)?;
    let mut terms = Vec::new();
    for (j, &lam) in eig.values.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        if s <= 1e-12 {
            continue;
        }
        // Embedding 1 (x) |s_j> : first_dim -> first_dim * d_b.
        let mut embed = ComplexMatrix::zeros(first_dim * d_b, first_dim);
        for a in 0..first_dim {
            for b in 0..d_b {
                embed.set(a * d_b + b, a, eig.vectors.get(b, j) * s);
            }
        }
        for (w, k) in m.terms() {
            terms.push((*w, k.matmul(&embed)));
        }
    }
    Ok(KrausMap::new(first_dim, m.out_dim(), terms)?.pruned())
}

/// Fixes the first input of a bipartite map to the state `sigma`:
/// `rho -> M(sigma (x) rho)`.
pub fn feed_first_input(
    m: &KrausMap,
    sigma: &ComplexMatrix,
    second_dim: usize,
) -> Result<KrausMap> {
    let d_a = sigma.dim()?;
    if m.in_dim() != d_a * second_dim {
        return Err(Error::DimMismatch(format!(
            "map input {} is not {} x {}",
            m.in_dim(),
            d_a,
            second_dim
        )));
    }
    if !sigma.is_state(1e-8) {
        return Err(Error::NotState("fed input is not a state".into()));
    }
    let eig = hermitian_eig(sigma)?;
    let mut terms = Vec::new();
    for (j, &lam) in eig.values.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        if s <= 1e-12 {
            continue;
        }
        let mut embed = ComplexMatrix::zeros(d_a * second_dim, second_dim);
        for a in 0..d_a {
            for b in 0..second_dim {
                embed.set(a * second_dim + b, b, eig.vectors.get(a, j) * s);
            }
        }
        for (w, k) in m.terms() {
            terms.push((*w, k.matmul(&embed)));
        }
    }
    Ok(KrausMap::new(second_dim, m.out_dim(), terms)?.pruned())
}

/// Discards the first output factor (of dimension `first_dim`) of a map.
pub fn trace_first_output(m: &KrausMap, first_dim: usize) -> Result<KrausMap> {
    if !m.out_dim().is_multiple_of(first_dim) {
        return Err(Error::DimMismatch("output does not factor".into()));
    }
    let keep = m.out_dim() / first_dim;
    let mut terms = Vec::new();
    for a in 0..first_dim {
        // Projection <a| (x) 1 : first_dim * keep -> keep.
        let mut proj = ComplexMatrix::zeros(keep, first_dim * keep);
        for b in 0..keep {
            proj.set(b, a * keep + b, Complex64::new(1.0, 0.0));
        }
        for (w, k) in m.terms() {
            terms.push((*w, proj.matmul(k)));
        }
    }
    Ok(KrausMap::new(m.in_dim(), keep, terms)?.pruned())
}

/// Discards the second output factor (of dimension `second_dim`) of a map.
pub fn trace_second_output(m: &KrausMap, second_dim: usize) -> Result<KrausMap> {
    if !m.out_dim().is_multiple_of(second_dim) {
        return Err(Error::DimMismatch("output does not factor".into()));
    }
    let keep = m.out_dim() / second_dim;
    let mut terms = Vec::new();
    for b in 0..second_dim {
        let mut proj = ComplexMatrix::zeros(keep, keep * second_dim);
        for a in 0..keep {
            proj.set(a, a * second_dim + b, Complex64::new(1.0, 0.0));
        }
        for (w, k) in m.terms() {
            terms.push((*w, proj.matmul(k)));
        }
    }
    Ok(KrausMap::new(m.in_dim(), keep, terms)?.pruned())
}

/// Supertrace of a map: the trace of its (normalized) Choi matrix, equal to
/// `Tr[M(1/d_in)]`. Every channel has supertrace 1.
pub fn supertrace(m: &KrausMap) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, k) in m.terms() {
        acc += w * k.adjoint().matmul(k).trace();
    }
    acc / m.in_dim() as f64
}

/// Partial supertrace over the second leg of a bipartite map on
/// `first (x) rest`: feeds that leg the maximally mixed state and discards
/// its output, leaving the effective map on the first leg.
pub fn supertrace_partial(
    m: &KrausMap,
    first_in: usize,
    first_out: usize,
) -> Result<KrausMap> {
    if !m.in_dim().is_multiple_of(first_in) || !m.out_dim().is_multiple_of(first_out) {
        return Err(Error::DimMismatch(
            "legs do not factor the map's dimensions".into(),
        ));
    }
    let b_in = m.in_dim() / first_in;
    let b_out = m.out_dim() / first_out;
    let fed = feed_second_input(m, first_in, &max_mixed(b_in))?;
    trace_second_output(&fed, b_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dephasing, maps_equal};
    use crate::matcore::{gates, ComplexMatrix};

    #[test]
    fn supertrace_of_channels_is_one() {
        for m in [
            KrausMap::identity(3).unwrap(),
            dephasing(4).unwrap(),
            KrausMap::completely_depolarizing(2).unwrap(),
        ] {
            let t = supertrace(&m);
            assert!((t - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_supertrace_of_cz_is_dephasing() {
        let cz = KrausMap::unitary(&gates::cz()).unwrap();
        let eff = supertrace_partial(&cz, 2, 2).unwrap();
        assert!(maps_equal(&eff, &dephasing(2).unwrap(), 1e-12));
    }

    #[test]
    fn feeding_and_tracing_swap_moves_the_state_across() {
        // Tr_2[F (rho (x) sigma) F†] = sigma for every rho.
        let f = KrausMap::unitary(&gates::swap(2)).unwrap();
        let sigma = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(0.8, 0.0),
                Complex64::new(0.1, -0.1),
                Complex64::new(0.1, 0.1),
                Complex64::new(0.2, 0.0),
            ],
        )
        .unwrap();
        let eff = trace_second_output(&feed_second_input(&f, 2, &sigma).unwrap(), 2).unwrap();
        let want = KrausMap::constant_map(&sigma).unwrap();
        assert!(maps_equal(&eff, &want, 1e-12));
    }

    #[test]
    fn feed_first_matches_manual_tensor() {
        let cz = KrausMap::unitary(&gates::cz()).unwrap();
        let sigma = crate::matcore::max_mixed(2);
        let eff = feed_first_input(&cz, &sigma, 2).unwrap();
        // |+><+| on the remaining input.
        let tau = ComplexMatrix::from_fn(2, 2, |_, _| Complex64::new(0.5, 0.0));
        let direct = cz.apply(&sigma.tensor(&tau)).unwrap();
        assert!(eff.apply(&tau).unwrap().approx_eq(&direct, 1e-12));
    }

    #[test]
    fn superchannel_sandwich_matches_direct_composition() {
        // pre = id (x) nothing (memory 1), post = dephasing: Theta(M) = deph ∘ M.
        let pre = KrausMap::identity(2).unwrap();
        let post = dephasing(2).unwrap();
        let theta = Superchannel::new(pre, post.clone(), 1).unwrap();
        let m = KrausMap::unitary(&gates::h()).unwrap();
        let got = theta.apply(&m).unwrap();
        let want = post.compose(&m).unwrap();
        assert!(maps_equal(&got, &want, 1e-12));
    }

    #[test]
    fn choi_action_of_identity_supermap() {
        let act = choi_action_matrix(2, 2, |j| Ok(j.clone())).unwrap();
        assert!(act.is_identity(1e-14));
    }
}
