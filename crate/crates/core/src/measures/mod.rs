//! Scalar measures on channels and bipartite dynamics: distance to the
//! locally-dressed swap, distance to the constant channels, information
//! destruction, and the leakage/catalyticity quantities derived from them —
//! plus the two causal-locality inequalities that tie them together.

pub mod diamond;
mod optimize;

use crate::channel::{
    feed_second_input, trace_first_output, KrausMap,
};
use crate::error::{Error, Result};
use crate::gentrans::{compat::is_compatible, compat::prep_compat, kernel_system_dim};
use crate::matcore::{
    fidelity, gates, hermitian_eig, max_mixed, outer, phi_plus_state, polar_unitary,
    ComplexMatrix, DimensionSpec,
};
use crate::sampling::{derived_rng, random_state, random_unitary};
use diamond::{choi_hat, diamond_norm_choi, hull_distance, DiamondOptions};
use num_complex::Complex64;
use optimize::{maximize_over_states, maximize_over_unitaries, AscentOptions};

/// Default slack for the inequality verifiers.
pub const DEFAULT_SLACK: f64 = 1e-4;

#[derive(Clone)]
pub struct OptimizerBudget {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        OptimizerBudget {
            seed: 0,
            restarts: 6,
            max_iters: 120,
            tol: 1e-9,
        }
    }
}

impl OptimizerBudget {
    fn ascent(&self) -> AscentOptions {
        AscentOptions {
            max_iters: self.max_iters,
            tol: self.tol.max(1e-12),
            ..Default::default()
        }
    }
}

pub struct MeasureOutcome {
    pub value: f64,
    /// Measure-specific optimality evidence: the attained hull distance for
    /// nonswappability, the remaining duality gap for capacities, the gap to
    /// the spectral upper bound for information destruction, and the best
    /// fidelity for non-catalyticity.
    pub certificate: f64,
}

pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

fn bipartite_side(m: &KrausMap) -> Result<usize> {
    if m.in_dim() != m.out_dim() {
        return Err(Error::DimMismatch(
            "bipartite measure needs matching input and output".into(),
        ));
    }
    let d = (m.in_dim() as f64).sqrt().round() as usize;
    if d * d != m.in_dim() {
        return Err(Error::InvalidInput(format!(
            "dimension {} does not split into two equal factors",
            m.in_dim()
        )));
    }
    Ok(d)
}

fn single_unitary(m: &KrausMap) -> Option<ComplexMatrix> {
    if m.kraus_count() != 1 {
        return None;
    }
    let (w, k) = &m.terms()[0];
    if (w - Complex64::new(1.0, 0.0)).norm() < 1e-10 && k.is_unitary(1e-8) {
        Some(k.clone())
    } else {
        None
    }
}

fn plain_kraus(m: &KrausMap) -> Result<Vec<ComplexMatrix>> {
    let mut out = Vec::with_capacity(m.kraus_count());
    for (w, k) in m.terms() {
        if w.im.abs() > 1e-10 || w.re < -1e-12 {
            return Err(Error::NotChannel(
                "weights of a channel must be nonnegative".into(),
            ));
        }
        out.push(k.scale_re(w.re.max(0.0).sqrt()));
    }
    Ok(out)
}

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            acc += a.get(r, c) * b.get(c, r);
        }
    }
    acc
}

/// Nonswappability: half the diamond distance from the channel to the
/// nearest locally-dressed swap `Ad_{(c_A (x) c_B)} ∘ Ad_F`.
///
/// Unitary channels take a closed-form route: the distance to each candidate
/// is `2 sqrt(1 − ν²)` with `ν` the spectral hull distance, so only `ν` is
/// maximized. Other channels pay for a diamond-norm program per candidate.
pub fn xi_nonswappability(
    m: &KrausMap,
    budget: &OptimizerBudget,
) -> Result<MeasureOutcome> {
    let d = bipartite_side(m)?;
    if !m.is_cptp(1e-6) {
        return Err(Error::NotChannel("nonswappability needs a channel".into()));
    }
    let swap = gates::swap(d);

    if let Some(u) = single_unitary(m) {
        let u_dag = u.adjoint();
        let objective = move |cs: &[ComplexMatrix]| -> Result<f64> {
            let v = cs[0].tensor(&cs[1]).matmul(&swap);
            hull_distance(&u_dag.matmul(&v))
        };
        let mut best = 0.0f64;
        for r in 0..budget.restarts.max(1) {
            let start = if r == 0 {
                vec![ComplexMatrix::identity(d), ComplexMatrix::identity(d)]
            } else {
                let mut rng = derived_rng(budget.seed, r as u64);
                vec![random_unitary(d, &mut rng), random_unitary(d, &mut rng)]
            };
            let (_, nu) = maximize_over_unitaries(&start, &objective, &budget.ascent())?;
            best = best.max(nu);
            if best >= 1.0 - 1e-12 {
                break;
            }
        }
        let nu = best.min(1.0);
        return Ok(MeasureOutcome {
            value: (1.0 - nu * nu).max(0.0).sqrt(),
            certificate: nu,
        });
    }

    let j_m = choi_hat(m);
    let dd = d * d;
    let sdp = DiamondOptions::default();
    let objective = |cs: &[ComplexMatrix]| -> Result<f64> {
        let v = cs[0].tensor(&cs[1]).matmul(&swap).vectorize();
        let j_v = outer(&v, &v);
        let rep = diamond_norm_choi(&j_m.sub_m(&j_v), dd, dd, &sdp)?;
        Ok(-0.5 * rep.value)
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_point = vec![ComplexMatrix::identity(d), ComplexMatrix::identity(d)];
    for r in 0..budget.restarts.max(1) {
        let start = if r == 0 {
            best_point.clone()
        } else {
            let mut rng = derived_rng(budget.seed, r as u64);
            vec![random_unitary(d, &mut rng), random_unitary(d, &mut rng)]
        };
        let (point, v) = maximize_over_unitaries(&start, &objective, &budget.ascent())?;
        if v > best {
            best = v;
            best_point = point;
        }
    }
    let v = best_point[0].tensor(&best_point[1]).matmul(&swap).vectorize();
    let gap = diamond_norm_choi(&j_m.sub_m(&outer(&v, &v)), dd, dd, &sdp)?.gap;
    Ok(MeasureOutcome {
        value: -best,
        certificate: 0.5 * gap,
    })
}

/// Geometric capacity: half the diamond distance to the nearest constant
/// channel `ρ ↦ τ`.
pub fn geometric_capacity(
    m: &KrausMap,
    budget: &OptimizerBudget,
) -> Result<MeasureOutcome> {
    if !m.is_cptp(1e-6) {
        return Err(Error::NotChannel("geometric capacity needs a channel".into()));
    }
    let (n_in, n_out) = (m.in_dim(), m.out_dim());
    let j_m = choi_hat(m);
    let eye_in = ComplexMatrix::identity(n_in);
    let sdp = DiamondOptions::default();
    let objective = |tau: &ComplexMatrix| -> Result<f64> {
        let rep = diamond_norm_choi(&j_m.sub_m(&tau.tensor(&eye_in)), n_out, n_in, &sdp)?;
        Ok(-0.5 * rep.value)
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_tau = max_mixed(n_out);
    for r in 0..budget.restarts.max(1) {
        let start = if r == 0 {
            max_mixed(n_out)
        } else {
            random_state(n_out, &mut derived_rng(budget.seed, r as u64))
        };
        let (tau, v) = maximize_over_states(&start, &objective, &budget.ascent())?;
        if v > best {
            best = v;
            best_tau = tau;
        }
    }
    let gap = diamond_norm_choi(&j_m.sub_m(&best_tau.tensor(&eye_in)), n_out, n_in, &sdp)?
        .gap;
    Ok(MeasureOutcome {
        value: -best,
        certificate: 0.5 * gap,
    })
}

/// Information destruction: `sqrt(1 − max_Y Σ_i |Tr[Y N_i]|² / d²)` over
/// unitaries `Y`, a Kraus-representation invariant. The maximization
/// alternates `Y ← polar((Σ_i conj(c_i) N_i)†)`, which is monotone; the
/// certificate is the gap to the spectral upper bound `d·λ_max(Q)`.
pub fn info_destruction(
    m: &KrausMap,
    budget: &OptimizerBudget,
) -> Result<MeasureOutcome> {
    let d = m.in_dim();
    if m.out_dim() != d {
        return Err(Error::DimMismatch(
            "information destruction needs a square channel".into(),
        ));
    }
    if !m.is_cptp(1e-6) {
        return Err(Error::NotChannel("information destruction needs a channel".into()));
    }
    let kraus = plain_kraus(m)?;

    let mut q = ComplexMatrix::zeros(d * d, d * d);
    for nk in &kraus {
        let v = nk.adjoint().vectorize();
        q = q.add_m(&outer(&v, &v));
    }
    let bound = d as f64 * hermitian_eig(&q)?.values[0].max(0.0);

    let f_of = |y: &ComplexMatrix| -> f64 {
        kraus.iter().map(|nk| trace_product(y, nk).norm_sqr()).sum()
    };
    let mut best = 0.0f64;
    for r in 0..budget.restarts.max(1) {
        let mut y = if r == 0 {
            ComplexMatrix::identity(d)
        } else {
            random_unitary(d, &mut derived_rng(budget.seed, r as u64))
        };
        let mut fv = f_of(&y);
        for _ in 0..budget.max_iters {
            let mut a = ComplexMatrix::zeros(d, d);
            for nk in &kraus {
                let c = trace_product(&y, nk);
                a = a.add_m(&nk.scale(c.conj()));
            }
            let y_next = polar_unitary(&a.adjoint())?;
            let f_next = f_of(&y_next);
            if f_next <= fv + 1e-13 {
                if f_next > fv {
                    fv = f_next;
                }
                break;
            }
            y = y_next;
            fv = f_next;
        }
        best = best.max(fv);
        if bound - best < 1e-12 {
            break;
        }
    }
    Ok(MeasureOutcome {
        value: (1.0 - best / (d * d) as f64).max(0.0).sqrt(),
        certificate: (bound - best).max(0.0),
    })
}

/// Channel seen by the second (B) side when the first (A) side carries the
/// input, `sigma` is fed on B, and A is discarded: `ρ_A ↦ Tr_A[M(ρ (x) σ)]`.
pub fn effective_channel(m: &KrausMap, sigma: &ComplexMatrix) -> Result<KrausMap> {
    let d_b = sigma.dim()?;
    if !m.in_dim().is_multiple_of(d_b) || m.in_dim() == d_b {
        return Err(Error::DimMismatch(format!(
            "input {} does not factor through a {}-dimensional second leg",
            m.in_dim(),
            d_b
        )));
    }
    let d_a = m.in_dim() / d_b;
    let fed = feed_second_input(m, d_a, sigma)?;
    trace_first_output(&fed, d_a)
}

/// Leakage: geometric capacity of the effective B-side channel.
pub fn leakage(
    m: &KrausMap,
    sigma: &ComplexMatrix,
    budget: &OptimizerBudget,
) -> Result<MeasureOutcome> {
    geometric_capacity(&effective_channel(m, sigma)?, budget)
}

/// Non-leakage: information destruction of the effective B-side channel.
pub fn non_leakage(
    m: &KrausMap,
    sigma: &ComplexMatrix,
    budget: &OptimizerBudget,
) -> Result<MeasureOutcome> {
    info_destruction(&effective_channel(m, sigma)?, budget)
}

/// Non-catalyticity: sine distance from the channel's action on half of a
/// maximally entangled probe (with `σᵀ` on the second leg) to the nearest
/// product `ξ_B (x) π_{A'}`; zero exactly when the catalyst comes back
/// unconditionally decoupled.
pub fn non_catalyticity(
    m: &KrausMap,
    sigma: &ComplexMatrix,
    budget: &OptimizerBudget,
) -> Result<MeasureOutcome> {
    let d_b = sigma.dim()?;
    if !sigma.is_state(1e-8) {
        return Err(Error::NotState("catalyst input is not a state".into()));
    }
    if m.in_dim() != m.out_dim() || !m.in_dim().is_multiple_of(d_b) {
        return Err(Error::DimMismatch(
            "non-catalyticity needs a square bipartite channel over the catalyst".into(),
        ));
    }
    let d_a = m.in_dim() / d_b;
    // (A, A', B) -> (A, B, A'), with the probe pairing A to A'.
    let input = phi_plus_state(d_a).tensor(&sigma.transpose());
    let dims = DimensionSpec::new(vec![d_a, d_a, d_b])?;
    let input = input.permute_systems(&dims, &[0, 2, 1])?;
    let big = m.tensor(&KrausMap::identity(d_a)?)?;
    let out = big.apply(&input)?;
    let out_dims = DimensionSpec::new(vec![d_a, d_b, d_a])?;
    let reduced = out.partial_trace(&out_dims, &[1, 2])?;

    let pi_ref = max_mixed(d_a);
    let objective = |xi: &ComplexMatrix| -> Result<f64> {
        fidelity(&reduced, &xi.tensor(&pi_ref))
    };
    let marginal = reduced.partial_trace(&DimensionSpec::pair(d_b, d_a), &[0])?;
    let mut best = f64::NEG_INFINITY;
    for r in 0..budget.restarts.max(1) {
        let start = match r {
            0 => marginal.clone(),
            1 => max_mixed(d_b),
            _ => random_state(d_b, &mut derived_rng(budget.seed, r as u64)),
        };
        let (_, v) = maximize_over_states(&start, &objective, &budget.ascent())?;
        best = best.max(v);
        if best >= 1.0 - 1e-14 {
            break;
        }
    }
    let f = best.clamp(0.0, 1.0);
    Ok(MeasureOutcome {
        value: (1.0 - f).sqrt(),
        certificate: f,
    })
}

fn check_hypotheses(
    u: &ComplexMatrix,
    w: &ComplexMatrix,
    sigma: &ComplexMatrix,
) -> Result<(usize, usize)> {
    let d_b = kernel_system_dim(w)?;
    let d = u.dim()?;
    if d % d_b != 0 || d == d_b {
        return Err(Error::DimMismatch(format!(
            "dynamics of side {d} does not factor over a {d_b}-dimensional second leg"
        )));
    }
    let d_a = d / d_b;
    if !w.is_unitary(1e-8) {
        let dev = w
            .adjoint()
            .matmul(w)
            .max_abs_diff(&ComplexMatrix::identity(w.rows()));
        return Err(Error::NotUnitary(dev));
    }
    if !is_compatible(u, d_a, d_b, w, 1e-7)? {
        return Err(Error::InvalidInput(
            "hypothesis failed: dynamics is not compatible with the kernel".into(),
        ));
    }
    if prep_compat(w, sigma, 1e-7)?.is_none() {
        return Err(Error::InvalidInput(
            "hypothesis failed: kernel is not preparation-compatible with the state".into(),
        ));
    }
    Ok((d_a, d_b))
}

/// Leakage bound: for compatible `(u, w)` and preparation-compatible `σ`,
/// the B-side leakage of the dynamics is at most the nonswappability of the
/// kernel. Hypothesis violations are reported as input errors, not `false`.
pub fn verify_cauloc(
    u: &ComplexMatrix,
    w: &ComplexMatrix,
    sigma: &ComplexMatrix,
    slack: f64,
    budget: &OptimizerBudget,
) -> Result<InequalityReport> {
    check_hypotheses(u, w, sigma)?;
    let dynamics = KrausMap::unitary(u)?;
    let lhs = leakage(&dynamics, sigma, budget)?.value;
    let rhs = xi_nonswappability(&KrausMap::unitary(w)?, budget)?.value;
    Ok(InequalityReport {
        lhs,
        rhs,
        slack,
        holds: lhs <= rhs + slack,
    })
}

/// Catalyticity bound: under the same hypotheses, the non-catalyticity of
/// the kernel (as a bipartite channel over the catalyst) is at most twice
/// the non-leakage of the dynamics.
pub fn verify_cauloc2(
    u: &ComplexMatrix,
    w: &ComplexMatrix,
    sigma: &ComplexMatrix,
    slack: f64,
    budget: &OptimizerBudget,
) -> Result<InequalityReport> {
    check_hypotheses(u, w, sigma)?;
    let dynamics = KrausMap::unitary(u)?;
    let kernel_channel = KrausMap::unitary(w)?;
    let lhs = non_catalyticity(&kernel_channel, sigma, budget)?.value;
    let rhs = 2.0 * non_leakage(&dynamics, sigma, budget)?.value;
    Ok(InequalityReport {
        lhs,
        rhs,
        slack,
        holds: lhs <= rhs + slack,
    })
}
