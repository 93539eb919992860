//! Linear maps on operators in weighted Kraus form, their Choi matrices, and
//! conversions between the two.
//!
//! A map is stored as `rho -> sum_k w_k K_k rho K_k†` with complex weights
//! `w_k`. Channels have all weights 1; differences of channels and images
//! under kernel supermaps stay representable without leaving this form.

pub mod factorizable;
pub mod hjw;
pub mod supermap;

use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eig, max_mixed, ComplexMatrix, DimensionSpec, DEFAULT_TOL, MAX_DIM,
};
use num_complex::Complex64;

/// Operator map in weighted Kraus form.
#[derive(Debug, Clone)]
pub struct KrausMap {
    in_dim: usize,
    out_dim: usize,
    terms: Vec<(Complex64, ComplexMatrix)>,
}

impl KrausMap {
    /// Builds a map from weighted Kraus terms, each `out_dim x in_dim`.
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        terms: Vec<(Complex64, ComplexMatrix)>,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidInput("zero channel dimension".into()));
        }
        if in_dim > MAX_DIM || out_dim > MAX_DIM {
            return Err(Error::DimTooLarge {
                dim: in_dim.max(out_dim),
                max: MAX_DIM,
            });
        }
        if terms.is_empty() {
            return Err(Error::NotChannel("no Kraus terms".into()));
        }
        for (_, k) in &terms {
            if k.rows() != out_dim || k.cols() != in_dim {
                return Err(Error::DimMismatch(format!(
                    "Kraus term is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    out_dim,
                    in_dim
                )));
            }
        }
        Ok(Self {
            in_dim,
            out_dim,
            terms,
        })
    }

    /// Channel from plain Kraus operators (all weights 1).
    pub fn channel(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::NotChannel("no Kraus terms".into()))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        Self::new(
            in_dim,
            out_dim,
            kraus
                .into_iter()
                .map(|k| (Complex64::new(1.0, 0.0), k))
                .collect(),
        )
    }

    /// Unitary conjugation channel.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let d = u.dim()?;
        if !u.is_unitary(1e-8) {
            let dev = u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(d));
            return Err(Error::NotUnitary(dev));
        }
        Self::channel(vec![u.clone()])
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::channel(vec![ComplexMatrix::identity(d)])
    }

    /// Constant map `rho -> Tr[rho] tau`.
    pub fn constant_map(tau: &ComplexMatrix) -> Result<Self> {
        let d_out = tau.dim()?;
        if !tau.is_state(1e-8) {
            return Err(Error::NotState("constant-map target is not a state".into()));
        }
        let eig = hermitian_eig(tau)?;
        let mut kraus = Vec::new();
        for (i, &lam) in eig.values.iter().enumerate() {
            let s = lam.max(0.0).sqrt();
            if s <= 1e-12 {
                continue;
            }
            for j in 0..d_out {
                // sqrt(lam_i) |v_i><j|.
                let mut k = ComplexMatrix::zeros(d_out, d_out);
                for r in 0..d_out {
                    k.set(r, j, eig.vectors.get(r, i) * s);
                }
                kraus.push(k);
            }
        }
        Self::channel(kraus)
    }

    /// Completely depolarizing channel `rho -> Tr[rho] 1/d`.
    pub fn completely_depolarizing(d: usize) -> Result<Self> {
        Self::constant_map(&max_mixed(d))
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn terms(&self) -> &[(Complex64, ComplexMatrix)] {
        &self.terms
    }

    pub fn kraus_count(&self) -> usize {
        self.terms.len()
    }

    /// Drops exactly-zero terms that appear after index contractions.
    fn pruned(mut self) -> Self {
        if self.terms.len() > 1 {
            self.terms
                .retain(|(w, k)| w.norm_sqr() != 0.0 && k.frobenius_norm() != 0.0);
            if self.terms.is_empty() {
                // Keep a single explicit zero so the map stays well-formed.
                self.terms.push((
                    Complex64::new(0.0, 0.0),
                    ComplexMatrix::zeros(self.out_dim, self.in_dim),
                ));
            }
        }
        self
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.in_dim || rho.cols() != self.in_dim {
            return Err(Error::DimMismatch(format!(
                "input is {}x{}, map expects {}x{}",
                rho.rows(),
                rho.cols(),
                self.in_dim,
                self.in_dim
            )));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for (w, k) in &self.terms {
            out = out.add_m(&k.matmul(rho).matmul(&k.adjoint()).scale(*w));
        }
        Ok(out)
    }

    /// Choi matrix on `out (x) in`, normalized to unit trace for channels:
    /// `J = sum_k w_k vec(K_k) vec(K_k)† / in_dim`.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.out_dim * self.in_dim;
        let mut mat = ComplexMatrix::zeros(d, d);
        for (w, k) in &self.terms {
            let v = k.vectorize();
            mat = mat.add_m(&crate::matcore::outer(&v, &v).scale(*w));
        }
        ChoiMatrix {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            mat: mat.scale_re(1.0 / self.in_dim as f64),
        }
    }

    /// Transfer matrix `T = sum_k w_k K_k (x) conj(K_k)`, so that
    /// `vec(M(rho)) = T vec(rho)`.
    pub fn transfer(&self) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(
            self.out_dim * self.out_dim,
            self.in_dim * self.in_dim,
        );
        for (w, k) in &self.terms {
            t = t.add_m(&k.tensor(&k.conj()).scale(*w));
        }
        t
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.out_dim != self.in_dim {
            return Err(Error::DimMismatch(format!(
                "cannot compose: inner output {} vs outer input {}",
                inner.out_dim, self.in_dim
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * inner.terms.len());
        for (w1, k1) in &self.terms {
            for (w2, k2) in &inner.terms {
                terms.push((w1 * w2, k1.matmul(k2)));
            }
        }
        Ok(Self {
            in_dim: inner.in_dim,
            out_dim: self.out_dim,
            terms,
        }
        .pruned())
    }

    /// Tensor product map, first factor most significant.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (w1, k1) in &self.terms {
            for (w2, k2) in &other.terms {
                terms.push((w1 * w2, k1.tensor(k2)));
            }
        }
        Self::new(
            self.in_dim * other.in_dim,
            self.out_dim * other.out_dim,
            terms,
        )
    }

    /// Difference `a - b` as a weighted Kraus map.
    pub fn difference(a: &Self, b: &Self) -> Result<Self> {
        if a.in_dim != b.in_dim || a.out_dim != b.out_dim {
            return Err(Error::DimMismatch("difference of unequal shapes".into()));
        }
        let mut terms = a.terms.clone();
        for (w, k) in &b.terms {
            terms.push((-w, k.clone()));
        }
        Ok(Self {
            in_dim: a.in_dim,
            out_dim: a.out_dim,
            terms,
        })
    }

    /// Trace-preservation defect `|| sum_k w_k K_k† K_k - 1 ||_max`.
    pub fn tp_defect(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for (w, k) in &self.terms {
            acc = acc.add_m(&k.adjoint().matmul(k).scale(*w));
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.in_dim))
    }

    pub fn is_tp(&self, tol: f64) -> bool {
        self.tp_defect() <= tol
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.choi().mat.scale_re(self.in_dim as f64).is_psd(tol)
    }

    pub fn is_cptp(&self, tol: f64) -> bool {
        self.is_tp(tol) && self.is_cp(tol)
    }
}

/// Choi matrix with its channel shape. The matrix lives on `out (x) in` and
/// has unit trace exactly when the map is trace-preserving.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    in_dim: usize,
    out_dim: usize,
    mat: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(in_dim: usize, out_dim: usize, mat: ComplexMatrix) -> Result<Self> {
        if mat.rows() != in_dim * out_dim || !mat.is_square() {
            return Err(Error::DimMismatch(format!(
                "Choi matrix is {}x{}, expected side {}",
                mat.rows(),
                mat.cols(),
                in_dim * out_dim
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            mat,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Applies the represented map: `M(rho) = in_dim * Tr_in[J (1 (x) rho^T)]`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.in_dim || rho.cols() != self.in_dim {
            return Err(Error::DimMismatch("state does not match Choi input".into()));
        }
        let lifted = ComplexMatrix::identity(self.out_dim).tensor(&rho.transpose());
        let dims = DimensionSpec::pair(self.out_dim, self.in_dim);
        let traced = self.mat.matmul(&lifted).partial_trace(&dims, &[0])?;
        Ok(traced.scale_re(self.in_dim as f64))
    }

    /// Recovers a weighted Kraus form by eigendecomposition; weights are
    /// `+1`/`-1` according to eigenvalue sign, so Hermitian Choi matrices
    /// (differences of channels included) round-trip.
    pub fn kraus(&self) -> Result<KrausMap> {
        if !self.mat.is_hermitian(1e-8) {
            return Err(Error::InvalidInput(
                "Kraus extraction needs a Hermitian Choi matrix".into(),
            ));
        }
        let scaled = self.mat.scale_re(self.in_dim as f64);
        let eig = hermitian_eig(&scaled)?;
        let lead = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let cutoff = 1e-12 * lead.max(1.0);
        let mut terms = Vec::new();
        for (i, &lam) in eig.values.iter().enumerate() {
            if lam.abs() <= cutoff {
                continue;
            }
            let col = ComplexMatrix::from_fn(scaled.rows(), 1, |r, _| eig.vectors.get(r, i))
                .scale_re(lam.abs().sqrt());
            let k = ComplexMatrix::unvectorize(&col, self.out_dim, self.in_dim)?;
            terms.push((Complex64::new(lam.signum(), 0.0), k));
        }
        if terms.is_empty() {
            terms.push((
                Complex64::new(0.0, 0.0),
                ComplexMatrix::zeros(self.out_dim, self.in_dim),
            ));
        }
        KrausMap::new(self.in_dim, self.out_dim, terms)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.in_dim == other.in_dim
            && self.out_dim == other.out_dim
            && self.mat.approx_eq(&other.mat, tol)
    }
}

/// Convenience equality of two maps as channels, through their Choi matrices.
pub fn maps_equal(a: &KrausMap, b: &KrausMap, tol: f64) -> bool {
    a.in_dim == b.in_dim
        && a.out_dim == b.out_dim
        && a.choi().mat.approx_eq(&b.choi().mat, tol)
}

/// Dephasing channel in the computational basis.
pub fn dephasing(d: usize) -> Result<KrausMap> {
    let mut kraus = Vec::with_capacity(d);
    for j in 0..d {
        let mut k = ComplexMatrix::zeros(d, d);
        k.set(j, j, Complex64::new(1.0, 0.0));
        kraus.push(k);
    }
    KrausMap::channel(kraus)
}

/// Transpose map `rho -> rho^T` (positive but not completely positive).
pub fn transpose_map(d: usize) -> Result<KrausMap> {
    // Weighted combination of symmetric/antisymmetric Kraus terms:
    // rho^T = sum_{i<=j} S_ij rho S_ij† - sum_{i<j} A_ij rho A_ij†
    // with S_ij = (E_ij + E_ji)/sqrt(2), A_ij = (E_ij - E_ji)/sqrt(2).
    let mut terms = Vec::new();
    let r = 0.5f64.sqrt();
    for i in 0..d {
        for j in i..d {
            let mut s = ComplexMatrix::zeros(d, d);
            if i == j {
                s.set(i, i, Complex64::new(1.0, 0.0));
            } else {
                s.set(i, j, Complex64::new(r, 0.0));
                s.set(j, i, Complex64::new(r, 0.0));
            }
            terms.push((Complex64::new(1.0, 0.0), s));
            if i != j {
                let mut a = ComplexMatrix::zeros(d, d);
                a.set(i, j, Complex64::new(r, 0.0));
                a.set(j, i, Complex64::new(-r, 0.0));
                terms.push((Complex64::new(-1.0, 0.0), a));
            }
        }
    }
    KrausMap::new(d, d, terms)
}

pub use self::factorizable::{
    controlled_pauli_dilation, dilation_unitary, factorizable_apply, factorizable_channel,
    factors_through_max_mixed, is_catalytic_dilation, padded_swap_dilation, stinespring_isometry,
    FactorizableMap,
};
pub use self::hjw::{two_sided_kernel, two_sided_marginal, TwoSidedRep};
pub use self::supermap::{
    choi_action_matrix, feed_first_input, feed_second_input, supertrace, supertrace_partial,
    trace_first_output, trace_second_output, Superchannel,
};

/// Predicate with the library default tolerance.
pub fn is_cptp(map: &KrausMap) -> bool {
    map.is_cptp(DEFAULT_TOL.max(1e-8))
}
