//! Dense complex matrix core: storage, arithmetic, subsystem reshapes, and
//! the vectorization convention the whole calculus is built on.
//!
//! Convention used everywhere: `vec(M) = (M ⊗ 1)|Γ⟩` with `|Γ⟩ = Σ_i |ii⟩`,
//! which is the row-major flattening of `M`. All subsystem indexing is
//! big-endian: the first factor of a tensor product is the most significant
//! index.

mod linalg;
pub mod gates;

pub use linalg::{
    cholesky, complete_orthonormal, fidelity, frame_unitary, hermitian_eig,
    nearest_max_entangled, polar_unitary, schatten_norm, sine_metric, singular_values, sqrt_psd,
    unitary_eigenvalues, EigH,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Default tolerance for predicates and verification passes.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hard cap on system dimensions accepted by constructors; derived spaces
/// (vectorized operators, Choi matrices) may be quadratically larger.
pub const MAX_DIM: usize = 64;

/// Ordered subsystem dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionSpec {
    factors: Vec<usize>,
}

impl DimensionSpec {
    /// Builds a spec from per-subsystem dimensions, each at least 1.
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("empty dimension list".into()));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidInput("zero subsystem dimension".into()));
        }
        Ok(Self { factors })
    }

    /// Convenience constructor for a bipartite space.
    pub fn pair(a: usize, b: usize) -> Self {
        Self::new(vec![a, b]).expect("positive dimensions")
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total dimension, the product of all factors.
    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }

    /// Splits a flat index into per-subsystem indices (big-endian).
    pub fn split(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for k in (0..self.factors.len()).rev() {
            out[k] = idx % self.factors[k];
            idx /= self.factors[k];
        }
        out
    }

    /// Joins per-subsystem indices into a flat index (big-endian).
    pub fn join(&self, parts: &[usize]) -> usize {
        assert_eq!(parts.len(), self.factors.len());
        let mut idx = 0;
        for (k, &p) in parts.iter().enumerate() {
            debug_assert!(p < self.factors[k]);
            idx = idx * self.factors[k] + p;
        }
        idx
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix entry-wise from a closure.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    /// Column vector from entries.
    pub fn col_vector(entries: Vec<Complex64>) -> Self {
        let rows = entries.len();
        Self {
            rows,
            cols: 1,
            data: entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c] = v;
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add_m(&self, other: &Self) -> Self {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch in add"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub_m(&self, other: &Self) -> Self {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch in sub"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        out
    }

    /// Kronecker product, first factor most significant.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out.set(
                            r1 * other.rows + r2,
                            c1 * other.cols + c2,
                            a * other.get(r2, c2),
                        );
                    }
                }
            }
        }
        out
    }

    /// Hilbert-Schmidt inner product `Tr[self† other]`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch in hs_inner"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Frobenius (Schatten-2) norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch in max_abs_diff"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                if (self.get(r, c) - self.get(c, r).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.adjoint().matmul(self).is_identity(tol)
    }

    /// Positive semidefinite within `tol` (Hermitian and no eigenvalue below `-tol`).
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol.max(1e-12) * 10.0) {
            return false;
        }
        match hermitian_eig(&self.hermitian_part()) {
            Ok(e) => e.values.iter().all(|&v| v >= -tol),
            Err(_) => false,
        }
    }

    /// Density operator within `tol`: PSD with unit trace.
    pub fn is_state(&self, tol: f64) -> bool {
        self.is_square() && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol && self.is_psd(tol)
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        self.add_m(&self.adjoint()).scale_re(0.5)
    }

    /// Row-major flattening as a column vector; equals `(M ⊗ 1)|Γ⟩` for square `M`.
    pub fn vectorize(&self) -> Self {
        Self {
            rows: self.rows * self.cols,
            cols: 1,
            data: self.data.clone(),
        }
    }

    /// Inverse of [`ComplexMatrix::vectorize`].
    pub fn unvectorize(v: &Self, rows: usize, cols: usize) -> Result<Self> {
        if v.cols != 1 || v.rows != rows * cols {
            return Err(Error::DimMismatch(format!(
                "cannot reshape a {}x{} vector into a {}x{} matrix",
                v.rows, v.cols, rows, cols
            )));
        }
        Self::new(rows, cols, v.data.clone())
    }

    /// Partial trace keeping the listed subsystems (in their original order).
    pub fn partial_trace(&self, dims: &DimensionSpec, keep: &[usize]) -> Result<Self> {
        self.check_dims(dims)?;
        let n = dims.len();
        let mut seen = vec![false; n];
        for &k in keep {
            if k >= n {
                return Err(Error::InvalidInput(format!("subsystem {k} out of range")));
            }
            if seen[k] {
                return Err(Error::InvalidInput(format!("subsystem {k} listed twice")));
            }
            seen[k] = true;
        }
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let traced: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();
        let keep_dim: usize = keep_sorted.iter().map(|&i| dims.factors()[i]).product();
        let traced_dim: usize = traced.iter().map(|&i| dims.factors()[i]).product();
        let keep_spec = DimensionSpec::new(keep_sorted.iter().map(|&i| dims.factors()[i]).collect())
            .unwrap_or(DimensionSpec { factors: vec![1] });
        let traced_spec = DimensionSpec {
            factors: if traced.is_empty() {
                vec![1]
            } else {
                traced.iter().map(|&i| dims.factors()[i]).collect()
            },
        };
        let mut out = Self::zeros(keep_dim, keep_dim);
        let mut full_r = vec![0usize; n];
        let mut full_c = vec![0usize; n];
        for kr in 0..keep_dim {
            let kr_parts = keep_spec.split(kr);
            for kc in 0..keep_dim {
                let kc_parts = keep_spec.split(kc);
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..traced_dim {
                    let t_parts = traced_spec.split(t);
                    for (slot, &sys) in keep_sorted.iter().enumerate() {
                        full_r[sys] = kr_parts[slot];
                        full_c[sys] = kc_parts[slot];
                    }
                    for (slot, &sys) in traced.iter().enumerate() {
                        full_r[sys] = t_parts[slot];
                        full_c[sys] = t_parts[slot];
                    }
                    acc += self.get(dims.join(&full_r), dims.join(&full_c));
                }
                out.set(kr, kc, acc);
            }
        }
        Ok(out)
    }

    /// Partial transpose on the listed subsystems.
    pub fn partial_transpose(&self, dims: &DimensionSpec, targets: &[usize]) -> Result<Self> {
        self.check_dims(dims)?;
        let n = dims.len();
        let mut flip = vec![false; n];
        for &t in targets {
            if t >= n {
                return Err(Error::InvalidInput(format!("subsystem {t} out of range")));
            }
            flip[t] = true;
        }
        let total = dims.total();
        let mut out = Self::zeros(total, total);
        for r in 0..total {
            let mut rp = dims.split(r);
            for c in 0..total {
                let mut cp = dims.split(c);
                for s in 0..n {
                    if flip[s] {
                        std::mem::swap(&mut rp[s], &mut cp[s]);
                    }
                }
                let v = self.get(dims.join(&rp), dims.join(&cp));
                for s in 0..n {
                    if flip[s] {
                        std::mem::swap(&mut rp[s], &mut cp[s]);
                    }
                }
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// Conjugates by the permutation that reorders subsystems as `perm`
    /// (entry `k` of `perm` names the old slot that moves to new slot `k`).
    pub fn permute_systems(&self, dims: &DimensionSpec, perm: &[usize]) -> Result<Self> {
        self.check_dims(dims)?;
        let n = dims.len();
        if perm.len() != n {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidInput("invalid permutation".into()));
            }
            seen[p] = true;
        }
        let new_spec = DimensionSpec {
            factors: perm.iter().map(|&p| dims.factors()[p]).collect(),
        };
        let total = dims.total();
        let mut out = Self::zeros(total, total);
        for r in 0..total {
            let rp = new_spec.split(r);
            let mut old_r = vec![0usize; n];
            for (k, &p) in perm.iter().enumerate() {
                old_r[p] = rp[k];
            }
            for c in 0..total {
                let cp = new_spec.split(c);
                let mut old_c = vec![0usize; n];
                for (k, &p) in perm.iter().enumerate() {
                    old_c[p] = cp[k];
                }
                out.set(r, c, self.get(dims.join(&old_r), dims.join(&old_c)));
            }
        }
        Ok(out)
    }

    fn check_dims(&self, dims: &DimensionSpec) -> Result<()> {
        let total = dims.total();
        if !self.is_square() || self.rows != total {
            return Err(Error::DimMismatch(format!(
                "matrix is {}x{}, dimension spec totals {}",
                self.rows, self.cols, total
            )));
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_m(rhs)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.sub_m(rhs)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Reorders the tensor factors of a column vector according to `perm`
/// (entry `k` names the old slot that moves to new slot `k`).
pub fn permute_vector_systems(
    v: &ComplexMatrix,
    dims: &DimensionSpec,
    perm: &[usize],
) -> Result<ComplexMatrix> {
    if v.cols() != 1 || v.rows() != dims.total() {
        return Err(Error::DimMismatch("vector does not match dimension spec".into()));
    }
    let n = dims.len();
    if perm.len() != n {
        return Err(Error::InvalidInput("permutation length mismatch".into()));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidInput("invalid permutation".into()));
        }
        seen[p] = true;
    }
    let new_spec = DimensionSpec {
        factors: perm.iter().map(|&p| dims.factors()[p]).collect(),
    };
    let mut out = ComplexMatrix::zeros(v.rows(), 1);
    for r in 0..v.rows() {
        let parts = new_spec.split(r);
        let mut old = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            old[p] = parts[k];
        }
        out.set(r, 0, v.get(dims.join(&old), 0));
    }
    Ok(out)
}

/// Unnormalized maximally entangled vector `|Γ⟩ = Σ_i |ii⟩` on a `d·d` space.
pub fn gamma_vector(d: usize) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(d * d, 1);
    for i in 0..d {
        v.set(i * d + i, 0, Complex64::new(1.0, 0.0));
    }
    v
}

/// Normalized maximally entangled state vector `|φ+⟩ = |Γ⟩/√d`.
pub fn phi_plus_vector(d: usize) -> ComplexMatrix {
    gamma_vector(d).scale_re(1.0 / (d as f64).sqrt())
}

/// Projector onto `|φ+⟩` as a density operator.
pub fn phi_plus_state(d: usize) -> ComplexMatrix {
    let v = phi_plus_vector(d);
    outer(&v, &v)
}

/// Maximally mixed state `1/d`.
pub fn max_mixed(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d).scale_re(1.0 / d as f64)
}

/// Outer product `u v†` of two column vectors.
pub fn outer(u: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    assert!(u.cols() == 1 && v.cols() == 1, "outer expects column vectors");
    ComplexMatrix::from_fn(u.rows(), v.rows(), |r, c| u.get(r, 0) * v.get(c, 0).conj())
}

/// Inner product `⟨u|v⟩` of two column vectors.
pub fn inner(u: &ComplexMatrix, v: &ComplexMatrix) -> Complex64 {
    assert!(u.cols() == 1 && v.cols() == 1, "inner expects column vectors");
    assert_eq!(u.rows(), v.rows(), "length mismatch in inner");
    (0..u.rows()).map(|i| u.get(i, 0).conj() * v.get(i, 0)).sum()
}
