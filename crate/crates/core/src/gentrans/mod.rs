//! Generalized transposition: the family of maps `M -> unvec(W vec(M))`
//! indexed by a unitary kernel `W` on the vectorization space.
//!
//! The swap kernel reproduces the ordinary transpose, the identity kernel the
//! identity map, and product kernels `a (x) b^T` the sandwich `a M b`. The
//! same kernel lifts to operator maps term-wise on Kraus operators and to
//! Choi matrices by conjugation.

pub mod compat;
pub mod ubb;

use crate::channel::{ChoiMatrix, KrausMap};
use crate::error::{Error, Result};
use crate::matcore::{gamma_vector, gates, ComplexMatrix, DimensionSpec, MAX_DIM};
use num_complex::Complex64;

/// Applies `T[W]: M -> unvec(W vec(M))`. Works for rectangular `M`; the
/// kernel must be square with side `rows * cols`.
pub fn gen_transpose(m: &ComplexMatrix, w: &ComplexMatrix) -> Result<ComplexMatrix> {
    let side = m.rows() * m.cols();
    if w.rows() != side || w.cols() != side {
        return Err(Error::DimMismatch(format!(
            "kernel is {}x{}, expected {}x{}",
            w.rows(),
            w.cols(),
            side,
            side
        )));
    }
    ComplexMatrix::unvectorize(&w.matmul(&m.vectorize()), m.rows(), m.cols())
}

/// Fractional transposition in closed form:
/// `M(theta) = e^{-i theta/2} (cos(theta/2) M + i sin(theta/2) M^T)`.
pub fn fractional_transpose(m: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    m.dim()?;
    let half = theta / 2.0;
    let front = Complex64::from_polar(1.0, -half);
    let a = front * Complex64::new(half.cos(), 0.0);
    let b = front * Complex64::new(0.0, half.sin());
    Ok(m.scale(a).add_m(&m.transpose().scale(b)))
}

/// Kernel of the fractional transposition on a `d`-dimensional system:
/// `W(theta) = e^{-i theta/2} (cos(theta/2) 1 + i sin(theta/2) F)` with `F`
/// the swap on the vectorization space.
pub fn fractional_kernel(d: usize, theta: f64) -> ComplexMatrix {
    let half = theta / 2.0;
    let front = Complex64::from_polar(1.0, -half);
    let id = ComplexMatrix::identity(d * d).scale(front * Complex64::new(half.cos(), 0.0));
    let fl = gates::swap(d).scale(front * Complex64::new(0.0, half.sin()));
    id.add_m(&fl)
}

/// Generalized transposition on the `target` tensor factor only; the kernel
/// acts on that factor's vectorization space.
pub fn partial_gen_transpose(
    m: &ComplexMatrix,
    dims: &DimensionSpec,
    target: usize,
    w: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let total = dims.total();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimMismatch("matrix does not match dimension spec".into()));
    }
    if target >= dims.len() {
        return Err(Error::InvalidInput(format!("subsystem {target} out of range")));
    }
    let dt = dims.factors()[target];
    if w.rows() != dt * dt || w.cols() != dt * dt {
        return Err(Error::DimMismatch(format!(
            "kernel side {} does not match subsystem dimension {}",
            w.rows(),
            dt
        )));
    }
    let mut out = m.clone();
    // Walk all index pairs of the other factors and transform each
    // target-factor block independently.
    let other: Vec<usize> = (0..dims.len()).filter(|&k| k != target).collect();
    let other_spec = DimensionSpec::new(
        if other.is_empty() {
            vec![1]
        } else {
            other.iter().map(|&k| dims.factors()[k]).collect()
        },
    )?;
    let mut row_parts = vec![0usize; dims.len()];
    let mut col_parts = vec![0usize; dims.len()];
    for ro in 0..other_spec.total() {
        let ro_parts = other_spec.split(ro);
        for co in 0..other_spec.total() {
            let co_parts = other_spec.split(co);
            for (slot, &sys) in other.iter().enumerate() {
                row_parts[sys] = ro_parts[slot];
                col_parts[sys] = co_parts[slot];
            }
            let mut block = ComplexMatrix::zeros(dt, dt);
            for br in 0..dt {
                row_parts[target] = br;
                for bc in 0..dt {
                    col_parts[target] = bc;
                    block.set(br, bc, m.get(dims.join(&row_parts), dims.join(&col_parts)));
                }
            }
            let tb = gen_transpose(&block, w)?;
            for br in 0..dt {
                row_parts[target] = br;
                for bc in 0..dt {
                    col_parts[target] = bc;
                    out.set(dims.join(&row_parts), dims.join(&col_parts), tb.get(br, bc));
                }
            }
        }
    }
    Ok(out)
}

/// Lifts `T[W]` to operator maps, term-wise on the Kraus operators.
pub fn gen_transpose_channel(m: &KrausMap, w: &ComplexMatrix) -> Result<KrausMap> {
    let mut terms = Vec::with_capacity(m.kraus_count());
    for (weight, k) in m.terms() {
        terms.push((*weight, gen_transpose(k, w)?));
    }
    KrausMap::new(m.in_dim(), m.out_dim(), terms)
}

/// The partial kernel action lifted to operator maps, again term-wise.
pub fn partial_gen_transpose_channel(
    m: &KrausMap,
    dims: &DimensionSpec,
    target: usize,
    w: &ComplexMatrix,
) -> Result<KrausMap> {
    let mut terms = Vec::with_capacity(m.kraus_count());
    for (weight, k) in m.terms() {
        terms.push((*weight, partial_gen_transpose(k, dims, target, w)?));
    }
    KrausMap::new(m.in_dim(), m.out_dim(), terms)
}

/// Whether the channel survives the kernel action: `T[W]` applied to every
/// Kraus operator must again give a CPTP map.
pub fn is_compatible_channel(m: &KrausMap, w: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(gen_transpose_channel(m, w)?.is_cptp(tol))
}

/// Same predicate when the kernel acts on one tensor factor only.
pub fn is_compatible_channel_on(
    m: &KrausMap,
    dims: &DimensionSpec,
    target: usize,
    w: &ComplexMatrix,
    tol: f64,
) -> Result<bool> {
    Ok(partial_gen_transpose_channel(m, dims, target, w)?.is_cptp(tol))
}

/// The same lift on Choi matrices: `J -> W J W†`.
pub fn gen_transpose_choi(j: &ChoiMatrix, w: &ComplexMatrix) -> Result<ChoiMatrix> {
    let side = j.in_dim() * j.out_dim();
    if w.rows() != side || w.cols() != side {
        return Err(Error::DimMismatch("kernel does not match Choi side".into()));
    }
    ChoiMatrix::new(
        j.in_dim(),
        j.out_dim(),
        w.matmul(j.matrix()).matmul(&w.adjoint()),
    )
}

/// Independent network-contraction form of the lifted map's output:
/// `d_in^2 Tr_{2,3}[(1_out (x) phi+_{in,ref}) (W J W† (x) sigma)]`.
///
/// Exercises a different index path than [`gen_transpose_channel`]; the two
/// must agree on every state.
pub fn gen_transpose_output_oracle(
    j: &ChoiMatrix,
    w: &ComplexMatrix,
    sigma: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let d_in = j.in_dim();
    let d_out = j.out_dim();
    if sigma.dim()? != d_in {
        return Err(Error::DimMismatch("state does not match Choi input".into()));
    }
    let jw = gen_transpose_choi(j, w)?;
    // Registers: (out, in, ref).
    let lifted_phi = ComplexMatrix::identity(d_out).tensor(&crate::matcore::phi_plus_state(d_in));
    let big = lifted_phi.matmul(&jw.matrix().tensor(sigma));
    let dims = DimensionSpec::new(vec![d_out, d_in, d_in])?;
    let kept = big.partial_trace(&dims, &[0])?;
    Ok(kept.scale_re((d_in * d_in) as f64))
}

/// Unitality of a kernel: `T[W](1) = 1`, i.e. `W vec(1) = vec(1)`.
pub fn is_unital_gt(w: &ComplexMatrix, tol: f64) -> Result<bool> {
    let d = kernel_system_dim(w)?;
    let g = gamma_vector(d);
    Ok(w.matmul(&g).approx_eq(&g, tol))
}

/// System dimension `d` of a kernel on a `d^2` vectorization space.
pub fn kernel_system_dim(w: &ComplexMatrix) -> Result<usize> {
    let side = w.dim()?;
    let d = (side as f64).sqrt().round() as usize;
    if d * d != side {
        return Err(Error::DimMismatch(format!(
            "kernel side {side} is not a perfect square"
        )));
    }
    if d > MAX_DIM {
        return Err(Error::DimTooLarge { dim: d, max: MAX_DIM });
    }
    Ok(d)
}

/// Generalized transposition with a validated unitary kernel on a square
/// system.
#[derive(Debug, Clone)]
pub struct GenTransposition {
    kernel: ComplexMatrix,
    dim: usize,
}

impl GenTransposition {
    pub fn new(kernel: ComplexMatrix) -> Result<Self> {
        let dim = kernel_system_dim(&kernel)?;
        if !kernel.is_unitary(1e-8) {
            let dev = kernel
                .adjoint()
                .matmul(&kernel)
                .max_abs_diff(&ComplexMatrix::identity(kernel.rows()));
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { kernel, dim })
    }

    /// Ordinary transpose.
    pub fn transpose(d: usize) -> Self {
        Self {
            kernel: gates::swap(d),
            dim: d,
        }
    }

    /// Identity map.
    pub fn trivial(d: usize) -> Self {
        Self {
            kernel: ComplexMatrix::identity(d * d),
            dim: d,
        }
    }

    /// Fractional transposition of angle `theta`.
    pub fn fractional(d: usize, theta: f64) -> Self {
        Self {
            kernel: fractional_kernel(d, theta),
            dim: d,
        }
    }

    pub fn kernel(&self) -> &ComplexMatrix {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        gen_transpose(m, &self.kernel)
    }

    pub fn apply_channel(&self, m: &KrausMap) -> Result<KrausMap> {
        gen_transpose_channel(m, &self.kernel)
    }

    pub fn apply_choi(&self, j: &ChoiMatrix) -> Result<ChoiMatrix> {
        gen_transpose_choi(j, &self.kernel)
    }

    pub fn is_unital(&self, tol: f64) -> Result<bool> {
        is_unital_gt(&self.kernel, tol)
    }
}
