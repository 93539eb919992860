//! Small fixed unitaries used throughout tests, searches, and witnesses.

use super::ComplexMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
}

pub fn y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
}

pub fn z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)])
}

pub fn h() -> ComplexMatrix {
    let r = 0.5f64.sqrt();
    ComplexMatrix::new(2, 2, vec![c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]).unwrap()
}

/// Phase gate `diag(1, i)`.
pub fn s() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)])
}

/// `[1, X, Y, Z]` in that order.
pub fn paulis() -> Vec<ComplexMatrix> {
    vec![ComplexMatrix::identity(2), x(), y(), z()]
}

/// Swap of two `d`-dimensional factors.
pub fn swap(d: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            f.set(b * d + a, a * d + b, c(1.0, 0.0));
        }
    }
    f
}

/// Cyclic shift `S|i> = |i+1 mod d>`.
pub fn shift(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m.set((i + 1) % d, i, c(1.0, 0.0));
    }
    m
}

/// Clock unitary `diag(1, w, w^2, ...)`, `w = exp(2 pi i / d)`.
pub fn clock(d: usize) -> ComplexMatrix {
    let entries: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64))
        .collect();
    ComplexMatrix::diagonal(&entries)
}

/// Controlled-X with the control on the first factor.
pub fn cnot() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, c(1.0, 0.0));
    m.set(1, 1, c(1.0, 0.0));
    m.set(2, 3, c(1.0, 0.0));
    m.set(3, 2, c(1.0, 0.0));
    m
}

/// Controlled-X with the control on the second factor.
pub fn cnot_flipped() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, c(1.0, 0.0));
    m.set(3, 1, c(1.0, 0.0));
    m.set(2, 2, c(1.0, 0.0));
    m.set(1, 3, c(1.0, 0.0));
    m
}

/// Controlled-Z (symmetric in its two qubits).
pub fn cz() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixed_gates_are_unitary() {
        for g in [x(), y(), z(), h(), s(), cnot(), cnot_flipped(), cz(), swap(3), shift(5), clock(4)] {
            assert!(g.is_unitary(1e-12));
        }
    }

    #[test]
    fn flipped_cnot_acts_on_first_qubit() {
        // Control on the second factor: |a b> -> |a xor b, b>.
        let w = cnot_flipped();
        for a in 0..2usize {
            for b in 0..2usize {
                let mut v = ComplexMatrix::zeros(4, 1);
                v.set(a * 2 + b, 0, Complex64::new(1.0, 0.0));
                let out = w.matmul(&v);
                assert_eq!(out.get((a ^ b) * 2 + b, 0), Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn shift_cubes_to_identity() {
        let s3 = shift(3);
        assert!(s3.matmul(&s3).matmul(&s3).is_identity(1e-12));
    }
}
