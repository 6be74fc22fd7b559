//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the real symmetric Jacobi rotation that zeroes it:
//!
//! ```text
//! G = D(q, e^{-iφ}) · J(p, q, θ),    A ← G†AG,    V ← VG
//! ```
//!
//! Sweeps continue until the off-diagonal Frobenius norm drops below
//! `jacobi_tolerance · ‖A‖_F`. Quadratic convergence makes a handful of sweeps
//! sufficient for the matrix sizes used here (n ≤ 16).

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{ComplexMatrix, HermitianOperator};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;
pub const MAX_DIM: usize = 16;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        self.eigenvectors.column(k)
    }

    /// `V·diag(f(λ))·V†`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let v = &self.eigenvectors;
        let n = self.dim();
        let fl: Vec<Complex<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::zero();
                for k in 0..n {
                    acc = acc + v[(i, k)] * fl[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map_spectrum(|l| Complex::new(l, T::zero()))
    }

    /// Orthogonal projector onto the eigenspace spanned by eigenvalues in `[lo, hi]`.
    pub fn spectral_projector(&self, lo: T, hi: T) -> ComplexMatrix<T> {
        self.map_spectrum(|l| {
            if l >= lo && l <= hi {
                Complex::one()
            } else {
                Complex::zero()
            }
        })
    }
}

/// Diagonalizes a Hermitian operator.
pub fn eigh<T: Real>(m: &HermitianOperator<T>) -> Result<EigenDecomposition<T>> {
    let a0 = m.matrix();
    let n = a0.rows();
    if n > MAX_DIM {
        return Err(invalid(format!("dimension {n} exceeds supported maximum {MAX_DIM}")));
    }
    if !a0.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    let mut a = a0.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = T::jacobi_tolerance() * scale;

    let mut converged = n <= 1 || scale.is_zero();
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweep += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, new)] = v[(r, old)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc + a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag.is_zero() {
        return;
    }
    let n = a.rows();
    let phase = apq / mag; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (T::lit(2.0) * mag);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let cr = Complex::new(c, T::zero());
    let sr = Complex::new(s, T::zero());
    // G_pp = c, G_pq = s, G_qp = -s·e^{-iφ}, G_qq = c·e^{-iφ}
    let gqp = -sr * phase.conj();
    let gqq = cr * phase.conj();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cr + akq * gqp;
        a[(k, q)] = akp * sr + akq * gqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cr + vkq * gqp;
        v[(k, q)] = vkp * sr + vkq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = cr * apk + gqp.conj() * aqk;
        a[(q, k)] = sr * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
}
