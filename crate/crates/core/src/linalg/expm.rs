//! `exp(−i·H·dt)` by scaling and squaring with the diagonal [6/6] Padé approximant.
//!
//! For Hermitian `H` the argument `A = −i·H·dt` is skew-Hermitian and the
//! diagonal approximant `q(A)⁻¹·p(A)` with `q(A) = p(−A)` is unitary in exact
//! arithmetic, so only rounding error breaks unitarity. After scaling to
//! `‖A‖₁ ≤ 1/2` the truncation error is below 1e-16.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{ComplexMatrix, HermitianOperator, UnitaryOperator};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

// (12−k)!·6! / (12!·k!·(6−k)!)
const PADE6: [f64; 7] = [
    1.0,
    0.5,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

fn one_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)].norm()).fold(T::zero(), |a, b| a + b))
        .fold(T::zero(), T::max)
}

fn axpy_identity<T: Real>(m: &ComplexMatrix<T>, c: T) -> ComplexMatrix<T> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        out[(i, i)] = out[(i, i)] + Complex::new(c, T::zero());
    }
    out
}

/// Solves `Q·X = P` by Gaussian elimination with partial pivoting.
fn solve<T: Real>(q: &ComplexMatrix<T>, p: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = q.rows();
    let mut a = q.clone();
    let mut b = p.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).expect("finite"))
            .expect("non-empty range");
        if a[(pivot, col)].norm().is_zero() {
            return Err(Error::ConvergenceFailure("singular Padé denominator".into()));
        }
        if pivot != col {
            for k in 0..n {
                let t = a[(col, k)];
                a[(col, k)] = a[(pivot, k)];
                a[(pivot, k)] = t;
                let t = b[(col, k)];
                b[(col, k)] = b[(pivot, k)];
                b[(pivot, k)] = t;
            }
        }
        let inv = Complex::new(T::one(), T::zero()) / a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] * inv;
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                a[(r, k)] = a[(r, k)] - f * a[(col, k)];
            }
            for k in 0..n {
                b[(r, k)] = b[(r, k)] - f * b[(col, k)];
            }
        }
    }
    for col in (0..n).rev() {
        let inv = Complex::new(T::one(), T::zero()) / a[(col, col)];
        for k in 0..n {
            let mut acc = b[(col, k)];
            for j in col + 1..n {
                acc = acc - a[(col, j)] * b[(j, k)];
            }
            b[(col, k)] = acc * inv;
        }
    }
    Ok(b)
}

/// `exp(−i·M·dt)` without diagonalization; intended for the short steps of
/// time-dependent integration.
pub fn pade_propagator<T: Real>(m: &HermitianOperator<T>, dt: T) -> Result<UnitaryOperator<T>> {
    if !dt.is_finite() || !m.matrix().is_finite() {
        return Err(invalid("propagator needs finite input"));
    }
    let n = m.dim();
    let a = m.matrix().scale(Complex::new(T::zero(), -dt));
    let norm = one_norm(&a);
    let mut squarings = 0u32;
    let mut scaled = norm;
    while scaled > T::lit(0.5) {
        scaled = scaled * T::lit(0.5);
        squarings += 1;
    }
    let a = a.scale_real(T::lit(0.5).powi(squarings as i32));
    let c = PADE6.map(T::lit);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let odd = &a * &axpy_identity(&(&a2.scale_real(c[3]) + &a4.scale_real(c[5])), c[1]);
    let even = axpy_identity(
        &(&(&a2.scale_real(c[2]) + &a4.scale_real(c[4])) + &a6.scale_real(c[6])),
        c[0],
    );
    let mut r = solve(&(&even - &odd), &(&even + &odd))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    debug_assert_eq!(r.rows(), n);
    Ok(UnitaryOperator::new_unchecked(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::propagator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64, scale: f64) -> HermitianOperator<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(scale * rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn matches_eigen_route_across_scales() {
        for (seed, scale, dt) in [(1, 1.0, 0.01), (2, 100.0, 0.003), (3, 3000.0, 0.01), (4, 1.0, -2.5)] {
            let h = random_hermitian(9, seed, scale);
            let u = pade_propagator(&h, dt).unwrap();
            let v = propagator(&h, dt).unwrap();
            assert!(u.matrix().max_abs_diff(v.matrix()) < 1e-11, "seed {seed}");
            assert!(u.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let h = random_hermitian(4, 9, 5.0);
        let u = pade_propagator(&h, 0.0).unwrap();
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        assert!(pade_propagator(&h, f64::NAN).is_err());
    }
}
