//! Small dense complex linear algebra.

mod eigen;
mod expm;
mod matrix;

pub use eigen::{eigh, EigenDecomposition, MAX_DIM};
pub use expm::pade_propagator;
pub use matrix::{ComplexMatrix, HermitianOperator, StateVector, UnitaryOperator};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{invalid, Result};
use crate::scalar::{cis, Real};

/// `exp(−i·M·dt)` from the eigendecomposition of `M`.
pub fn propagator<T: Real>(m: &HermitianOperator<T>, dt: T) -> Result<UnitaryOperator<T>> {
    if !dt.is_finite() {
        return Err(invalid("time step must be finite"));
    }
    let e = eigh(m)?;
    Ok(propagator_from(&e, dt))
}

/// `exp(−i·M·dt)` for an already diagonalized `M`.
pub fn propagator_from<T: Real>(e: &EigenDecomposition<T>, dt: T) -> UnitaryOperator<T> {
    UnitaryOperator::new_unchecked(e.map_spectrum(|l| cis(-l * dt)))
}

/// Kronecker product `A ⊗ B`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij.is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `Re⟨ψ|M|ψ⟩`.
pub fn expectation<T: Real>(psi: &StateVector<T>, m: &HermitianOperator<T>) -> Result<T> {
    if psi.dim() != m.dim() {
        return Err(invalid(format!(
            "state dimension {} does not match operator dimension {}",
            psi.dim(),
            m.dim()
        )));
    }
    let mpsi = m.matrix().matvec(psi.amplitudes());
    let value: Complex<T> = psi.amplitudes().iter().zip(&mpsi).map(|(a, b)| a.conj() * *b).sum();
    Ok(value.re)
}

/// Pauli matrices and the 2×2 identity.
pub mod pauli {
    use super::*;

    fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
        Complex::new(T::lit(re), T::lit(im))
    }

    pub fn identity<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::identity(2)
    }

    pub fn x<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn y<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub fn z<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    // scaled-and-squared Taylor series, independent of eigh
    fn taylor_propagator<T: Real>(m: &ComplexMatrix<T>, dt: T) -> ComplexMatrix<T> {
        let n = m.rows();
        let mut a = m.scale(Complex::new(T::zero(), -dt));
        let norm = a.frobenius_norm();
        let mut squarings = 0;
        let mut s = norm;
        while s > T::lit(0.125) {
            s = s / T::lit(2.0);
            squarings += 1;
        }
        a = a.scale_real(T::lit(0.5).powi(squarings));
        let mut term = ComplexMatrix::identity(n);
        let mut sum = ComplexMatrix::identity(n);
        for k in 1..=24 {
            term = (&term * &a).scale_real(T::one() / T::from_usize(k).unwrap());
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn herm(m: ComplexMatrix<f64>) -> HermitianOperator<f64> {
        HermitianOperator::new(m).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> ComplexMatrix<f64> {
        let data = (0..r * c)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::from_vec(r, c, data).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator<f64> {
        let a = random_matrix(rng, n, n);
        herm((&a + &a.adjoint()).scale_real(0.5))
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let u = propagator(&HermitianOperator::<f64>::zeros(4), 3.7).unwrap();
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn pi_pulse_swaps_population() {
        let omega = 2.0 * PI * 20.0;
        let h = herm(pauli::x::<f64>().scale_real(omega));
        // ω·dt = π/2 is the full swap; ω·dt = π returns to −I
        let u = propagator(&h, PI / 2.0 / omega).unwrap();
        let expected = pauli::x::<f64>().scale(Complex::new(0.0, -1.0));
        assert!(u.matrix().max_abs_diff(&expected) < 1e-12);
        let u = propagator(&h, PI / omega).unwrap();
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-12);
    }

    #[test]
    fn eigen_route_matches_taylor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        // scale to MHz-like angular magnitudes
        let h = random_hermitian(&mut rng, 4).scale(2.0 * PI * 20.0);
        let dt = 0.013;
        let u = propagator(&h, dt).unwrap();
        let oracle = taylor_propagator(h.matrix(), dt);
        assert!(u.matrix().max_abs_diff(&oracle) < 1e-9);
        assert!(u.unitarity_residual() < 1e-10);
    }

    #[test]
    fn kron_examples() {
        let iz = kron(&pauli::identity::<f64>(), &pauli::z());
        assert_eq!(iz, ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 1.0, -1.0]));
        let xi = kron(&pauli::x::<f64>(), &pauli::identity());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i + 2) % 4 == j { 1.0 } else { 0.0 };
                assert_eq!(xi[(i, j)], Complex::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn expectation_examples() {
        let sz = herm(pauli::z());
        let up = StateVector::basis(2, 0).unwrap();
        assert_eq!(expectation(&up, &sz).unwrap(), 1.0);
        let plus = StateVector::new(vec![Complex::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
        assert!((expectation(&plus, &herm(pauli::x())).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&plus, &HermitianOperator::identity(3)).is_err());
    }

    #[test]
    fn propagator_rejects_non_finite_step() {
        assert!(propagator(&HermitianOperator::<f64>::identity(2), f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn forward_backward_is_identity(seed in 0u64..10_000, n in 1usize..8, dt in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, n).scale(10.0);
            let u = propagator(&h, dt).unwrap();
            let v = propagator(&h, -dt).unwrap();
            prop_assert!(u.compose(&v).matrix().max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        }

        #[test]
        fn kron_is_associative_and_bilinear(seed in 0u64..10_000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, 2, 3);
            let b = random_matrix(&mut rng, 3, 2);
            let b2 = random_matrix(&mut rng, 3, 2);
            let c = random_matrix(&mut rng, 2, 2);
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            prop_assert!(left.max_abs_diff(&right) < 1e-12);
            let s = Complex::new(re, im);
            let lin = kron(&a, &(&b.scale(s) + &b2));
            let sum = &kron(&a, &b).scale(s) + &kron(&a, &b2);
            prop_assert!(lin.max_abs_diff(&sum) < 1e-12);
        }
    }
}
