//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the simulator is generic over (`f32` or `f64`).
///
/// Besides the usual float operations it carries the structural tolerances
/// that depend on the working precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Relative anti-Hermitian residue accepted when wrapping a matrix as Hermitian.
    fn hermitian_tolerance() -> Self;
    /// Accepted deviation of a state norm from one.
    fn norm_tolerance() -> Self;
    /// Off-diagonal threshold (relative to the Frobenius norm) at which Jacobi sweeps stop.
    fn jacobi_tolerance() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f64 {
    fn hermitian_tolerance() -> Self {
        1e-12
    }
    fn norm_tolerance() -> Self {
        1e-9
    }
    fn jacobi_tolerance() -> Self {
        1e-15
    }
}

impl Real for f32 {
    fn hermitian_tolerance() -> Self {
        1e-5
    }
    fn norm_tolerance() -> Self {
        1e-4
    }
    fn jacobi_tolerance() -> Self {
        1e-7
    }
}

/// `exp(i·phase)`.
pub fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

/// Ordinary frequency in MHz to angular frequency in rad/µs.
pub fn angular<T: Real>(mhz: T) -> T {
    T::two_pi() * mhz
}
