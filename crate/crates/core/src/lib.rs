//! Dirac-equation dynamics on a driven four-level "diamond" system and on the
//! two-transmon circuit that realizes it.
//!
//! The numerical modules are generic over the real scalar type ([`Real`]:
//! `f32` or `f64`); the aliases at the crate root fix `f64`, which is what the
//! scenarios and the command-line tool use.

// `!(x > 0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod dirac;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Hermitian = linalg::HermitianOperator<f64>;
pub type Unitary = linalg::UnitaryOperator<f64>;
pub type State = linalg::StateVector<f64>;
pub type Eigen = linalg::EigenDecomposition<f64>;
pub type Dirac = dirac::DiracParams<f64>;
pub type Spin = dirac::SpinVector<f64>;
pub type Grid = evolution::TimeGrid<f64>;
pub type Chirp = evolution::ChirpSchedule<f64>;
pub type Traj = evolution::Trajectory<f64>;
pub type Circuit = circuit::CircuitParams<f64>;
pub type Dressed = circuit::DressedBasis<f64>;
pub type Drive = circuit::DriveProgram<f64>;
