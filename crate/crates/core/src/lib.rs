//! Fibonacci-anyon braiding in the ℤ₃ parafermion Pfaffian state.
//!
//! Fusion paths, braid generators and gate synthesis are generic over the
//! real scalar ([`scalar::Real`]); the aliases below fix it to f64 or f32.

pub mod blocks;
pub mod braidrep;
pub mod cftchars;
pub mod fusion;
pub mod gatesynth;
pub mod golden;
pub mod interferometry;
pub mod linalg;
pub mod scalar;
pub mod verify;

pub use num_complex::{Complex32, Complex64};

pub type CMatrix64 = linalg::CMatrix<f64>;
pub type CMatrix32 = linalg::CMatrix<f32>;
pub type Unitary = braidrep::Operator<f64>;
pub type Unitary32 = braidrep::Operator<f32>;
pub type RData64 = braidrep::RData<f64>;
