//! Relative entropy distance of tripartite quantum states from the set of
//! quantum Markov chains.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod entropy;
pub mod error;
pub mod families;
pub mod io;
pub mod linalg;
pub mod markov;
pub mod optimize;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Density = linalg::DensityMatrix<f64>;
pub type State = linalg::TripartiteState<f64>;
pub type Pure = linalg::PureState<f64>;
pub type Joint = classical::ClassicalJoint<f64>;
pub type Decomp = markov::Decomposition<f64>;
pub type Markov = markov::MarkovState<f64>;
pub type Optimum = optimize::OptResult<f64>;
pub type Family = families::FamilyPoint<f64>;

pub type Matrix32 = linalg::ComplexMatrix<f32>;
pub type State32 = linalg::TripartiteState<f32>;
