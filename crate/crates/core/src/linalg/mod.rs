//! Dense complex linear algebra for small quantum systems.

mod eig;
mod matrix;
mod ops;
pub mod random;
mod state;

pub use eig::{
    expi_hermitian, hermitian_eig, hermitian_eigenvalues, unitarity_defect, HermitianEigen, MAX_SWEEPS,
    OFF_DIAGONAL_THRESHOLD, TOL_HERM,
};
pub(crate) use eig::jacobi;
pub use matrix::ComplexMatrix;
pub use ops::{
    apply_isometry, conjugate_subsystem, dephase, hermitian_rank, kron, kron_vec, partial_trace, purify,
    trace_norm, RANK_THRESHOLD, TOL_ISOMETRY,
};
pub use random::{random_density, random_haar_isometry};
pub use state::{validate_density, DensityMatrix, PureState, TripartiteState, TOL_NORM, TOL_PSD, TOL_TRACE};
