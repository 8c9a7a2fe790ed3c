use num_complex::Complex;

use super::eig::{hermitian_eig, TOL_HERM};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const TOL_TRACE: f64 = 1e-9;
pub const TOL_PSD: f64 = 1e-9;
pub const TOL_NORM: f64 = 1e-10;

/// Checks that `m` is Hermitian, unit-trace and positive semidefinite.
pub fn validate_density<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let herm = m.hermiticity_defect();
    if herm > T::tol(TOL_HERM) {
        return Err(Error::NotHermitian(herm.as_f64()));
    }
    let tr = m.trace().re;
    if (tr - T::one()).abs() > T::tol(TOL_TRACE) {
        return Err(Error::NotUnitTrace(tr.as_f64()));
    }
    let eig = hermitian_eig(m)?;
    let min = *eig.values.last().expect("nonempty spectrum");
    if min < -T::tol(TOL_PSD) {
        return Err(Error::NotPsd(min.as_f64()));
    }
    Ok(())
}

fn check_dims(side: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!("invalid subsystem dimensions {dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != side {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions {dims:?} multiply to {prod}, matrix side is {side}"
        )));
    }
    Ok(())
}

/// A validated density matrix over an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: ComplexMatrix<T>,
    dims: Vec<usize>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: ComplexMatrix<T>, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        check_dims(matrix.rows(), &dims)?;
        validate_density(&matrix)?;
        Ok(Self { matrix, dims })
    }

    /// Skips spectral validation; the caller vouches for the matrix.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix<T>, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.rows(), dims.iter().product::<usize>());
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// Reduced state on `keep`, in original subsystem order.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let m = super::ops::partial_trace(&self.matrix, &self.dims, keep)?;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let dims = kept.iter().map(|&i| self.dims[i]).collect();
        Ok(DensityMatrix::new_unchecked(m, dims))
    }
}

/// Density matrix on `A (x) B (x) C`, subsystems in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteState<T> {
    inner: DensityMatrix<T>,
}

impl<T: Real> TripartiteState<T> {
    pub fn new(matrix: ComplexMatrix<T>, dims: (usize, usize, usize)) -> Result<Self> {
        let inner = DensityMatrix::new(matrix, vec![dims.0, dims.1, dims.2])?;
        Ok(Self { inner })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix<T>, dims: (usize, usize, usize)) -> Self {
        Self { inner: DensityMatrix::new_unchecked(matrix, vec![dims.0, dims.1, dims.2]) }
    }

    pub fn from_density(state: DensityMatrix<T>) -> Result<Self> {
        if state.dims().len() != 3 {
            return Err(Error::DimensionMismatch(format!(
                "tripartite state needs 3 subsystems, got {}",
                state.dims().len()
            )));
        }
        Ok(Self { inner: state })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        let d = self.inner.dims();
        (d[0], d[1], d[2])
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.inner.matrix()
    }

    pub fn as_density(&self) -> &DensityMatrix<T> {
        &self.inner
    }

    pub fn into_density(self) -> DensityMatrix<T> {
        self.inner
    }
}

impl<T> AsRef<DensityMatrix<T>> for TripartiteState<T> {
    fn as_ref(&self) -> &DensityMatrix<T> {
        &self.inner
    }
}

impl<T> AsRef<DensityMatrix<T>> for DensityMatrix<T> {
    fn as_ref(&self) -> &DensityMatrix<T> {
        self
    }
}

/// Normalized state vector over an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    vector: Vec<Complex<T>>,
    dims: Vec<usize>,
}

impl<T: Real> PureState<T> {
    pub fn new(vector: Vec<Complex<T>>, dims: Vec<usize>) -> Result<Self> {
        check_dims(vector.len(), &dims)?;
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if (norm - T::one()).abs() > T::tol(TOL_NORM) {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(Self { vector, dims })
    }

    /// Normalizes `vector` before validating.
    pub fn normalized(vector: Vec<Complex<T>>, dims: Vec<usize>) -> Result<Self> {
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::zero() {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(vector.into_iter().map(|z| z / norm).collect(), dims)
    }

    pub fn vector(&self) -> &[Complex<T>] {
        &self.vector
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn projector(&self) -> ComplexMatrix<T> {
        ComplexMatrix::outer(&self.vector)
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix::new_unchecked(self.projector(), self.dims.clone())
    }

    pub fn to_tripartite(&self) -> Result<TripartiteState<T>> {
        TripartiteState::from_density(self.to_density())
    }
}
