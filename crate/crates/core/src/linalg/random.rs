//! Seeded random matrices: Ginibre states and Haar isometries.
//!
//! Every generator draws from a ChaCha stream selected by `(seed, stream)`,
//! so restart `i` of a computation seeded with `s` sees the same numbers
//! whether restarts run serially or in parallel.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// The random stream `stream` of seed `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian (unit variance per component).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::c(re), T::c(im))
}

pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    ginibre::<T, R>(n, n, rng).hermitian_part()
}

/// Orthonormalizes the columns in place (modified Gram-Schmidt, two passes).
///
/// Returns `false` if a column became numerically dependent on earlier ones.
pub(crate) fn orthonormalize_columns<T: Real>(m: &mut ComplexMatrix<T>) -> bool {
    let (rows, cols) = (m.rows(), m.cols());
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = Complex::zero();
                for i in 0..rows {
                    dot = dot + m[(i, k)].conj() * m[(i, j)];
                }
                for i in 0..rows {
                    let mik = m[(i, k)];
                    m[(i, j)] = m[(i, j)] - mik * dot;
                }
            }
        }
        let norm = (0..rows).map(|i| m[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if norm <= T::tol(1e-10) {
            return false;
        }
        for i in 0..rows {
            m[(i, j)] = m[(i, j)] / norm;
        }
    }
    true
}

/// Haar isometry drawn from an explicit generator.
pub fn haar_isometry_with<T: Real, R: Rng + ?Sized>(
    from_dim: usize,
    to_dim: usize,
    rng: &mut R,
) -> Result<ComplexMatrix<T>> {
    if from_dim == 0 || from_dim > to_dim {
        return Err(Error::InvalidArgument(format!(
            "isometry from dimension {from_dim} into {to_dim}"
        )));
    }
    loop {
        let mut g = ginibre::<T, R>(to_dim, from_dim, rng);
        if orthonormalize_columns(&mut g) {
            return Ok(g);
        }
    }
}

/// `to_dim x from_dim` matrix with Haar-distributed orthonormal columns.
///
/// Gram-Schmidt on a Ginibre matrix leaves a positive diagonal in the
/// implied triangular factor, which is what makes the result Haar.
pub fn random_haar_isometry<T: Real>(from_dim: usize, to_dim: usize, seed: u64) -> Result<ComplexMatrix<T>> {
    haar_isometry_with(from_dim, to_dim, &mut rng_for(seed, 0))
}

pub fn random_unitary_with<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    haar_isometry_with(n, n, rng).expect("square isometry")
}

/// Density matrix drawn from an explicit generator.
pub fn random_density_with<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<ComplexMatrix<T>> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!("rank {rank} for dimension {dim}")));
    }
    let g = ginibre::<T, R>(dim, rank, rng);
    let rho = g.matmul(&g.adjoint())?.hermitian_part();
    let tr = rho.trace().re;
    Ok(rho.scale(T::one() / tr))
}

/// Ginibre-induced density matrix `G G^dagger / tr(G G^dagger)`, `G` of shape `dim x rank`.
pub fn random_density<T: Real>(dim: usize, rank: usize, seed: u64) -> Result<ComplexMatrix<T>> {
    random_density_with(dim, rank, &mut rng_for(seed, 0))
}

/// Normalized complex Gaussian vector.
pub fn random_pure_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}
