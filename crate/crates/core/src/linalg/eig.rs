//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hermiticity tolerance accepted on input.
pub const TOL_HERM: f64 = 1e-9;
/// Off-diagonal Frobenius norm at which sweeping stops.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let n = self.values.len();
        let fv: Vec<Complex<T>> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)].conj()
            })
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map(|l| Complex::new(l, T::zero()))
    }
}

/// Diagonalizes a Hermitian matrix, validating hermiticity first.
pub fn hermitian_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let defect = h.hermiticity_defect();
    if defect > T::tol(TOL_HERM) {
        return Err(Error::NotHermitian(defect.as_f64()));
    }
    Ok(jacobi(h.hermitian_part()))
}

/// Jacobi iteration on a matrix the caller guarantees is Hermitian.
pub(crate) fn jacobi<T: Real>(mut a: ComplexMatrix<T>) -> HermitianEigen<T> {
    let n = a.rows();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm().max(T::one());
    let threshold = T::tol(OFF_DIAGONAL_THRESHOLD) * scale;
    let two = T::c(2.0);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (two * mag);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // J = [[c, s e], [-s conj(e), c]] on the (p, q) plane; A <- J^dagger A J.
                let se = phase * s;
                let sec = phase.conj() * s;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * sec;
                    a[(k, q)] = akp * se + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * se;
                    a[(q, k)] = apk * sec + aqk * c;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(app - t * mag, T::zero());
                a[(q, q)] = Complex::new(aqq + t * mag, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * sec;
                    v[(k, q)] = vkp * se + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
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

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    hermitian_eig(h).map(|e| e.values)
}

/// `exp(i H)` for Hermitian `H`.
pub fn expi_hermitian<T: Real>(h: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let e = jacobi(h.hermitian_part());
    e.map(|l| Complex::new(l.cos(), l.sin()))
}

/// Identity check used by tests: max entry of `V^dagger V - I`.
pub fn unitarity_defect<T: Real>(v: &ComplexMatrix<T>) -> T {
    let g = v.adjoint().matmul(v).expect("square");
    let mut worst = T::zero();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { Complex::one() } else { Complex::zero() };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_hermitian, rng_for};

    type M = ComplexMatrix<f64>;

    #[test]
    fn diagonal_input() {
        let e = hermitian_eig(&M::diag(&[0.5, 0.5])).unwrap();
        assert_eq!(e.values, vec![0.5, 0.5]);
    }

    #[test]
    fn pauli_x() {
        let x = M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = hermitian_eig(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        let plus = e.vectors.col(0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // |+> up to a global phase
        let overlap = (plus[0].conj() * r + plus[1].conj() * r).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        let minus = e.vectors.col(1);
        let overlap = (minus[0].conj() * r - minus[1].conj() * r).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = M::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
        assert!(matches!(hermitian_eig(&M::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn complex_entries() {
        // Pauli-Y
        let y = M::from_vec(
            2,
            2,
            vec![Complex::zero(), Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), Complex::zero()],
        )
        .unwrap();
        let e = hermitian_eig(&y).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn reconstruction_up_to_side_81() {
        for (seed, n) in [(1u64, 5usize), (2, 16), (3, 33), (4, 81)] {
            let mut rng = rng_for(seed, 0);
            let h: M = random_hermitian(n, &mut rng);
            let e = hermitian_eig(&h).unwrap();
            assert!(e.reconstruct().max_abs_diff(&h) < 1e-8, "n = {n}");
            assert!(unitarity_defect(&e.vectors) < 1e-8);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn single_precision_path() {
        let mut rng = rng_for(9, 0);
        let h: ComplexMatrix<f32> = random_hermitian(6, &mut rng);
        let e = hermitian_eig(&h).unwrap();
        assert!(e.reconstruct().max_abs_diff(&h) < 1e-4);
    }
}
