//! Local coordinates on the set of isometries `C^d -> C^N`.
//!
//! Around a center `W0` with orthonormal complement `Wc`, a real vector
//! `theta` encodes a Hermitian `A` (`d x d`) and a complex `B`
//! (`(N - d) x d`), and maps to the first `d` columns of
//! `[W0 Wc] exp(i H)`, `H = [[A, B^dagger], [B, 0]]`. Writing the thin
//! polar form `B = Q R` reduces the exponential to a `2d x 2d` one.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::linalg::{expi_hermitian, jacobi, ComplexMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct IsometryChart<T> {
    center: ComplexMatrix<T>,
    complement: Option<ComplexMatrix<T>>,
}

impl<T: Real> IsometryChart<T> {
    pub fn new(center: ComplexMatrix<T>) -> Self {
        let complement = orthonormal_complement(&center);
        Self { center, complement }
    }

    pub fn center(&self) -> &ComplexMatrix<T> {
        &self.center
    }

    pub fn dim(&self) -> usize {
        let (n, d) = (self.center.rows(), self.center.cols());
        d * d + 2 * (n - d) * d
    }

    pub fn isometry(&self, theta: &[T]) -> ComplexMatrix<T> {
        let (n, d) = (self.center.rows(), self.center.cols());
        debug_assert_eq!(theta.len(), self.dim());
        let mut it = theta.iter().copied();
        let mut a = ComplexMatrix::<T>::zeros(d, d);
        for i in 0..d {
            a[(i, i)] = Complex::new(it.next().unwrap_or_default(), T::zero());
            for j in i + 1..d {
                let z = Complex::new(it.next().unwrap_or_default(), it.next().unwrap_or_default());
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        let m = n - d;
        // B = Q R with R = S V^dagger from B^dagger B = V S^2 V^dagger
        let (q, r) = if m == 0 {
            (None, ComplexMatrix::zeros(d, d))
        } else {
            let mut b = ComplexMatrix::<T>::zeros(m, d);
            for i in 0..m {
                for j in 0..d {
                    b[(i, j)] = Complex::new(it.next().unwrap_or_default(), it.next().unwrap_or_default());
                }
            }
            let e = jacobi(b.adjoint().matmul(&b).expect("shapes"));
            let floor = T::tol(1e-24);
            let s: Vec<T> = e.values.iter().map(|&l| if l > floor { l.sqrt() } else { T::zero() }).collect();
            let bv = b.matmul(&e.vectors).expect("shapes");
            let q = ComplexMatrix::from_fn(m, d, |i, k| {
                if s[k] > T::zero() {
                    bv[(i, k)] / s[k]
                } else {
                    Complex::zero()
                }
            });
            let r = ComplexMatrix::from_fn(d, d, |k, j| e.vectors[(j, k)].conj() * s[k]);
            (Some(q), r)
        };

        let mut h = ComplexMatrix::<T>::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                h[(i, j)] = a[(i, j)];
                h[(d + i, j)] = r[(i, j)];
                h[(j, d + i)] = r[(i, j)].conj();
            }
        }
        let u = expi_hermitian(&h);
        let x = u.block(0, 0, d, d);
        let y = u.block(d, 0, d, d);
        let mut w = self.center.matmul(&x).expect("shapes");
        if let Some(q) = q {
            let qy = q.matmul(&y).expect("shapes");
            let complement = self.complement.as_ref().expect("complement exists when N > d");
            let tail = complement.matmul(&qy).expect("shapes");
            w = &w + &tail;
        }
        w
    }

    /// Re-centers at `theta`, so that the new chart's origin is the old chart's point.
    pub fn recenter(&self, theta: &[T]) -> Self {
        Self::new(self.isometry(theta))
    }
}

/// Columns completing `w` to a unitary, by Gram-Schmidt on the standard basis.
/// `None` when `w` is already square.
pub(crate) fn orthonormal_complement<T: Real>(w: &ComplexMatrix<T>) -> Option<ComplexMatrix<T>> {
    let (n, d) = (w.rows(), w.cols());
    if n == d {
        return None;
    }
    let mut basis: Vec<Vec<Complex<T>>> = (0..d).map(|j| w.col(j)).collect();
    let threshold = T::c(0.1) / T::c(n as f64).sqrt();
    let mut extra = Vec::with_capacity(n - d);
    let mut candidates: Vec<(usize, T)> = Vec::new();
    // try coordinate vectors with the largest residuals first
    for i in 0..n {
        let residual = T::one() - (0..d).map(|j| w[(i, j)].norm_sqr()).sum::<T>();
        candidates.push((i, residual));
    }
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite").then(a.0.cmp(&b.0)));
    for (i, _) in candidates {
        if extra.len() == n - d {
            break;
        }
        let mut v = vec![Complex::<T>::zero(); n];
        v[i] = Complex::one();
        for _pass in 0..2 {
            for u in &basis {
                let dot: Complex<T> = u.iter().zip(&v).map(|(a, b)| a.conj() * b).fold(Complex::zero(), |s, z| s + z);
                for (vk, uk) in v.iter_mut().zip(u) {
                    *vk = *vk - *uk * dot;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > threshold {
            let v: Vec<Complex<T>> = v.into_iter().map(|z| z / norm).collect();
            basis.push(v.clone());
            extra.push(v);
        }
    }
    Some(ComplexMatrix::from_fn(n, extra.len(), |i, j| extra[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{haar_isometry_with, rng_for};
    use rand::Rng;

    #[test]
    fn origin_is_center() {
        let mut rng = rng_for(1, 0);
        let w0: ComplexMatrix<f64> = haar_isometry_with(3, 7, &mut rng).unwrap();
        let chart = IsometryChart::new(w0.clone());
        assert_eq!(chart.dim(), 9 + 2 * 4 * 3);
        assert!(chart.isometry(&vec![0.0; chart.dim()]).max_abs_diff(&w0) < 1e-12);
    }

    #[test]
    fn complement_completes_unitary() {
        let mut rng = rng_for(2, 0);
        for (d, n) in [(1, 1), (2, 5), (3, 9), (4, 16)] {
            let w0: ComplexMatrix<f64> = haar_isometry_with(d, n, &mut rng).unwrap();
            let Some(c) = orthonormal_complement(&w0) else {
                assert_eq!(n, d);
                continue;
            };
            assert_eq!(c.cols(), n - d);
            let full = ComplexMatrix::from_fn(n, n, |i, j| if j < d { w0[(i, j)] } else { c[(i, j - d)] });
            assert!(crate::linalg::unitarity_defect(&full) < 1e-12);
        }
    }

    #[test]
    fn images_are_isometries() {
        let mut rng = rng_for(3, 0);
        for (d, n) in [(2, 2), (2, 4), (3, 9), (2, 16)] {
            let w0: ComplexMatrix<f64> = haar_isometry_with(d, n, &mut rng).unwrap();
            let chart = IsometryChart::new(w0);
            for _ in 0..20 {
                let theta: Vec<f64> = (0..chart.dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
                assert!(chart.isometry(&theta).isometry_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn matches_full_exponential() {
        let mut rng = rng_for(4, 0);
        let (d, n) = (2, 5);
        let w0: ComplexMatrix<f64> = haar_isometry_with(d, n, &mut rng).unwrap();
        let chart = IsometryChart::new(w0.clone());
        let theta: Vec<f64> = (0..chart.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        // rebuild H on C^n in the [W0 Wc] frame and exponentiate directly
        let mut h = ComplexMatrix::<f64>::zeros(n, n);
        let mut it = theta.iter().copied();
        for i in 0..d {
            h[(i, i)] = Complex::new(it.next().unwrap(), 0.0);
            for j in i + 1..d {
                let z = Complex::new(it.next().unwrap(), it.next().unwrap());
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        for i in 0..n - d {
            for j in 0..d {
                let z = Complex::new(it.next().unwrap(), it.next().unwrap());
                h[(d + i, j)] = z;
                h[(j, d + i)] = z.conj();
            }
        }
        let c = orthonormal_complement(&w0).unwrap();
        let frame = ComplexMatrix::from_fn(n, n, |i, j| if j < d { w0[(i, j)] } else { c[(i, j - d)] });
        let full = frame.matmul(&expi_hermitian(&h)).unwrap().block(0, 0, n, d);
        assert!(full.max_abs_diff(&chart.isometry(&theta)) < 1e-10);
    }
}
