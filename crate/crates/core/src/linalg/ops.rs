//! Tensor-structure operations on density matrices.
//!
//! Subsystems are ordered left to right with the leftmost factor most
//! significant in the row-major Kronecker layout.

use num_complex::Complex;
use num_traits::Zero;

use super::eig::{hermitian_eig, jacobi};
use super::matrix::ComplexMatrix;
use super::state::{validate_density, PureState, TripartiteState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues below this are treated as outside the support.
pub const RANK_THRESHOLD: f64 = 1e-12;

pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn kron_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Splits flat indices of a product space into (kept, traced) parts.
fn index_split(dims: &[usize], keep_mask: &[bool]) -> (usize, usize, Vec<(usize, usize)>) {
    let total: usize = dims.iter().product();
    let keep_size: usize = dims.iter().zip(keep_mask).filter(|(_, &k)| k).map(|(d, _)| d).product();
    let trace_size = total / keep_size;
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..total {
        let (mut k, mut t) = (0, 0);
        for (s, &d) in dims.iter().enumerate() {
            if keep_mask[s] {
                k = k * d + digits[s];
            } else {
                t = t * d + digits[s];
            }
        }
        out.push((k, t));
        for s in (0..dims.len()).rev() {
            digits[s] += 1;
            if digits[s] < dims[s] {
                break;
            }
            digits[s] = 0;
        }
    }
    (keep_size, trace_size, out)
}

/// Traces out every subsystem not listed in `keep`.
pub fn partial_trace<T: Real>(m: &ComplexMatrix<T>, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix<T>> {
    let side: usize = dims.iter().product();
    if !m.is_square() || m.rows() != side {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} does not match subsystem dimensions {dims:?}",
            m.rows(),
            m.cols()
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one subsystem".into()));
    }
    let mut mask = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::SubsystemOutOfRange { index: k, count: dims.len() });
        }
        mask[k] = true;
    }
    let (keep_size, trace_size, split) = index_split(dims, &mask);
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(keep_size); trace_size];
    for (full, &(k, t)) in split.iter().enumerate() {
        groups[t].push((k, full));
    }
    let mut out = ComplexMatrix::zeros(keep_size, keep_size);
    for group in &groups {
        for &(k1, f1) in group {
            for &(k2, f2) in group {
                out[(k1, k2)] = out[(k1, k2)] + m[(f1, f2)];
            }
        }
    }
    Ok(out)
}

/// Zeroes every entry off-diagonal in the computational basis of `register`.
pub fn dephase<T: Real>(m: &ComplexMatrix<T>, dims: &[usize], register: usize) -> Result<ComplexMatrix<T>> {
    let side: usize = dims.iter().product();
    if !m.is_square() || m.rows() != side {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} does not match subsystem dimensions {dims:?}",
            m.rows(),
            m.cols()
        )));
    }
    if register >= dims.len() {
        return Err(Error::SubsystemOutOfRange { index: register, count: dims.len() });
    }
    let inner: usize = dims[register + 1..].iter().product();
    let d = dims[register];
    let label = |i: usize| (i / inner) % d;
    Ok(ComplexMatrix::from_fn(side, side, |i, j| {
        if label(i) == label(j) {
            m[(i, j)]
        } else {
            Complex::zero()
        }
    }))
}

/// `(1 (x) W (x) 1) m (1 (x) W^dagger (x) 1)` with `W` acting on `subsystem`.
///
/// No isometry check; see [`apply_isometry`].
pub fn conjugate_subsystem<T: Real>(
    m: &ComplexMatrix<T>,
    dims: &[usize],
    w: &ComplexMatrix<T>,
    subsystem: usize,
) -> Result<(ComplexMatrix<T>, Vec<usize>)> {
    if subsystem >= dims.len() {
        return Err(Error::SubsystemOutOfRange { index: subsystem, count: dims.len() });
    }
    if w.cols() != dims[subsystem] {
        return Err(Error::DimensionMismatch(format!(
            "operator has {} columns, subsystem {subsystem} has dimension {}",
            w.cols(),
            dims[subsystem]
        )));
    }
    let side: usize = dims.iter().product();
    if m.rows() != side || m.cols() != side {
        return Err(Error::DimensionMismatch("matrix side does not match dimensions".into()));
    }
    let pre: usize = dims[..subsystem].iter().product();
    let post: usize = dims[subsystem + 1..].iter().product();
    let (d, e) = (w.cols(), w.rows());
    let new_side = pre * e * post;

    // left: X = (1 W 1) m, shape new_side x side
    let mut x = ComplexMatrix::<T>::zeros(new_side, side);
    for p in 0..pre {
        for q in 0..post {
            for out_b in 0..e {
                let row = (p * e + out_b) * post + q;
                for in_b in 0..d {
                    let coeff = w[(out_b, in_b)];
                    if coeff.is_zero() {
                        continue;
                    }
                    let src = (p * d + in_b) * post + q;
                    for col in 0..side {
                        x[(row, col)] = x[(row, col)] + coeff * m[(src, col)];
                    }
                }
            }
        }
    }
    // right: Y = X (1 W^dagger 1)
    let mut y = ComplexMatrix::<T>::zeros(new_side, new_side);
    for p in 0..pre {
        for q in 0..post {
            for out_b in 0..e {
                let col = (p * e + out_b) * post + q;
                for in_b in 0..d {
                    let coeff = w[(out_b, in_b)].conj();
                    if coeff.is_zero() {
                        continue;
                    }
                    let src = (p * d + in_b) * post + q;
                    for row in 0..new_side {
                        y[(row, col)] = y[(row, col)] + x[(row, src)] * coeff;
                    }
                }
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[subsystem] = e;
    Ok((y, new_dims))
}

pub const TOL_ISOMETRY: f64 = 1e-9;

/// Conjugates `subsystem` of a tripartite state by the isometry `w`.
pub fn apply_isometry<T: Real>(
    state: &TripartiteState<T>,
    w: &ComplexMatrix<T>,
    subsystem: usize,
) -> Result<TripartiteState<T>> {
    if subsystem >= 3 {
        return Err(Error::SubsystemOutOfRange { index: subsystem, count: 3 });
    }
    let defect = w.isometry_defect();
    if defect > T::tol(TOL_ISOMETRY) {
        return Err(Error::NotIsometry(defect.as_f64()));
    }
    let (m, dims) = conjugate_subsystem(state.matrix(), state.as_density().dims(), w, subsystem)?;
    Ok(TripartiteState::new_unchecked(m, (dims[0], dims[1], dims[2])))
}

/// Sum of singular values.
pub fn trace_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.hermiticity_defect() <= T::tol(1e-12) * m.max_abs().max(T::one()) {
        let e = jacobi(m.hermitian_part());
        return Ok(e.values.iter().map(|v| v.abs()).sum());
    }
    let gram = m.adjoint().matmul(m)?;
    let e = jacobi(gram.hermitian_part());
    Ok(e.values.iter().map(|v| v.max(T::zero()).sqrt()).sum())
}

/// Canonical purification `sum_k sqrt(l_k) |v_k> (x) |k>` over the support of `rho`.
pub fn purify<T: Real>(rho: &ComplexMatrix<T>) -> Result<PureState<T>> {
    validate_density(rho)?;
    let e = hermitian_eig(rho)?;
    let d = rho.rows();
    let support: Vec<usize> = (0..d).filter(|&k| e.values[k] > T::tol(RANK_THRESHOLD)).collect();
    let r = support.len().max(1);
    let mut psi = vec![Complex::zero(); d * r];
    for (slot, &k) in support.iter().enumerate() {
        let amp = e.values[k].sqrt();
        for i in 0..d {
            psi[i * r + slot] = e.vectors[(i, k)] * amp;
        }
    }
    PureState::normalized(psi, vec![d, r])
}

/// Matrix rank counting eigenvalues above [`RANK_THRESHOLD`].
pub fn hermitian_rank<T: Real>(m: &ComplexMatrix<T>) -> Result<usize> {
    let e = hermitian_eig(m)?;
    Ok(e.values.iter().filter(|&&v| v > T::tol(RANK_THRESHOLD)).count())
}
