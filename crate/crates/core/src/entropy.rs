//! Entropic functionals in bits, plus the continuity and Pinsker bounds
//! used to sanity-check them.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, jacobi, trace_norm, ComplexMatrix, DensityMatrix, PureState, TripartiteState, TOL_PSD,
    TOL_TRACE,
};
use crate::scalar::Real;

/// Eigenvalues of `sigma` below this span its kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-12;
/// Mass of `rho` in the kernel of `sigma` above which `D(rho||sigma)` is infinite.
pub const SUPPORT_TOLERANCE: f64 = 1e-8;

/// A relative entropy together with its support diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport<T> {
    /// Bits; `T::max_value()` when `finite` is false.
    pub value: T,
    /// Mass of the first argument outside the support of the second.
    pub support_defect: T,
    pub finite: bool,
}

impl<T: Real> EntropyReport<T> {
    fn finite(value: T, support_defect: T) -> Self {
        Self { value, support_defect, finite: true }
    }

    fn infinite(support_defect: T) -> Self {
        Self { value: T::max_value(), support_defect, finite: false }
    }

    /// The value, or `None` for the infinite sentinel.
    pub fn as_finite(&self) -> Option<T> {
        self.finite.then_some(self.value)
    }
}

/// Clamps tiny negative eigenvalues to zero; larger ones are an error.
pub(crate) fn clamp_spectrum<T: Real>(values: &[T]) -> Result<Vec<T>> {
    values
        .iter()
        .map(|&v| {
            if v >= T::zero() {
                Ok(v)
            } else if v >= -T::tol(TOL_PSD) {
                Ok(T::zero())
            } else {
                Err(Error::NotPsd(v.as_f64()))
            }
        })
        .collect()
}

/// `-sum x log2 x` over a (possibly unnormalized) clamped spectrum.
pub(crate) fn spectrum_entropy<T: Real>(values: &[T]) -> T {
    values.iter().map(|&v| v.eta()).sum()
}

/// Entropy of a PSD matrix without the unit-trace check.
pub(crate) fn psd_entropy<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let e = jacobi(m.hermitian_part());
    Ok(spectrum_entropy(&clamp_spectrum(&e.values)?))
}

pub fn von_neumann_entropy<T: Real>(rho: &ComplexMatrix<T>) -> Result<T> {
    let e = hermitian_eig(rho)?;
    let tr: T = e.values.iter().copied().sum();
    if (tr - T::one()).abs() > T::tol(TOL_TRACE) {
        return Err(Error::NotUnitTrace(tr.as_f64()));
    }
    Ok(spectrum_entropy(&clamp_spectrum(&e.values)?))
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy<T: Real>(p: &[T]) -> T {
    p.iter().map(|&x| x.eta()).sum()
}

/// `H2(p)`, the binary entropy.
pub fn binary_entropy<T: Real>(p: T) -> T {
    p.eta() + (T::one() - p).eta()
}

/// `tr rho (log2 rho - log2 sigma)`, evaluated in the eigenbasis of `sigma`.
pub fn quantum_relative_entropy<T: Real>(
    rho: &ComplexMatrix<T>,
    sigma: &ComplexMatrix<T>,
) -> Result<EntropyReport<T>> {
    if (rho.rows(), rho.cols()) != (sigma.rows(), sigma.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of {}x{} against {}x{}",
            rho.rows(),
            rho.cols(),
            sigma.rows(),
            sigma.cols()
        )));
    }
    let s_rho = von_neumann_entropy(rho)?;
    let es = hermitian_eig(sigma)?;
    let sigma_vals = clamp_spectrum(&es.values)?;
    let n = rho.rows();
    let kernel = T::tol(KERNEL_THRESHOLD);
    let mut cross = T::zero();
    let mut defect = T::zero();
    for (k, &lambda) in sigma_vals.iter().enumerate() {
        let v = es.vectors.col(k);
        let rv = rho.apply(&v);
        let weight = v.iter().zip(&rv).fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b).re;
        if lambda <= kernel {
            defect = defect + weight.max(T::zero());
        } else {
            cross = cross + weight * lambda.log2();
        }
    }
    debug_assert_eq!(sigma_vals.len(), n);
    if defect > T::tol(SUPPORT_TOLERANCE) {
        return Ok(EntropyReport::infinite(defect));
    }
    Ok(EntropyReport::finite(-s_rho - cross, defect))
}

fn check_labels(count: usize, labels: &[usize]) -> Result<()> {
    for &l in labels {
        if l >= count {
            return Err(Error::SubsystemOutOfRange { index: l, count });
        }
    }
    Ok(())
}

/// Entropy of the reduced state on `subsystems` (zero for the empty set).
pub fn subsystem_entropy<T: Real>(state: &DensityMatrix<T>, subsystems: &[usize]) -> Result<T> {
    check_labels(state.dims().len(), subsystems)?;
    if subsystems.is_empty() {
        return Ok(T::zero());
    }
    let reduced = state.reduce(subsystems)?;
    psd_entropy(reduced.matrix())
}

/// `I(X:Y) = S(X) + S(Y) - S(XY)` for disjoint label sets.
pub fn mutual_information<T: Real>(state: &DensityMatrix<T>, x: &[usize], y: &[usize]) -> Result<T> {
    if x.is_empty() || y.is_empty() || x.iter().any(|l| y.contains(l)) {
        return Err(Error::InvalidArgument(format!("mutual information cut {x:?} : {y:?}")));
    }
    let xy: Vec<usize> = x.iter().chain(y).copied().collect();
    Ok(subsystem_entropy(state, x)? + subsystem_entropy(state, y)? - subsystem_entropy(state, &xy)?)
}

/// `S(X|Y) = S(XY) - S(Y)`.
pub fn conditional_entropy<T: Real>(state: &DensityMatrix<T>, target: &[usize], condition: &[usize]) -> Result<T> {
    if target.is_empty() || target.iter().any(|l| condition.contains(l)) {
        return Err(Error::InvalidArgument(format!("conditional entropy {target:?} | {condition:?}")));
    }
    let joint: Vec<usize> = target.iter().chain(condition).copied().collect();
    Ok(subsystem_entropy(state, &joint)? - subsystem_entropy(state, condition)?)
}

/// `I(A:C|B) = S(AB) + S(BC) - S(B) - S(ABC)`.
pub fn conditional_mutual_information<T: Real>(state: &TripartiteState<T>) -> Result<T> {
    let d = state.as_density();
    let s_abc = psd_entropy(state.matrix())?;
    Ok(subsystem_entropy(d, &[0, 1])? + subsystem_entropy(d, &[1, 2])? - subsystem_entropy(d, &[1])? - s_abc)
}

/// Right-hand side of the Fannes inequality, `-e log e + e log d`, for `0 < e <= 1/e`.
pub fn fannes_bound<T: Real>(eps: T, d: usize) -> Result<T> {
    let inv_e = T::one() / T::E();
    if !(eps > T::zero() && eps <= inv_e) {
        return Err(Error::InvalidArgument(format!("Fannes bound needs 0 < eps <= 1/e, got {eps}")));
    }
    Ok(eps.eta() + eps * T::c(d as f64).log2())
}

/// Right-hand side of the Alicki-Fannes inequality,
/// `-2e log e - 2(1-e) log(1-e) + 4 e log d`, for `0 < e <= 1`.
pub fn alicki_fannes_bound<T: Real>(eps: T, d: usize) -> Result<T> {
    if !(eps > T::zero() && eps <= T::one()) {
        return Err(Error::InvalidArgument(format!("Alicki-Fannes bound needs 0 < eps <= 1, got {eps}")));
    }
    let two = T::c(2.0);
    Ok(two * eps.eta() + two * (T::one() - eps).eta() + T::c(4.0) * eps * T::c(d as f64).log2())
}

/// `(||rho - sigma||_1 / (2 ln 2))^2`, a floor on `D(rho||sigma)`.
pub fn pinsker_floor<T: Real>(rho: &ComplexMatrix<T>, sigma: &ComplexMatrix<T>) -> Result<T> {
    if (rho.rows(), rho.cols()) != (sigma.rows(), sigma.cols()) {
        return Err(Error::DimensionMismatch("Pinsker floor of differently sized states".into()));
    }
    crate::linalg::validate_density(rho)?;
    crate::linalg::validate_density(sigma)?;
    let t = trace_norm(&(rho - sigma))?;
    let r = t / (T::c(2.0) * T::LN_2());
    Ok(r * r)
}

/// Top eigenvector of `rho` and its trace distance `2 (1 - lambda_1)` to `rho`.
pub fn nearest_pure<T: Real>(rho: &ComplexMatrix<T>) -> Result<(PureState<T>, T)> {
    crate::linalg::validate_density(rho)?;
    let e = hermitian_eig(rho)?;
    let top = PureState::normalized(e.vectors.col(0), vec![rho.rows()])?;
    let distance = T::c(2.0) * (T::one() - e.values[0]).max(T::zero());
    Ok((top, distance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density_with, random_unitary_with, rng_for};
    use crate::linalg::{kron, partial_trace};

    type M = ComplexMatrix<f64>;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    fn bell() -> DensityMatrix<f64> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::new(M::outer(&[c(r), c(0.0), c(0.0), c(r)]), vec![2, 2]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        for d in 1..6 {
            let s = von_neumann_entropy(&M::identity(d).scale(1.0 / d as f64)).unwrap();
            assert!((s - (d as f64).log2()).abs() < 1e-12);
        }
        assert!(von_neumann_entropy(bell().matrix()).unwrap().abs() < 1e-12);
        // rho_A of psi(0.5) is diag(0.75, 0.25)
        let s = von_neumann_entropy(&M::diag(&[0.75, 0.25])).unwrap();
        assert!((s - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!(von_neumann_entropy(&M::diag(&[0.5, 0.6])).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let mut rng = rng_for(1, 0);
        let rho: M = random_density_with(3, 3, &mut rng).unwrap();
        let r = quantum_relative_entropy(&rho, &rho).unwrap();
        assert!(r.finite && r.value.abs() < 1e-10);

        let zero = M::diag(&[1.0, 0.0]);
        let mixed = M::identity(2).scale(0.5);
        let r = quantum_relative_entropy(&zero, &mixed).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);

        let r = quantum_relative_entropy(&mixed, &zero).unwrap();
        assert!(!r.finite);
        assert!((r.support_defect - 0.5).abs() < 1e-12);
        assert_eq!(r.as_finite(), None);

        assert!(quantum_relative_entropy(&zero, &M::identity(3).scale(1.0 / 3.0)).is_err());
    }

    #[test]
    fn mutual_information_is_relative_entropy_to_product() {
        let mut rng = rng_for(2, 0);
        for _ in 0..20 {
            let rho: M = random_density_with(4, 4, &mut rng).unwrap();
            let st = DensityMatrix::new(rho.clone(), vec![2, 2]).unwrap();
            let a = partial_trace(&rho, &[2, 2], &[0]).unwrap();
            let b = partial_trace(&rho, &[2, 2], &[1]).unwrap();
            let d = quantum_relative_entropy(&rho, &kron(&a, &b)).unwrap();
            let i = mutual_information(&st, &[0], &[1]).unwrap();
            assert!((d.value - i).abs() < 1e-9);
        }
    }

    #[test]
    fn bell_pair_information() {
        let st = bell();
        assert!((mutual_information(&st, &[0], &[1]).unwrap() - 2.0).abs() < 1e-12);
        assert!((conditional_entropy(&st, &[0], &[1]).unwrap() + 1.0).abs() < 1e-12);
        assert!(mutual_information(&st, &[0], &[0]).is_err());
        assert!(matches!(
            mutual_information(&st, &[0], &[2]),
            Err(Error::SubsystemOutOfRange { .. })
        ));
    }

    #[test]
    fn product_state_has_no_mutual_information() {
        let mut rng = rng_for(3, 0);
        let a: M = random_density_with(2, 2, &mut rng).unwrap();
        let b: M = random_density_with(3, 2, &mut rng).unwrap();
        let st = DensityMatrix::new(kron(&a, &b), vec![2, 3]).unwrap();
        assert!(mutual_information(&st, &[0], &[1]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bound_arguments() {
        assert!(fannes_bound(0.0f64, 2).is_err());
        assert!(fannes_bound(0.5f64, 2).is_err());
        assert!(alicki_fannes_bound(1.5f64, 2).is_err());
        assert!(alicki_fannes_bound(1.0f64, 2).is_ok());
        let rho = M::diag(&[0.3, 0.7]);
        assert_eq!(pinsker_floor(&rho, &rho).unwrap(), 0.0);
    }

    #[test]
    fn nearest_pure_examples() {
        let (psi, dist) = nearest_pure(&M::diag(&[0.9, 0.1])).unwrap();
        assert!((dist - 0.2).abs() < 1e-14);
        assert!((psi.vector()[0].norm() - 1.0).abs() < 1e-14);
        let v = [c(0.6), Complex::new(0.0, 0.8)];
        let (psi, dist) = nearest_pure(&M::outer(&v)).unwrap();
        assert!(dist.abs() < 1e-12);
        let overlap = psi.vector().iter().zip(&v).fold(Complex::<f64>::zero(), |a, (x, y)| a + x.conj() * y);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_invariance() {
        let mut rng = rng_for(4, 0);
        for _ in 0..10 {
            let rho: M = random_density_with(5, 3, &mut rng).unwrap();
            let u: M = random_unitary_with(5, &mut rng);
            let rot = &(&u * &rho) * &u.adjoint();
            let d = von_neumann_entropy(&rho).unwrap() - von_neumann_entropy(&rot.hermitian_part()).unwrap();
            assert!(d.abs() < 1e-10);
        }
    }

    #[test]
    fn single_precision_entropy() {
        let s = von_neumann_entropy(&ComplexMatrix::<f32>::identity(4).scale(0.25)).unwrap();
        assert!((s - 2.0).abs() < 1e-5);
    }
}
