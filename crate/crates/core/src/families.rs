//! Example state families with closed-form entropic quantities, and random
//! test states.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

use crate::entropy::{binary_entropy, conditional_mutual_information, shannon_entropy, subsystem_entropy};
use crate::error::{Error, Result};
use crate::linalg::random::{random_density_with, rng_for};
use crate::linalg::{hermitian_eig, random_density, ComplexMatrix, PureState, TripartiteState};
use crate::markov::{relent_block_register, relent_via_formula, Decomposition, MarkovState, Summand};
use crate::scalar::Real;

/// Largest total Hilbert-space dimension a generated family state may have.
pub const FAMILY_DIM_BUDGET: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyState<T> {
    Pure(PureState<T>),
    Mixed(TripartiteState<T>),
}

impl<T: Real> FamilyState<T> {
    pub fn to_tripartite(&self) -> Result<TripartiteState<T>> {
        match self {
            Self::Pure(p) => p.to_tripartite(),
            Self::Mixed(m) => Ok(m.clone()),
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        match self {
            Self::Pure(p) => (p.dims()[0], p.dims()[1], p.dims()[2]),
            Self::Mixed(m) => m.dims(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClosedForms<T> {
    pub s_a: Option<T>,
    pub s_b: Option<T>,
    pub cmi: Option<T>,
    pub delta_lower: Option<T>,
    pub delta_upper: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyParams {
    PsiX { x: f64 },
    ZetaD { d: usize },
    Cq { probs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyPoint<T> {
    pub state: FamilyState<T>,
    pub closed_forms: ClosedForms<T>,
    pub parameters: FamilyParams,
}

impl<T: Real> FamilyPoint<T> {
    /// Largest deviation between the closed forms and their recomputation
    /// from the state.
    pub fn closed_form_defect(&self) -> Result<T> {
        let rho = self.state.to_tripartite()?;
        let st = rho.as_density();
        let mut worst = T::zero();
        let mut check = |claimed: Option<T>, measured: T| {
            if let Some(c) = claimed {
                worst = worst.max((c - measured).abs());
            }
        };
        check(self.closed_forms.s_a, subsystem_entropy(st, &[0])?);
        check(self.closed_forms.s_b, subsystem_entropy(st, &[1])?);
        check(self.closed_forms.cmi, conditional_mutual_information(&rho)?);
        Ok(worst)
    }
}

fn phi<T: Real>(x: T) -> [Complex<T>; 2] {
    let y = (T::one() - x * x).sqrt();
    [Complex::new(y, T::zero()), Complex::new(x, T::zero())]
}

/// `(|phi_x>|0>|phi_x> + |phi_-x>|1>|phi_-x>) / sqrt 2` with
/// `|phi_x> = sqrt(1 - x^2)|0> + x|1>`.
pub fn psi_x<T: Real>(x: T) -> Result<FamilyPoint<T>> {
    if !(x > T::zero() && x < T::one()) {
        return Err(Error::InvalidArgument(format!("x = {x} outside (0, 1)")));
    }
    let branches = [(phi(x), 0usize), (phi(-x), 1usize)];
    let mut v = vec![Complex::<T>::zero(); 8];
    let norm = T::c(0.5).sqrt();
    for (f, b) in branches {
        for a in 0..2 {
            for c in 0..2 {
                v[(a * 2 + b) * 2 + c] = v[(a * 2 + b) * 2 + c] + f[a] * f[c] * norm;
            }
        }
    }
    let state = PureState::new(v, vec![2, 2, 2])?;
    let x2 = x * x;
    let y2 = T::one() - x2;
    let s_a = binary_entropy(x2);
    // spectrum of rho_B is (x^4 + y^4, 2 x^2 y^2)
    let s_b = binary_entropy(T::c(2.0) * x2 * y2);
    Ok(FamilyPoint {
        state: FamilyState::Pure(state),
        closed_forms: ClosedForms {
            s_a: Some(s_a),
            s_b: Some(s_b),
            cmi: Some(T::c(2.0) * s_a - s_b),
            delta_lower: Some(s_a),
            delta_upper: Some(T::c(2.0) * s_a),
        },
        parameters: FamilyParams::PsiX { x: x.as_f64() },
    })
}

/// Orthonormal basis of the symmetric subspace of `C^d (x) C^d`:
/// `|ii>` ascending, then `(|ij> + |ji>)/sqrt 2` for `i < j` in lexicographic order.
pub fn symmetric_basis<T: Real>(d: usize) -> Vec<Vec<Complex<T>>> {
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        let mut v = vec![Complex::zero(); d * d];
        v[i * d + i] = Complex::new(T::one(), T::zero());
        out.push(v);
    }
    let h = Complex::new(T::c(0.5).sqrt(), T::zero());
    for i in 0..d {
        for j in i + 1..d {
            let mut v = vec![Complex::zero(); d * d];
            v[i * d + j] = h;
            v[j * d + i] = h;
            out.push(v);
        }
    }
    out
}

/// Purification of the maximally mixed state on the symmetric subspace of
/// `A C`, on `d (x) d(d+1)/2 (x) d`.
pub fn zeta_d<T: Real>(d: usize) -> Result<FamilyPoint<T>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d = {d}, need d >= 2")));
    }
    let n = d * (d + 1) / 2;
    if d * n * d > FAMILY_DIM_BUDGET {
        return Err(Error::DimensionCapExceeded(format!(
            "zeta({d}) has dimension {} > {FAMILY_DIM_BUDGET}",
            d * n * d
        )));
    }
    let basis = symmetric_basis::<T>(d);
    let scale = T::one() / T::c(n as f64).sqrt();
    let mut v = vec![Complex::<T>::zero(); d * n * d];
    for (b, s) in basis.iter().enumerate() {
        for a in 0..d {
            for c in 0..d {
                v[(a * n + b) * d + c] = s[a * d + c] * scale;
            }
        }
    }
    let state = PureState::new(v, vec![d, n, d])?;
    let log_d = T::c(d as f64).log2();
    Ok(FamilyPoint {
        state: FamilyState::Pure(state),
        closed_forms: ClosedForms {
            s_a: Some(log_d),
            s_b: Some(T::c(n as f64).log2()),
            cmi: Some(T::one() + (T::c(d as f64) / T::c((d + 1) as f64)).log2()),
            delta_lower: Some(log_d),
            delta_upper: Some(T::c(2.0) * log_d),
        },
        parameters: FamilyParams::ZetaD { d },
    })
}

/// `sum_j p_j |j><j|_A (x) |psi_j><psi_j|_B (x) |j><j|_C`.
pub fn cq_ensemble<T: Real>(probs: &[T], states: &[Vec<Complex<T>>]) -> Result<FamilyPoint<T>> {
    if probs.is_empty() || probs.len() != states.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} states",
            probs.len(),
            states.len()
        )));
    }
    if probs.iter().any(|&p| !(p >= T::zero())) {
        return Err(Error::InvalidDistribution("negative probability".into()));
    }
    let total: T = probs.iter().copied().sum();
    if (total - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
    }
    let d_b = states[0].len();
    if d_b == 0 || states.iter().any(|s| s.len() != d_b) {
        return Err(Error::DimensionMismatch("ensemble states differ in dimension".into()));
    }
    let k = probs.len();
    if k * d_b * k > FAMILY_DIM_BUDGET {
        return Err(Error::DimensionCapExceeded(format!("cq state of dimension {}", k * d_b * k)));
    }
    let side = k * d_b * k;
    let mut rho = ComplexMatrix::<T>::zeros(side, side);
    let mut rho_b = ComplexMatrix::<T>::zeros(d_b, d_b);
    for (j, (psi, &p)) in states.iter().zip(probs).enumerate() {
        let psi = PureState::normalized(psi.clone(), vec![d_b])?;
        let proj = psi.projector();
        for b in 0..d_b {
            for b2 in 0..d_b {
                rho[((j * d_b + b) * k + j, (j * d_b + b2) * k + j)] = proj[(b, b2)] * p;
                rho_b[(b, b2)] = rho_b[(b, b2)] + proj[(b, b2)] * p;
            }
        }
    }
    let state = TripartiteState::new(rho, (k, d_b, k))?;
    let h = shannon_entropy(probs);
    let s_b = crate::entropy::von_neumann_entropy(&rho_b)?;
    Ok(FamilyPoint {
        state: FamilyState::Mixed(state),
        closed_forms: ClosedForms { s_a: Some(h), s_b: Some(s_b), cmi: Some(h - s_b), ..Default::default() },
        parameters: FamilyParams::Cq { probs: probs.iter().map(|p| p.as_f64()).collect() },
    })
}

/// Decomposition realizing a POVM `(M_k)` on `B`: block `k` is
/// `V_k sqrt(M_k)`, where `V_k` maps `B` into `b_k^L (x) b_k^R`.
/// Without `splits` every block is `(d_B, 1)` with `V_k = 1`.
pub fn naimark_decomposition<T: Real>(
    povm: &[ComplexMatrix<T>],
    splits: Option<&[(Summand, ComplexMatrix<T>)]>,
) -> Result<Decomposition<T>> {
    let d_b = povm.first().map(|m| m.rows()).ok_or_else(|| Error::InvalidArgument("empty POVM".into()))?;
    let mut total = ComplexMatrix::<T>::zeros(d_b, d_b);
    let mut roots = Vec::with_capacity(povm.len());
    for m in povm {
        if m.rows() != d_b || !m.is_square() {
            return Err(Error::DimensionMismatch("POVM elements differ in shape".into()));
        }
        let e = hermitian_eig(m)?;
        if let Some(&min) = e.values.last() {
            if min < -T::tol(1e-9) {
                return Err(Error::NotPsd(min.as_f64()));
            }
        }
        roots.push(e.map(|l| Complex::new(l.max(T::zero()).sqrt(), T::zero())));
        total = &total + m;
    }
    let defect = (&total - &ComplexMatrix::identity(d_b)).max_abs();
    if defect > T::tol(1e-9) {
        return Err(Error::InvalidArgument(format!(
            "POVM elements do not sum to the identity ({:e})",
            defect.as_f64()
        )));
    }
    let mut summands = Vec::with_capacity(povm.len());
    let mut blocks = Vec::with_capacity(povm.len());
    for (k, root) in roots.iter().enumerate() {
        match splits {
            None => {
                summands.push((d_b, 1));
                blocks.push(root.clone());
            }
            Some(s) => {
                let ((dl, dr), v) = s.get(k).ok_or_else(|| Error::DimensionMismatch("missing split".into()))?;
                if v.rows() != dl * dr || v.cols() != d_b {
                    return Err(Error::DimensionMismatch(format!("split {k} has shape {}x{}", v.rows(), v.cols())));
                }
                summands.push((*dl, *dr));
                blocks.push(v.matmul(root)?);
            }
        }
    }
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut w = ComplexMatrix::zeros(rows, d_b);
    let mut off = 0;
    for b in &blocks {
        for i in 0..b.rows() {
            for j in 0..d_b {
                w[(off + i, j)] = b[(i, j)];
            }
        }
        off += b.rows();
    }
    Decomposition::new(summands, w)
}

/// Both sides of the cq identity for one measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct CqMeasurement<T> {
    /// `-S(rho) + S(K) + S(A b^L|K) + S(b^R C|K)` on the block-register state.
    pub relent: T,
    /// `S(A|K) + S(K|A)` of the joint `p(j, k) = p_j <psi_j|M_k|psi_j>`.
    pub information_distance: T,
}

/// Evaluates a measurement on `B` of a cq ensemble state.
pub fn cq_measurement<T: Real>(
    point: &FamilyPoint<T>,
    states: &[Vec<Complex<T>>],
    povm: &[ComplexMatrix<T>],
) -> Result<CqMeasurement<T>> {
    let FamilyParams::Cq { probs } = &point.parameters else {
        return Err(Error::InvalidArgument("not a cq ensemble point".into()));
    };
    let rho = point.state.to_tripartite()?;
    let d = naimark_decomposition(povm, None)?;
    let relent = relent_block_register(&rho, &d)?;
    let (nj, nk) = (probs.len(), povm.len());
    let mut joint = vec![T::zero(); nj * nk];
    for (j, (psi, &p)) in states.iter().zip(probs).enumerate() {
        let psi = PureState::normalized(psi.clone(), vec![psi.len()])?;
        for (k, m) in povm.iter().enumerate() {
            let mv = m.apply(psi.vector());
            let e: Complex<T> = psi.vector().iter().zip(&mv).map(|(a, b)| a.conj() * b).fold(Complex::zero(), |s, z| s + z);
            joint[j * nk + k] = T::c(p) * e.re.max(T::zero());
        }
    }
    let pj: Vec<T> = (0..nj).map(|j| (0..nk).map(|k| joint[j * nk + k]).sum()).collect();
    let pk: Vec<T> = (0..nk).map(|k| (0..nj).map(|j| joint[j * nk + k]).sum()).collect();
    let h = shannon_entropy(&joint);
    let information_distance = T::c(2.0) * h - shannon_entropy(&pj) - shannon_entropy(&pk);
    Ok(CqMeasurement { relent, information_distance })
}

/// `relent_via_formula` for a cq state and a POVM with optional splits.
pub fn cq_relent<T: Real>(
    point: &FamilyPoint<T>,
    povm: &[ComplexMatrix<T>],
    splits: Option<&[(Summand, ComplexMatrix<T>)]>,
) -> Result<T> {
    relent_via_formula(&point.state.to_tripartite()?, &naimark_decomposition(povm, splits)?)
}

/// Ginibre-induced state on `A (x) B (x) C`, deterministic per seed.
pub fn random_tripartite<T: Real>(dims: (usize, usize, usize), rank: usize, seed: u64) -> Result<TripartiteState<T>> {
    let side = dims.0 * dims.1 * dims.2;
    TripartiteState::new(random_density(side, rank, seed)?, dims)
}

/// Markov state with the given summand shapes, random weights and
/// full-rank random components, on the aligned decomposition.
pub fn random_markov<T: Real>(dims_ac: (usize, usize), summands: &[Summand], seed: u64) -> Result<MarkovState<T>> {
    let (d_a, d_c) = dims_ac;
    let mut rng = rng_for(seed, 0);
    let raw: Vec<T> = summands.iter().map(|_| T::c(rng.random_range(0.1..1.0))).collect();
    let total: T = raw.iter().copied().sum();
    let weights = raw.into_iter().map(|w| w / total).collect();
    let mut left = Vec::with_capacity(summands.len());
    let mut right = Vec::with_capacity(summands.len());
    for &(dl, dr) in summands {
        left.push(random_density_with(d_a * dl, d_a * dl, &mut rng)?);
        right.push(random_density_with(dr * d_c, dr * d_c, &mut rng)?);
    }
    MarkovState::new(weights, left, right, Decomposition::aligned(summands.to_vec()), dims_ac)
}
