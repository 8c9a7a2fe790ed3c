//! Quantum Markov chain structure on `A (x) B (x) C`.
//!
//! A [`Decomposition`] embeds `B` isometrically into a direct sum
//! `(+)_j b_j^L (x) b_j^R`. The rows of its isometry are laid out block by
//! block, and inside block `j` row `l * dim_R + r` is the basis vector
//! `|l>|r>`. For a fixed decomposition the closest Markov state to `rho`
//! is obtained by pinching onto the blocks and replacing every block by the
//! product of its two halves' marginals; its relative entropy to `rho` has
//! the closed form
//!
//! `D = -S(rho) + H(q) + sum_j q_j (S(sigma_j) + S(chi_j))`.
//!
//! Three independent evaluations of that number are provided:
//! [`relent_via_formula`] (per-block spectra from a factorization of `rho`),
//! [`relent_direct`] (a full relative entropy against the assembled state)
//! and [`relent_block_register`] (conditional entropies of the pinched
//! state with an explicit block-label register).

use num_complex::Complex;
use num_traits::Zero;

use crate::entropy::{
    clamp_spectrum, conditional_entropy, mutual_information, psd_entropy, quantum_relative_entropy,
    spectrum_entropy, subsystem_entropy, EntropyReport,
};
use crate::error::{Error, Result};
use crate::linalg::{
    conjugate_subsystem, dephase, jacobi, kron, partial_trace, validate_density, ComplexMatrix, DensityMatrix,
    TripartiteState, TOL_ISOMETRY,
};
use crate::scalar::Real;

/// Weights below this are dropped together with their blocks.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Shape `(dim b^L, dim b^R)` of one direct summand.
pub type Summand = (usize, usize);

/// Isometric embedding of `B` into `(+)_j b_j^L (x) b_j^R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    summands: Vec<Summand>,
    isometry: ComplexMatrix<T>,
}

impl<T: Real> Decomposition<T> {
    /// Validates block sizes, isometry and the dimension caps
    /// `k <= d_B^2`, `dim_L, dim_R <= d_B`.
    pub fn new(summands: Vec<Summand>, isometry: ComplexMatrix<T>) -> Result<Self> {
        let d_b = isometry.cols();
        if summands.is_empty() {
            return Err(Error::InvalidArgument("decomposition needs at least one summand".into()));
        }
        if summands.len() > d_b * d_b {
            return Err(Error::InvalidArgument(format!(
                "{} summands exceed the cap d_B^2 = {}",
                summands.len(),
                d_b * d_b
            )));
        }
        if let Some(&(l, r)) = summands.iter().find(|&&(l, r)| l == 0 || r == 0 || l > d_b || r > d_b) {
            return Err(Error::InvalidArgument(format!(
                "summand shape ({l}, {r}) outside 1..={d_b}"
            )));
        }
        let total: usize = summands.iter().map(|(l, r)| l * r).sum();
        if total != isometry.rows() {
            return Err(Error::DimensionMismatch(format!(
                "summands span {total} dimensions, isometry has {} rows",
                isometry.rows()
            )));
        }
        let defect = isometry.isometry_defect();
        if defect > T::tol(TOL_ISOMETRY) {
            return Err(Error::NotIsometry(defect.as_f64()));
        }
        Ok(Self { summands, isometry })
    }

    pub(crate) fn new_unchecked(summands: Vec<Summand>, isometry: ComplexMatrix<T>) -> Self {
        Self { summands, isometry }
    }

    /// `B = B (x) C`: one summand with `b^L = B` and trivial `b^R`.
    pub fn trivial(d_b: usize) -> Self {
        Self { summands: vec![(d_b, 1)], isometry: ComplexMatrix::identity(d_b) }
    }

    /// Identity embedding of a space that already is `(+)_j b_j^L (x) b_j^R`.
    pub fn aligned(summands: Vec<Summand>) -> Self {
        let n = summands.iter().map(|(l, r)| l * r).sum();
        Self { summands, isometry: ComplexMatrix::identity(n) }
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn isometry(&self) -> &ComplexMatrix<T> {
        &self.isometry
    }

    pub fn dim_b(&self) -> usize {
        self.isometry.cols()
    }

    /// Dimension of the embedding space.
    pub fn total_dim(&self) -> usize {
        self.isometry.rows()
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn offsets(&self) -> Vec<usize> {
        block_offsets(&self.summands)
    }

    /// The embedding rewritten on `J (x) b^L (x) b^R` with `|J| = k` and the
    /// factors padded to the largest summand.
    pub fn padded_isometry(&self) -> (ComplexMatrix<T>, [usize; 3]) {
        let k = self.summands.len();
        let lmax = self.summands.iter().map(|s| s.0).max().unwrap_or(1);
        let rmax = self.summands.iter().map(|s| s.1).max().unwrap_or(1);
        let mut w = ComplexMatrix::zeros(k * lmax * rmax, self.dim_b());
        for (j, (&(dl, dr), off)) in self.summands.iter().zip(self.offsets()).enumerate() {
            for l in 0..dl {
                for r in 0..dr {
                    let src = off + l * dr + r;
                    let dst = (j * lmax + l) * rmax + r;
                    for b in 0..self.dim_b() {
                        w[(dst, b)] = self.isometry[(src, b)];
                    }
                }
            }
        }
        (w, [k, lmax, rmax])
    }
}

pub(crate) fn block_offsets(summands: &[Summand]) -> Vec<usize> {
    summands
        .iter()
        .scan(0usize, |acc, (l, r)| {
            let off = *acc;
            *acc += l * r;
            Some(off)
        })
        .collect()
}

/// `(+)_j q_j sigma_j (x) chi_j` with `sigma_j` on `A b_j^L` and `chi_j` on `b_j^R C`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovState<T> {
    weights: Vec<T>,
    left: Vec<ComplexMatrix<T>>,
    right: Vec<ComplexMatrix<T>>,
    decomposition: Decomposition<T>,
    dim_a: usize,
    dim_c: usize,
}

impl<T: Real> MarkovState<T> {
    pub fn new(
        weights: Vec<T>,
        left: Vec<ComplexMatrix<T>>,
        right: Vec<ComplexMatrix<T>>,
        decomposition: Decomposition<T>,
        (dim_a, dim_c): (usize, usize),
    ) -> Result<Self> {
        let k = decomposition.len();
        if weights.len() != k || left.len() != k || right.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{k} summands but {} weights, {} left and {} right components",
                weights.len(),
                left.len(),
                right.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= T::zero())) {
            return Err(Error::InvalidDistribution("negative Markov weight".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::InvalidDistribution(format!("Markov weights sum to {total}")));
        }
        for (j, &(dl, dr)) in decomposition.summands().iter().enumerate() {
            if left[j].rows() != dim_a * dl || right[j].rows() != dr * dim_c {
                return Err(Error::DimensionMismatch(format!(
                    "summand {j}: components of side {} and {} for shape ({dl}, {dr})",
                    left[j].rows(),
                    right[j].rows()
                )));
            }
            validate_density(&left[j])?;
            validate_density(&right[j])?;
        }
        Ok(Self { weights, left, right, decomposition, dim_a, dim_c })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn left(&self) -> &[ComplexMatrix<T>] {
        &self.left
    }

    pub fn right(&self) -> &[ComplexMatrix<T>] {
        &self.right
    }

    pub fn decomposition(&self) -> &Decomposition<T> {
        &self.decomposition
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.dim_a, self.decomposition.total_dim(), self.dim_c)
    }
}

/// Lays `(+)_j q_j sigma_j (x) chi_j` out on `A (x) B_hat (x) C`.
pub fn assemble<T: Real>(m: &MarkovState<T>) -> Result<TripartiteState<T>> {
    let (da, n, dc) = m.dims();
    let side = da * n * dc;
    let mut out = ComplexMatrix::<T>::zeros(side, side);
    let summands = m.decomposition.summands();
    for (j, (&(dl, dr), off)) in summands.iter().zip(m.decomposition.offsets()).enumerate() {
        let q = m.weights[j];
        if q <= T::zero() {
            continue;
        }
        let prod = kron(&m.left[j], &m.right[j]).scale(q);
        // prod is indexed (a, l, r, c)
        let local = |a: usize, l: usize, r: usize, c: usize| ((a * dl + l) * dr + r) * dc + c;
        let global = |a: usize, l: usize, r: usize, c: usize| (a * n + off + l * dr + r) * dc + c;
        for a in 0..da {
            for l in 0..dl {
                for r in 0..dr {
                    for c in 0..dc {
                        let (gi, li) = (global(a, l, r, c), local(a, l, r, c));
                        for a2 in 0..da {
                            for l2 in 0..dl {
                                for r2 in 0..dr {
                                    for c2 in 0..dc {
                                        out[(gi, global(a2, l2, r2, c2))] = prod[(li, local(a2, l2, r2, c2))];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    TripartiteState::new(out, (da, n, dc))
}

fn check_compatible<T: Real>(rho: &TripartiteState<T>, d: &Decomposition<T>) -> Result<()> {
    if rho.dims().1 != d.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "state has d_B = {}, decomposition embeds dimension {}",
            rho.dims().1,
            d.dim_b()
        )));
    }
    Ok(())
}

/// The pinched state `omega[delta]` split into weights and normalized blocks.
#[derive(Debug, Clone)]
pub struct PinchedState<T> {
    /// `q_j = tr (1 (x) P_j) rho`.
    pub weights: Vec<T>,
    /// `omega_j` on `A (x) b_j^L (x) b_j^R (x) C`; maximally mixed when `q_j` vanishes.
    pub blocks: Vec<ComplexMatrix<T>>,
    /// Subsystem dimensions `(d_A, dim_L, dim_R, d_C)` of each block.
    pub block_dims: Vec<[usize; 4]>,
}

impl<T: Real> PinchedState<T> {
    /// `(+)_j q_j omega_j` on `A (x) B_hat (x) C`.
    pub fn reassemble(&self, summands: &[Summand]) -> ComplexMatrix<T> {
        let [da, _, _, dc] = self.block_dims[0];
        let n: usize = summands.iter().map(|(l, r)| l * r).sum();
        let side = da * n * dc;
        let mut out = ComplexMatrix::zeros(side, side);
        for (j, ((&(dl, dr), off), block)) in
            summands.iter().zip(block_offsets(summands)).zip(&self.blocks).enumerate()
        {
            let q = self.weights[j];
            let m = dl * dr;
            let global = |a: usize, b: usize, c: usize| (a * n + off + b) * dc + c;
            let local = |a: usize, b: usize, c: usize| (a * m + b) * dc + c;
            for a in 0..da {
                for b in 0..m {
                    for c in 0..dc {
                        for a2 in 0..da {
                            for b2 in 0..m {
                                for c2 in 0..dc {
                                    out[(global(a, b, c), global(a2, b2, c2))] =
                                        block[(local(a, b, c), local(a2, b2, c2))] * q;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Pinches `W rho W^dagger` onto the blocks of `d`.
///
/// Built on the padded register layout `A (x) J (x) b^L (x) b^R (x) C`:
/// conjugate by the padded isometry, then dephase the block label `J`.
pub fn project_omega_delta<T: Real>(rho: &TripartiteState<T>, d: &Decomposition<T>) -> Result<PinchedState<T>> {
    check_compatible(rho, d)?;
    let (da, _, dc) = rho.dims();
    let (omega, [k, lmax, rmax]) = block_register_state(rho, d)?;
    let idx = |a: usize, j: usize, l: usize, r: usize, c: usize| (((a * k + j) * lmax + l) * rmax + r) * dc + c;

    let mut weights = Vec::with_capacity(k);
    let mut blocks = Vec::with_capacity(k);
    let mut block_dims = Vec::with_capacity(k);
    for (j, &(dl, dr)) in d.summands().iter().enumerate() {
        let local = |a: usize, l: usize, r: usize, c: usize| ((a * dl + l) * dr + r) * dc + c;
        let side = da * dl * dr * dc;
        let mut block = ComplexMatrix::<T>::zeros(side, side);
        for a in 0..da {
            for l in 0..dl {
                for r in 0..dr {
                    for c in 0..dc {
                        for a2 in 0..da {
                            for l2 in 0..dl {
                                for r2 in 0..dr {
                                    for c2 in 0..dc {
                                        block[(local(a, l, r, c), local(a2, l2, r2, c2))] =
                                            omega[(idx(a, j, l, r, c), idx(a2, j, l2, r2, c2))];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let q = block.trace().re.max(T::zero());
        let normalized = if q > T::tol(WEIGHT_FLOOR) {
            block.scale(T::one() / q).hermitian_part()
        } else {
            ComplexMatrix::identity(side).scale(T::one() / T::c(side as f64))
        };
        weights.push(q);
        blocks.push(normalized);
        block_dims.push([da, dl, dr, dc]);
    }
    Ok(PinchedState { weights, blocks, block_dims })
}

/// `Omega` on `A (x) J (x) b^L (x) b^R (x) C` (unnormalized blocks kept in place).
fn block_register_state<T: Real>(
    rho: &TripartiteState<T>,
    d: &Decomposition<T>,
) -> Result<(ComplexMatrix<T>, [usize; 3])> {
    let (da, _, dc) = rho.dims();
    let (w, shape) = d.padded_isometry();
    let (embedded, _) = conjugate_subsystem(rho.matrix(), rho.as_density().dims(), &w, 1)?;
    let dims5 = [da, shape[0], shape[1], shape[2], dc];
    Ok((dephase(&embedded, &dims5, 1)?, shape))
}

/// The optimal Markov state with decomposition `d`: weights `q_j` and the
/// two marginals of every pinched block.
pub fn optimal_markov_for_decomposition<T: Real>(
    rho: &TripartiteState<T>,
    d: &Decomposition<T>,
) -> Result<MarkovState<T>> {
    let pinched = project_omega_delta(rho, d)?;
    let (da, _, dc) = rho.dims();
    let total: T = pinched.weights.iter().copied().sum();
    let weights: Vec<T> = pinched.weights.iter().map(|&q| q / total).collect();
    let mut left = Vec::with_capacity(d.len());
    let mut right = Vec::with_capacity(d.len());
    for (block, dims) in pinched.blocks.iter().zip(&pinched.block_dims) {
        left.push(partial_trace(block, dims, &[0, 1])?.hermitian_part());
        right.push(partial_trace(block, dims, &[2, 3])?.hermitian_part());
    }
    MarkovState::new(weights, left, right, d.clone(), (da, dc))
}

/// `rho` as a set of weighted vectors `sqrt(lambda_k) |v_k>`, plus its entropy.
#[derive(Debug, Clone)]
pub(crate) struct Factorization<T> {
    pub dims: (usize, usize, usize),
    pub vectors: Vec<Vec<Complex<T>>>,
    pub entropy: T,
}

impl<T: Real> Factorization<T> {
    pub fn new(rho: &TripartiteState<T>) -> Result<Self> {
        let e = jacobi(rho.matrix().hermitian_part());
        let values = clamp_spectrum(&e.values)?;
        let entropy = spectrum_entropy(&values);
        let floor = T::tol(1e-14);
        let vectors = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > floor)
            .map(|(k, &v)| {
                let s = v.sqrt();
                e.vectors.col(k).into_iter().map(|z| z * s).collect()
            })
            .collect();
        Ok(Self { dims: rho.dims(), vectors, entropy })
    }

    pub fn from_pure(psi: &[Complex<T>], dims: (usize, usize, usize)) -> Self {
        Self { dims, vectors: vec![psi.to_vec()], entropy: T::zero() }
    }

    /// Weight and unnormalized marginals of one block:
    /// `(q, sigma on A b^L, chi on b^R C)`.
    pub fn block_marginals(
        &self,
        w: &ComplexMatrix<T>,
        offset: usize,
        (dl, dr): Summand,
    ) -> (T, ComplexMatrix<T>, ComplexMatrix<T>) {
        let (da, db, dc) = self.dims;
        let m = dl * dr;
        let mut sigma = ComplexMatrix::<T>::zeros(da * dl, da * dl);
        let mut chi = ComplexMatrix::<T>::zeros(dr * dc, dr * dc);
        let mut u = vec![Complex::<T>::zero(); da * m * dc];
        let mut q = T::zero();
        for f in &self.vectors {
            // u[a, row, c] = sum_b W[offset + row, b] f[a, b, c]
            for a in 0..da {
                for row in 0..m {
                    let wrow = offset + row;
                    for c in 0..dc {
                        let mut acc = Complex::zero();
                        for b in 0..db {
                            acc = acc + w[(wrow, b)] * f[(a * db + b) * dc + c];
                        }
                        u[(a * m + row) * dc + c] = acc;
                    }
                }
            }
            q = q + u.iter().map(|z| z.norm_sqr()).sum::<T>();
            for a in 0..da {
                for l in 0..dl {
                    for a2 in 0..da {
                        for l2 in 0..dl {
                            let mut acc = Complex::zero();
                            for r in 0..dr {
                                for c in 0..dc {
                                    acc = acc
                                        + u[(a * m + l * dr + r) * dc + c] * u[(a2 * m + l2 * dr + r) * dc + c].conj();
                                }
                            }
                            let (i, j) = (a * dl + l, a2 * dl + l2);
                            sigma[(i, j)] = sigma[(i, j)] + acc;
                        }
                    }
                }
            }
            for r in 0..dr {
                for c in 0..dc {
                    for r2 in 0..dr {
                        for c2 in 0..dc {
                            let mut acc = Complex::zero();
                            for a in 0..da {
                                for l in 0..dl {
                                    acc = acc
                                        + u[(a * m + l * dr + r) * dc + c] * u[(a * m + l * dr + r2) * dc + c2].conj();
                                }
                            }
                            let (i, j) = (r * dc + c, r2 * dc + c2);
                            chi[(i, j)] = chi[(i, j)] + acc;
                        }
                    }
                }
            }
        }
        (q, sigma, chi)
    }

    /// `-S(rho) + H(q) + sum_j q_j (S(sigma_j) + S(chi_j))` for the embedding `w`.
    pub fn relent(&self, summands: &[Summand], w: &ComplexMatrix<T>) -> T {
        let mut acc = -self.entropy;
        for (&shape, off) in summands.iter().zip(block_offsets(summands)) {
            let (q, sigma, chi) = self.block_marginals(w, off, shape);
            if q <= T::tol(WEIGHT_FLOOR) {
                continue;
            }
            // ent(sigma) + ent(chi) + q log q == q (S(sigma/q) + S(chi/q)) - q log q
            let ent = |m: ComplexMatrix<T>| spectrum_entropy(&jacobi(m).values);
            acc = acc + ent(sigma) + ent(chi) + q * q.log2();
        }
        acc
    }
}

/// `D(rho || omega[delta, tau])` from the closed form over per-block spectra.
pub fn relent_via_formula<T: Real>(rho: &TripartiteState<T>, d: &Decomposition<T>) -> Result<T> {
    check_compatible(rho, d)?;
    Ok(Factorization::new(rho)?.relent(d.summands(), d.isometry()))
}

/// `D(W rho W^dagger || assemble(optimal Markov state))` computed as a plain relative entropy.
pub fn relent_direct<T: Real>(rho: &TripartiteState<T>, d: &Decomposition<T>) -> Result<EntropyReport<T>> {
    check_compatible(rho, d)?;
    let omega = assemble(&optimal_markov_for_decomposition(rho, d)?)?;
    let (embedded, _) = conjugate_subsystem(rho.matrix(), rho.as_density().dims(), d.isometry(), 1)?;
    quantum_relative_entropy(&embedded.hermitian_part(), omega.matrix())
}

/// `-S(rho) + S(J) + S(A b^L | J) + S(b^R C | J)` on the block-register state.
pub fn relent_block_register<T: Real>(rho: &TripartiteState<T>, d: &Decomposition<T>) -> Result<T> {
    check_compatible(rho, d)?;
    let (da, _, dc) = rho.dims();
    let (omega, [k, lmax, rmax]) = block_register_state(rho, d)?;
    let state = DensityMatrix::new_unchecked(omega.hermitian_part(), vec![da, k, lmax, rmax, dc]);
    let s_rho = psd_entropy(rho.matrix())?;
    let s_j = subsystem_entropy(&state, &[1])?;
    let s_left = conditional_entropy(&state, &[0, 2], &[1])?;
    let s_right = conditional_entropy(&state, &[3, 4], &[1])?;
    Ok(-s_rho + s_j + s_left + s_right)
}

/// Both sides of `D(rho||omega[delta,tau]) = D(rho||omega[delta]) + sum_j q_j I(A b^L : b^R C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRelents<T> {
    pub lhs: T,
    /// `D(rho || omega[delta])`.
    pub pinching: T,
    /// `sum_j q_j I(A b_j^L : b_j^R C)`.
    pub correlations: T,
}

impl<T: Real> TwoRelents<T> {
    pub fn gap(&self) -> T {
        (self.lhs - self.pinching - self.correlations).abs()
    }
}

pub fn two_relents_identity<T: Real>(rho: &TripartiteState<T>, d: &Decomposition<T>) -> Result<TwoRelents<T>> {
    check_compatible(rho, d)?;
    let lhs = relent_via_formula(rho, d)?;
    let pinched = project_omega_delta(rho, d)?;
    let (embedded, _) = conjugate_subsystem(rho.matrix(), rho.as_density().dims(), d.isometry(), 1)?;
    let omega_delta = pinched.reassemble(d.summands()).hermitian_part();
    let pinching = quantum_relative_entropy(&embedded.hermitian_part(), &omega_delta)?;
    let pinching = pinching
        .as_finite()
        .ok_or_else(|| Error::InvalidArgument("pinched state lost support".into()))?;
    let mut correlations = T::zero();
    for ((q, block), dims) in pinched.weights.iter().zip(&pinched.blocks).zip(&pinched.block_dims) {
        if *q <= T::tol(WEIGHT_FLOOR) {
            continue;
        }
        let st = DensityMatrix::new_unchecked(block.clone(), dims.to_vec());
        correlations = correlations + *q * mutual_information(&st, &[0, 1], &[2, 3])?;
    }
    Ok(TwoRelents { lhs, pinching, correlations })
}
