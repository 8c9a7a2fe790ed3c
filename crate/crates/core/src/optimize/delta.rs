use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use super::chart::IsometryChart;
use super::nelder_mead::NelderMead;
use crate::entropy::{conditional_mutual_information, mutual_information, shannon_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::random::{haar_isometry_with, orthonormalize_columns, rng_for};
use crate::linalg::{purify, validate_density, ComplexMatrix, DensityMatrix, PureState, TripartiteState};
use crate::markov::{block_offsets, Decomposition, Factorization, Summand, WEIGHT_FLOOR};
use crate::scalar::Real;

/// Which summand shapes `((dim_L, dim_R))_j` the search visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeMode {
    /// One summand `(d_B, d_B)`.
    Trivial,
    /// Shape lists in increasing total dimension, up to `max_shapes` of them.
    Enumerate,
    /// `d_B^2` summands of shape `(d_B, d_B)`.
    Full,
}

impl std::str::FromStr for ShapeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(Self::Trivial),
            "enumerate" => Ok(Self::Enumerate),
            "full" => Ok(Self::Full),
            other => Err(Error::InvalidArgument(format!("unknown shape mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub restarts: usize,
    /// Nelder-Mead iteration budget per local search.
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// `None` picks enumerate for `d_B <= 3`, full while `d_B^4` fits the
    /// embedding cap, and trivial beyond that.
    pub shape_mode: Option<ShapeMode>,
    pub simplex_scale: f64,
    pub max_shapes: usize,
    /// Largest allowed dimension of the embedding space.
    pub max_embedding_dim: usize,
    /// Number of re-centered local searches per restart.
    pub max_cycles: usize,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            restarts: 4,
            max_iters: 5000,
            tol: 1e-9,
            seed: 0,
            shape_mode: None,
            simplex_scale: 0.5,
            max_shapes: 24,
            max_embedding_dim: 256,
            max_cycles: 10,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.simplex_scale > 0.0) {
            return Err(Error::InvalidArgument(format!("simplex scale must be positive, got {}", self.simplex_scale)));
        }
        if self.max_shapes == 0 || self.max_cycles == 0 {
            return Err(Error::InvalidArgument("max_shapes and max_cycles must be at least 1".into()));
        }
        Ok(())
    }

    pub fn resolved_mode(&self, d_b: usize) -> ShapeMode {
        self.shape_mode.unwrap_or(if d_b <= 3 {
            ShapeMode::Enumerate
        } else if d_b.pow(4) <= self.max_embedding_dim {
            ShapeMode::Full
        } else {
            ShapeMode::Trivial
        })
    }
}

/// One local search.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartTrace<T> {
    pub shape: usize,
    pub restart: usize,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
    /// Best value after each re-centered search; nonincreasing.
    pub history: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult<T> {
    pub value: T,
    pub decomposition: Decomposition<T>,
    pub lower_bound: T,
    /// Shape lists visited, indexed by `RestartTrace::shape`.
    pub shapes: Vec<Vec<Summand>>,
    pub trace: Vec<RestartTrace<T>>,
    pub converged: bool,
}

/// Candidate shape lists for an input of dimension `d_b`.
pub fn candidate_shapes(d_b: usize, mode: ShapeMode, max_shapes: usize) -> Vec<Vec<Summand>> {
    match mode {
        ShapeMode::Trivial => vec![vec![(d_b, d_b)]],
        ShapeMode::Full => vec![vec![(d_b, d_b); d_b * d_b]],
        ShapeMode::Enumerate => {
            let pairs: Vec<Summand> = (1..=d_b).flat_map(|l| (1..=d_b).map(move |r| (l, r))).collect();
            let mut all = Vec::new();
            let mut current = Vec::new();
            grow(&pairs, 0, 0, d_b * d_b, d_b * d_b, &mut current, &mut all);
            all.retain(|s: &Vec<Summand>| s.iter().map(|(l, r)| l * r).sum::<usize>() >= d_b);
            all.sort_by_key(|s| (s.iter().map(|(l, r)| l * r).sum::<usize>(), s.len(), s.clone()));
            let trivial = vec![(d_b, d_b)];
            all.retain(|s| *s != trivial);
            let mut out = vec![trivial];
            out.extend(all.into_iter().take(max_shapes.saturating_sub(1)));
            out
        }
    }
}

// multisets with nondecreasing pair index
fn grow(
    pairs: &[Summand],
    from: usize,
    size: usize,
    max_size: usize,
    max_len: usize,
    current: &mut Vec<Summand>,
    out: &mut Vec<Vec<Summand>>,
) {
    if !current.is_empty() {
        out.push(current.clone());
    }
    if current.len() == max_len {
        return;
    }
    for (i, &(l, r)) in pairs.iter().enumerate().skip(from) {
        if size + l * r <= max_size {
            current.push((l, r));
            grow(pairs, i, size + l * r, max_size, max_len, current, out);
            current.pop();
        }
    }
}

/// `B` into the left factors first: column `b` goes to the `b`-th row of
/// the sequence `(j, l, r = 0)` followed by the remaining rows.
pub fn canonical_embedding<T: Real>(summands: &[Summand], d_b: usize) -> ComplexMatrix<T> {
    let n: usize = summands.iter().map(|(l, r)| l * r).sum();
    let mut rows = Vec::with_capacity(n);
    for (&(dl, dr), off) in summands.iter().zip(block_offsets(summands)) {
        rows.extend((0..dl).map(|l| off + l * dr));
    }
    let mut rest: Vec<usize> = (0..n).filter(|i| !rows.contains(i)).collect();
    rows.append(&mut rest);
    let mut w = ComplexMatrix::zeros(n, d_b);
    for (b, &row) in rows.iter().take(d_b).enumerate() {
        w[(row, b)] = Complex::new(T::one(), T::zero());
    }
    w
}

fn stream_id(shape: usize, restart: usize) -> u64 {
    ((shape as u64) << 32) | restart as u64
}

struct LocalResult<T> {
    value: T,
    isometry: ComplexMatrix<T>,
    trace: RestartTrace<T>,
}

/// Re-centered Nelder-Mead from `center` on the isometry chart.
fn local_search<T: Real>(
    objective: impl Fn(&ComplexMatrix<T>) -> T,
    center: ComplexMatrix<T>,
    cfg: &OptConfig,
    ids: (usize, usize),
) -> LocalResult<T> {
    let tol = T::c(cfg.tol);
    let mut chart = IsometryChart::new(center);
    let mut best = objective(chart.center());
    let mut history = vec![best];
    let mut iterations = 0;
    let mut converged = false;
    let mut scale = cfg.simplex_scale;
    for _cycle in 0..cfg.max_cycles {
        let nm = NelderMead { max_iters: cfg.max_iters, tol, scale: T::c(scale) };
        let m = nm.minimize(|theta| objective(&chart.isometry(theta)), &vec![T::zero(); chart.dim()]);
        iterations += m.iterations;
        converged = m.converged;
        let improvement = best - m.value;
        if m.value < best {
            let mut w = chart.isometry(&m.x);
            orthonormalize_columns(&mut w);
            let v = objective(&w);
            if v < best {
                best = v;
                chart = IsometryChart::new(w);
            }
        }
        history.push(best);
        if !(improvement >= tol) {
            break;
        }
        scale = (scale * 0.5).max(1e-3);
    }
    let (shape, restart) = ids;
    LocalResult {
        value: best,
        isometry: chart.center().clone(),
        trace: RestartTrace { shape, restart, value: best, iterations, converged, history },
    }
}

fn initial_center<T: Real>(summands: &[Summand], d_b: usize, seed: u64, ids: (usize, usize)) -> ComplexMatrix<T> {
    let n: usize = summands.iter().map(|(l, r)| l * r).sum();
    if ids.1 == 0 {
        canonical_embedding(summands, d_b)
    } else {
        haar_isometry_with(d_b, n, &mut rng_for(seed, stream_id(ids.0, ids.1))).expect("n >= d_b")
    }
}

struct Search<T> {
    value: T,
    best: Option<(Vec<Summand>, ComplexMatrix<T>)>,
    trace: Vec<RestartTrace<T>>,
}

/// Runs every restart on every shape in order; stops early once `target` is met.
fn search_shapes<T: Real>(
    shapes: &[Vec<Summand>],
    d_b: usize,
    cfg: &OptConfig,
    target: T,
    objective: impl Fn(&[Summand], &ComplexMatrix<T>) -> T + Sync,
) -> Search<T> {
    let mut out = Search { value: T::infinity(), best: None, trace: Vec::new() };
    for (si, shape) in shapes.iter().enumerate() {
        let results: Vec<LocalResult<T>> = (0..cfg.restarts)
            .into_par_iter()
            .map(|ri| {
                let center = initial_center(shape, d_b, cfg.seed, (si, ri));
                local_search(|w| objective(shape, w), center, cfg, (si, ri))
            })
            .collect();
        for r in results {
            if r.value < out.value {
                out.value = r.value;
                out.best = Some((shape.clone(), r.isometry));
            }
            out.trace.push(r.trace);
        }
        if out.value <= target {
            break;
        }
    }
    out
}

fn check_cap(shapes: &[Vec<Summand>], cap: usize) -> Result<()> {
    let largest = shapes.iter().map(|s| s.iter().map(|(l, r)| l * r).sum::<usize>()).max().unwrap_or(0);
    if largest > cap {
        return Err(Error::DimensionCapExceeded(format!(
            "embedding dimension {largest} exceeds the cap {cap}"
        )));
    }
    Ok(())
}

/// Upper estimate of the relative entropy distance to the Markov states.
///
/// Every candidate is an explicit decomposition, so the value is always
/// attained; `lower_bound` is `I(A:C|B)`.
pub fn minimize_delta<T: Real>(rho: &TripartiteState<T>, cfg: &OptConfig) -> Result<OptResult<T>> {
    cfg.validate()?;
    let d_b = rho.dims().1;
    let shapes = candidate_shapes(d_b, cfg.resolved_mode(d_b), cfg.max_shapes);
    check_cap(&shapes, cfg.max_embedding_dim)?;
    let lower = conditional_mutual_information(rho)?;
    let fact = Factorization::new(rho)?;
    let target = lower + T::c(1e-9);
    let s = search_shapes(&shapes, d_b, cfg, target, |shape, w| fact.relent(shape, w));
    let (summands, w) = s.best.expect("at least one restart");
    let converged = s.trace.iter().any(|t| t.converged);
    Ok(OptResult {
        value: s.value,
        decomposition: Decomposition::new_unchecked(summands, w),
        lower_bound: lower,
        shapes,
        trace: s.trace,
        converged,
    })
}

/// `(I(A:C|B), minimize_delta value)`.
pub fn certified_gap<T: Real>(rho: &TripartiteState<T>, cfg: &OptConfig) -> Result<(T, T)> {
    let r = minimize_delta(rho, cfg)?;
    Ok((r.lower_bound, r.value))
}

/// Reorders a purification `|psi>_{(AC) R}` into `A (x) R (x) C`.
fn split_purification<T: Real>(psi: &PureState<T>, d_a: usize, d_c: usize) -> Vec<Complex<T>> {
    let r = psi.dims()[1];
    let v = psi.vector();
    let mut out = vec![Complex::zero(); v.len()];
    for a in 0..d_a {
        for c in 0..d_c {
            for k in 0..r {
                out[(a * r + k) * d_c + c] = v[(a * d_c + c) * r + k];
            }
        }
    }
    out
}

/// Upper estimate of the entanglement of purification of `rho_ac`.
///
/// Minimizes `S(AE)` over isometries from the purifying system (dimension
/// `r = rank rho_AC`) into `E (x) F` with `|E| = |F| = r`. The returned
/// decomposition acts on that purifying system; `lower_bound` is `I(A:C)/2`.
pub fn minimize_ep<T: Real>(rho_ac: &ComplexMatrix<T>, dims: (usize, usize), cfg: &OptConfig) -> Result<OptResult<T>> {
    cfg.validate()?;
    let (d_a, d_c) = dims;
    if rho_ac.rows() != d_a * d_c {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {} for dimensions ({d_a}, {d_c})",
            rho_ac.rows()
        )));
    }
    validate_density(rho_ac)?;
    let pure = purify(rho_ac)?;
    let r = pure.dims()[1];
    let shapes = vec![vec![(r, r)]];
    check_cap(&shapes, cfg.max_embedding_dim)?;
    let state = DensityMatrix::new_unchecked(rho_ac.clone(), vec![d_a, d_c]);
    let lower = mutual_information(&state, &[0], &[1])? / T::c(2.0);
    let fact = Factorization::from_pure(&split_purification(&pure, d_a, d_c), (d_a, r, d_c));
    let half = T::c(0.5);
    let s = search_shapes(&shapes, r, cfg, lower * T::c(2.0) + T::c(1e-9), |shape, w| fact.relent(shape, w));
    let (summands, w) = s.best.expect("at least one restart");
    let trace = s
        .trace
        .into_iter()
        .map(|t| RestartTrace {
            value: t.value * half,
            history: t.history.iter().map(|&h| h * half).collect(),
            ..t
        })
        .collect::<Vec<_>>();
    let converged = trace.iter().any(|t| t.converged);
    Ok(OptResult {
        value: s.value * half,
        decomposition: Decomposition::new_unchecked(summands, w),
        lower_bound: lower,
        shapes,
        trace,
        converged,
    })
}

/// Block-dimension lists `(m_j)` for a split of `B` into orthogonal pieces.
fn candidate_block_lists(d_b: usize, max_lists: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let mut current = Vec::new();
    fn rec(d_b: usize, from: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if size >= d_b {
            out.push(current.clone());
        }
        if current.len() == d_b * d_b {
            return;
        }
        for m in (1..=from).rev() {
            if size + m <= d_b * d_b {
                current.push(m);
                rec(d_b, m, size + m, current, out);
                current.pop();
            }
        }
    }
    rec(d_b, d_b, 0, &mut current, &mut all);
    all.sort_by_key(|s| (s.iter().sum::<usize>(), s.len(), std::cmp::Reverse(s.clone())));
    all.truncate(max_lists);
    all
}

/// Pieces `(q_j, |psi_j>)` of a pure state after `V : B -> (+)_j B_j`.
fn project_blocks<T: Real>(
    psi: &[Complex<T>],
    (d_a, d_b, d_c): (usize, usize, usize),
    v: &ComplexMatrix<T>,
    blocks: &[usize],
) -> Vec<(T, Vec<Complex<T>>)> {
    let mut off = 0;
    blocks
        .iter()
        .map(|&m| {
            let mut out = vec![Complex::zero(); d_a * m * d_c];
            for a in 0..d_a {
                for i in 0..m {
                    for c in 0..d_c {
                        let mut acc = Complex::zero();
                        for b in 0..d_b {
                            acc = acc + v[(off + i, b)] * psi[(a * d_b + b) * d_c + c];
                        }
                        out[(a * m + i) * d_c + c] = acc;
                    }
                }
            }
            off += m;
            let q: T = out.iter().map(|z| z.norm_sqr()).sum();
            (q, out)
        })
        .collect()
}

/// `min S(A E)` for one normalized piece on `A (x) C^m (x) C`, returned as
/// `(2 S(AE), isometry C^m -> C^m (x) C^m)`.
fn piece_ep<T: Real>(piece: &[Complex<T>], dims: (usize, usize, usize), cfg: &OptConfig) -> (T, ComplexMatrix<T>) {
    let m = dims.1;
    let fact = Factorization::from_pure(piece, dims);
    let shape = [(m, m)];
    let center = canonical_embedding(&shape, m);
    if m == 1 {
        return (fact.relent(&shape, &center), center);
    }
    let r = local_search(|w| fact.relent(&shape, w), center, cfg, (0, 0));
    (r.value, r.isometry)
}

/// Pure-state route: optimizes the split of `B` into orthogonal blocks and,
/// inside each block, the entanglement of purification of the piece on `AC`.
///
/// The value is `H(q) + 2 sum_j q_j E_P(rho_AC^(j))` at the best split found,
/// and the decomposition assembles the block isometries.
pub fn pure_delta<T: Real>(psi: &PureState<T>, cfg: &OptConfig) -> Result<OptResult<T>> {
    cfg.validate()?;
    if psi.dims().len() != 3 {
        return Err(Error::DimensionMismatch(format!("tripartite pure state needs 3 subsystems, got {:?}", psi.dims())));
    }
    let dims = (psi.dims()[0], psi.dims()[1], psi.dims()[2]);
    let rho = psi.to_tripartite()?;
    let global = von_neumann_entropy(rho.matrix())?;
    if global > T::c(1e-8) {
        return Err(Error::NotPure(global.as_f64()));
    }
    let d_b = dims.1;
    let lists = candidate_block_lists(d_b, cfg.max_shapes);
    let shapes: Vec<Vec<Summand>> = lists.iter().map(|l| l.iter().map(|&m| (m, m)).collect()).collect();
    check_cap(&shapes, cfg.max_embedding_dim)?;
    // the outer search runs over V : B -> (+)_j C^{m_j}
    let outer: Vec<Vec<Summand>> = lists.iter().map(|l| l.iter().map(|&m| (m, 1)).collect()).collect();
    let lower = conditional_mutual_information(&rho)?;
    let inner = OptConfig { max_cycles: cfg.max_cycles.min(3), ..cfg.clone() };

    // value and per-block isometries for the split V
    let evaluate = |blocks: &[usize], v: &ComplexMatrix<T>| -> (T, Vec<ComplexMatrix<T>>, Vec<ComplexMatrix<T>>) {
        let pieces = project_blocks(psi.vector(), dims, v, blocks);
        let weights: Vec<T> = pieces.iter().map(|p| p.0).collect();
        let mut value = shannon_entropy(&weights);
        let mut isos = Vec::with_capacity(blocks.len());
        let mut selectors = Vec::with_capacity(blocks.len());
        let mut off = 0;
        for (&m, (q, piece)) in blocks.iter().zip(&pieces) {
            selectors.push(v.block(off, 0, m, d_b));
            off += m;
            if *q <= T::tol(WEIGHT_FLOOR) {
                isos.push(canonical_embedding(&[(m, m)], m));
                continue;
            }
            let norm = q.sqrt();
            let normalized: Vec<Complex<T>> = piece.iter().map(|z| z / norm).collect();
            let (ep2, u) = piece_ep(&normalized, (dims.0, m, dims.2), &inner);
            value = value + *q * ep2;
            isos.push(u);
        }
        (value, isos, selectors)
    };

    let target = lower + T::c(1e-9);
    let s = search_shapes(&outer, d_b, cfg, target, |shape, v| {
        let blocks: Vec<usize> = shape.iter().map(|s| s.0).collect();
        if blocks.len() == 1 {
            // a single block is blind to V
            evaluate(&blocks, &canonical_embedding(&[(blocks[0], 1)], d_b)).0
        } else {
            evaluate(&blocks, v).0
        }
    });
    let (best_outer, best_v) = s.best.expect("at least one restart");
    let blocks: Vec<usize> = best_outer.iter().map(|s| s.0).collect();
    let best_shape: Vec<Summand> = blocks.iter().map(|&m| (m, m)).collect();
    let v = if blocks.len() == 1 { canonical_embedding(&[(blocks[0], 1)], d_b) } else { best_v };
    let (_, isos, selectors) = evaluate(&blocks, &v);
    let n: usize = blocks.iter().map(|m| m * m).sum();
    let mut w = ComplexMatrix::zeros(n, d_b);
    let mut row = 0;
    for (u, sel) in isos.iter().zip(&selectors) {
        let piece = u.matmul(sel).expect("shapes");
        for i in 0..piece.rows() {
            for b in 0..d_b {
                w[(row + i, b)] = piece[(i, b)];
            }
        }
        row += piece.rows();
    }
    let fact = Factorization::from_pure(psi.vector(), dims);
    let value = fact.relent(&best_shape, &w);
    let converged = s.trace.iter().any(|t| t.converged);
    Ok(OptResult {
        value,
        decomposition: Decomposition::new_unchecked(best_shape, w),
        lower_bound: lower,
        shapes,
        trace: s.trace,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_enumeration() {
        let s = candidate_shapes(2, ShapeMode::Enumerate, 100);
        assert_eq!(s[0], vec![(2, 2)]);
        assert!(s.iter().all(|x| x.len() <= 4 && x.iter().all(|&(l, r)| l <= 2 && r <= 2)));
        let sizes: Vec<usize> = s[1..].iter().map(|x| x.iter().map(|(l, r)| l * r).sum()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        assert!(sizes.iter().all(|&n| (2..=4).contains(&n)));
        assert!(s.contains(&vec![(1, 1), (1, 1)]));
        assert_eq!(candidate_shapes(3, ShapeMode::Enumerate, 24).len(), 24);
        assert_eq!(candidate_shapes(2, ShapeMode::Full, 24), vec![vec![(2, 2); 4]]);
        assert_eq!(candidate_shapes(1, ShapeMode::Enumerate, 24), vec![vec![(1, 1)]]);
    }

    #[test]
    fn block_lists() {
        let l = candidate_block_lists(2, 100);
        assert_eq!(l, vec![vec![2], vec![1, 1], vec![2, 1], vec![1, 1, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn canonical_embedding_is_isometry() {
        let w: ComplexMatrix<f64> = canonical_embedding(&[(1, 2), (2, 1), (1, 1)], 3);
        assert!(w.isometry_defect() < 1e-15);
        assert_eq!(w[(0, 0)].re, 1.0);
        assert_eq!(w[(2, 1)].re, 1.0);
        assert_eq!(w[(3, 2)].re, 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(OptConfig { restarts: 0, ..OptConfig::default() }.validate().is_err());
        assert!(OptConfig { tol: 0.0, ..OptConfig::default() }.validate().is_err());
        assert_eq!(OptConfig::default().resolved_mode(3), ShapeMode::Enumerate);
        assert_eq!(OptConfig::default().resolved_mode(4), ShapeMode::Full);
        assert_eq!(OptConfig::default().resolved_mode(6), ShapeMode::Trivial);
        assert!("diagonal".parse::<ShapeMode>().is_err());
    }
}
