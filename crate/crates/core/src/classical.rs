//! Three-variable classical distributions and their closest Markov chain.
//!
//! For a joint `P(x, y, z)` the Markov chain `X -> Y -> Z` minimizing
//! `D(P || Q)` is `Q = P_Y P_{X|Y} P_{Z|Y}`, and the minimum equals the
//! conditional mutual information `I(X:Z|Y)`.

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyReport;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const TOL_SUM: f64 = 1e-12;

/// Nonnegative table `P(x, y, z)` stored row-major in `(x, y, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalJoint<T> {
    shape: [usize; 3],
    table: Vec<T>,
}

impl<T: Real> ClassicalJoint<T> {
    pub fn new(shape: [usize; 3], table: Vec<T>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(Error::InvalidDistribution(format!("empty alphabet in shape {shape:?}")));
        }
        let len = shape.iter().product::<usize>();
        if table.len() != len {
            return Err(Error::InvalidDistribution(format!(
                "table has {} entries, shape {shape:?} needs {len}",
                table.len()
            )));
        }
        if let Some((i, v)) = table.iter().enumerate().find(|(_, v)| !(**v >= T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidDistribution(format!("entry {i} is {v}")));
        }
        let total: T = table.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(TOL_SUM) {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self { shape, table })
    }

    /// Normalizes a nonnegative table before validating it.
    pub fn from_weights(shape: [usize; 3], weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(shape, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> T {
        let [_, ny, nz] = self.shape;
        self.table[(x * ny + y) * nz + z]
    }

    pub fn marginal_y(&self) -> Vec<T> {
        let [nx, ny, nz] = self.shape;
        (0..ny).map(|y| (0..nx).flat_map(|x| (0..nz).map(move |z| (x, z))).map(|(x, z)| self.get(x, y, z)).sum()).collect()
    }

    pub fn marginal_xy(&self) -> Vec<T> {
        let [nx, ny, nz] = self.shape;
        let mut out = vec![T::zero(); nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                out[x * ny + y] = (0..nz).map(|z| self.get(x, y, z)).sum();
            }
        }
        out
    }

    pub fn marginal_yz(&self) -> Vec<T> {
        let [nx, ny, nz] = self.shape;
        let mut out = vec![T::zero(); ny * nz];
        for y in 0..ny {
            for z in 0..nz {
                out[y * nz + z] = (0..nx).map(|x| self.get(x, y, z)).sum();
            }
        }
        out
    }
}

/// `sum P(xyz) log2 [P(xz|y) / (P(x|y) P(z|y))] = sum P log2 [P(xyz) P(y) / (P(xy) P(yz))]`.
pub fn classical_cmi<T: Real>(p: &ClassicalJoint<T>) -> T {
    let [nx, ny, nz] = p.shape();
    let py = p.marginal_y();
    let pxy = p.marginal_xy();
    let pyz = p.marginal_yz();
    let mut acc = T::zero();
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let v = p.get(x, y, z);
                if v > T::zero() {
                    acc = acc + v * (v * py[y] / (pxy[x * ny + y] * pyz[y * nz + z])).log2();
                }
            }
        }
    }
    acc.max(T::zero())
}

/// `Q(xyz) = P_Y(y) P_{X|Y}(x|y) P_{Z|Y}(z|y)`.
///
/// Slices with `P_Y(y) = 0` carry zero weight; their conditionals are taken
/// uniform, which leaves `Q` unchanged there.
pub fn closest_markov<T: Real>(p: &ClassicalJoint<T>) -> ClassicalJoint<T> {
    let [nx, ny, nz] = p.shape();
    let py = p.marginal_y();
    let pxy = p.marginal_xy();
    let pyz = p.marginal_yz();
    let mut q = vec![T::zero(); nx * ny * nz];
    for x in 0..nx {
        for y in 0..ny {
            if py[y] <= T::zero() {
                continue;
            }
            let px_given_y = pxy[x * ny + y] / py[y];
            for z in 0..nz {
                let pz_given_y = pyz[y * nz + z] / py[y];
                q[(x * ny + y) * nz + z] = py[y] * px_given_y * pz_given_y;
            }
        }
    }
    // renormalize away rounding so the result passes validation
    let total: T = q.iter().copied().sum();
    ClassicalJoint { shape: p.shape(), table: q.into_iter().map(|v| v / total).collect() }
}

/// `sum p log2(p / q)`, infinite when `p` charges a zero of `q`.
pub fn classical_relative_entropy<T: Real>(p: &ClassicalJoint<T>, q: &ClassicalJoint<T>) -> Result<EntropyReport<T>> {
    if p.shape() != q.shape() {
        return Err(Error::DimensionMismatch(format!(
            "alphabets {:?} and {:?} differ",
            p.shape(),
            q.shape()
        )));
    }
    let mut acc = T::zero();
    let mut defect = T::zero();
    for (&a, &b) in p.table().iter().zip(q.table()) {
        if a <= T::zero() {
            continue;
        }
        if b <= T::zero() {
            defect = defect + a;
        } else {
            acc = acc + a * (a / b).log2();
        }
    }
    if defect > T::zero() {
        return Ok(EntropyReport { value: T::max_value(), support_defect: defect, finite: false });
    }
    Ok(EntropyReport { value: acc, support_defect: T::zero(), finite: true })
}

pub fn is_markov<T: Real>(p: &ClassicalJoint<T>, tol: T) -> bool {
    classical_cmi(p) <= tol
}

/// Builds a Markov joint from `P_Y`, `P_{X|Y}` (indexed `[y][x]`) and `P_{Z|Y}` (indexed `[y][z]`).
pub fn markov_from_conditionals<T: Real>(py: &[T], px_y: &[Vec<T>], pz_y: &[Vec<T>]) -> Result<ClassicalJoint<T>> {
    let ny = py.len();
    if px_y.len() != ny || pz_y.len() != ny || ny == 0 {
        return Err(Error::DimensionMismatch("conditional tables must have one row per y".into()));
    }
    let nx = px_y[0].len();
    let nz = pz_y[0].len();
    let mut table = vec![T::zero(); nx * ny * nz];
    for y in 0..ny {
        for x in 0..nx {
            for z in 0..nz {
                table[(x * ny + y) * nz + z] = py[y] * px_y[y][x] * pz_y[y][z];
            }
        }
    }
    ClassicalJoint::from_weights([nx, ny, nz], table)
}

/// JSON form: `{"shape": [nX, nY, nZ], "table": [...]}` with a flat row-major table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalJointFile {
    pub shape: [usize; 3],
    pub table: Vec<f64>,
}

impl ClassicalJointFile {
    pub fn into_joint(self) -> Result<ClassicalJoint<f64>> {
        ClassicalJoint::new(self.shape, self.table)
    }

    pub fn from_joint(p: &ClassicalJoint<f64>) -> Self {
        Self { shape: p.shape(), table: p.table().to_vec() }
    }
}
