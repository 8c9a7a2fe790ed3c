//! Seeded invariant suites, reported as per-invariant pass/fail counts.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::classical::{
    classical_cmi, classical_relative_entropy, closest_markov, is_markov, markov_from_conditionals, ClassicalJoint,
};
use crate::entropy::{
    alicki_fannes_bound, conditional_entropy, conditional_mutual_information, fannes_bound, nearest_pure,
    pinsker_floor, quantum_relative_entropy, von_neumann_entropy,
};
use crate::error::{Error, Result};
use crate::families::{random_markov, random_tripartite};
use crate::linalg::random::{haar_isometry_with, random_density_with, rng_for};
use crate::linalg::{conjugate_subsystem, partial_trace, trace_norm, ComplexMatrix, DensityMatrix, TripartiteState};
use crate::markov::{
    assemble, project_omega_delta, relent_block_register, relent_direct, relent_via_formula, two_relents_identity,
    Decomposition, MarkovState, Summand,
};
use crate::optimize::{minimize_delta, minimize_ep, OptConfig, ShapeMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Entropy,
    Classical,
    Markov,
    Optimizer,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Self::Entropy),
            "classical" => Ok(Self::Classical),
            "markov" => Ok(Self::Markov),
            "optimizer" => Ok(Self::Optimizer),
            "all" => Ok(Self::All),
            other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub invariants: Vec<InvariantReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.invariants.iter().all(|i| i.failed == 0)
    }

    fn record(&mut self, suite: &'static str, name: &'static str, outcomes: impl IntoIterator<Item = bool>) {
        let (mut passed, mut failed) = (0, 0);
        for ok in outcomes {
            if ok {
                passed += 1;
            } else {
                failed += 1;
            }
        }
        self.invariants.push(InvariantReport { suite, name, passed, failed });
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in &self.invariants {
            let status = if i.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {}/{}: {} passed, {} failed", i.suite, i.name, i.passed, i.failed)?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> VerifyReport {
    let mut report = VerifyReport::default();
    if matches!(suite, Suite::Entropy | Suite::All) {
        entropy_suite(&mut report, seed);
    }
    if matches!(suite, Suite::Classical | Suite::All) {
        classical_suite(&mut report, seed);
    }
    if matches!(suite, Suite::Markov | Suite::All) {
        markov_suite(&mut report, seed);
    }
    if matches!(suite, Suite::Optimizer | Suite::All) {
        optimizer_suite(&mut report, seed);
    }
    report
}

fn ok(r: Result<bool>) -> bool {
    r.unwrap_or(false)
}

/// `(1 - t) rho + t tau` for a random `tau`.
fn nearby(rho: &ComplexMatrix<f64>, t: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix<f64> {
    let tau = random_density_with(rho.rows(), rho.rows(), rng).expect("valid rank");
    &rho.scale(1.0 - t) + &tau.scale(t)
}

fn entropy_suite(report: &mut VerifyReport, seed: u64) {
    let mut rng = rng_for(seed, 1);
    report.record(
        "entropy",
        "strong subadditivity",
        (0..200).map(|i| {
            ok(random_tripartite::<f64>((2, 2, 2), 1 + i % 8, seed.wrapping_add(i as u64))
                .and_then(|r| conditional_mutual_information(&r))
                .map(|c| c >= -1e-9))
        }),
    );
    let pairs: Vec<(ComplexMatrix<f64>, ComplexMatrix<f64>)> = (0..100)
        .map(|_| {
            let rho = random_density_with(4, 4, &mut rng).expect("valid rank");
            let sigma = random_density_with(4, 4, &mut rng).expect("valid rank");
            (rho, sigma)
        })
        .collect();
    report.record(
        "entropy",
        "relative entropy nonnegative",
        pairs.iter().map(|(r, s)| ok(quantum_relative_entropy(r, s).map(|d| d.value >= -1e-10))),
    );
    report.record(
        "entropy",
        "Pinsker floor",
        pairs.iter().map(|(r, s)| {
            ok(quantum_relative_entropy(r, s).and_then(|d| Ok(d.value >= pinsker_floor(r, s)? - 1e-10)))
        }),
    );
    report.record(
        "entropy",
        "Fannes",
        (0..100).map(|_| {
            let rho = random_density_with(4, 1 + rng.random_range(0..4), &mut rng).expect("valid rank");
            let sigma = nearby(&rho, rng.random_range(0.001..0.15), &mut rng);
            ok((|| {
                let t = trace_norm(&(&rho - &sigma))?;
                if t > 1.0 / std::f64::consts::E {
                    return Ok(true);
                }
                let gap = (von_neumann_entropy(&rho)? - von_neumann_entropy(&sigma)?).abs();
                Ok(t <= 0.0 || gap <= fannes_bound(t, 4)? + 1e-10)
            })())
        }),
    );
    report.record(
        "entropy",
        "Alicki-Fannes",
        (0..100).map(|_| {
            let rho = random_density_with(4, 4, &mut rng).expect("valid rank");
            let sigma = nearby(&rho, rng.random_range(0.001..0.5), &mut rng);
            ok((|| {
                let eps = trace_norm(&(&rho - &sigma))?;
                if eps <= 0.0 || eps > 1.0 {
                    return Ok(true);
                }
                let cond = |m: &ComplexMatrix<f64>| {
                    conditional_entropy(&DensityMatrix::new(m.clone(), vec![2, 2])?, &[0], &[1])
                };
                Ok((cond(&rho)? - cond(&sigma)?).abs() <= alicki_fannes_bound(eps, 2)? + 1e-10)
            })())
        }),
    );
    report.record(
        "entropy",
        "nearest pure state within 2S",
        (0..100).map(|_| {
            let psi = random_density_with(4, 1, &mut rng).expect("valid rank");
            let rho = nearby(&psi, rng.random_range(0.0..0.2), &mut rng);
            ok((|| Ok(nearest_pure(&rho)?.1 <= 2.0 * von_neumann_entropy(&rho)? + 1e-10))())
        }),
    );
}

fn random_joint(shape: [usize; 3], rng: &mut ChaCha8Rng) -> ClassicalJoint<f64> {
    let n = shape.iter().product();
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    ClassicalJoint::from_weights(shape, w).expect("positive weights")
}

fn random_chain(shape: [usize; 3], rng: &mut ChaCha8Rng) -> ClassicalJoint<f64> {
    let [nx, ny, nz] = shape;
    let norm = |v: Vec<f64>| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect::<Vec<_>>()
    };
    let mut draw = |n: usize| norm((0..n).map(|_| rng.random::<f64>() + 1e-3).collect());
    let py = draw(ny);
    let px: Vec<Vec<f64>> = (0..ny).map(|_| draw(nx)).collect();
    let pz: Vec<Vec<f64>> = (0..ny).map(|_| draw(nz)).collect();
    markov_from_conditionals(&py, &px, &pz).expect("valid conditionals")
}

fn classical_suite(report: &mut VerifyReport, seed: u64) {
    let mut rng = rng_for(seed, 2);
    let joints: Vec<ClassicalJoint<f64>> =
        (0..200).map(|i| random_joint(if i % 2 == 0 { [2, 2, 2] } else { [3, 3, 3] }, &mut rng)).collect();
    report.record(
        "classical",
        "D(P||Q*) = I(X:Z|Y)",
        joints.iter().map(|p| {
            let q = closest_markov(p);
            ok(classical_relative_entropy(p, &q).map(|d| d.finite && (d.value - classical_cmi(p)).abs() <= 1e-10))
        }),
    );
    report.record("classical", "projection is Markov", joints.iter().map(|p| is_markov(&closest_markov(p), 1e-12)));
    report.record(
        "classical",
        "projection is idempotent",
        joints.iter().map(|p| {
            let q = closest_markov(p);
            let qq = closest_markov(&q);
            q.table().iter().zip(qq.table()).all(|(a, b)| (a - b).abs() <= 1e-12)
        }),
    );
    report.record(
        "classical",
        "projection beats random chains",
        joints.iter().take(20).flat_map(|p| {
            let best = classical_relative_entropy(p, &closest_markov(p)).map(|d| d.value).unwrap_or(f64::INFINITY);
            (0..50)
                .map(|_| {
                    let q = random_chain(p.shape(), &mut rng);
                    ok(classical_relative_entropy(p, &q).map(|d| best <= d.value + 1e-12))
                })
                .collect::<Vec<_>>()
        }),
    );
}

fn random_shape(d_b: usize, rng: &mut ChaCha8Rng) -> Vec<Summand> {
    loop {
        let k = rng.random_range(1..=3usize);
        let s: Vec<Summand> = (0..k).map(|_| (rng.random_range(1..=d_b), rng.random_range(1..=d_b))).collect();
        if s.iter().map(|(l, r)| l * r).sum::<usize>() >= d_b {
            return s;
        }
    }
}

/// Random state on `2 (x) 2 (x) 2` and a random decomposition of `B`.
pub fn random_pair(rng: &mut ChaCha8Rng) -> (TripartiteState<f64>, Decomposition<f64>) {
    let rank = rng.random_range(1..=8);
    let rho = TripartiteState::new(random_density_with(8, rank, rng).expect("valid rank"), (2, 2, 2))
        .expect("valid state");
    let shape = random_shape(2, rng);
    let n = shape.iter().map(|(l, r)| l * r).sum();
    let w = haar_isometry_with(2, n, rng).expect("n >= d_B");
    (rho, Decomposition::new(shape, w).expect("valid decomposition"))
}

/// Random Markov state sharing the decomposition `d`, on `A (x) B_hat (x) C`.
fn random_markov_like(d: &Decomposition<f64>, rng: &mut ChaCha8Rng) -> Result<TripartiteState<f64>> {
    let k = d.len();
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut left = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for &(dl, dr) in d.summands() {
        left.push(random_density_with(2 * dl, 2 * dl, rng)?);
        right.push(random_density_with(dr * 2, dr * 2, rng)?);
    }
    let m = MarkovState::new(raw.iter().map(|w| w / total).collect(), left, right, d.clone(), (2, 2))?;
    assemble(&m)
}

fn markov_suite(report: &mut VerifyReport, seed: u64) {
    let mut rng = rng_for(seed, 3);
    let pairs: Vec<_> = (0..50).map(|_| random_pair(&mut rng)).collect();
    report.record(
        "markov",
        "three evaluation routes agree",
        pairs.iter().map(|(rho, d)| {
            ok((|| {
                let f = relent_via_formula(rho, d)?;
                let direct = relent_direct(rho, d)?;
                let reg = relent_block_register(rho, d)?;
                Ok(direct.finite && (f - direct.value).abs() <= 1e-8 && (f - reg).abs() <= 1e-8)
            })())
        }),
    );
    report.record(
        "markov",
        "pinched weights sum to one",
        pairs.iter().map(|(rho, d)| {
            ok(project_omega_delta(rho, d).map(|p| (p.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-10))
        }),
    );
    report.record(
        "markov",
        "two-relative-entropy identity",
        pairs.iter().map(|(rho, d)| ok(two_relents_identity(rho, d).map(|t| t.gap() <= 1e-8))),
    );
    report.record(
        "markov",
        "lower bound I(A:C|B)",
        pairs.iter().map(|(rho, d)| {
            ok((|| Ok(relent_via_formula(rho, d)? >= conditional_mutual_information(rho)? - 1e-8))())
        }),
    );
    report.record(
        "markov",
        "optimal Markov state beats random ones",
        pairs.iter().take(10).flat_map(|(rho, d)| {
            let best = relent_via_formula(rho, d).unwrap_or(f64::INFINITY);
            let (embedded, _) =
                conjugate_subsystem(rho.matrix(), &[2, 2, 2], d.isometry(), 1).expect("matching dimensions");
            (0..50)
                .map(|_| {
                    ok((|| {
                        let mu = random_markov_like(d, &mut rng)?;
                        let r = quantum_relative_entropy(&embedded.hermitian_part(), mu.matrix())?;
                        Ok(best <= r.value + 1e-9)
                    })())
                })
                .collect::<Vec<_>>()
        }),
    );
    report.record(
        "markov",
        "assembled Markov states have zero CMI",
        (0..20).map(|i| {
            let shape = random_shape(2, &mut rng);
            ok((|| {
                let mu = assemble(&random_markov::<f64>((2, 2), &shape, seed.wrapping_add(i))?)?;
                Ok(conditional_mutual_information(&mu)?.abs() <= 1e-8)
            })())
        }),
    );
}

fn optimizer_suite(report: &mut VerifyReport, seed: u64) {
    let cfg = OptConfig { restarts: 2, max_iters: 2000, seed, ..OptConfig::default() };
    let states: Vec<TripartiteState<f64>> = (0..5)
        .map(|i| random_tripartite((2, 2, 2), [1, 2, 4, 8, 8][i], seed.wrapping_add(100 + i as u64)).expect("valid"))
        .collect();
    let results: Vec<_> = states.iter().map(|rho| minimize_delta(rho, &cfg)).collect();
    report.record(
        "optimizer",
        "lower <= upper",
        results.iter().map(|r| r.as_ref().is_ok_and(|r| r.lower_bound <= r.value + 1e-6)),
    );
    report.record(
        "optimizer",
        "reported value is attained",
        states.iter().zip(&results).map(|(rho, r)| {
            r.as_ref().is_ok_and(|r| {
                relent_via_formula(rho, &r.decomposition).is_ok_and(|v| (v - r.value).abs() <= 1e-8)
                    && r.decomposition.isometry().isometry_defect() <= 1e-9
            })
        }),
    );
    report.record(
        "optimizer",
        "monotone traces",
        results.iter().flat_map(|r| match r {
            Ok(r) => r.trace.iter().map(|t| t.history.windows(2).all(|w| w[1] <= w[0])).collect(),
            Err(_) => vec![false],
        }),
    );
    report.record(
        "optimizer",
        "deterministic restarts",
        states.iter().take(2).zip(&results).map(|(rho, r)| match (minimize_delta(rho, &cfg), r) {
            (Ok(a), Ok(b)) => a == *b,
            _ => false,
        }),
    );
    let trivial = OptConfig { shape_mode: Some(ShapeMode::Trivial), ..cfg.clone() };
    report.record(
        "optimizer",
        "trivial shape gives 2 E_P on pure states",
        (0..3).map(|i| {
            ok((|| {
                let rho = random_tripartite::<f64>((2, 2, 2), 1, seed.wrapping_add(200 + i))?;
                let ac = partial_trace(rho.matrix(), &[2, 2, 2], &[0, 2])?;
                let d = minimize_delta(&rho, &trivial)?.value;
                let ep = minimize_ep(&ac, (2, 2), &cfg)?.value;
                Ok((d - 2.0 * ep).abs() <= 1e-6)
            })())
        }),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_and_classical_suites_pass() {
        let r = run_suite(Suite::Entropy, 7);
        assert!(r.all_passed(), "{r}");
        let r = run_suite(Suite::Classical, 7);
        assert!(r.all_passed(), "{r}");
        assert!(r.invariants[0].passed == 200);
    }

    #[test]
    fn markov_suite_passes() {
        let r = run_suite(Suite::Markov, 11);
        assert!(r.all_passed(), "{r}");
    }

    #[test]
    fn report_format() {
        let mut r = VerifyReport::default();
        r.record("s", "n", [true, false, true]);
        assert_eq!(r.to_string(), "FAIL s/n: 2 passed, 1 failed\n");
        assert!(!r.all_passed());
    }
}
