use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qmc_core::classical::{markov_from_conditionals, ClassicalJoint};
use qmc_core::entropy::{conditional_mutual_information, quantum_relative_entropy};
use qmc_core::families::random_markov;
use qmc_core::linalg::random::{haar_isometry_with, random_density_with, rng_for};
use qmc_core::linalg::{apply_isometry, TripartiteState};
use qmc_core::markov::{
    assemble, optimal_markov_for_decomposition, project_omega_delta, relent_block_register, relent_direct,
    relent_via_formula, two_relents_identity, Decomposition, MarkovState,
};
use qmc_core::optimize::{candidate_shapes, ShapeMode};
use qmc_core::{Decomp, Error, Matrix, State};

fn random_decomposition(d_b: usize, rng: &mut ChaCha8Rng) -> Decomp {
    let shapes = candidate_shapes(d_b, ShapeMode::Enumerate, usize::MAX);
    let shape = shapes[rng.random_range(0..shapes.len())].clone();
    let n = shape.iter().map(|(l, r)| l * r).sum();
    Decomposition::new(shape, haar_isometry_with(d_b, n, rng).unwrap()).unwrap()
}

fn random_state(dims: (usize, usize, usize), rng: &mut ChaCha8Rng) -> State {
    let side = dims.0 * dims.1 * dims.2;
    let rank = rng.random_range(1..=side);
    TripartiteState::new(random_density_with(side, rank, rng).unwrap(), dims).unwrap()
}

#[test]
fn markov_distance_never_below_cmi() {
    let mut rng = rng_for(1, 0);
    for i in 0..500 {
        let dims = if i % 5 == 4 { (2, 3, 2) } else { (2, 2, 2) };
        let rho = random_state(dims, &mut rng);
        let d = random_decomposition(dims.1, &mut rng);
        let cmi = conditional_mutual_information(&rho).unwrap();
        assert!(relent_via_formula(&rho, &d).unwrap() >= cmi - 1e-8);
    }
}

#[test]
fn split_into_two_relative_entropies() {
    let mut rng = rng_for(2, 0);
    for _ in 0..100 {
        let rho = random_state((2, 2, 2), &mut rng);
        let d = random_decomposition(2, &mut rng);
        let t = two_relents_identity(&rho, &d).unwrap();
        assert!(t.gap().abs() < 1e-8);
        assert!(t.pinching >= -1e-10 && t.correlations >= -1e-10);
    }
}

#[test]
fn routes_agree() {
    let mut rng = rng_for(3, 0);
    for _ in 0..100 {
        let rho = random_state((2, 2, 2), &mut rng);
        let d = random_decomposition(2, &mut rng);
        let f = relent_via_formula(&rho, &d).unwrap();
        let direct = relent_direct(&rho, &d).unwrap();
        assert!(direct.finite);
        assert!((f - direct.value).abs() < 1e-8);
        assert!((f - relent_block_register(&rho, &d).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn optimal_markov_state_attains_formula() {
    let mut rng = rng_for(4, 0);
    for _ in 0..30 {
        let rho = random_state((2, 2, 2), &mut rng);
        let d = random_decomposition(2, &mut rng);
        let omega = assemble(&optimal_markov_for_decomposition(&rho, &d).unwrap()).unwrap();
        let lifted = apply_isometry(&rho, d.isometry(), 1).unwrap();
        let direct = quantum_relative_entropy(lifted.matrix(), omega.matrix()).unwrap();
        assert!((direct.value - relent_via_formula(&rho, &d).unwrap()).abs() < 1e-8);
        // any other Markov state on the same decomposition does no better
        let m = random_markov::<f64>((2, 2), d.summands(), rng.random()).unwrap();
        let other = MarkovState::new(
            m.weights().to_vec(),
            m.left().to_vec(),
            m.right().to_vec(),
            d.clone(),
            (2, 2),
        )
        .unwrap();
        let sigma = assemble(&other).unwrap();
        let worse = quantum_relative_entropy(lifted.matrix(), sigma.matrix()).unwrap();
        assert!(!worse.finite || worse.value >= direct.value - 1e-9);
    }
}

#[test]
fn pinched_weights_sum_to_one() {
    let mut rng = rng_for(5, 0);
    for _ in 0..50 {
        let rho = random_state((2, 2, 2), &mut rng);
        let d = random_decomposition(2, &mut rng);
        let p = project_omega_delta(&rho, &d).unwrap();
        assert!((p.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(p.weights.iter().all(|&q| q >= -1e-12));
    }
}

#[test]
fn assembled_states_are_markov() {
    for (i, shape) in [vec![(1, 1)], vec![(2, 1), (1, 2)], vec![(2, 2), (1, 1)], vec![(1, 1), (1, 1), (1, 1)]]
        .into_iter()
        .enumerate()
    {
        let m = random_markov::<f64>((2, 3), &shape, i as u64).unwrap();
        let rho = assemble(&m).unwrap();
        assert!(conditional_mutual_information(&rho).unwrap().abs() < 1e-9);
        assert!(relent_via_formula(&rho, m.decomposition()).unwrap().abs() < 1e-9);
    }
}

#[test]
fn product_of_pure_components_is_pure_product() {
    let a = Matrix::outer(&[Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)]);
    let c = Matrix::outer(&[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
    let m = MarkovState::new(vec![1.0], vec![a], vec![c], Decomposition::aligned(vec![(1, 1)]), (2, 2)).unwrap();
    let rho = assemble(&m).unwrap();
    assert_eq!(rho.dims(), (2, 1, 2));
    assert!(conditional_mutual_information(&rho).unwrap().abs() < 1e-12);
    let sq = rho.matrix().matmul(rho.matrix()).unwrap();
    assert!(sq.max_abs_diff(rho.matrix()) < 1e-12);
}

#[test]
fn classical_chain_embeds_diagonally() {
    let py = [0.3, 0.7];
    let px_y = vec![vec![0.9, 0.1], vec![0.25, 0.75]];
    let pz_y = vec![vec![0.6, 0.4], vec![0.05, 0.95]];
    let joint: ClassicalJoint<f64> = markov_from_conditionals(&py, &px_y, &pz_y).unwrap();
    let diag = |v: &[f64]| Matrix::diag(v);
    let m = MarkovState::new(
        py.to_vec(),
        px_y.iter().map(|v| diag(v)).collect(),
        pz_y.iter().map(|v| diag(v)).collect(),
        Decomposition::aligned(vec![(1, 1), (1, 1)]),
        (2, 2),
    )
    .unwrap();
    let rho = assemble(&m).unwrap();
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let i = (x * 2 + y) * 2 + z;
                for j in 0..8 {
                    let expected = if i == j { joint.get(x, y, z) } else { 0.0 };
                    assert!((rho.matrix()[(i, j)] - Complex::new(expected, 0.0)).norm() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn decomposition_validation() {
    let w = Matrix::identity(2);
    assert!(Decomposition::new(vec![(2, 1)], w.clone()).is_ok());
    assert!(Decomposition::new(vec![(3, 1)], Matrix::identity(3).block(0, 0, 3, 2)).is_err());
    let not_iso = Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
    assert!(matches!(Decomposition::new(vec![(2, 1)], not_iso), Err(Error::NotIsometry(_))));
    assert!(Decomposition::new(vec![(1, 1)], w).is_err());
}

#[test]
fn markov_state_validation() {
    let d = Decomposition::<f64>::aligned(vec![(1, 1), (1, 1)]);
    let half = Matrix::identity(2).scale(0.5);
    let err = MarkovState::new(vec![0.5, 0.6], vec![half.clone(); 2], vec![half.clone(); 2], d.clone(), (2, 2));
    assert!(matches!(err, Err(Error::InvalidDistribution(_))));
    let err = MarkovState::new(vec![1.0], vec![half.clone()], vec![half.clone()], d, (2, 2));
    assert!(matches!(err, Err(Error::DimensionMismatch(_))));
}
