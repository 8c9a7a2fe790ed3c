use num_complex::Complex;

use qmc_core::entropy::{conditional_mutual_information, von_neumann_entropy};
use qmc_core::families::{cq_ensemble, cq_measurement, cq_relent, psi_x, random_tripartite, zeta_d, FamilyState};
use qmc_core::linalg::random::{haar_isometry_with, rng_for};
use qmc_core::linalg::{hermitian_eigenvalues, hermitian_rank, partial_trace};
use qmc_core::{Error, Matrix};

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

fn basis_povm(d: usize) -> Vec<Matrix> {
    (0..d)
        .map(|k| {
            let mut m = Matrix::zeros(d, d);
            m[(k, k)] = c(1.0);
            m
        })
        .collect()
}

#[test]
fn psi_at_inverse_root_two() {
    let p = psi_x::<f64>(0.5f64.sqrt()).unwrap();
    let cf = &p.closed_forms;
    assert!((cf.s_a.unwrap() - 1.0).abs() < 1e-12);
    assert!((cf.s_b.unwrap() - 1.0).abs() < 1e-12);
    assert!((cf.cmi.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn psi_half_values() {
    let p = psi_x::<f64>(0.5).unwrap();
    let rho = p.state.to_tripartite().unwrap();
    let cf = &p.closed_forms;
    assert!((cf.s_a.unwrap() - 0.811278).abs() < 1e-6);
    // displayed rho_B has eigenvalues 0.625 and 0.375
    let s_b: f64 = -(0.625f64 * 0.625f64.log2() + 0.375 * 0.375f64.log2());
    assert!((cf.s_b.unwrap() - s_b).abs() < 1e-12);
    assert!((cf.s_b.unwrap() - 0.954434).abs() < 1e-6);
    assert!((cf.cmi.unwrap() - 0.668122).abs() < 1e-6);
    let rho_b = partial_trace(rho.matrix(), &[2, 2, 2], &[1]).unwrap();
    let mut ev = hermitian_eigenvalues(&rho_b).unwrap();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] - 0.375).abs() < 1e-12 && (ev[1] - 0.625).abs() < 1e-12);
}

#[test]
fn psi_grid_self_consistency() {
    for k in 1..=9 {
        let p = psi_x::<f64>(0.1 * k as f64).unwrap();
        let measured = conditional_mutual_information(&p.state.to_tripartite().unwrap()).unwrap();
        assert!((measured - p.closed_forms.cmi.unwrap()).abs() < 1e-9, "x = {}", 0.1 * k as f64);
        assert!(p.closed_form_defect().unwrap() < 1e-9);
    }
}

#[test]
fn psi_rejects_out_of_range() {
    for x in [0.0, 1.0, -0.2, f64::NAN] {
        assert!(psi_x::<f64>(x).is_err());
    }
}

#[test]
fn psi_ratio_trend() {
    let ratio = |x: f64| {
        let cf = psi_x::<f64>(x).unwrap().closed_forms;
        cf.delta_lower.unwrap() / cf.cmi.unwrap()
    };
    let r: Vec<f64> = [0.3, 0.2, 0.1, 0.05].into_iter().map(ratio).collect();
    assert!(r.windows(2).all(|w| w[1] > w[0]), "{r:?}");
}

#[test]
fn zeta_values() {
    for (d, cmi, lower) in [(2, 0.415037, 1.0), (3, 0.584963, 1.584963)] {
        let p = zeta_d::<f64>(d).unwrap();
        let cf = &p.closed_forms;
        assert!((cf.cmi.unwrap() - cmi).abs() < 1e-6);
        assert!((cf.delta_lower.unwrap() - lower).abs() < 1e-6);
        assert!((cf.delta_upper.unwrap() - 2.0 * lower).abs() < 1e-6);
        let measured = conditional_mutual_information(&p.state.to_tripartite().unwrap()).unwrap();
        assert!((measured - cf.cmi.unwrap()).abs() < 1e-9);
        assert!(cf.cmi.unwrap() < 1.0);
    }
}

#[test]
fn zeta_is_pure_with_symmetric_marginal() {
    let p = zeta_d::<f64>(3).unwrap();
    assert!(matches!(p.state, FamilyState::Pure(_)));
    assert_eq!(p.state.dims(), (3, 6, 3));
    let rho = p.state.to_tripartite().unwrap();
    let ac = partial_trace(rho.matrix(), &[3, 6, 3], &[0, 2]).unwrap();
    assert_eq!(hermitian_rank(&ac).unwrap(), 6);
    assert!((von_neumann_entropy(&ac).unwrap() - 6f64.log2()).abs() < 1e-9);
}

#[test]
fn zeta_budget() {
    assert!(zeta_d::<f64>(5).is_ok());
    assert!(matches!(zeta_d::<f64>(6), Err(Error::DimensionCapExceeded(_))));
    assert!(zeta_d::<f64>(1).is_err());
}

#[test]
fn cq_orthogonal_states_are_markov() {
    let states = vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]];
    let p = cq_ensemble(&[0.3, 0.7], &states).unwrap();
    let m = cq_measurement(&p, &states, &basis_povm(2)).unwrap();
    assert!(m.relent.abs() < 1e-9);
    assert!(m.information_distance.abs() < 1e-9);
}

#[test]
fn cq_information_distance() {
    let s = 0.5f64.sqrt();
    let states = vec![vec![c(1.0), c(0.0)], vec![c(s), c(s)]];
    let p = cq_ensemble(&[0.5, 0.5], &states).unwrap();
    let m = cq_measurement(&p, &states, &basis_povm(2)).unwrap();
    // p(j, k): (1/2, 0; 1/4, 1/4), so S(A|K) + S(K|A) = 2 H(JK) - H(J) - H(K)
    let h = |v: &[f64]| v.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum::<f64>();
    let expected = 2.0 * h(&[0.5, 0.25, 0.25]) - h(&[0.5, 0.5]) - h(&[0.75, 0.25]);
    assert!((m.information_distance - expected).abs() < 1e-12);
    assert!((m.relent - expected).abs() < 1e-9);
    let formula = cq_relent(&p, &basis_povm(2), None).unwrap();
    assert!((formula - expected).abs() < 1e-9);
    let cf = &p.closed_forms;
    assert!((cf.cmi.unwrap() - (cf.s_a.unwrap() - cf.s_b.unwrap())).abs() < 1e-12);
    assert!(p.closed_form_defect().unwrap() < 1e-9);
}

#[test]
fn cq_trivial_split_beats_random_splits() {
    let s = 0.5f64.sqrt();
    let states = vec![vec![c(1.0), c(0.0)], vec![c(s), c(s)]];
    let p = cq_ensemble(&[0.5, 0.5], &states).unwrap();
    let mut rng = rng_for(17, 0);
    let povms = [basis_povm(2), {
        let plus = Matrix::outer(&[c(s), c(s)]);
        let minus = Matrix::outer(&[c(s), c(-s)]);
        vec![plus, minus]
    }];
    for povm in &povms {
        let trivial = cq_relent(&p, povm, None).unwrap();
        for _ in 0..50 {
            let splits: Vec<_> = (0..povm.len()).map(|_| ((2, 2), haar_isometry_with(2, 4, &mut rng).unwrap())).collect();
            let split = cq_relent(&p, povm, Some(&splits)).unwrap();
            assert!(trivial <= split + 1e-9, "{trivial} > {split}");
        }
    }
}

#[test]
fn cq_shape_errors() {
    let states = vec![vec![c(1.0), c(0.0)], vec![c(1.0)]];
    assert!(cq_ensemble(&[0.5, 0.5], &states).is_err());
    assert!(cq_ensemble(&[1.0], &states[..1]).is_ok());
    assert!(cq_ensemble(&[0.5, 0.6], &[vec![c(1.0)], vec![c(1.0)]]).is_err());
}

#[test]
fn random_states() {
    let pure = random_tripartite::<f64>((2, 2, 2), 1, 4).unwrap();
    assert!(von_neumann_entropy(pure.matrix()).unwrap() < 1e-9);
    assert_eq!(random_tripartite::<f64>((2, 3, 2), 5, 9).unwrap(), random_tripartite::<f64>((2, 3, 2), 5, 9).unwrap());
    for seed in 0..200 {
        let rho = random_tripartite::<f64>((2, 2, 2), 1 + (seed as usize) % 8, seed).unwrap();
        assert!(conditional_mutual_information(&rho).unwrap() >= -1e-9);
    }
}
