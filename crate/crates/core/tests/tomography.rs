mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use szne_core::circuit::{Circuit, Gate};
use szne_core::density::DensityMatrix;
use szne_core::sim::{run_noiseless, StateVector};
use szne_core::tomo::{
    all_settings, expectation_from_probs, fidelity, fidelity_general, fidelity_to_pure, reconstruct,
    reconstruct_map, tomography_circuits, MeasurementSetting, SParamMode,
};

fn oracle_results(psi: &[szne_core::C64], n: usize, qubits: &[usize]) -> Vec<Vec<f64>> {
    all_settings(qubits.len())
        .iter()
        .map(|s| pauli_basis_probs(psi, n, qubits, s))
        .collect()
}

#[test]
fn setting_counts_and_order() {
    assert_eq!(all_settings(4).len(), 81);
    assert_eq!(all_settings(1).len(), 3);
    let labels: Vec<String> = all_settings(1).iter().map(|s| s.label()).collect();
    assert_eq!(labels, ["X", "Y", "Z"]);
    assert_eq!(MeasurementSetting::parse("ZXYZ").unwrap().index(), 60);
    assert_eq!(MeasurementSetting::from_index(4, 60).unwrap().label(), "ZXYZ");
    assert_eq!(all_settings(2)[0].label(), "XX");
    assert_eq!(all_settings(2)[8].label(), "ZZ");
    assert!(MeasurementSetting::parse("XQ").is_err());
}

#[test]
fn tomography_circuits_match_born_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let n = 5;
    let base = random_mixed_circuit(&mut rng, n, 30);
    let psi = apply(&dense_unitary(&base), &zero_state(n));
    for qubits in [vec![0, 2, 3, 4], vec![4, 1], vec![3]] {
        let circuits = tomography_circuits(&base, &qubits).unwrap();
        assert_eq!(circuits.len(), 3usize.pow(qubits.len() as u32));
        for tc in &circuits {
            assert_eq!(tc.measured, qubits);
            let got = run_noiseless(&tc.circuit).unwrap().marginal_probabilities(&qubits);
            let want = pauli_basis_probs(&psi, n, &qubits, &tc.setting);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-10, "{}", tc.setting.label());
            }
        }
    }
}

#[test]
fn zxyz_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = random_mixed_circuit(&mut rng, 4, 20);
    let psi = apply(&dense_unitary(&base), &zero_state(4));
    let qubits = [0, 1, 2, 3];
    // Settings are numbered from 1.
    let tc = &tomography_circuits(&base, &qubits).unwrap()[60 - 1];
    assert_eq!(tc.setting.label(), "ZXYZ");
    let got = run_noiseless(&tc.circuit).unwrap().marginal_probabilities(&qubits);
    let want = pauli_basis_probs(&psi, 4, &qubits, &tc.setting);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn expectation_examples() {
    let s = MeasurementSetting::parse("Z").unwrap();
    assert_eq!(expectation_from_probs(&[1.0, 0.0], &s).unwrap(), 1.0);
    assert_eq!(expectation_from_probs(&[0.0, 1.0], &s).unwrap(), -1.0);
    assert_eq!(expectation_from_probs(&[0.5, 0.5], &s).unwrap(), 0.0);
    let s2 = MeasurementSetting::parse("ZZ").unwrap();
    let v = expectation_from_probs(&[0.4, 0.1, 0.2, 0.3], &s2).unwrap();
    assert!((v - 0.4).abs() < 1e-12);
    assert!(expectation_from_probs(&[0.4, 0.4], &s).is_err());
    assert!(expectation_from_probs(&[1.0, 0.0, 0.0], &s).is_err());
}

#[test]
fn reconstruct_zero_state() {
    let psi = zero_state(4);
    let rec = reconstruct(&oracle_results(&psi, 4, &[0, 1, 2, 3]), 4, SParamMode::Average).unwrap();
    assert!((rec.rho.get(0, 0).re - 1.0).abs() < 1e-12);
    for r in 0..16 {
        for k in 0..16 {
            if (r, k) != (0, 0) {
                assert!(rec.rho.get(r, k).norm() < 1e-12);
            }
        }
    }
    let labels = rec.s_param_labels();
    let zzzz = labels.iter().find(|(l, _)| l == "ZZZZ").unwrap().1;
    assert!((zzzz - 1.0).abs() < 1e-12);
    assert_eq!(labels[0].0, "IIII");
    assert!((labels[0].1 - 1.0).abs() < 1e-12);
}

#[test]
fn reconstruct_random_pure_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for m in 1..=3 {
        for _ in 0..5 {
            let psi = random_state(&mut rng, m);
            let qubits: Vec<usize> = (0..m).collect();
            let results = oracle_results(&psi, m, &qubits);
            let want = projector(&psi);
            for mode in [SParamMode::Average, SParamMode::Single] {
                let rec = reconstruct(&results, m, mode).unwrap();
                assert!((rec.rho.matrix() - &want).iter().all(|z| z.norm() < 1e-10));
                assert!((rec.rho.trace().re - 1.0).abs() < 1e-12);
                let phi = StateVector::from_amplitudes(psi.clone()).unwrap();
                let f = fidelity_to_pure(&phi, &rec.rho).unwrap();
                assert!((f.fidelity - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn reconstruct_reduced_state_of_entangled_register() {
    // Bell pair on qubits 0 and 2 of three qubits; tomography of qubit 0 alone
    // sees the maximally mixed state.
    let mut c = Circuit::new(3, "bell").unwrap();
    c.push(Gate::h(0)).unwrap();
    c.push(Gate::cx(0, 2)).unwrap();
    let results: Vec<Vec<f64>> = tomography_circuits(&c, &[0])
        .unwrap()
        .iter()
        .map(|tc| run_noiseless(&tc.circuit).unwrap().marginal_probabilities(&tc.measured))
        .collect();
    let rec = reconstruct(&results, 1, SParamMode::Average).unwrap();
    let mixed = DensityMatrix::maximally_mixed(1);
    assert!((rec.rho.matrix() - mixed.matrix()).iter().all(|z| z.norm() < 1e-12));
    let f = fidelity(&mixed, &rec.rho).unwrap();
    assert!((f.fidelity - 1.0).abs() < 1e-9);
}

#[test]
fn reconstruct_map_requires_every_setting() {
    let psi = zero_state(2);
    let mut map = std::collections::BTreeMap::new();
    for s in all_settings(2) {
        map.insert(s.label(), pauli_basis_probs(&psi, 2, &[0, 1], &s));
    }
    assert!(reconstruct_map(&map, 2, SParamMode::Average).is_ok());
    map.remove("XY");
    assert!(reconstruct_map(&map, 2, SParamMode::Average).is_err());
}

#[test]
fn fidelity_examples() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = StateVector::from_amplitudes(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let plus = DensityMatrix::pure(&[c(h, 0.0), c(h, 0.0)]).unwrap();
    let one = DensityMatrix::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!((fidelity_to_pure(&zero, &plus).unwrap().fidelity - 0.5).abs() < 1e-12);
    assert!(fidelity_to_pure(&zero, &one).unwrap().fidelity.abs() < 1e-12);
    let mixed = DensityMatrix::maximally_mixed(2);
    let bell = DensityMatrix::pure(&[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
    assert!((fidelity(&bell, &mixed).unwrap().fidelity - 0.25).abs() < 1e-12);
    assert!((fidelity_general(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-9);
    // Commuting diagonal states: (Σ √(p q))².
    let a = DensityMatrix::from_matrix(nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.7, 0.0), c(0.3, 0.0)]))).unwrap();
    let b = DensityMatrix::from_matrix(nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.2, 0.0), c(0.8, 0.0)]))).unwrap();
    let want = ((0.7f64 * 0.2).sqrt() + (0.3f64 * 0.8).sqrt()).powi(2);
    assert!((fidelity(&a, &b).unwrap().fidelity - want).abs() < 1e-9);
}

#[test]
fn non_physical_reconstruction_is_projected() {
    // Z outcomes sharper than any state allows together with X.
    let results = vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![1.0, 0.0]];
    let rec = reconstruct(&results, 1, SParamMode::Average).unwrap();
    assert!(rec.rho.eigen().0[0] < -0.1);
    let zero = StateVector::from_amplitudes(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let f = fidelity_to_pure(&zero, &rec.rho).unwrap();
    assert!(f.projected);
    assert!((0.0..=1.0).contains(&f.fidelity));
    assert!((f.raw_overlap.unwrap() - 1.0).abs() < 1e-12);
}
