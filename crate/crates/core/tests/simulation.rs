mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use szne_core::circuit::{decompose_to_basis, Circuit, FoldSpec, Gate};
use szne_core::qram::{build_qram, MemorySpec};
use szne_core::sim::{
    evolve_density, exact_distribution, exact_noisy_distribution, run_noiseless, sample_shots,
    sample_shots_with_stats, NoiseModel, OutcomeDistribution,
};

#[test]
fn statevector_examples() {
    let x = Circuit::from_gates(1, "x", [Gate::x(0)]).unwrap();
    let s = run_noiseless(&x).unwrap();
    assert!((s.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);
    assert!(s.amplitudes()[0].norm() < 1e-15);

    let mem = MemorySpec::fixture("table1").unwrap();
    let q = run_noiseless(&build_qram(&mem, false).unwrap()).unwrap();
    assert_eq!(q.num_qubits(), 20);
    assert!((q.norm_sqr() - 1.0).abs() < 1e-9);
}

#[test]
fn marginals_follow_measured_order() {
    let c = Circuit::from_gates(3, "x", [Gate::x(2)]).unwrap();
    let p = exact_distribution(&c, &[2, 0]).unwrap().probabilities();
    assert_eq!(p, vec![0.0, 0.0, 1.0, 0.0]);
    assert!(exact_distribution(&c, &[0, 0]).is_err());
    assert!(exact_distribution(&c, &[3]).is_err());
}

#[test]
fn noiseless_sampling_is_consistent_with_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let c = random_basis_circuit(&mut rng, 3, 30);
    let exact = exact_distribution(&c, &[0, 1, 2]).unwrap().probabilities();
    let shots = 20_000u64;
    let d = sample_shots(&c, &NoiseModel::noiseless(), &[0, 1, 2], shots, 1, 7).unwrap();
    let counts = d.counts().unwrap();
    assert_eq!(counts.iter().sum::<u64>(), shots);
    // Chi-square with 7 degrees of freedom; 24.3 is the 0.001 critical value.
    let chi2: f64 = counts
        .iter()
        .zip(&exact)
        .filter(|(_, p)| **p > 1e-12)
        .map(|(&n, &p)| {
            let e = p * shots as f64;
            (n as f64 - e).powi(2) / e
        })
        .sum();
    assert!(chi2 < 24.3, "chi2 = {chi2}");
    for (n, p) in counts.iter().zip(&exact) {
        if *p < 1e-12 {
            assert_eq!(*n, 0);
        }
    }
}

#[test]
fn readout_flip_rate() {
    let c = Circuit::from_gates(1, "x", [Gate::x(0)]).unwrap();
    let noise = NoiseModel {
        p1: 0.0,
        p2: 0.0,
        readout_flip: 0.1,
        rz_noisy: false,
    };
    let d = sample_shots(&c, &noise, &[0], 100_000, 10, 3).unwrap();
    let p0 = d.probabilities()[0];
    assert!((p0 - 0.1).abs() < 0.01, "{p0}");
}

#[test]
fn injected_errors_scale_with_gate_count() {
    let mut gates = Vec::new();
    for _ in 0..50 {
        gates.push(Gate::sx(0));
        gates.push(Gate::sxdg(0));
    }
    let c = Circuit::from_gates(1, "id", gates).unwrap();
    let noise = NoiseModel {
        p1: 0.01,
        p2: 0.0,
        readout_flip: 0.0,
        rz_noisy: false,
    };
    let (_, stats) = sample_shots_with_stats(&c, &noise, &[0], 10_000, 10_000, 1).unwrap();
    let want = 100.0 * 0.01;
    assert!((stats.mean_injected() - want).abs() < 0.05 * want);
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[test]
fn trajectories_converge_to_channel() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let c = random_basis_circuit(&mut rng, 4, 40);
    let noise = NoiseModel {
        p1: 0.02,
        p2: 0.05,
        readout_flip: 0.03,
        rz_noisy: true,
    };
    let measured = [0, 1, 2, 3];
    let exact = exact_noisy_distribution(&c, &noise, &measured).unwrap().probabilities();
    let sampled = sample_shots(&c, &noise, &measured, 100_000, 1000, 5).unwrap().probabilities();
    let tv = total_variation(&exact, &sampled);
    assert!(tv < 0.01, "tv = {tv}");
}

#[test]
fn density_path_matches_dense_channel_oracle() {
    // One depolarizing step on a Bell pair, checked against the closed form.
    let bell = Circuit::from_gates(2, "bell", [Gate::h(0), Gate::cx(0, 1)]).unwrap();
    let circ = decompose_to_basis(&bell).unwrap();
    let noise = NoiseModel {
        p1: 0.0,
        p2: 0.3,
        readout_flip: 0.0,
        rz_noisy: false,
    };
    let rho = evolve_density(&circ, &noise).unwrap();
    let psi = apply(&dense_unitary(&circ), &zero_state(2));
    let proj = projector(&psi);
    for r in 0..4 {
        for k in 0..4 {
            let mixed = if r == k { 0.25 } else { 0.0 };
            // Uniform non-identity 2-qubit Paulis: ρ → (1 - 16p/15) ρ + (16p/15) I/4.
            let w = 16.0 * 0.3 / 15.0;
            let want = proj[(r, k)] * (1.0 - w) + c(mixed * w, 0.0);
            assert!((rho.entry(r, k) - want).norm() < 1e-12);
        }
    }
    assert!((rho.trace() - 1.0).abs() < 1e-12);
}

#[test]
fn seeds_isolate_streams() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = random_basis_circuit(&mut rng, 3, 20);
    let noise = NoiseModel::default();
    let a = sample_shots(&c, &noise, &[0, 1], 5000, 50, 10).unwrap();
    let b = sample_shots(&c, &noise, &[0, 1], 5000, 50, 10).unwrap();
    let other = sample_shots(&c, &noise, &[0, 1], 5000, 50, 11).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.counts(), other.counts());
}

#[test]
fn folding_amplifies_injected_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let c = random_basis_circuit(&mut rng, 1, 100);
    let c = Circuit::from_gates(1, "no-rz", c.gates().iter().filter(|g| g.kind().name() != "rz").cloned()).unwrap();
    let noise = NoiseModel {
        p1: 0.01,
        p2: 0.0,
        readout_flip: 0.0,
        rz_noisy: false,
    };
    let f = FoldSpec::local(2.1, 3).unwrap().apply(&c).unwrap();
    let (_, stats) = sample_shots_with_stats(&f, &noise, &[0], 10_000, 10_000, 2).unwrap();
    let want = f.len() as f64 * 0.01;
    assert!((stats.mean_injected() - want).abs() < 0.05 * want);
}

#[test]
fn distribution_records_roundtrip() {
    let d = OutcomeDistribution::from_counts(vec![0, 1], &[5, 0, 3, 2]).unwrap();
    let rec = d.to_record(Default::default());
    assert_eq!(OutcomeDistribution::from_record(&rec).unwrap(), d);
    let e = OutcomeDistribution::exact(vec![0], vec![0.25, 0.75]).unwrap();
    let rec = e.to_record(Default::default());
    assert_eq!(OutcomeDistribution::from_record(&rec).unwrap(), e);
    assert!(OutcomeDistribution::exact(vec![0], vec![0.25, 0.7]).is_err());
}

#[test]
fn bad_sampling_arguments() {
    let c = Circuit::from_gates(1, "x", [Gate::x(0)]).unwrap();
    let n = NoiseModel::default();
    assert!(sample_shots(&c, &n, &[0], 0, 1, 0).is_err());
    assert!(sample_shots(&c, &n, &[0], 10, 11, 0).is_err());
    let bad = NoiseModel { p1: 1.5, ..n };
    assert!(sample_shots(&c, &bad, &[0], 10, 1, 0).is_err());
}
