//! Channel-exact density-matrix simulation for small registers.
//!
//! ρ is stored vectorized as a 2n-qubit amplitude array: row qubit `q` sits
//! at position `q`, column qubit `q` at position `n + q`. A unitary acts as
//! `U` on the row half and `conj(U)` on the column half.

use super::noise::{apply_readout_exact, NoiseModel};
use super::state::{apply_gate_raw, apply_pauli_raw, marginal, Pauli};
use super::{check_measured, OutcomeDistribution};
use crate::circuit::{Circuit, Gate, C64};
use crate::error::{Error, Result};

/// Largest register the density path accepts.
pub const DENSITY_QUBIT_CAP: usize = 6;

#[derive(Clone, Debug)]
pub struct MixedState {
    num_qubits: usize,
    vec: Vec<C64>,
}

impl MixedState {
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits > DENSITY_QUBIT_CAP {
            return Err(Error::QubitCap {
                qubits: num_qubits,
                cap: DENSITY_QUBIT_CAP,
            });
        }
        let mut vec = vec![C64::new(0.0, 0.0); 1 << (2 * num_qubits)];
        vec[0] = C64::new(1.0, 0.0);
        Ok(MixedState { num_qubits, vec })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Entry ρ[row, col].
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.vec[(row << self.num_qubits) | col]
    }

    pub fn trace(&self) -> f64 {
        (0..1usize << self.num_qubits).map(|i| self.entry(i, i).re).sum()
    }

    fn apply_unitary(&mut self, gate: &Gate) {
        let n = self.num_qubits;
        apply_gate_raw(&mut self.vec, 2 * n, gate, false);
        apply_gate_raw(&mut self.vec, 2 * n, &shifted(gate, n), true);
    }

    fn conjugate_by_paulis(vec: &mut [C64], n: usize, targets: &[usize], paulis: &[Pauli]) {
        for (&q, &p) in targets.iter().zip(paulis) {
            apply_pauli_raw(vec, 2 * n, q, p, false);
            apply_pauli_raw(vec, 2 * n, q + n, p, true);
        }
    }

    /// ρ → (1-p)ρ + p/(4^k - 1) Σ_{P≠I} PρP† on the given targets.
    pub fn depolarize(&mut self, targets: &[usize], p: f64) {
        if p == 0.0 {
            return;
        }
        let n = self.num_qubits;
        let k = targets.len();
        let terms = (1usize << (2 * k)) - 1;
        let mut acc: Vec<C64> = self.vec.iter().map(|z| z * (1.0 - p)).collect();
        let w = p / terms as f64;
        for code in 1..=terms {
            let paulis: Vec<Pauli> = (0..k)
                .map(|j| Pauli::from_index(code >> (2 * (k - 1 - j))))
                .collect();
            let mut term = self.vec.clone();
            Self::conjugate_by_paulis(&mut term, n, targets, &paulis);
            for (a, t) in acc.iter_mut().zip(term) {
                *a += t * w;
            }
        }
        self.vec = acc;
    }

    pub fn marginal_probabilities(&self, measured: &[usize]) -> Vec<f64> {
        let n = self.num_qubits;
        marginal(|i| self.entry(i, i).re, 1 << n, n, measured)
    }
}

fn shifted(gate: &Gate, offset: usize) -> Gate {
    let targets = gate.targets().iter().map(|q| q + offset).collect();
    Gate::new(*gate.kind(), targets).expect("shifted targets stay distinct")
}

/// Exact output state of `c` under the depolarizing channels of `noise`.
pub fn evolve_density(c: &Circuit, noise: &NoiseModel) -> Result<MixedState> {
    noise.validate()?;
    let mut rho = MixedState::zero(c.num_qubits())?;
    for g in c.gates() {
        rho.apply_unitary(g);
        rho.depolarize(g.targets(), noise.gate_error(g));
    }
    Ok(rho)
}

/// Infinite-shot noisy distribution, including exact readout error.
pub fn exact_noisy_distribution(
    c: &Circuit,
    noise: &NoiseModel,
    measured: &[usize],
) -> Result<OutcomeDistribution> {
    check_measured(c, measured)?;
    let rho = evolve_density(c, noise)?;
    let mut probs = rho.marginal_probabilities(measured);
    apply_readout_exact(&mut probs, noise.readout_flip);
    let sum: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= sum);
    OutcomeDistribution::exact(measured.to_vec(), probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::run_noiseless;

    #[test]
    fn noiseless_matches_statevector() {
        let c = Circuit::from_gates(
            3,
            "mix",
            [
                Gate::h(0),
                Gate::rz(0, 0.4),
                Gate::cx(0, 1),
                Gate::sx(2),
                Gate::ccx(0, 2, 1),
                Gate::sdg(1),
            ],
        )
        .unwrap();
        let psi = run_noiseless(&c).unwrap();
        let rho = evolve_density(&c, &NoiseModel::noiseless()).unwrap();
        let a = psi.amplitudes();
        for i in 0..8 {
            for j in 0..8 {
                assert!((rho.entry(i, j) - a[i] * a[j].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn full_depolarizing_is_maximally_mixed() {
        let mut rho = MixedState::zero(1).unwrap();
        rho.depolarize(&[0], 0.75);
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_enforced() {
        assert!(MixedState::zero(7).is_err());
    }
}
