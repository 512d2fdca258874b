//! Stochastic Pauli-trajectory noise.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::{Pauli, StateVector};
use super::{check_cap, DEFAULT_QUBIT_CAP};
use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::seed::{rng_for, stream};
use crate::sim::OutcomeDistribution;

/// Symmetric depolarizing noise after each gate plus classical readout flips.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    pub p1: f64,
    /// Depolarizing probability after each multi-qubit gate.
    pub p2: f64,
    /// Independent bit-flip probability per measured bit.
    pub readout_flip: f64,
    /// Whether RZ draws noise (false = virtual Z).
    pub rz_noisy: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            p1: 0.001,
            p2: 0.01,
            readout_flip: 0.02,
            rz_noisy: false,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            p1: 0.0,
            p2: 0.0,
            readout_flip: 0.0,
            rz_noisy: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("readout_flip", self.readout_flip)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.readout_flip == 0.0
    }

    /// Probability that a Pauli error follows `gate`.
    pub fn gate_error(&self, gate: &Gate) -> f64 {
        match gate.kind() {
            GateKind::Rz(_) if !self.rz_noisy => 0.0,
            k if k.arity() == 1 => self.p1,
            _ => self.p2,
        }
    }
}

/// Uniformly random non-identity Pauli string on `k` qubits.
pub(crate) fn random_pauli_string(rng: &mut ChaCha8Rng, k: usize) -> Vec<Pauli> {
    let code = rng.random_range(1..(1usize << (2 * k)));
    (0..k)
        .map(|j| Pauli::from_index(code >> (2 * (k - 1 - j))))
        .collect()
}

/// One noisy run of `c` from |0…0⟩; returns the final state and the number
/// of injected Pauli errors.
pub fn run_trajectory(c: &Circuit, noise: &NoiseModel, rng: &mut ChaCha8Rng) -> (StateVector, u64) {
    let mut state = StateVector::zero(c.num_qubits());
    let mut injected = 0;
    for g in c.gates() {
        state.apply(g);
        let p = noise.gate_error(g);
        if p > 0.0 && rng.random::<f64>() < p {
            injected += 1;
            let paulis = random_pauli_string(rng, g.targets().len());
            for (&q, &pauli) in g.targets().iter().zip(&paulis) {
                state.apply_pauli(q, pauli);
            }
        }
    }
    (state, injected)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SampleStats {
    pub trajectories: u64,
    pub injected_paulis: u64,
}

impl SampleStats {
    pub fn mean_injected(&self) -> f64 {
        self.injected_paulis as f64 / self.trajectories as f64
    }
}

fn sample_index(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Finite-shot sampling under `noise` with `trajectories` independent noise
/// realizations. Shots are split evenly; the last trajectory takes any
/// remainder. Deterministic in `(seed, trajectories, shots)`.
pub fn sample_shots(
    c: &Circuit,
    noise: &NoiseModel,
    measured: &[usize],
    shots: u64,
    trajectories: u64,
    seed: u64,
) -> Result<OutcomeDistribution> {
    sample_shots_with_stats(c, noise, measured, shots, trajectories, seed).map(|(d, _)| d)
}

pub fn sample_shots_with_stats(
    c: &Circuit,
    noise: &NoiseModel,
    measured: &[usize],
    shots: u64,
    trajectories: u64,
    seed: u64,
) -> Result<(OutcomeDistribution, SampleStats)> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    if trajectories == 0 || trajectories > shots {
        return Err(Error::InvalidArgument(format!(
            "trajectories must lie in 1..={shots}, got {trajectories}"
        )));
    }
    noise.validate()?;
    check_cap(c.num_qubits(), DEFAULT_QUBIT_CAP)?;
    super::check_measured(c, measured)?;

    let m = measured.len();
    let per = shots / trajectories;
    let runs: Vec<(Vec<u64>, u64)> = (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, &[stream::TRAJECTORY, i]);
            let (state, injected) = run_trajectory(c, noise, &mut rng);
            let probs = state.marginal_probabilities(measured);
            let mut cdf = Vec::with_capacity(probs.len());
            let mut acc = 0.0;
            for p in &probs {
                acc += p;
                cdf.push(acc);
            }
            let n_shots = if i + 1 == trajectories {
                shots - per * (trajectories - 1)
            } else {
                per
            };
            let mut counts = vec![0u64; 1 << m];
            for _ in 0..n_shots {
                let mut x = sample_index(&cdf, rng.random::<f64>() * acc);
                if noise.readout_flip > 0.0 {
                    for bit in 0..m {
                        if rng.random::<f64>() < noise.readout_flip {
                            x ^= 1 << bit;
                        }
                    }
                }
                counts[x] += 1;
            }
            (counts, injected)
        })
        .collect();

    let mut counts = vec![0u64; 1 << m];
    let mut stats = SampleStats {
        trajectories,
        injected_paulis: 0,
    };
    for (run, injected) in runs {
        for (total, c) in counts.iter_mut().zip(run) {
            *total += c;
        }
        stats.injected_paulis += injected;
    }
    Ok((OutcomeDistribution::from_counts(measured.to_vec(), &counts)?, stats))
}

/// Exact classical bit-flip channel on a probability vector over `m` bits.
pub fn apply_readout_exact(probs: &mut [f64], flip: f64) {
    if flip == 0.0 {
        return;
    }
    let m = probs.len().trailing_zeros();
    for bit in 0..m {
        let mask = 1usize << bit;
        for x in 0..probs.len() {
            if x & mask == 0 {
                let (a, b) = (probs[x], probs[x | mask]);
                probs[x] = (1.0 - flip) * a + flip * b;
                probs[x | mask] = flip * a + (1.0 - flip) * b;
            }
        }
    }
}
