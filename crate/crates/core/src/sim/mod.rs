//! Statevector and small density-matrix simulators.

mod density;
mod distribution;
mod noise;
mod state;

pub use density::{evolve_density, exact_noisy_distribution, MixedState, DENSITY_QUBIT_CAP};
pub use distribution::{bitstring, DistributionMeta, DistributionRecord, OutcomeDistribution};
pub use noise::{
    apply_readout_exact, run_trajectory, sample_shots, sample_shots_with_stats, NoiseModel,
    SampleStats,
};
pub use state::{Pauli, StateVector};

use crate::circuit::Circuit;
use crate::error::{Error, Result};

pub const DEFAULT_QUBIT_CAP: usize = 24;

pub(crate) fn check_cap(qubits: usize, cap: usize) -> Result<()> {
    if qubits > cap {
        return Err(Error::QubitCap { qubits, cap });
    }
    Ok(())
}

pub(crate) fn check_measured(c: &Circuit, measured: &[usize]) -> Result<()> {
    if measured.is_empty() {
        return Err(Error::InvalidArgument("no measured qubits".into()));
    }
    for (i, &q) in measured.iter().enumerate() {
        if q >= c.num_qubits() || measured[..i].contains(&q) {
            return Err(Error::InvalidArgument(format!(
                "measured qubit list {measured:?} is invalid for {} qubits",
                c.num_qubits()
            )));
        }
    }
    Ok(())
}

pub fn run_noiseless(c: &Circuit) -> Result<StateVector> {
    run_noiseless_capped(c, DEFAULT_QUBIT_CAP)
}

pub fn run_noiseless_capped(c: &Circuit, cap: usize) -> Result<StateVector> {
    check_cap(c.num_qubits(), cap)?;
    let mut s = StateVector::zero(c.num_qubits());
    for g in c.gates() {
        s.apply(g);
    }
    Ok(s)
}

pub fn exact_distribution(c: &Circuit, measured: &[usize]) -> Result<OutcomeDistribution> {
    check_measured(c, measured)?;
    let probs = run_noiseless(c)?.marginal_probabilities(measured);
    let sum: f64 = probs.iter().sum();
    OutcomeDistribution::exact(measured.to_vec(), probs.iter().map(|p| p / sum).collect())
}
