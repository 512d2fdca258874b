//! Digital zero-noise extrapolation on a simulated noisy backend, with a
//! bucket-brigade QRAM benchmark and Pauli-basis state tomography.

pub mod circuit;
pub mod density;
pub mod error;
pub mod harness;
pub mod mitigate;
pub mod qram;
pub mod seed;
pub mod sim;
pub mod tomo;

pub use circuit::{Circuit, FoldMode, FoldSpec, Gate, GateKind, C64};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, RunPayload, RunRecord};
pub use mitigate::{
    Algorithm, EstimateSet, ExtrapolationKind, MitigationReport, NoiseScaledResults, SettingSeries,
};
pub use qram::{MemorySpec, QramLayout};
pub use sim::{NoiseModel, OutcomeDistribution, StateVector};
pub use tomo::{FidelityReport, MeasurementSetting, Reconstruction, SParamMode};
