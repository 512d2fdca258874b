use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::FoldMode;
use crate::error::{Error, Result};
use crate::mitigate::Algorithm;
use crate::qram::MemorySpec;
use crate::sim::NoiseModel;
use crate::tomo::SParamMode;

pub const DEFAULT_LAMBDAS: [f64; 5] = [1.0, 1.4, 1.7, 2.1, 2.5];
pub const DEFAULT_SIGMAS: [f64; 5] = [0.0, 0.01, 0.02, 0.05, 0.1];

/// Memory contents: a built-in fixture name or explicit
/// `[re α, im α, re β, im β]` rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MemorySource {
    Fixture(String),
    Rows(Vec<[f64; 4]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QramConfig {
    pub memory: MemorySource,
    /// Rescale explicit rows to unit norm instead of rejecting them.
    pub normalize: bool,
    /// Reverse the routing after the transfer so the tree disentangles.
    pub uncompute: bool,
}

impl Default for QramConfig {
    fn default() -> Self {
        QramConfig {
            memory: MemorySource::Fixture("classical2".into()),
            normalize: false,
            uncompute: true,
        }
    }
}

impl QramConfig {
    pub fn memory_spec(&self) -> Result<MemorySpec> {
        match &self.memory {
            MemorySource::Fixture(name) => MemorySpec::fixture(name),
            MemorySource::Rows(rows) if self.normalize => MemorySpec::from_rows_normalized(rows),
            MemorySource::Rows(rows) => MemorySpec::from_rows(rows),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub sigmas: Vec<f64>,
    pub repetitions: usize,
    /// Run sZNE′ (no λ₁ candidate) instead of sZNE.
    pub prime: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sigmas: DEFAULT_SIGMAS.to_vec(),
            repetitions: 100,
            prime: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub qram: QramConfig,
    /// Requested noise-scaling factors; the first must be 1.
    pub lambdas: Vec<f64>,
    pub fold_mode: FoldMode,
    /// Fold the tomography basis change together with the circuit.
    pub fold_basis_change: bool,
    pub noise: NoiseModel,
    /// Shots per (setting, λ); 0 selects exact distributions.
    pub shots: u64,
    pub trajectories: u64,
    pub algorithm: Algorithm,
    /// Estimator standard deviation for sZNE runs.
    pub sigma: f64,
    pub sigma_sweep: SweepConfig,
    pub s_param_mode: SParamMode,
    pub master_seed: u64,
    /// Thread bound; 0 uses the rayon default.
    pub workers: usize,
    /// Refuse runs whose estimated amplitude updates exceed this.
    pub budget: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            qram: QramConfig::default(),
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            fold_mode: FoldMode::Local,
            fold_basis_change: true,
            noise: NoiseModel::default(),
            shots: 10_000,
            trajectories: 100,
            algorithm: Algorithm::Szne,
            sigma: 0.0,
            sigma_sweep: SweepConfig::default(),
            s_param_mode: SParamMode::Average,
            master_seed: 1234,
            workers: 0,
            budget: 2e11,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("plain data serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.lambdas;
        if l.len() < 2 || l[0] != 1.0 || l.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(format!(
                "lambdas must start at 1 and ascend strictly, got {l:?}"
            )));
        }
        self.noise.validate()?;
        if self.shots > 0 && !(1..=self.shots).contains(&self.trajectories) {
            return Err(Error::InvalidArgument(format!(
                "trajectories must lie in 1..={}",
                self.shots
            )));
        }
        let sigmas_ok = self.sigma_sweep.sigmas.iter().all(|s| *s >= 0.0 && s.is_finite());
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) || !sigmas_ok {
            return Err(Error::InvalidArgument("sigma values must be >= 0".into()));
        }
        if self.sigma_sweep.repetitions == 0 {
            return Err(Error::InvalidArgument("sweep repetitions must be positive".into()));
        }
        if !(self.budget > 0.0) {
            return Err(Error::InvalidArgument("budget must be positive".into()));
        }
        self.qram.memory_spec()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"shots": 0, "algorithm": "zne:poly2"}"#).unwrap();
        assert_eq!(cfg.shots, 0);
        assert_eq!(cfg.algorithm.to_string(), "zne:poly2");
        assert_eq!(cfg.lambdas, DEFAULT_LAMBDAS);
        let rows = r#"{"qram": {"memory": [[1,0,0,0],[0,0,1,0]]}}"#;
        assert!(ExperimentConfig::from_json(rows).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::from_json(r#"{"lambdas": [1.4, 2.0]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"qram": {"memory": "nope"}}"#).is_err());
    }
}
