use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::circuit::{decompose_to_basis, Circuit, FoldSpec};
use crate::density::{DensityDoc, DensityMatrix};
use crate::error::{Error, Result};
use crate::mitigate::{
    gaussian_estimator, mitigate, unmitigated_report, Algorithm, MitigationReport,
    NoiseScaledResults, SettingSeries,
};
use crate::qram::{build_qram, ideal_output, ideal_reduced_state, MemorySpec, QramLayout};
use crate::seed::{derive_seed, stream};
use crate::sim::{
    exact_distribution, exact_noisy_distribution, sample_shots, DistributionMeta,
    DistributionRecord, OutcomeDistribution, StateVector,
};
use crate::tomo::{
    all_settings, basis_change_gates, fidelity, fidelity_to_pure, parity_sum, reconstruct,
    FidelityReport, MeasurementSetting,
};

/// Simulation front end with call counters.
#[derive(Debug, Default)]
pub struct Lab {
    noisy_calls: AtomicUsize,
    ideal_calls: AtomicUsize,
}

impl Lab {
    pub fn new() -> Self {
        Self::default()
    }

    /// Noisy (setting, λ) simulations performed so far.
    pub fn noisy_calls(&self) -> usize {
        self.noisy_calls.load(Ordering::Relaxed)
    }

    /// Noiseless reference simulations performed so far.
    pub fn ideal_calls(&self) -> usize {
        self.ideal_calls.load(Ordering::Relaxed)
    }

    fn noisy(
        &self,
        c: &Circuit,
        measured: &[usize],
        cfg: &ExperimentConfig,
        seed: u64,
    ) -> Result<OutcomeDistribution> {
        self.noisy_calls.fetch_add(1, Ordering::Relaxed);
        if cfg.shots > 0 {
            sample_shots(c, &cfg.noise, measured, cfg.shots, cfg.trajectories, seed)
        } else if cfg.noise.is_noiseless() {
            exact_distribution(c, measured)
        } else {
            exact_noisy_distribution(c, &cfg.noise, measured)
        }
    }

    fn ideal(&self, c: &Circuit, measured: &[usize]) -> Result<OutcomeDistribution> {
        self.ideal_calls.fetch_add(1, Ordering::Relaxed);
        exact_distribution(c, measured)
    }
}

/// Tomography circuits of one setting at every noise level.
#[derive(Clone, Debug)]
pub struct PreparedSetting {
    pub setting: MeasurementSetting,
    pub unfolded: Circuit,
    pub circuits: Vec<Circuit>,
    pub lambdas: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub memory: MemorySpec,
    pub layout: QramLayout,
    pub base: Circuit,
    pub settings: Vec<PreparedSetting>,
}

impl Problem {
    pub fn tomography_qubits(&self) -> Vec<usize> {
        self.layout.tomography_qubits()
    }
}

fn fold(c: &Circuit, cfg: &ExperimentConfig, lambda: f64, seed: u64) -> Result<Circuit> {
    FoldSpec::new(lambda, cfg.fold_mode, seed)?.apply(c)
}

/// Build the QRAM, its tomography circuits and every noise-scaled variant.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Problem> {
    cfg.validate()?;
    let memory = cfg.qram.memory_spec()?;
    let layout = QramLayout::new(memory.address_bits(), cfg.qram.uncompute);
    let base = build_qram(&memory, cfg.qram.uncompute)?;
    let decomposed = decompose_to_basis(&base)?;
    let qubits = layout.tomography_qubits();

    let settings = all_settings(qubits.len())
        .into_iter()
        .enumerate()
        .map(|(g, setting)| {
            let bc = basis_change_gates(&setting, &qubits);
            let mut unfolded = decomposed.clone();
            unfolded.extend(bc.iter().cloned())?;
            unfolded.set_label(format!("{} | tomo {}", base.label(), setting.label()));
            let mut circuits = vec![unfolded.clone()];
            let mut lambdas = vec![1.0];
            for (j, &lambda) in cfg.lambdas.iter().enumerate().skip(1) {
                let seed = derive_seed(cfg.master_seed, &[stream::FOLD, g as u64, j as u64]);
                let folded = if cfg.fold_basis_change {
                    fold(&unfolded, cfg, lambda, seed)?
                } else {
                    let mut f = fold(&decomposed, cfg, lambda, seed)?;
                    f.extend(bc.iter().cloned())?;
                    f
                };
                lambdas.push(folded.len() as f64 / unfolded.len() as f64);
                circuits.push(folded);
            }
            Ok(PreparedSetting {
                setting,
                unfolded,
                circuits,
                lambdas,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Problem {
        memory,
        layout,
        base,
        settings,
    })
}

/// Projected amplitude updates for the noisy simulations of `problem`.
pub fn estimate_cost(problem: &Problem, cfg: &ExperimentConfig) -> f64 {
    let n = problem.layout.num_qubits() as i32;
    let gates: f64 = problem
        .settings
        .iter()
        .flat_map(|s| s.circuits.iter().map(|c| c.len() as f64))
        .sum();
    if cfg.shots > 0 {
        gates * cfg.trajectories as f64 * 2f64.powi(n)
    } else if cfg.noise.is_noiseless() {
        gates * 2f64.powi(n)
    } else {
        // Each depolarizing step touches up to 16 copies of the 4^n vector.
        gates * 16.0 * 4f64.powi(n)
    }
}

pub(crate) fn with_workers<T: Send>(
    cfg: &ExperimentConfig,
    f: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    if cfg.workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?
        .install(f)
}

/// Noisy distributions for every (setting, λ) plus the noiseless references.
#[derive(Clone, Debug)]
pub struct RawData {
    pub problem: Problem,
    pub results: NoiseScaledResults,
    /// Noiseless P_sim per setting.
    pub ideal: Vec<Vec<f64>>,
    pub records: Vec<DistributionRecord>,
}

impl RawData {
    pub fn ideal_expectations(&self) -> Vec<f64> {
        self.ideal.iter().map(|p| parity_sum(p)).collect()
    }

    pub fn target(&self) -> StateVector {
        ideal_output(&self.problem.memory)
    }

    pub fn oracle(&self) -> Result<DensityMatrix> {
        ideal_reduced_state(&self.problem.memory, self.problem.layout.uncompute)
    }
}

pub fn collect_raw(cfg: &ExperimentConfig, lab: &Lab) -> Result<RawData> {
    let problem = prepare(cfg)?;
    let estimate = estimate_cost(&problem, cfg);
    if estimate > cfg.budget {
        return Err(Error::Resource {
            estimate,
            budget: cfg.budget,
        });
    }
    let qubits = problem.tomography_qubits();
    let units: Vec<(usize, usize)> = problem
        .settings
        .iter()
        .enumerate()
        .flat_map(|(g, s)| (0..s.circuits.len()).map(move |j| (g, j)))
        .collect();

    let (dists, ideal) = with_workers(cfg, || {
        let dists = units
            .par_iter()
            .map(|&(g, j)| {
                let seed = derive_seed(cfg.master_seed, &[stream::SHOTS, g as u64, j as u64]);
                lab.noisy(&problem.settings[g].circuits[j], &qubits, cfg, seed)
                    .map(|d| (d, seed))
            })
            .collect::<Result<Vec<_>>>()?;
        let ideal = problem
            .settings
            .par_iter()
            .map(|s| lab.ideal(&s.unfolded, &qubits).map(|d| d.probabilities()))
            .collect::<Result<Vec<_>>>()?;
        Ok((dists, ideal))
    })?;

    let mut records = Vec::with_capacity(units.len());
    let mut series: Vec<SettingSeries> = problem
        .settings
        .iter()
        .map(|s| SettingSeries {
            setting: s.setting.label(),
            lambdas: s.lambdas.clone(),
            distributions: Vec::with_capacity(s.lambdas.len()),
        })
        .collect();
    for (&(g, j), (dist, seed)) in units.iter().zip(dists) {
        series[g].distributions.push(dist.probabilities());
        records.push(dist.to_record(DistributionMeta {
            setting: Some(series[g].setting.clone()),
            lambda: Some(series[g].lambdas[j]),
            seed: Some(seed),
        }));
    }
    let results = NoiseScaledResults::new(qubits.len(), cfg.shots, series)?;
    Ok(RawData {
        problem,
        results,
        ideal,
        records,
    })
}

/// Mitigated reconstruction and its fidelities.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub report: MitigationReport,
    pub rho_prime: DensityMatrix,
    pub fidelity_target: FidelityReport,
    pub fidelity_oracle: FidelityReport,
}

pub(crate) fn reconstruct_report(
    raw: &RawData,
    cfg: &ExperimentConfig,
    report: &MitigationReport,
) -> Result<(DensityMatrix, FidelityReport)> {
    let rec = reconstruct(
        &report.mitigated_probabilities(),
        raw.results.num_qubits(),
        cfg.s_param_mode,
    )?;
    let f = fidelity_to_pure(&raw.target(), &rec.rho)?;
    Ok((rec.rho, f))
}

/// Apply `algorithm` to already collected data.
pub fn analyze(
    raw: &RawData,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    sigma: f64,
    estimator_seed: u64,
) -> Result<Analysis> {
    let est = if algorithm.needs_estimator() {
        Some(gaussian_estimator(&raw.ideal, sigma, estimator_seed)?)
    } else {
        None
    };
    let mut report = mitigate(&raw.results, algorithm, est.as_ref())?;
    let (rho_prime, fidelity_target) = reconstruct_report(raw, cfg, &report)?;
    let fidelity_oracle = fidelity(&raw.oracle()?, &rho_prime)?;
    report.fidelity = Some(fidelity_target.fidelity);
    Ok(Analysis {
        report,
        rho_prime,
        fidelity_target,
        fidelity_oracle,
    })
}

/// Deterministic part of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunPayload {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub num_qubits: usize,
    pub tomography_qubits: Vec<usize>,
    pub noisy_simulations: usize,
    pub distributions: Vec<DistributionRecord>,
    pub ideal_expectations: Vec<f64>,
    pub report: MitigationReport,
    pub rho_prime: DensityDoc,
    pub fidelity_target: FidelityReport,
    pub fidelity_oracle: FidelityReport,
    pub fidelity_unmitigated: FidelityReport,
}

impl RunPayload {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub wall_clock_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub payload: RunPayload,
    pub timing: Timing,
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<RunRecord> {
    run_pipeline_with(cfg, &Lab::new())
}

pub fn run_pipeline_with(cfg: &ExperimentConfig, lab: &Lab) -> Result<RunRecord> {
    let started_unix_ms = unix_ms();
    let clock = Instant::now();
    let raw = collect_raw(cfg, lab)?;
    let payload = payload_from_raw(&raw, cfg, cfg.algorithm, lab.noisy_calls())?;
    Ok(RunRecord {
        payload,
        timing: Timing {
            started_unix_ms,
            finished_unix_ms: unix_ms(),
            wall_clock_s: clock.elapsed().as_secs_f64(),
        },
    })
}

/// Payload for `algorithm` on shared raw data, so several algorithms can be
/// compared on identical distributions.
pub fn payload_from_raw(
    raw: &RawData,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    noisy_simulations: usize,
) -> Result<RunPayload> {
    let mut cfg = cfg.clone();
    cfg.algorithm = algorithm;
    let seed = derive_seed(cfg.master_seed, &[stream::ESTIMATOR]);
    let a = analyze(raw, &cfg, algorithm, cfg.sigma, seed)?;
    let (_, fidelity_unmitigated) =
        reconstruct_report(raw, &cfg, &unmitigated_report(&raw.results)?)?;
    Ok(RunPayload {
        config_hash: cfg.hash(),
        num_qubits: raw.problem.layout.num_qubits(),
        tomography_qubits: raw.problem.tomography_qubits(),
        noisy_simulations,
        distributions: raw.records.clone(),
        ideal_expectations: raw.ideal_expectations(),
        report: a.report,
        rho_prime: a.rho_prime.to_doc(),
        fidelity_target: a.fidelity_target,
        fidelity_oracle: a.fidelity_oracle,
        fidelity_unmitigated,
        config: cfg,
    })
}
