use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::pipeline::{collect_raw, reconstruct_report, with_workers, Lab, RawData};
use crate::error::{Error, Result};
use crate::mitigate::{gaussian_estimator, szne_select, unmitigated_report};
use crate::seed::{derive_seed, stream};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub repetitions: usize,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    /// "szne" or "szne_prime".
    pub series: String,
    pub rows: Vec<SweepRow>,
    pub baseline_unmitigated: f64,
    /// Interpolated σ where the mean first drops below the baseline.
    pub crossing: Option<f64>,
    pub noisy_simulations: usize,
}

impl SweepTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Plot-ready rows: one per σ for the sweep and for the baseline.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["series", "sigma", "repetitions", "mean_fidelity", "std", "stderr"])?;
        for r in &self.rows {
            w.write_record([
                self.series.clone(),
                r.sigma.to_string(),
                r.repetitions.to_string(),
                r.mean.to_string(),
                r.std.to_string(),
                r.stderr.to_string(),
            ])?;
        }
        for r in &self.rows {
            w.write_record([
                "unmitigated".to_string(),
                r.sigma.to_string(),
                "1".to_string(),
                self.baseline_unmitigated.to_string(),
                "0".to_string(),
                "0".to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn crossing(rows: &[SweepRow], baseline: f64) -> Option<f64> {
    let i = rows.iter().position(|r| r.mean < baseline)?;
    if i == 0 {
        return Some(rows[0].sigma);
    }
    let (a, b) = (rows[i - 1], rows[i]);
    Some(a.sigma + (a.mean - baseline) * (b.sigma - a.sigma) / (a.mean - b.mean))
}

pub fn sigma_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    let lab = Lab::new();
    let raw = collect_raw(cfg, &lab)?;
    sweep_from_raw(&raw, cfg, lab.noisy_calls())
}

/// σ-sweep over already collected data; only the estimator draws vary.
pub fn sweep_from_raw(
    raw: &RawData,
    cfg: &ExperimentConfig,
    noisy_simulations: usize,
) -> Result<SweepTable> {
    let sweep = &cfg.sigma_sweep;
    if sweep.sigmas.is_empty() {
        return Err(Error::InvalidArgument("empty sigma sweep".into()));
    }
    let include_lambda1 = !sweep.prime;
    let run_once = |sigma: f64, seed: u64| -> Result<f64> {
        let est = gaussian_estimator(&raw.ideal, sigma, seed)?;
        let report = szne_select(&raw.results, &est, include_lambda1)?;
        Ok(reconstruct_report(raw, cfg, &report)?.1.fidelity)
    };
    let rows = with_workers(cfg, || {
        sweep
            .sigmas
            .iter()
            .enumerate()
            .map(|(i, &sigma)| {
                // σ = 0 is deterministic; one evaluation is exact.
                let reps = if sigma == 0.0 { 1 } else { sweep.repetitions };
                let fs = (0..reps)
                    .into_par_iter()
                    .map(|r| {
                        let seed =
                            derive_seed(cfg.master_seed, &[stream::ESTIMATOR, i as u64, r as u64]);
                        run_once(sigma, seed)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (mean, std) = mean_std(&fs);
                Ok(SweepRow {
                    sigma,
                    repetitions: reps,
                    mean,
                    std,
                    stderr: std / (reps as f64).sqrt(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let baseline = reconstruct_report(raw, cfg, &unmitigated_report(&raw.results)?)?
        .1
        .fidelity;
    Ok(SweepTable {
        series: if include_lambda1 { "szne" } else { "szne_prime" }.into(),
        crossing: crossing(&rows, baseline),
        rows,
        baseline_unmitigated: baseline,
        noisy_simulations,
    })
}
