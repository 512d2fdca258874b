use serde::{Deserialize, Serialize};

use super::pipeline::RunPayload;
use crate::error::{Error, Result};

/// Fraction of settings whose mitigated value is strictly closer to the
/// noiseless value than the unmitigated one.
pub fn closer_fraction(ideal: &[f64], unmitigated: &[f64], mitigated: &[f64]) -> f64 {
    if ideal.is_empty() {
        return 0.0;
    }
    closer_count(ideal, unmitigated, mitigated) as f64 / ideal.len() as f64
}

fn closer_count(ideal: &[f64], unmitigated: &[f64], mitigated: &[f64]) -> usize {
    ideal
        .iter()
        .zip(unmitigated)
        .zip(mitigated)
        .filter(|((i, u), m)| (*m - *i).abs() < (*u - *i).abs())
        .count()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub algorithm: String,
    pub fidelity: f64,
    pub fidelity_unmitigated: f64,
    pub closer_count: usize,
    pub settings: usize,
    pub closer_fraction: f64,
    /// Fidelity and majority-of-expectations improvement point different ways.
    pub metrics_disagree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    pub rows: Vec<TableRow>,
    pub any_disagreement: bool,
}

impl TableSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "algorithm",
            "fidelity",
            "fidelity_unmitigated",
            "closer_count",
            "settings",
            "closer_fraction",
            "metrics_disagree",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.algorithm.clone(),
                r.fidelity.to_string(),
                r.fidelity_unmitigated.to_string(),
                r.closer_count.to_string(),
                r.settings.to_string(),
                r.closer_fraction.to_string(),
                r.metrics_disagree.to_string(),
            ])?;
        }
        finish(w)
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn check_same_data(records: &[RunPayload]) -> Result<()> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidArgument("no records".into()))?;
    for r in &records[1..] {
        if r.config.master_seed != first.config.master_seed {
            return Err(Error::Mismatch(format!(
                "master seeds {} and {}",
                first.config.master_seed, r.config.master_seed
            )));
        }
        if r.distributions != first.distributions || r.ideal_expectations != first.ideal_expectations
        {
            return Err(Error::Mismatch("records were run on different data".into()));
        }
    }
    Ok(())
}

/// Fidelity and strictly-closer expectation fraction per algorithm.
pub fn table_report(records: &[RunPayload]) -> Result<TableSummary> {
    check_same_data(records)?;
    let rows: Vec<TableRow> = records
        .iter()
        .map(|r| {
            let unmit: Vec<f64> = r.report.settings.iter().map(|s| s.expectation_unmitigated).collect();
            let mit: Vec<f64> = r.report.settings.iter().map(|s| s.expectation_mitigated).collect();
            let count = closer_count(&r.ideal_expectations, &unmit, &mit);
            let n = r.ideal_expectations.len();
            let fraction = closer_fraction(&r.ideal_expectations, &unmit, &mit);
            let f = r.fidelity_target.fidelity;
            let f0 = r.fidelity_unmitigated.fidelity;
            TableRow {
                algorithm: r.config.algorithm.to_string(),
                fidelity: f,
                fidelity_unmitigated: f0,
                closer_count: count,
                settings: n,
                closer_fraction: fraction,
                metrics_disagree: (f > f0) != (fraction > 0.5),
            }
        })
        .collect();
    let any_disagreement = rows.iter().any(|r| r.metrics_disagree);
    Ok(TableSummary {
        rows,
        any_disagreement,
    })
}

/// Per-setting noiseless, unmitigated and mitigated ⟨O_g⟩ for each record.
pub fn expectations_csv(records: &[RunPayload]) -> Result<String> {
    check_same_data(records)?;
    let first = &records[0];
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["setting".to_string(), "noiseless".into(), "unmitigated".into()];
    header.extend(records.iter().map(|r| r.config.algorithm.to_string()));
    w.write_record(&header)?;
    for (g, s) in first.report.settings.iter().enumerate() {
        let mut row = vec![
            s.setting.clone(),
            first.ideal_expectations[g].to_string(),
            s.expectation_unmitigated.to_string(),
        ];
        row.extend(
            records
                .iter()
                .map(|r| r.report.settings[g].expectation_mitigated.to_string()),
        );
        w.write_record(&row)?;
    }
    finish(w)
}
