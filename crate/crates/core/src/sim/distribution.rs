use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome statistics over the measured qubits, indexed by bitstring with
/// the first measured qubit as the most significant bit.
///
/// `total_shots == 0` means the weights are exact probabilities; otherwise
/// they are counts summing to `total_shots`.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    measured: Vec<usize>,
    total_shots: u64,
    weights: Vec<f64>,
}

pub fn bitstring(x: usize, width: usize) -> String {
    format!("{x:0width$b}")
}

impl OutcomeDistribution {
    pub fn exact(measured: Vec<usize>, probabilities: Vec<f64>) -> Result<Self> {
        check_len(&measured, probabilities.len())?;
        let sum: f64 = probabilities.iter().sum();
        if probabilities.iter().any(|p| *p < -1e-12) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Unnormalized { sum });
        }
        Ok(OutcomeDistribution {
            measured,
            total_shots: 0,
            weights: probabilities,
        })
    }

    pub fn from_counts(measured: Vec<usize>, counts: &[u64]) -> Result<Self> {
        check_len(&measured, counts.len())?;
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidArgument("count distribution has no shots".into()));
        }
        Ok(OutcomeDistribution {
            measured,
            total_shots: total,
            weights: counts.iter().map(|&c| c as f64).collect(),
        })
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn is_exact(&self) -> bool {
        self.total_shots == 0
    }

    pub fn num_outcomes(&self) -> usize {
        self.weights.len()
    }

    /// Counts for sampled distributions, `None` for exact ones.
    pub fn counts(&self) -> Option<Vec<u64>> {
        (!self.is_exact()).then(|| self.weights.iter().map(|&w| w as u64).collect())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        if self.is_exact() {
            self.weights.clone()
        } else {
            let t = self.total_shots as f64;
            self.weights.iter().map(|w| w / t).collect()
        }
    }

    pub fn to_record(&self, meta: DistributionMeta) -> DistributionRecord {
        let m = self.measured.len();
        let mut counts = None;
        let mut probabilities = None;
        if let Some(c) = self.counts() {
            counts = Some(
                c.into_iter()
                    .enumerate()
                    .map(|(x, v)| (bitstring(x, m), v))
                    .collect(),
            );
        } else {
            probabilities = Some(
                self.weights
                    .iter()
                    .enumerate()
                    .map(|(x, &p)| (bitstring(x, m), p))
                    .collect(),
            );
        }
        DistributionRecord {
            setting: meta.setting,
            lambda: meta.lambda,
            seed: meta.seed,
            shots: self.total_shots,
            measured_qubits: self.measured.clone(),
            counts,
            probabilities,
        }
    }

    pub fn from_record(rec: &DistributionRecord) -> Result<Self> {
        let m = rec.measured_qubits.len();
        let dense = |map: &BTreeMap<String, f64>| -> Result<Vec<f64>> {
            let mut v = vec![0.0; 1 << m];
            for (k, &val) in map {
                let x = usize::from_str_radix(k, 2)
                    .ok()
                    .filter(|_| k.len() == m)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad bitstring `{k}`")))?;
                v[x] = val;
            }
            Ok(v)
        };
        match (&rec.counts, &rec.probabilities) {
            (Some(c), None) => {
                let as_f: BTreeMap<String, f64> =
                    c.iter().map(|(k, &v)| (k.clone(), v as f64)).collect();
                let v = dense(&as_f)?;
                let counts: Vec<u64> = v.iter().map(|&x| x as u64).collect();
                Self::from_counts(rec.measured_qubits.clone(), &counts)
            }
            (None, Some(p)) => Self::exact(rec.measured_qubits.clone(), dense(p)?),
            _ => Err(Error::InvalidArgument(
                "record needs exactly one of `counts` or `probabilities`".into(),
            )),
        }
    }
}

fn check_len(measured: &[usize], len: usize) -> Result<()> {
    if measured.is_empty() || len != 1 << measured.len() {
        return Err(Error::InvalidArgument(format!(
            "{} outcomes for {} measured qubits",
            len,
            measured.len()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistributionMeta {
    pub setting: Option<String>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
}

/// Serialized distribution: bitstring map plus provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub shots: u64,
    pub measured_qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<BTreeMap<String, f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_record_round_trip() {
        let d = OutcomeDistribution::from_counts(vec![0, 2], &[5, 0, 3, 2]).unwrap();
        let rec = d.to_record(DistributionMeta {
            setting: Some("XZ".into()),
            lambda: Some(1.4),
            seed: Some(9),
        });
        assert_eq!(rec.counts.as_ref().unwrap()["10"], 3);
        assert_eq!(OutcomeDistribution::from_record(&rec).unwrap(), d);
        assert_eq!(d.probabilities(), vec![0.5, 0.0, 0.3, 0.2]);
    }

    #[test]
    fn exact_must_sum_to_one() {
        assert!(OutcomeDistribution::exact(vec![0], vec![0.5, 0.4]).is_err());
        assert!(OutcomeDistribution::exact(vec![0], vec![0.5, 0.5, 0.0]).is_err());
    }
}
