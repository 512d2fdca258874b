//! Zero-noise extrapolation and the selective variants built on it.

mod estimator;
mod fit;
mod select;

pub use estimator::{gaussian_estimator, EstimateSet};
pub use fit::{fit_extrapolation, zero_noise_weights, ExtrapolationKind};
pub use select::{
    filter_select, filter_select_with, filter_value, mitigate, szne_select, unmitigated_report,
    zne_report, FilterOutcome,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::bitstring;
use crate::tomo::{expectation_from_probs, parity_sum, MeasurementSetting};

const NORM_TOL: f64 = 1e-9;

/// The J noise-scaled distributions of one measurement setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingSeries {
    pub setting: String,
    /// Achieved noise-scaling factors, ascending, starting at 1.
    pub lambdas: Vec<f64>,
    /// `distributions[j][x]` at `lambdas[j]`.
    pub distributions: Vec<Vec<f64>>,
}

impl SettingSeries {
    pub fn lambda1(&self) -> &[f64] {
        &self.distributions[0]
    }

    pub fn last(&self) -> &[f64] {
        self.distributions.last().expect("validated non-empty")
    }

    /// Per-outcome λ = 0 values of `kind`, before any normalization.
    pub fn extrapolate(&self, kind: ExtrapolationKind) -> Result<Vec<f64>> {
        let w = zero_noise_weights(&self.lambdas, kind)?;
        let width = self.distributions[0].len();
        Ok((0..width)
            .map(|x| w.iter().zip(&self.distributions).map(|(wj, d)| wj * d[x]).sum())
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseScaledResults {
    num_qubits: usize,
    shots: u64,
    settings: Vec<SettingSeries>,
}

impl NoiseScaledResults {
    pub fn new(num_qubits: usize, shots: u64, settings: Vec<SettingSeries>) -> Result<Self> {
        let r = NoiseScaledResults {
            num_qubits,
            shots,
            settings,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: NoiseScaledResults = serde_json::from_str(text)?;
        r.validate()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.num_qubits;
        if m == 0 || self.settings.is_empty() {
            return Err(Error::InvalidArgument("empty noise-scaled results".into()));
        }
        for s in &self.settings {
            let setting = MeasurementSetting::parse(&s.setting)?;
            if setting.num_qubits() != m {
                return Err(Error::InvalidArgument(format!(
                    "setting {} is not on {m} qubits",
                    s.setting
                )));
            }
            if s.lambdas.len() < 2 || s.lambdas.len() != s.distributions.len() {
                return Err(Error::InvalidArgument(format!(
                    "setting {}: {} lambdas, {} distributions",
                    s.setting,
                    s.lambdas.len(),
                    s.distributions.len()
                )));
            }
            if (s.lambdas[0] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "setting {}: first lambda is {}",
                    s.setting, s.lambdas[0]
                )));
            }
            if s.lambdas.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidArgument(format!(
                    "setting {}: lambdas not strictly ascending",
                    s.setting
                )));
            }
            for d in &s.distributions {
                if d.len() != 1 << m || d.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "setting {}: malformed distribution",
                        s.setting
                    )));
                }
                let sum: f64 = d.iter().sum();
                if (sum - 1.0).abs() > NORM_TOL {
                    return Err(Error::Unnormalized { sum });
                }
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn settings(&self) -> &[SettingSeries] {
        &self.settings
    }

    pub fn setting(&self, g: usize) -> Result<&SettingSeries> {
        self.settings
            .get(g)
            .ok_or_else(|| Error::InvalidArgument(format!("no setting at position {g}")))
    }

    /// The λ₁ distributions, one per setting.
    pub fn unmitigated(&self) -> Vec<Vec<f64>> {
        self.settings.iter().map(|s| s.lambda1().to_vec()).collect()
    }
}

/// Clip negatives to 0 and rescale to unit sum; all-zero mass gives uniform.
pub fn normalize_clipped(values: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    if sum > 0.0 {
        clipped.iter().map(|v| v / sum).collect()
    } else {
        vec![1.0 / values.len() as f64; values.len()]
    }
}

/// Extrapolate the J expectation values ⟨O_g⟩^λ directly.
pub fn zne_expectation(res: &NoiseScaledResults, g: usize, kind: ExtrapolationKind) -> Result<f64> {
    let s = res.setting(g)?;
    let setting = MeasurementSetting::parse(&s.setting)?;
    let ys = s
        .distributions
        .iter()
        .map(|d| expectation_from_probs(d, &setting))
        .collect::<Result<Vec<_>>>()?;
    fit_extrapolation(&s.lambdas, &ys, kind)
}

/// Extrapolate each outcome probability, then take Σ_x a_x P_x.
pub fn probability_route_expectation(
    res: &NoiseScaledResults,
    g: usize,
    kind: ExtrapolationKind,
) -> Result<f64> {
    Ok(parity_sum(&res.setting(g)?.extrapolate(kind)?))
}

/// Mitigation strategy applied per setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    Zne(ExtrapolationKind),
    Szne,
    SznePrime,
    Filter,
    Unmitigated,
}

impl Algorithm {
    pub fn needs_estimator(self) -> bool {
        matches!(self, Algorithm::Szne | Algorithm::SznePrime)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Zne(k) => write!(f, "zne:{k}"),
            Algorithm::Szne => f.write_str("szne"),
            Algorithm::SznePrime => f.write_str("szne_prime"),
            Algorithm::Filter => f.write_str("filter"),
            Algorithm::Unmitigated => f.write_str("unmitigated"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "szne" => Ok(Algorithm::Szne),
            "szne_prime" => Ok(Algorithm::SznePrime),
            "filter" => Ok(Algorithm::Filter),
            "unmitigated" => Ok(Algorithm::Unmitigated),
            _ => match s.strip_prefix("zne:") {
                Some(kind) => Ok(Algorithm::Zne(kind.parse()?)),
                None => Err(Error::InvalidArgument(format!("unknown algorithm `{s}`"))),
            },
        }
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeReport {
    pub outcome: String,
    /// Candidate that produced the value, or the algorithm name.
    pub label: String,
    /// Zero-noise probability before the final per-setting normalization.
    pub pre: f64,
    pub post: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub survivors: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingReport {
    pub setting: String,
    pub index: usize,
    pub lambdas: Vec<f64>,
    pub outcomes: Vec<OutcomeReport>,
    pub expectation_mitigated: f64,
    pub expectation_unmitigated: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorEcho {
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigationReport {
    pub algorithm: Algorithm,
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorEcho>,
    pub settings: Vec<SettingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

impl MitigationReport {
    pub(crate) fn assemble(
        algorithm: Algorithm,
        res: &NoiseScaledResults,
        estimator: Option<EstimatorEcho>,
        rows: Vec<(Vec<f64>, Vec<String>, Option<Vec<Vec<String>>>)>,
    ) -> Self {
        let m = res.num_qubits();
        let settings = res
            .settings()
            .iter()
            .zip(rows)
            .map(|(s, (pre, labels, survivors))| {
                let post = normalize_clipped(&pre);
                let index = MeasurementSetting::parse(&s.setting)
                    .expect("validated setting")
                    .index();
                let outcomes = (0..pre.len())
                    .map(|x| OutcomeReport {
                        outcome: bitstring(x, m),
                        label: labels[x].clone(),
                        pre: pre[x],
                        post: post[x],
                        survivors: survivors.as_ref().map(|sv| sv[x].clone()),
                    })
                    .collect();
                SettingReport {
                    setting: s.setting.clone(),
                    index,
                    lambdas: s.lambdas.clone(),
                    outcomes,
                    expectation_mitigated: parity_sum(&post),
                    expectation_unmitigated: parity_sum(s.lambda1()),
                }
            })
            .collect();
        MitigationReport {
            algorithm,
            shots: res.shots(),
            estimator,
            settings,
            fidelity: None,
        }
    }

    /// Final normalized probabilities, one vector per setting.
    pub fn mitigated_probabilities(&self) -> Vec<Vec<f64>> {
        self.settings
            .iter()
            .map(|s| s.outcomes.iter().map(|o| o.post).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Per-(g, x) labels as CSV.
    pub fn labels_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["setting", "index", "outcome", "label", "pre", "post", "survivors"])?;
        for s in &self.settings {
            for o in &s.outcomes {
                w.write_record([
                    s.setting.clone(),
                    s.index.to_string(),
                    o.outcome.clone(),
                    o.label.clone(),
                    o.pre.to_string(),
                    o.post.to_string(),
                    o.survivors.as_ref().map(|v| v.join(";")).unwrap_or_default(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
