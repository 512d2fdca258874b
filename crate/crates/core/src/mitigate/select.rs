use rayon::prelude::*;

use super::{
    normalize_clipped, Algorithm, EstimateSet, EstimatorEcho, ExtrapolationKind,
    MitigationReport, NoiseScaledResults, SettingSeries,
};
use crate::error::{Error, Result};

const LAMBDA1: &str = "lambda1";

type Row = (Vec<f64>, Vec<String>, Option<Vec<Vec<String>>>);

/// Candidate extrapolations in fixed order; kinds whose polynomial order
/// needs more than the available λ points are left out.
fn per_kind(
    series: &SettingSeries,
    normalize: bool,
) -> Result<Vec<(ExtrapolationKind, Vec<f64>)>> {
    let j = series.lambdas.len();
    ExtrapolationKind::ALL
        .iter()
        .filter(|k| k.order(j) < j)
        .map(|&k| {
            let v = series.extrapolate(k)?;
            Ok((k, if normalize { normalize_clipped(&v) } else { v }))
        })
        .collect()
}

fn rows<F>(res: &NoiseScaledResults, f: F) -> Result<Vec<Row>>
where
    F: Fn(usize, &SettingSeries) -> Result<Row> + Sync,
{
    res.settings()
        .par_iter()
        .enumerate()
        .map(|(g, s)| f(g, s))
        .collect()
}

/// The λ₁ distributions passed through unchanged.
pub fn unmitigated_report(res: &NoiseScaledResults) -> Result<MitigationReport> {
    let rows = rows(res, |_, s| {
        Ok((s.lambda1().to_vec(), vec![LAMBDA1.to_string(); s.lambda1().len()], None))
    })?;
    Ok(MitigationReport::assemble(Algorithm::Unmitigated, res, None, rows))
}

/// Standard ZNE with a single extrapolation kind for every outcome.
pub fn zne_report(res: &NoiseScaledResults, kind: ExtrapolationKind) -> Result<MitigationReport> {
    let rows = rows(res, |_, s| {
        let v = s.extrapolate(kind)?;
        let n = v.len();
        Ok((v, vec![kind.name().to_string(); n], None))
    })?;
    Ok(MitigationReport::assemble(Algorithm::Zne(kind), res, None, rows))
}

/// Per outcome, choose the candidate closest to the estimate; earlier
/// candidates win ties (λ₁ first, then linear, poly2, poly3, richardson).
pub fn szne_select(
    res: &NoiseScaledResults,
    est: &EstimateSet,
    include_lambda1: bool,
) -> Result<MitigationReport> {
    let width = 1usize << res.num_qubits();
    if est.values.len() != res.settings().len() || est.values.iter().any(|v| v.len() != width) {
        return Err(Error::InvalidArgument(
            "estimate set does not cover every (setting, outcome)".into(),
        ));
    }
    let rows = rows(res, |g, s| {
        let kinds = per_kind(s, true)?;
        let mut candidates: Vec<(&str, &[f64])> = Vec::with_capacity(5);
        if include_lambda1 {
            candidates.push((LAMBDA1, s.lambda1()));
        }
        for (k, v) in &kinds {
            candidates.push((k.name(), v));
        }
        let mut values = Vec::with_capacity(width);
        let mut labels = Vec::with_capacity(width);
        for x in 0..width {
            let target = est.values[g][x];
            let mut best = 0;
            for c in 1..candidates.len() {
                if (candidates[c].1[x] - target).abs() < (candidates[best].1[x] - target).abs() {
                    best = c;
                }
            }
            values.push(candidates[best].1[x]);
            labels.push(candidates[best].0.to_string());
        }
        Ok((values, labels, None))
    })?;
    let algorithm = if include_lambda1 {
        Algorithm::Szne
    } else {
        Algorithm::SznePrime
    };
    let echo = EstimatorEcho {
        sigma: est.sigma,
        seed: est.seed,
    };
    Ok(MitigationReport::assemble(algorithm, res, Some(echo), rows))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterOutcome {
    pub value: f64,
    /// Indices into the candidate slice that passed every rule.
    pub survivors: Vec<usize>,
}

/// Discard negative candidates and those on the wrong side of the λ₁ value
/// relative to the noise trend, then average the extremes of what is left
/// together with the λ₁ value.
pub fn filter_value(p1: f64, p_last: f64, candidates: &[f64]) -> FilterOutcome {
    let survivors: Vec<usize> = candidates
        .iter()
        .enumerate()
        .filter(|&(_, &t)| t >= 0.0)
        .filter(|&(_, &t)| if p1 >= p_last { t >= p1 } else { t <= p1 })
        .map(|(i, _)| i)
        .collect();
    let (lo, hi) = survivors
        .iter()
        .map(|&i| candidates[i])
        .fold((p1, p1), |(lo, hi), t| (lo.min(t), hi.max(t)));
    FilterOutcome {
        value: (hi + lo) / 2.0,
        survivors,
    }
}

/// Filter-function mitigation with per-kind normalized candidates.
pub fn filter_select(res: &NoiseScaledResults) -> Result<MitigationReport> {
    filter_select_with(res, true)
}

/// Filter-function mitigation; `normalize_candidates = false` filters the raw
/// per-kind extrapolations instead.
pub fn filter_select_with(
    res: &NoiseScaledResults,
    normalize_candidates: bool,
) -> Result<MitigationReport> {
    let rows = rows(res, |_, s| {
        let kinds = per_kind(s, normalize_candidates)?;
        let width = s.lambda1().len();
        let mut values = Vec::with_capacity(width);
        let mut survivors = Vec::with_capacity(width);
        for x in 0..width {
            let t: Vec<f64> = kinds.iter().map(|(_, v)| v[x]).collect();
            let out = filter_value(s.lambda1()[x], s.last()[x], &t);
            values.push(out.value);
            let mut names = vec![LAMBDA1.to_string()];
            names.extend(out.survivors.iter().map(|&i| kinds[i].0.name().to_string()));
            survivors.push(names);
        }
        Ok((values, vec!["filter".to_string(); width], Some(survivors)))
    })?;
    Ok(MitigationReport::assemble(Algorithm::Filter, res, None, rows))
}

/// Dispatch on `algorithm`; the selective variants require estimates.
pub fn mitigate(
    res: &NoiseScaledResults,
    algorithm: Algorithm,
    est: Option<&EstimateSet>,
) -> Result<MitigationReport> {
    let need = || {
        est.ok_or_else(|| Error::InvalidArgument(format!("{algorithm} requires estimates")))
    };
    match algorithm {
        Algorithm::Zne(kind) => zne_report(res, kind),
        Algorithm::Szne => szne_select(res, need()?, true),
        Algorithm::SznePrime => szne_select(res, need()?, false),
        Algorithm::Filter => filter_select(res),
        Algorithm::Unmitigated => unmitigated_report(res),
    }
}
