//! Digital noise scaling by unitary folding.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::seed::{rng_for, stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldMode {
    Global,
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub lambda: f64,
    pub mode: FoldMode,
    pub seed: u64,
}

impl FoldSpec {
    pub fn new(lambda: f64, mode: FoldMode, seed: u64) -> Result<Self> {
        let spec = FoldSpec { lambda, mode, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn local(lambda: f64, seed: u64) -> Result<Self> {
        Self::new(lambda, FoldMode::Local, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "noise-scaling factor must be >= 1, got {}",
                self.lambda
            )));
        }
        if self.mode == FoldMode::Global && self.global_repetitions().is_none() {
            return Err(Error::InvalidArgument(format!(
                "global folding needs an odd integer factor, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// ξ for λ = 2ξ + 1, if λ is an odd integer.
    pub fn global_repetitions(&self) -> Option<usize> {
        let r = self.lambda.round();
        if (self.lambda - r).abs() < 1e-12 && r >= 1.0 && (r as u64) % 2 == 1 {
            Some(((r as u64 - 1) / 2) as usize)
        } else {
            None
        }
    }

    /// Fold `c` according to this spec.
    pub fn apply(&self, c: &Circuit) -> Result<Circuit> {
        self.validate()?;
        match self.mode {
            FoldMode::Global => fold_global(c, self.global_repetitions().unwrap_or(0)),
            FoldMode::Local => fold_local(c, self),
        }
    }
}

/// `U (U† U)^ξ`. Gate count is `(2ξ + 1)·|U|`.
pub fn fold_global(c: &Circuit, xi: usize) -> Result<Circuit> {
    let inverse = c.inverse()?;
    let mut out = c.clone();
    for _ in 0..xi {
        out.extend(inverse.gates().iter().cloned())?;
        out.extend(c.gates().iter().cloned())?;
    }
    out.set_label(format!("{} | fold global xi={xi}", c.label()));
    Ok(out)
}

/// Number of single folds `s = round(d(λ-1)/2)` for a `d`-gate circuit.
pub fn local_fold_count(num_gates: usize, lambda: f64) -> usize {
    (num_gates as f64 * (lambda - 1.0) / 2.0).round() as usize
}

/// Gate-count ratio actually realized by folding.
pub fn achieved_lambda(original_len: usize, folded_len: usize) -> f64 {
    folded_len as f64 / original_len as f64
}

/// Random local folding: `s` gate folds `g → g g† g`, chosen without
/// replacement from the `d` gates. When `s > d` every gate is folded
/// `s / d` times and a random subset of `s % d` gates once more.
pub fn fold_local(c: &Circuit, spec: &FoldSpec) -> Result<Circuit> {
    if spec.mode != FoldMode::Local {
        return Err(Error::InvalidArgument("fold_local needs a local FoldSpec".into()));
    }
    spec.validate()?;
    if !c.is_basis() {
        if let Some(g) = c.gates().iter().find(|g| !g.is_basis()) {
            return Err(Error::NotInBasis {
                gate: g.kind().name().into(),
            });
        }
    }
    let d = c.len();
    if d == 0 {
        return Err(Error::InvalidArgument("cannot locally fold an empty circuit".into()));
    }
    let s = local_fold_count(d, spec.lambda);
    let rounds = s / d;
    let mut folds = vec![rounds; d];
    let mut rng = rng_for(spec.seed, &[stream::FOLD, d as u64]);
    for i in index::sample(&mut rng, d, s % d) {
        folds[i] += 1;
    }

    let mut out = Circuit::new(c.num_qubits(), "")?;
    for (g, &k) in c.gates().iter().zip(&folds) {
        out.push(g.clone())?;
        if k > 0 {
            let inv: Gate = g.adjoint()?;
            for _ in 0..k {
                out.push(inv.clone())?;
                out.push(g.clone())?;
            }
        }
    }
    let achieved = achieved_lambda(d, out.len());
    out.set_label(format!(
        "{} | fold local lambda={} achieved={}",
        c.label(),
        spec.lambda,
        achieved
    ));
    Ok(out)
}
