use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtrapolationKind {
    Linear,
    Poly2,
    Poly3,
    /// Exact interpolation through all J points.
    Richardson,
}

impl ExtrapolationKind {
    pub const ALL: [ExtrapolationKind; 4] = [
        ExtrapolationKind::Linear,
        ExtrapolationKind::Poly2,
        ExtrapolationKind::Poly3,
        ExtrapolationKind::Richardson,
    ];

    /// Polynomial order used with `j` sample points.
    pub fn order(self, j: usize) -> usize {
        match self {
            ExtrapolationKind::Linear => 1,
            ExtrapolationKind::Poly2 => 2,
            ExtrapolationKind::Poly3 => 3,
            ExtrapolationKind::Richardson => j.saturating_sub(1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExtrapolationKind::Linear => "linear",
            ExtrapolationKind::Poly2 => "poly2",
            ExtrapolationKind::Poly3 => "poly3",
            ExtrapolationKind::Richardson => "richardson",
        }
    }
}

impl fmt::Display for ExtrapolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExtrapolationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExtrapolationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown extrapolation kind `{s}`")))
    }
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", lambdas.len())));
    }
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::Fit("non-finite lambda".into()));
    }
    for (i, a) in lambdas.iter().enumerate() {
        if lambdas[i + 1..].contains(a) {
            return Err(Error::Fit(format!("duplicate lambda {a}")));
        }
    }
    Ok(())
}

/// Weights w with f(0) = Σ w_j y_j for the fit of `kind` through `lambdas`.
pub fn zero_noise_weights(lambdas: &[f64], kind: ExtrapolationKind) -> Result<Vec<f64>> {
    check_lambdas(lambdas)?;
    let j = lambdas.len();
    let order = kind.order(j);
    if order >= j {
        return Err(Error::Fit(format!(
            "{kind} needs order {order} < {j} sample points"
        )));
    }
    if kind == ExtrapolationKind::Richardson || order == j - 1 {
        return Ok(lagrange_at_zero(lambdas));
    }
    // c = R⁻¹ Qᵀ y, so c₀ = (Q R⁻ᵀ e₀)ᵀ y.
    let v = DMatrix::from_fn(j, order + 1, |r, c| lambdas[r].powi(c as i32));
    let qr = v.qr();
    let mut e0 = DVector::zeros(order + 1);
    e0[0] = 1.0;
    let z = qr
        .r()
        .transpose()
        .solve_lower_triangular(&e0)
        .ok_or_else(|| Error::Fit("singular design matrix".into()))?;
    Ok((qr.q() * z).iter().copied().collect())
}

fn lagrange_at_zero(lambdas: &[f64]) -> Vec<f64> {
    (0..lambdas.len())
        .map(|j| {
            lambdas
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &li)| li / (li - lambdas[j]))
                .product()
        })
        .collect()
}

/// Least-squares polynomial fit of `kind` evaluated at λ = 0.
pub fn fit_extrapolation(lambdas: &[f64], values: &[f64], kind: ExtrapolationKind) -> Result<f64> {
    if lambdas.len() != values.len() {
        return Err(Error::Fit(format!(
            "{} lambdas but {} values",
            lambdas.len(),
            values.len()
        )));
    }
    let w = zero_noise_weights(lambdas, kind)?;
    Ok(w.iter().zip(values).map(|(a, b)| a * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 5] = [1.0, 1.4, 1.7, 2.1, 2.5];

    #[test]
    fn constant_data() {
        for kind in ExtrapolationKind::ALL {
            let v = fit_extrapolation(&GRID, &[0.37; 5], kind).unwrap();
            assert!((v - 0.37).abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn linear_model() {
        let ys: Vec<f64> = GRID.iter().map(|l| 1.0 - 0.1 * l).collect();
        let v = fit_extrapolation(&GRID, &ys, ExtrapolationKind::Linear).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn richardson_cubic() {
        let q = |l: f64| 0.2 - 0.3 * l + 0.05 * l * l - 0.01 * l * l * l;
        let ys: Vec<f64> = GRID.iter().map(|&l| q(l)).collect();
        let v = fit_extrapolation(&GRID, &ys, ExtrapolationKind::Richardson).unwrap();
        assert!((v - q(0.0)).abs() < 1e-8);
    }

    #[test]
    fn errors() {
        assert!(fit_extrapolation(&[1.0, 2.0], &[1.0, 2.0], ExtrapolationKind::Poly2).is_err());
        assert!(fit_extrapolation(&[1.0, 1.0, 2.0], &[1.0; 3], ExtrapolationKind::Linear).is_err());
        assert!(fit_extrapolation(&[1.0], &[1.0], ExtrapolationKind::Linear).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        for kind in ExtrapolationKind::ALL {
            assert_eq!(kind.name().parse::<ExtrapolationKind>().unwrap(), kind);
        }
    }
}
