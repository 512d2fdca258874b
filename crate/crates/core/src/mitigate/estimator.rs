use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_for, stream};

/// Noisy estimates of the ideal per-(g, x) probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateSet {
    pub sigma: f64,
    pub seed: u64,
    /// `values[g][x]`, not clipped to [0, 1].
    pub values: Vec<Vec<f64>>,
}

/// P_est = P_sim + ε with ε ~ N(0, σ²) drawn i.i.d. in (g, x) order.
pub fn gaussian_estimator(p_sim: &[Vec<f64>], sigma: f64, seed: u64) -> Result<EstimateSet> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be >= 0, got {sigma}")));
    }
    let values = if sigma == 0.0 {
        p_sim.to_vec()
    } else {
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut rng = rng_for(seed, &[stream::ESTIMATOR]);
        p_sim
            .iter()
            .map(|row| row.iter().map(|p| p + normal.sample(&mut rng)).collect())
            .collect()
    };
    Ok(EstimateSet { sigma, seed, values })
}
