//! Normal two-group (or one-group) data sets for simulation studies.

use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::ObservedData;
use crate::error::{contract, Result};
use crate::seed::{derive, Phase, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulateSpec {
    pub n1: usize,
    pub mu1: f64,
    pub sigma1: f64,
    /// Zero for one-group data.
    pub n2: usize,
    pub mu2: f64,
    pub sigma2: f64,
    pub data_seed: u64,
}

/// Group 1 draws first, then group 2, all from one seeded stream.
pub fn simulate_dataset(spec: &SimulateSpec) -> Result<ObservedData> {
    if spec.n1 == 0 {
        return Err(contract("n1 must be positive"));
    }
    let normal = |mu: f64, sigma: f64| {
        if sigma > 0.0 && sigma.is_finite() && mu.is_finite() {
            Normal::new(mu, sigma).map_err(|e| contract(e.to_string()))
        } else {
            Err(contract(format!("invalid normal parameters ({mu}, {sigma})")))
        }
    };
    let mut rng = Stream::seed_from_u64(derive(spec.data_seed, &[Phase::Simulate as u64]));
    let g1 = normal(spec.mu1, spec.sigma1)?;
    let mut values: Vec<f64> = (0..spec.n1).map(|_| g1.sample(&mut rng)).collect();
    if spec.n2 == 0 {
        return ObservedData::one_group(values);
    }
    let g2 = normal(spec.mu2, spec.sigma2)?;
    values.extend((0..spec.n2).map(|_| g2.sample(&mut rng)));
    ObservedData::two_group(values, spec.n1, spec.n2)
}
