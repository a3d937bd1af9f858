//! Error metrics across replicate runs.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub runs: usize,
    /// `(1/N) sum (p_i - p)^2`.
    pub mse: f64,
    /// `|mean(p_i) - p| / p`.
    pub are: f64,
    /// `(S / sqrt(N)) / p` with `S` the sample standard deviation of the runs.
    pub mcre: f64,
    pub mean_p_hat: f64,
    pub sd_p_hat: f64,
    pub reference_p: f64,
}

pub fn replicate_metrics(p_hats: &[f64], reference_p: f64) -> Result<ReplicationSummary> {
    if !(reference_p > 0.0 && reference_p.is_finite()) {
        return Err(contract(format!("reference p must be positive, got {reference_p}")));
    }
    if p_hats.len() < 2 {
        return Err(contract("replication metrics need at least two runs"));
    }
    let n = p_hats.len() as f64;
    let mean = p_hats.iter().sum::<f64>() / n;
    let mse = p_hats.iter().map(|p| (p - reference_p).powi(2)).sum::<f64>() / n;
    let sd = (p_hats.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    Ok(ReplicationSummary {
        runs: p_hats.len(),
        mse,
        are: ((mean - reference_p) / reference_p).abs(),
        mcre: sd / n.sqrt() / reference_p,
        mean_p_hat: mean,
        sd_p_hat: sd,
        reference_p,
    })
}
