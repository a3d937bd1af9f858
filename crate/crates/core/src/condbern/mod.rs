//! The conditional Bernoulli (CB) law over `k`-of-`n` partitions.
//!
//! `f(d; w) = prod_i w_i^{d_i} / R_k` for partition vectors with exactly `k`
//! ones, where `R_k = e_k(w)` is the elementary symmetric polynomial of the
//! odds. Uniform odds give the crude two-group permutation distribution.

mod arith;
mod draft;
mod ipf;
pub(crate) mod norm;

pub use draft::{draft_sample, Drafter};
pub use ipf::{ce_update_cb, ipf_fit, ipf_fit_targets, IpfFit, SufficientStats, IPF_MAX_SWEEPS, IPF_TOL, TARGET_FLOOR};
pub use norm::{coverage_probs, log_density_cb, norm_constants, norm_constants_with, CoverageProbs, NormTable, Recursion};

pub(crate) use arith::ln_binomial;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

pub const W_MIN: f64 = 1e-8;
pub const W_MAX: f64 = 1e8;

/// CB parameters: odds `w` (meaningful only up to a common scale) and the
/// Group-1 size `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CBModel {
    w: Vec<f64>,
    k: usize,
}

impl CBModel {
    /// Odds are clamped into `[W_MIN, W_MAX]`.
    pub fn new(w: Vec<f64>, k: usize) -> Result<Self> {
        if w.is_empty() {
            return Err(contract("CB model needs at least one coordinate"));
        }
        if k > w.len() {
            return Err(contract(format!("k = {k} exceeds n = {}", w.len())));
        }
        if let Some(i) = w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(contract(format!("odds w[{i}] = {} must be positive and finite", w[i])));
        }
        Ok(Self {
            w: w.into_iter().map(|v| v.clamp(W_MIN, W_MAX)).collect(),
            k,
        })
    }

    /// The crude permutation model, `w = [1, ..., 1]`.
    pub fn uniform(n: usize, k: usize) -> Self {
        assert!(k <= n, "k = {k} exceeds n = {n}");
        Self { w: vec![1.0; n], k }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}
