//! One-group permutations as `n` independent Bernoulli sign draws.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::SignVector;
use crate::error::{contract, Error, Result};

/// Sign probabilities are kept in `[CLIP, 1 - CLIP]`.
pub const CLIP: f64 = 1e-6;

/// A draw together with its elite flag and log likelihood ratio against the
/// crude (null) model.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored<A> {
    pub assignment: A,
    pub elite: bool,
    pub log_lr: f64,
}

/// Independent sign probabilities `p_i = Pr(s_i = +)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliModel {
    p: Vec<f64>,
}

impl BernoulliModel {
    /// Builds a model, clipping every probability into `[CLIP, 1 - CLIP]`.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(contract("Bernoulli model needs at least one coordinate"));
        }
        if let Some(i) = p.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(contract(format!("p[{i}] = {} is not a probability", p[i])));
        }
        Ok(Self {
            p: p.into_iter().map(clip).collect(),
        })
    }

    /// The crude permutation model, `p_i = 1/2`.
    pub fn uniform(n: usize) -> Self {
        Self { p: vec![0.5; n] }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `alpha * self + (1 - alpha) * previous`.
    pub fn smoothed(&self, previous: &BernoulliModel, alpha: f64) -> Self {
        if alpha >= 1.0 {
            return self.clone();
        }
        let p = self
            .p
            .iter()
            .zip(&previous.p)
            .map(|(&new, &old)| clip(alpha * new + (1.0 - alpha) * old))
            .collect();
        Self { p }
    }
}

fn clip(p: f64) -> f64 {
    p.clamp(CLIP, 1.0 - CLIP)
}

pub fn sample_signs<R: Rng + ?Sized>(model: &BernoulliModel, rng: &mut R) -> SignVector {
    SignVector(model.p.iter().map(|&p| rng.random::<f64>() < p).collect())
}

pub fn log_density_signs(s: &SignVector, model: &BernoulliModel) -> Result<f64> {
    if s.len() != model.len() {
        return Err(contract(format!(
            "sign vector length {} vs model length {}",
            s.len(),
            model.len()
        )));
    }
    Ok(log_density_unchecked(&s.0, &model.p))
}

pub(crate) fn log_density_unchecked(s: &[bool], p: &[f64]) -> f64 {
    s.iter()
        .zip(p)
        .map(|(&plus, &p)| if plus { p.ln() } else { (1.0 - p).ln() })
        .sum()
}

/// `ln f(s; base) - ln f(s; proposal)`.
pub fn log_likelihood_ratio_signs(
    s: &SignVector,
    base: &BernoulliModel,
    proposal: &BernoulliModel,
) -> Result<f64> {
    Ok(log_density_signs(s, base)? - log_density_signs(s, proposal)?)
}

/// Closed-form cross-entropy update: the likelihood-ratio weighted mean of the
/// elite sign vectors, clipped into `[CLIP, 1 - CLIP]`.
pub fn ce_update_signs(samples: &[Scored<SignVector>]) -> Result<BernoulliModel> {
    let elites: Vec<&Scored<SignVector>> = samples.iter().filter(|s| s.elite).collect();
    let first = elites.first().ok_or(Error::NoEliteSamples {
        threshold: f64::NAN,
    })?;
    let n = first.assignment.len();
    if elites.iter().any(|s| s.assignment.len() != n) {
        return Err(contract("elite sign vectors differ in length"));
    }
    // Weights only matter up to a common factor; shift by the largest log-LR.
    let shift = elites
        .iter()
        .map(|s| s.log_lr)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut numer = vec![0.0; n];
    let mut denom = 0.0;
    for s in &elites {
        let q = (s.log_lr - shift).exp();
        denom += q;
        for (acc, &plus) in numer.iter_mut().zip(&s.assignment.0) {
            if plus {
                *acc += q;
            }
        }
    }
    Ok(BernoulliModel {
        p: numer.into_iter().map(|v| clip(v / denom)).collect(),
    })
}
