//! Drafting sampler: pick the `k` Group-1 indices one at a time, each from the
//! coverage distribution of the CB law restricted to the remaining candidates
//! with the remaining count.

use rand::Rng;

use super::arith::{leave_one_out, lift, Centered, Linear, LogSpace, Semiring};
use super::CBModel;
use crate::data::PartitionVector;
use crate::error::{contract, Result};

/// A CB model prepared for repeated drafting.
#[derive(Debug, Clone)]
pub struct Drafter {
    n: usize,
    k: usize,
    ln_w: Vec<f64>,
    linear: bool,
}

impl Drafter {
    pub fn new(model: &CBModel) -> Self {
        let c = Centered::new(model.weights());
        // Restricting the candidate set only narrows the bound.
        let linear = c.linear_safe(model.k());
        Self {
            n: model.len(),
            k: model.k(),
            ln_w: c.ln_w,
            linear,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PartitionVector {
        if self.linear {
            self.sample_in::<Linear, R>(rng)
        } else {
            self.sample_in::<LogSpace, R>(rng)
        }
    }

    fn sample_in<S: Semiring + Score, R: Rng + ?Sized>(&self, rng: &mut R) -> PartitionVector {
        let mut d = vec![false; self.n];
        let mut candidates: Vec<usize> = (0..self.n).collect();
        let mut weights: Vec<S> = lift(&self.ln_w);
        let mut scores = Vec::with_capacity(self.n);
        for drawn in 0..self.k {
            let remaining = self.k - drawn;
            if remaining == candidates.len() {
                for &i in &candidates {
                    d[i] = true;
                }
                break;
            }
            // a_j ∝ w_j R_{r-1}(C \ j) over the current candidate set C
            let loo = leave_one_out(&weights, remaining - 1);
            scores.clear();
            scores.extend(weights.iter().zip(&loo).map(|(&w, &l)| w.mul(l)));
            let pick = S::draw(&scores, rng);
            d[candidates[pick]] = true;
            candidates.swap_remove(pick);
            weights.swap_remove(pick);
        }
        PartitionVector::new(d)
    }
}

trait Score: Sized {
    fn draw<R: Rng + ?Sized>(scores: &[Self], rng: &mut R) -> usize;
}

fn draw_proportional<R: Rng + ?Sized>(weights: impl Iterator<Item = f64> + Clone, rng: &mut R) -> usize {
    let total: f64 = weights.clone().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = i;
        }
        acc += w;
        if target < acc {
            return i;
        }
    }
    last
}

impl Score for Linear {
    fn draw<R: Rng + ?Sized>(scores: &[Self], rng: &mut R) -> usize {
        draw_proportional(scores.iter().map(|s| s.0), rng)
    }
}

impl Score for LogSpace {
    fn draw<R: Rng + ?Sized>(scores: &[Self], rng: &mut R) -> usize {
        let top = scores.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
        draw_proportional(scores.iter().map(move |s| (s.0 - top).exp()), rng)
    }
}

/// Draws one partition from the CB law of `model`.
pub fn draft_sample<R: Rng + ?Sized>(model: &CBModel, rng: &mut R) -> Result<PartitionVector> {
    if model.k() > model.len() {
        return Err(contract("k exceeds n"));
    }
    Ok(Drafter::new(model).sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condbern::{coverage_probs, norm_constants};
    use crate::seed::{stream, Phase};
    use std::collections::HashMap;

    #[test]
    fn degenerate_sizes() {
        let mut rng = stream(1, Phase::Crude, 0, 0);
        let all = draft_sample(&CBModel::new(vec![1.0, 3.0, 0.5], 3).unwrap(), &mut rng).unwrap();
        assert_eq!(all.indicators(), &[true, true, true]);
        let none = draft_sample(&CBModel::new(vec![1.0, 3.0, 0.5], 0).unwrap(), &mut rng).unwrap();
        assert_eq!(none.indicators(), &[false, false, false]);
    }

    #[test]
    fn always_exactly_k_ones() {
        let model = CBModel::new((1..=15).map(|i| i as f64 * 0.7).collect(), 6).unwrap();
        let drafter = Drafter::new(&model);
        let mut rng = stream(2, Phase::Crude, 0, 0);
        for _ in 0..500 {
            assert_eq!(drafter.sample(&mut rng).k(), 6);
        }
    }

    #[test]
    fn log_path_matches_coverage() {
        let w: Vec<f64> = (0..12).map(|i| 10f64.powi(i - 6) * if i % 2 == 0 { 1e2 } else { 1e-2 }).collect();
        let model = CBModel::new(w, 5).unwrap();
        let drafter = Drafter { linear: false, ..Drafter::new(&model) };
        let pi = coverage_probs(&model, &norm_constants(&model)).pi;
        let mut rng = stream(3, Phase::Crude, 0, 0);
        let draws = 50_000;
        let mut counts = vec![0usize; 12];
        for _ in 0..draws {
            for (c, &b) in counts.iter_mut().zip(drafter.sample(&mut rng).indicators()) {
                *c += usize::from(b);
            }
        }
        for (c, p) in counts.iter().zip(&pi) {
            let se = (p * (1.0 - p) / draws as f64).sqrt().max(1.0 / draws as f64);
            assert!((*c as f64 / draws as f64 - p).abs() <= 4.0 * se, "{c} vs {p}");
        }
    }

    #[test]
    fn linear_and_log_paths_sample_the_same_law() {
        let model = CBModel::new(vec![0.5, 1.0, 2.0, 4.0, 8.0], 2).unwrap();
        let lin = Drafter::new(&model);
        let log = Drafter { linear: false, ..lin.clone() };
        let mut rng_a = stream(4, Phase::Crude, 0, 0);
        let mut rng_b = stream(4, Phase::Crude, 0, 0);
        let mut same = 0;
        let mut freq: HashMap<Vec<bool>, (usize, usize)> = HashMap::new();
        for _ in 0..20_000 {
            let a = lin.sample(&mut rng_a);
            let b = log.sample(&mut rng_b);
            same += usize::from(a == b);
            freq.entry(a.indicators().to_vec()).or_default().0 += 1;
            freq.entry(b.indicators().to_vec()).or_default().1 += 1;
        }
        // Identical uniforms drive both, so they almost never diverge.
        assert!(same > 19_900);
        assert_eq!(freq.len(), 10);
    }
}
