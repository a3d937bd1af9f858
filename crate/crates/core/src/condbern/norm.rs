use serde::{Deserialize, Serialize};

use super::arith::{esp, leave_one_out_table, lift, Centered, Linear, LogSpace, Semiring};
use super::CBModel;
use crate::data::PartitionVector;
use crate::error::{contract, Result};

/// How the normalization constants are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Recursion {
    /// `R(j, m) = R(j, m-1) + w_m R(j-1, m-1)`; every term is positive.
    #[default]
    Stable,
    /// Newton's identities on the power sums `T_i = sum_j w_j^i`. Alternating
    /// signs make this lose precision for heterogeneous odds; kept as a
    /// cross-check.
    Alternating,
}

/// Normalization constants of a [`CBModel`], stored as natural logs.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTable {
    k: usize,
    n: usize,
    ln_r: Vec<f64>,
    ln_r_loo: Vec<f64>,
    power_sums: Option<Vec<f64>>,
}

impl NormTable {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `ln R_j` for `j = 0..=k`.
    pub fn ln_r(&self, j: usize) -> f64 {
        self.ln_r[j]
    }

    pub fn r(&self, j: usize) -> f64 {
        self.ln_r[j].exp()
    }

    /// `ln R_{j, -i}`: the constant of order `j < k` with coordinate `i`
    /// excluded.
    pub fn ln_r_loo(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.k, "({i}, {j}) outside {}x{}", self.n, self.k);
        self.ln_r_loo[i * self.k + j]
    }

    pub fn r_loo(&self, i: usize, j: usize) -> f64 {
        self.ln_r_loo(i, j).exp()
    }

    /// Power sums `T_1..=T_k` of the odds divided by their geometric mean
    /// (alternating recursion only).
    pub fn power_sums(&self) -> Option<&[f64]> {
        self.power_sums.as_deref()
    }
}

pub fn norm_constants(model: &CBModel) -> NormTable {
    norm_constants_with(model, Recursion::Stable)
}

pub fn norm_constants_with(model: &CBModel, recursion: Recursion) -> NormTable {
    let k = model.k();
    let n = model.len();
    let c = Centered::new(model.weights());
    let (mut ln_r, mut ln_r_loo, power_sums) = match recursion {
        Recursion::Stable => {
            if c.linear_safe(k) {
                stable::<Linear>(&c.ln_w, k)
            } else {
                stable::<LogSpace>(&c.ln_w, k)
            }
        }
        Recursion::Alternating => alternating(&c.ln_w, k),
    };
    for (j, v) in ln_r.iter_mut().enumerate() {
        *v += j as f64 * c.ln_scale;
    }
    if k > 0 {
        for (idx, v) in ln_r_loo.iter_mut().enumerate() {
            *v += (idx % k) as f64 * c.ln_scale;
        }
    }
    NormTable {
        k,
        n,
        ln_r,
        ln_r_loo,
        power_sums,
    }
}

type Tables = (Vec<f64>, Vec<f64>, Option<Vec<f64>>);

fn stable<S: Semiring>(ln_w: &[f64], k: usize) -> Tables {
    let w = lift::<S>(ln_w);
    let ln_r = esp(&w, k).into_iter().map(Semiring::ln).collect();
    let ln_loo = if k == 0 {
        Vec::new()
    } else {
        leave_one_out_table(&w, k - 1)
            .into_iter()
            .map(Semiring::ln)
            .collect()
    };
    (ln_r, ln_loo, None)
}

fn newton(power: &[f64], order: usize) -> Vec<f64> {
    let mut r = vec![0.0; order + 1];
    r[0] = 1.0;
    for j in 1..=order {
        let mut acc = 0.0;
        for i in 1..=j {
            let term = power[i - 1] * r[j - i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        r[j] = acc / j as f64;
    }
    r
}

fn alternating(ln_w: &[f64], k: usize) -> Tables {
    let w: Vec<f64> = ln_w.iter().map(|v| v.exp()).collect();
    let pow = |x: f64, i: usize| x.powi(i as i32);
    let power: Vec<f64> = (1..=k).map(|i| w.iter().map(|&x| pow(x, i)).sum()).collect();
    // Negative values from cancellation become NaN logs.
    let ln_r = newton(&power, k).into_iter().map(f64::ln).collect();
    let mut ln_loo = Vec::with_capacity(w.len() * k);
    if k > 0 {
        for &wl in &w {
            let reduced: Vec<f64> = power
                .iter()
                .enumerate()
                .take(k - 1)
                .map(|(i, t)| t - pow(wl, i + 1))
                .collect();
            ln_loo.extend(newton(&reduced, k - 1).into_iter().map(f64::ln));
        }
    }
    (ln_r, ln_loo, Some(power))
}

/// Inclusion probabilities `pi_j = Pr(d_j = 1)` and the drafting distribution
/// `a = pi / k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageProbs {
    pub pi: Vec<f64>,
    pub a: Vec<f64>,
}

/// `pi_j = w_j R_{k-1,-j} / R_k`.
pub fn coverage_probs(model: &CBModel, table: &NormTable) -> CoverageProbs {
    let k = model.k();
    if k == 0 {
        let zeros = vec![0.0; model.len()];
        return CoverageProbs {
            pi: zeros.clone(),
            a: zeros,
        };
    }
    let ln_rk = table.ln_r(k);
    let pi: Vec<f64> = model
        .weights()
        .iter()
        .enumerate()
        .map(|(j, &w)| (w.ln() + table.ln_r_loo(j, k - 1) - ln_rk).exp())
        .collect();
    let a = pi.iter().map(|p| p / k as f64).collect();
    CoverageProbs { pi, a }
}

/// `sum_{i: d_i = 1} ln w_i - ln R_k`.
pub fn log_density_cb(d: &PartitionVector, model: &CBModel, table: &NormTable) -> Result<f64> {
    if d.len() != model.len() || d.k() != model.k() {
        return Err(contract(format!(
            "partition with {} of {} ones does not fit a CB model with k = {} of {}",
            d.k(),
            d.len(),
            model.k(),
            model.len()
        )));
    }
    Ok(log_density_unchecked(d.indicators(), model.weights(), table.ln_r(model.k())))
}

pub(crate) fn log_density_unchecked(d: &[bool], w: &[f64], ln_rk: f64) -> f64 {
    let ln_num: f64 = d
        .iter()
        .zip(w)
        .filter(|(&inc, _)| inc)
        .map(|(_, &w)| w.ln())
        .sum();
    ln_num - ln_rk
}
