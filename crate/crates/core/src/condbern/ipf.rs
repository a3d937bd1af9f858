//! Cross-entropy update for the CB family.
//!
//! The weighted log-likelihood of the elite partitions is an exponential
//! family in `theta = ln w` with sufficient statistics `y_i = sum_l S_l d_li`,
//! so the update is the moment-matching solution of
//! `w_i R_{k-1,-i} / R_k = y_i / sum_l S_l`, found by iterative proportional
//! fitting.

use super::arith::{leave_one_out_ln, Centered};
use nalgebra::{DMatrix, DVector};

use super::CBModel;
use crate::data::PartitionVector;
use crate::error::{contract, Error, Result};
use crate::onegroup::Scored;

/// Target inclusion fractions are kept in `[TARGET_FLOOR, 1 - TARGET_FLOOR]`.
pub const TARGET_FLOOR: f64 = 1e-6;
/// Convergence tolerance on `max_i |pi_i(w) - target_i|`.
pub const IPF_TOL: f64 = 1e-6;
pub const IPF_MAX_SWEEPS: usize = 1000;

/// Weighted elite counts for the CB update.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStats {
    /// `y_i = sum_l S_l d_li`.
    pub y: Vec<f64>,
    /// `sum_l S_l`.
    pub s_sum: f64,
    /// Per-sample `S_l` (zero for non-elite draws).
    pub weights: Vec<f64>,
}

impl SufficientStats {
    /// `S_l = I{elite} exp(log_lr_l)`, rescaled by a common factor so the
    /// largest elite weight is one.
    pub fn from_samples(samples: &[Scored<PartitionVector>]) -> Result<Self> {
        let n = samples
            .first()
            .map(|s| s.assignment.len())
            .ok_or(Error::NoEliteSamples { threshold: f64::NAN })?;
        let shift = samples
            .iter()
            .filter(|s| s.elite)
            .map(|s| s.log_lr)
            .fold(f64::NEG_INFINITY, f64::max);
        if shift == f64::NEG_INFINITY {
            return Err(Error::NoEliteSamples { threshold: f64::NAN });
        }
        let mut y = vec![0.0; n];
        let mut weights = Vec::with_capacity(samples.len());
        for s in samples {
            if s.assignment.len() != n {
                return Err(contract("partition vectors differ in length"));
            }
            let weight = if s.elite { (s.log_lr - shift).exp() } else { 0.0 };
            weights.push(weight);
            if weight > 0.0 {
                for (acc, &inc) in y.iter_mut().zip(s.assignment.indicators()) {
                    if inc {
                        *acc += weight;
                    }
                }
            }
        }
        let s_sum = weights.iter().sum();
        Ok(Self { y, s_sum, weights })
    }

    /// Target inclusion fractions `y_i / sum S`.
    pub fn targets(&self) -> Vec<f64> {
        self.y.iter().map(|y| y / self.s_sum).collect()
    }
}

/// Result of an IPF solve.
#[derive(Debug, Clone, PartialEq)]
pub struct IpfFit {
    pub model: CBModel,
    pub sweeps: usize,
    pub residual: f64,
}

pub fn ipf_fit(stats: &SufficientStats, k: usize) -> Result<CBModel> {
    if !(stats.s_sum > 0.0 && stats.s_sum.is_finite()) {
        return Err(contract(format!("sum of weights must be positive, got {}", stats.s_sum)));
    }
    ipf_fit_targets(&stats.targets(), k).map(|fit| fit.model)
}

/// Finds odds whose CB inclusion probabilities match `targets` (which must sum
/// to `k`). The coordinate with the largest target keeps its starting odds,
/// fixing the otherwise free scale.
pub fn ipf_fit_targets(targets: &[f64], k: usize) -> Result<IpfFit> {
    let n = targets.len();
    if n == 0 || k > n {
        return Err(contract(format!("cannot fit k = {k} of n = {n}")));
    }
    if k == 0 || k == n {
        // A single partition: every odds vector gives the same law.
        return Ok(IpfFit {
            model: CBModel::uniform(n, k),
            sweeps: 0,
            residual: 0.0,
        });
    }
    let targets = feasible_targets(targets, k)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| targets[a].total_cmp(&targets[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| targets[i]).collect();
    let pinned = n - 1;

    let ln_t: Vec<f64> = sorted.iter().map(|t| t.ln()).collect();
    let mut ln_w = ln_t.clone();
    let mut at = Coverage::at(&ln_w, k);
    let mut residual = at.residual(&sorted);
    let mut newton = false;
    for sweep in 0..=IPF_MAX_SWEEPS {
        if residual <= IPF_TOL {
            let mut w = vec![0.0; n];
            for (slot, &orig) in order.iter().enumerate() {
                w[orig] = ln_w[slot].exp();
            }
            return Ok(IpfFit {
                model: CBModel::new(w, k)?,
                sweeps: sweep,
                residual,
            });
        }
        if sweep == IPF_MAX_SWEEPS {
            break;
        }
        let step = if newton {
            newton_step(&ln_w, &at, &sorted, k)
        } else {
            None
        };
        let (next, next_at) = step.unwrap_or_else(|| {
            // w_i <- t_i R_{k-1,-pinned} / R_{k-1,-i}
            let mut next = ln_t.clone();
            for i in 0..pinned {
                next[i] += at.ln_loo[pinned] - at.ln_loo[i];
            }
            let next_at = Coverage::at(&next, k);
            (next, next_at)
        });
        let next_residual = next_at.residual(&sorted);
        if next_residual > SLOW_CONTRACTION * residual {
            newton = true;
        }
        ln_w = next;
        at = next_at;
        residual = next_residual;
    }
    Err(Error::NonConvergence {
        sweeps: IPF_MAX_SWEEPS,
        residual,
    })
}

/// Sweeps that shrink the residual by less than this factor hand over to
/// Newton steps on the dual objective.
const SLOW_CONTRACTION: f64 = 0.5;

/// Leave-one-out constants, `ln R_k` and coverage probabilities at `ln w`.
struct Coverage {
    ln_loo: Vec<f64>,
    ln_rk: f64,
    pi: Vec<f64>,
}

impl Coverage {
    fn at(ln_w: &[f64], k: usize) -> Self {
        let ln_loo = leave_one_out_ln(&Centered::from_ln(ln_w.to_vec()), k - 1);
        let terms: Vec<f64> = ln_w.iter().zip(&ln_loo).map(|(w, l)| w + l).collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // R_k = sum_i w_i R_{k-1,-i} / k
        let ln_rk = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln() - (k as f64).ln();
        let pi = terms.iter().map(|t| (t - ln_rk).exp()).collect();
        Self { ln_loo, ln_rk, pi }
    }

    fn residual(&self, targets: &[f64]) -> f64 {
        self.pi
            .iter()
            .zip(targets)
            .map(|(p, t)| (p - t).abs())
            .fold(0.0, f64::max)
    }

    /// `ln R_k(w) - sum_i t_i ln w_i`, convex in `ln w` with gradient `pi - t`.
    fn dual(&self, ln_w: &[f64], targets: &[f64]) -> f64 {
        self.ln_rk - ln_w.iter().zip(targets).map(|(w, t)| w * t).sum::<f64>()
    }
}

/// Damped Newton step on the dual with the last coordinate held fixed. The
/// Hessian is the covariance of the inclusion indicators,
/// `pi_ij - pi_i pi_j` with `pi_ij = w_i w_j R_{k-2,-ij} / R_k`.
fn newton_step(ln_w: &[f64], at: &Coverage, targets: &[f64], k: usize) -> Option<(Vec<f64>, Coverage)> {
    let n = ln_w.len();
    let free = n - 1;
    let mut hessian = DMatrix::<f64>::zeros(free, free);
    for i in 0..free {
        hessian[(i, i)] = at.pi[i] * (1.0 - at.pi[i]);
        if k < 2 {
            for j in 0..i {
                hessian[(i, j)] = -at.pi[i] * at.pi[j];
                hessian[(j, i)] = hessian[(i, j)];
            }
            continue;
        }
        let rest: Vec<f64> = ln_w.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
        let ln_pair = leave_one_out_ln(&Centered::from_ln(rest), k - 2);
        for j in 0..i {
            let joint = (ln_w[i] + ln_w[j] + ln_pair[j] - at.ln_rk).exp();
            hessian[(i, j)] = joint - at.pi[i] * at.pi[j];
            hessian[(j, i)] = hessian[(i, j)];
        }
    }
    let gradient = DVector::from_iterator(free, (0..free).map(|i| at.pi[i] - targets[i]));
    let direction = hessian.cholesky()?.solve(&(-&gradient));
    let slope = gradient.dot(&direction);
    let start = at.dual(ln_w, targets);
    let mut scale = 1.0;
    for _ in 0..40 {
        let mut next = ln_w.to_vec();
        for i in 0..free {
            next[i] += scale * direction[i];
        }
        let next_at = Coverage::at(&next, k);
        if next_at.dual(&next, targets) <= start + 1e-4 * scale * slope {
            return Some((next, next_at));
        }
        scale *= 0.5;
    }
    None
}

/// Clips targets into `[TARGET_FLOOR, 1 - TARGET_FLOOR]` while keeping their
/// sum at `k`, by rescaling whichever coordinates are not pinned to a bound.
fn feasible_targets(raw: &[f64], k: usize) -> Result<Vec<f64>> {
    if let Some(i) = raw.iter().position(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(contract(format!("target {i} = {} is not a nonnegative number", raw[i])));
    }
    let (lo, hi) = (TARGET_FLOOR, 1.0 - TARGET_FLOOR);
    let goal = k as f64;
    let mut t: Vec<f64> = raw.iter().map(|v| v.clamp(lo, hi)).collect();
    for _ in 0..200 {
        let sum: f64 = t.iter().sum();
        if (sum - goal).abs() <= 1e-12 * goal {
            return Ok(t);
        }
        let movable = |v: f64| if sum > goal { v > lo } else { v < hi };
        let (free, fixed) = t.iter().fold((0.0, 0.0), |(free, fixed), &v| {
            if movable(v) { (free + v, fixed) } else { (free, fixed + v) }
        });
        if free <= 0.0 {
            break;
        }
        let factor = (goal - fixed) / free;
        for v in t.iter_mut() {
            if movable(*v) {
                *v = (*v * factor).clamp(lo, hi);
            }
        }
    }
    let sum: f64 = t.iter().sum();
    if (sum - goal).abs() <= 1e-9 * goal {
        Ok(t)
    } else {
        Err(contract(format!("targets cannot be made to sum to {k} (got {sum})")))
    }
}

/// CE update: sufficient statistics from the elite draws, then IPF. `base`
/// fixes the dimension the batch must have.
pub fn ce_update_cb(samples: &[Scored<PartitionVector>], base: &CBModel, k: usize) -> Result<CBModel> {
    if samples.iter().any(|s| s.assignment.len() != base.len() || s.assignment.k() != k) {
        return Err(contract("sample partitions do not match the model"));
    }
    let stats = SufficientStats::from_samples(samples)?;
    ipf_fit(&stats, k)
}
