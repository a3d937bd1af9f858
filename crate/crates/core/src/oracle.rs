//! Ground truth: exhaustive enumeration for small instances and crude Monte
//! Carlo permutation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{eval_partition, eval_signs, observed_statistic, Design, ObservedData, StatisticSpec};
use crate::engine::{EstimateReport, Method, Timer};
use crate::error::{contract, Error, Result};
use crate::seed::{map_blocks, stream, Phase};

pub const MAX_ONE_GROUP_N: usize = 24;
pub const MAX_PARTITIONS: u64 = 10_000_000;

/// An enumerated p-value `exceed / total`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactPValue {
    pub p: f64,
    pub exceed: u64,
    pub total: u64,
}

impl ExactPValue {
    fn new(exceed: u64, total: u64) -> Self {
        Self {
            p: exceed as f64 / total as f64,
            exceed,
            total,
        }
    }
}

pub fn exact_pvalue(data: &ObservedData, spec: &StatisticSpec) -> Result<ExactPValue> {
    match data.design() {
        Design::OneGroup => exact_pvalue_onegroup(data, spec),
        Design::TwoGroup { .. } => exact_pvalue_twogroup(data, spec),
    }
}

/// `#{s : T(s) >= gamma} / 2^n` over all sign assignments.
pub fn exact_pvalue_onegroup(data: &ObservedData, spec: &StatisticSpec) -> Result<ExactPValue> {
    if data.design() != Design::OneGroup {
        return Err(contract("one-group enumeration needs one-group data"));
    }
    let n = data.len();
    if n > MAX_ONE_GROUP_N {
        return Err(Error::InstanceTooLarge(format!("2^{n} sign assignments (cap 2^{MAX_ONE_GROUP_N})")));
    }
    let gamma = observed_statistic(spec, data)?;
    let mut signs = vec![false; n];
    let mut exceed = 0u64;
    for mask in 0u64..1 << n {
        for (i, s) in signs.iter_mut().enumerate() {
            *s = mask >> i & 1 == 1;
        }
        if eval_signs(data.values(), &signs) >= gamma {
            exceed += 1;
        }
    }
    Ok(ExactPValue::new(exceed, 1 << n))
}

pub(crate) fn binomial(n: usize, k: usize) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc * (n as u128 - k as u128 + i) / i;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// `#{d : T(d) >= gamma} / C(n, k)` over all Group-1 subsets.
pub fn exact_pvalue_twogroup(data: &ObservedData, spec: &StatisticSpec) -> Result<ExactPValue> {
    let Design::TwoGroup { group1: k, .. } = data.design() else {
        return Err(contract("two-group enumeration needs two-group data"));
    };
    let n = data.len();
    let total = binomial(n, k).filter(|&c| c <= MAX_PARTITIONS).ok_or_else(|| {
        Error::InstanceTooLarge(format!("C({n}, {k}) partitions (cap {MAX_PARTITIONS})"))
    })?;
    let gamma = observed_statistic(spec, data)?;

    // Lexicographic walk over k-subsets.
    let mut idx: Vec<usize> = (0..k).collect();
    let mut d = vec![false; n];
    let mut exceed = 0u64;
    let mut visited = 0u64;
    loop {
        d.iter_mut().for_each(|b| *b = false);
        for &i in &idx {
            d[i] = true;
        }
        visited += 1;
        if eval_partition(spec, data, &d)? >= gamma {
            exceed += 1;
        }
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            break;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
    debug_assert_eq!(visited, total);
    Ok(ExactPValue::new(exceed, visited))
}

/// Plain Monte Carlo over uniformly random permutations.
pub fn crude_pvalue(data: &ObservedData, spec: &StatisticSpec, n_perms: usize, seed: u64) -> Result<EstimateReport> {
    spec.check(data)?;
    if n_perms == 0 {
        return Err(contract("crude estimate needs at least one permutation"));
    }
    let timer = Timer::start();
    let gamma = observed_statistic(spec, data)?;
    let n = data.len();
    let counts = map_blocks(n_perms, |block, len| {
        let mut rng = stream(seed, Phase::Crude, 0, block);
        let mut hits = 0u64;
        match data.design() {
            Design::OneGroup => {
                let mut signs = vec![false; n];
                for _ in 0..len {
                    signs.iter_mut().for_each(|s| *s = rng.random::<bool>());
                    hits += u64::from(eval_signs(data.values(), &signs) >= gamma);
                }
            }
            Design::TwoGroup { group1: k, .. } => {
                let mut perm: Vec<usize> = (0..n).collect();
                let mut d = vec![false; n];
                for _ in 0..len {
                    // Partial Fisher-Yates: the first k slots are a uniform k-subset.
                    for i in 0..k {
                        let j = rng.random_range(i..n);
                        perm.swap(i, j);
                    }
                    d.iter_mut().for_each(|b| *b = false);
                    for &i in &perm[..k] {
                        d[i] = true;
                    }
                    hits += u64::from(eval_partition(spec, data, &d)? >= gamma);
                }
            }
        }
        Ok(vec![hits])
    })?;
    let hits: u64 = counts.iter().sum();
    let p_hat = hits as f64 / n_perms as f64;
    Ok(EstimateReport {
        p_hat,
        se: (p_hat * (1.0 - p_hat) / n_perms as f64).sqrt(),
        iterations: 0,
        samples_adaptive: 0,
        samples_estimate: n_perms,
        gamma,
        gamma_trace: Vec::new(),
        method: Method::Crude,
        elapsed: timer.seconds(),
        proposal: None,
    })
}
