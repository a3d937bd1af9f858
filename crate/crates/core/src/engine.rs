//! The adaptive cross-entropy driver and the importance-sampling estimate.
//!
//! Each adaptive iteration draws `n_update` permutations from the current
//! proposal and sets the threshold `gamma_k` to the `(1 - rho)` sample
//! quantile of their statistics (never above the observed `gamma`). The
//! proposal is refitted to the draws reaching `gamma_k`, weighted by their
//! likelihood ratio against the crude permutation law. Once the unclipped
//! quantile reaches `gamma` that final refit becomes the importance density for
//! `m_estimate` more draws.

use serde::{Deserialize, Serialize};

use crate::condbern::{self, ln_binomial, CBModel, Drafter};
use crate::data::{eval_partition, eval_signs, observed_statistic, Design, ObservedData, PartitionVector, SignVector, StatisticSpec};
use crate::error::{contract, Error, Result};
use crate::onegroup::{self, BernoulliModel, Scored};
use crate::seed::{map_blocks, stream, Phase, Stream};

/// Run parameters for [`adaptive_ce_run`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CEConfig {
    /// Elite fraction.
    pub rho: f64,
    /// Draws per adaptive iteration.
    pub n_update: usize,
    /// Draws for the final estimate.
    pub m_estimate: usize,
    pub max_iters: usize,
    /// Smoothing weight on the fresh parameters (`1` = no smoothing).
    pub alpha: f64,
    pub seed: u64,
}

impl Default for CEConfig {
    fn default() -> Self {
        Self {
            rho: 0.1,
            n_update: 2000,
            m_estimate: 10_000,
            max_iters: 20,
            alpha: 1.0,
            seed: 0,
        }
    }
}

impl CEConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if self.n_update < 100 {
            return bad(format!("n_update must be at least 100, got {}", self.n_update));
        }
        if self.m_estimate == 0 {
            return bad("m_estimate must be positive".into());
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        Ok(())
    }
}

/// Parameters of an importance density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Proposal {
    Signs(BernoulliModel),
    Partition(CBModel),
}

impl Proposal {
    /// The crude permutation law for the design.
    pub fn crude(data: &ObservedData) -> Self {
        match data.design() {
            Design::OneGroup => Proposal::Signs(BernoulliModel::uniform(data.len())),
            Design::TwoGroup { group1, .. } => Proposal::Partition(CBModel::uniform(data.len(), group1)),
        }
    }

    /// Per-coordinate probability of `+` (signs) or Group-1 membership
    /// (partitions).
    pub fn marginals(&self) -> Vec<f64> {
        match self {
            Proposal::Signs(m) => m.probabilities().to_vec(),
            Proposal::Partition(m) => condbern::coverage_probs(m, &condbern::norm_constants(m)).pi,
        }
    }
}

/// Snapshot of the adaptive phase after each parameter update.
#[derive(Debug, Clone, PartialEq)]
pub struct CEState {
    /// Zero-based index of the iteration that just finished.
    pub iter: usize,
    pub gamma_k: f64,
    pub params: Proposal,
    pub gamma_trace: Vec<f64>,
    /// Whether the sample quantile reached the observed statistic.
    pub reached: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Adaptive IS over sign flips.
    Aisp1,
    /// Adaptive IS over CB partitions.
    Aisp2,
    Crude,
    Exact,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Aisp1 => "aisp1",
            Method::Aisp2 => "aisp2",
            Method::Crude => "crude",
            Method::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub p_hat: f64,
    /// Monte Carlo standard error of `p_hat`.
    pub se: f64,
    pub iterations: usize,
    pub samples_adaptive: usize,
    pub samples_estimate: usize,
    /// Observed statistic.
    pub gamma: f64,
    pub gamma_trace: Vec<f64>,
    pub method: Method,
    /// Wall-clock seconds; not covered by the determinism guarantee.
    pub elapsed: f64,
    /// Final importance density (adaptive runs only).
    pub proposal: Option<Proposal>,
}

impl EstimateReport {
    /// The report with timing cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            elapsed: 0.0,
            ..self.clone()
        }
    }
}

/// The `ceil(q * N)`-th smallest value (1-indexed), without interpolation.
pub fn sample_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(contract("quantile of an empty sample"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(contract(format!("quantile level must lie in (0, 1), got {q}")));
    }
    let n = values.len();
    let pos = q * n as f64;
    // 0.9 * 2000 may land a few ulps above 1800; don't let that bump the rank.
    let rank = if (pos - pos.round()).abs() < 1e-9 * pos.max(1.0) {
        pos.round()
    } else {
        pos.ceil()
    } as usize;
    let mut sorted = values.to_vec();
    let idx = rank.clamp(1, n) - 1;
    let (_, nth, _) = sorted.select_nth_unstable_by(idx, f64::total_cmp);
    Ok(*nth)
}

pub(crate) struct Timer {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Timer {
    pub fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    pub fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.start.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        0.0
    }
}

/// A proposal family ready for sampling and likelihood ratios against a base
/// law of the same family.
trait Family: Sized + Sync {
    type Draw: Send;
    fn draw(&self, rng: &mut Stream) -> Self::Draw;
    fn statistic(&self, spec: &StatisticSpec, data: &ObservedData, d: &Self::Draw) -> Result<f64>;
    /// `ln f(d; base) - ln f(d; self)`.
    fn log_lr(&self, d: &Self::Draw) -> f64;
    fn refit(&self, batch: Vec<Scored<Self::Draw>>, alpha: f64) -> Result<Self>;
    fn proposal(&self) -> Proposal;
}

struct Signs {
    model: BernoulliModel,
    base: BernoulliModel,
}

impl Family for Signs {
    type Draw = SignVector;

    fn draw(&self, rng: &mut Stream) -> SignVector {
        onegroup::sample_signs(&self.model, rng)
    }

    fn statistic(&self, _spec: &StatisticSpec, data: &ObservedData, d: &SignVector) -> Result<f64> {
        Ok(eval_signs(data.values(), &d.0))
    }

    fn log_lr(&self, d: &SignVector) -> f64 {
        onegroup::log_density_unchecked(&d.0, self.base.probabilities())
            - onegroup::log_density_unchecked(&d.0, self.model.probabilities())
    }

    fn refit(&self, batch: Vec<Scored<SignVector>>, alpha: f64) -> Result<Self> {
        let fresh = onegroup::ce_update_signs(&batch)?;
        Ok(Signs {
            model: fresh.smoothed(&self.model, alpha),
            base: self.base.clone(),
        })
    }

    fn proposal(&self) -> Proposal {
        Proposal::Signs(self.model.clone())
    }
}

struct Partitions {
    model: CBModel,
    drafter: Drafter,
    ln_rk: f64,
    base: CBModel,
    base_ln_rk: f64,
}

impl Partitions {
    fn new(model: CBModel, base: CBModel) -> Self {
        let ln_rk = condbern::norm_constants(&model).ln_r(model.k());
        let base_ln_rk = if base.weights().iter().all(|&w| w == 1.0) {
            ln_binomial(base.len(), base.k())
        } else {
            condbern::norm_constants(&base).ln_r(base.k())
        };
        Self {
            drafter: Drafter::new(&model),
            model,
            ln_rk,
            base,
            base_ln_rk,
        }
    }
}

impl Family for Partitions {
    type Draw = PartitionVector;

    fn draw(&self, rng: &mut Stream) -> PartitionVector {
        self.drafter.sample(rng)
    }

    fn statistic(&self, spec: &StatisticSpec, data: &ObservedData, d: &PartitionVector) -> Result<f64> {
        eval_partition(spec, data, d.indicators())
    }

    fn log_lr(&self, d: &PartitionVector) -> f64 {
        let base = condbern::norm::log_density_unchecked(d.indicators(), self.base.weights(), self.base_ln_rk);
        let prop = condbern::norm::log_density_unchecked(d.indicators(), self.model.weights(), self.ln_rk);
        base - prop
    }

    fn refit(&self, batch: Vec<Scored<PartitionVector>>, alpha: f64) -> Result<Self> {
        let k = self.model.k();
        let stats = condbern::SufficientStats::from_samples(&batch)?;
        let mut targets = stats.targets();
        if alpha < 1.0 {
            let previous = self.proposal().marginals();
            for (t, p) in targets.iter_mut().zip(previous) {
                *t = alpha * *t + (1.0 - alpha) * p;
            }
        }
        let fit = condbern::ipf_fit_targets(&targets, k)?;
        Ok(Partitions::new(fit.model, self.base.clone()))
    }

    fn proposal(&self) -> Proposal {
        Proposal::Partition(self.model.clone())
    }
}

type Batch<D> = Vec<(D, f64, f64)>;

fn draw_batch<F: Family>(
    family: &F,
    spec: &StatisticSpec,
    data: &ObservedData,
    count: usize,
    seed: u64,
    phase: Phase,
    iter: u64,
) -> Result<Batch<F::Draw>> {
    map_blocks(count, |block, len| {
        let mut rng = stream(seed, phase, iter, block);
        (0..len)
            .map(|_| {
                let d = family.draw(&mut rng);
                let t = family.statistic(spec, data, &d)?;
                let lr = family.log_lr(&d);
                Ok((d, t, lr))
            })
            .collect()
    })
}

fn estimate_with<F: Family>(
    family: &F,
    spec: &StatisticSpec,
    data: &ObservedData,
    gamma: f64,
    m: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let terms: Vec<f64> = draw_batch(family, spec, data, m, seed, Phase::Estimate, 0)?
        .into_iter()
        .map(|(_, t, lr)| if t >= gamma { lr.exp() } else { 0.0 })
        .collect();
    Ok(mean_and_se(&terms))
}

pub(crate) fn mean_and_se(terms: &[f64]) -> (f64, f64) {
    let m = terms.len() as f64;
    let mean = terms.iter().sum::<f64>() / m;
    if terms.len() < 2 {
        return (mean, 0.0);
    }
    let var = terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Importance-sampling estimate of `Pr_base(T >= gamma)` from `m` draws of
/// `proposal`. Returns `(p_hat, se)`.
pub fn estimate_step(
    base: &Proposal,
    proposal: &Proposal,
    data: &ObservedData,
    spec: &StatisticSpec,
    gamma: f64,
    m: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    spec.check(data)?;
    if m == 0 {
        return Err(contract("estimate needs at least one draw"));
    }
    match (base, proposal, data.design()) {
        (Proposal::Signs(b), Proposal::Signs(p), Design::OneGroup) if b.len() == data.len() && p.len() == data.len() => {
            let family = Signs { model: p.clone(), base: b.clone() };
            estimate_with(&family, spec, data, gamma, m, seed)
        }
        (Proposal::Partition(b), Proposal::Partition(p), Design::TwoGroup { group1, .. })
            if b.len() == data.len() && p.len() == data.len() && b.k() == group1 && p.k() == group1 =>
        {
            let family = Partitions::new(p.clone(), b.clone());
            estimate_with(&family, spec, data, gamma, m, seed)
        }
        _ => Err(contract("proposal family or shape does not match the data design")),
    }
}

/// Runs the adaptive phase and the final estimate.
pub fn adaptive_ce_run(data: &ObservedData, spec: &StatisticSpec, config: &CEConfig) -> Result<EstimateReport> {
    adaptive_ce_run_observed(data, spec, config, |_| {})
}

/// [`adaptive_ce_run`], calling `observe` after every parameter update.
pub fn adaptive_ce_run_observed(
    data: &ObservedData,
    spec: &StatisticSpec,
    config: &CEConfig,
    observe: impl FnMut(&CEState),
) -> Result<EstimateReport> {
    config.validate()?;
    spec.check(data)?;
    let timer = Timer::start();
    let gamma = observed_statistic(spec, data)?;
    let mut report = match data.design() {
        Design::OneGroup => {
            let base = BernoulliModel::uniform(data.len());
            let family = Signs { model: base.clone(), base };
            run_family(family, Method::Aisp1, data, spec, config, gamma, observe)?
        }
        Design::TwoGroup { group1, .. } => {
            let base = CBModel::uniform(data.len(), group1);
            let family = Partitions::new(base.clone(), base);
            run_family(family, Method::Aisp2, data, spec, config, gamma, observe)?
        }
    };
    report.elapsed = timer.seconds();
    Ok(report)
}

fn run_family<F: Family>(
    mut family: F,
    method: Method,
    data: &ObservedData,
    spec: &StatisticSpec,
    config: &CEConfig,
    gamma: f64,
    mut observe: impl FnMut(&CEState),
) -> Result<EstimateReport> {
    let mut gamma_trace = Vec::new();
    for iter in 0..config.max_iters {
        let batch = draw_batch(&family, spec, data, config.n_update, config.seed, Phase::Adaptive, iter as u64)?;
        let stats: Vec<f64> = batch.iter().map(|b| b.1).collect();
        let quantile = sample_quantile(&stats, 1.0 - config.rho)?;
        let gamma_k = quantile.min(gamma);
        gamma_trace.push(gamma_k);

        let scored = batch
            .into_iter()
            .map(|(assignment, t, log_lr)| Scored {
                assignment,
                elite: t >= gamma_k,
                log_lr,
            })
            .collect();
        family = family.refit(scored, config.alpha).map_err(|e| match e {
            Error::NoEliteSamples { .. } => Error::NoEliteSamples { threshold: gamma_k },
            other => other,
        })?;

        let reached = quantile >= gamma;
        observe(&CEState {
            iter,
            gamma_k,
            params: family.proposal(),
            gamma_trace: gamma_trace.clone(),
            reached,
        });
        if reached {
            let (p_hat, se) = estimate_with(&family, spec, data, gamma, config.m_estimate, config.seed)?;
            let iterations = iter + 1;
            return Ok(EstimateReport {
                p_hat,
                se,
                iterations,
                samples_adaptive: iterations * config.n_update,
                samples_estimate: config.m_estimate,
                gamma,
                gamma_trace,
                method,
                elapsed: 0.0,
                proposal: Some(family.proposal()),
            });
        }
    }
    let (p_hat, se) = estimate_with(&family, spec, data, gamma, config.m_estimate, config.seed)?;
    Err(Error::ThresholdNotReached {
        gamma,
        gamma_trace,
        p_hat,
        se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{crude_pvalue, exact_pvalue};
    use crate::seed::{stream, Phase};
    use rand::Rng;

    #[test]
    fn quantile_examples() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(sample_quantile(&v, 0.9).unwrap(), 9.0);
        assert_eq!(sample_quantile(&v, 0.95).unwrap(), 10.0);
        assert_eq!(sample_quantile(&v, 0.05).unwrap(), 1.0);
        assert_eq!(sample_quantile(&[5.0], 0.3).unwrap(), 5.0);
        assert!(sample_quantile(&[], 0.5).is_err());
        assert!(sample_quantile(&v, 1.0).is_err());
        let big: Vec<f64> = (1..=2000).map(f64::from).collect();
        assert_eq!(sample_quantile(&big, 1.0 - 0.1).unwrap(), 1800.0);
    }

    #[test]
    fn quantile_of_uniforms() {
        let mut rng = stream(1, Phase::Crude, 0, 0);
        let v: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        assert!((sample_quantile(&v, 0.9).unwrap() - 0.9).abs() < 0.02);
    }

    #[test]
    fn config_validation() {
        assert!(CEConfig::default().validate().is_ok());
        for bad in [
            CEConfig { rho: 0.0, ..Default::default() },
            CEConfig { rho: 1.0, ..Default::default() },
            CEConfig { n_update: 99, ..Default::default() },
            CEConfig { m_estimate: 0, ..Default::default() },
            CEConfig { max_iters: 0, ..Default::default() },
            CEConfig { alpha: 0.0, ..Default::default() },
            CEConfig { alpha: 1.5, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    fn small_two_group() -> ObservedData {
        ObservedData::two_group(vec![2.3, 1.1, 2.9, 0.4, -0.3, 0.2, 1.0, -1.2, 0.5, 0.1, -0.6, 0.8], 4, 8).unwrap()
    }

    #[test]
    fn non_rare_event_stops_after_one_iteration() {
        // gamma is the smallest possible statistic, so every draw is elite.
        let data = ObservedData::two_group(vec![-3.0, -2.0, 1.0, 2.0, 0.5, 0.7], 2, 4).unwrap();
        let spec = StatisticSpec::diff_means();
        let config = CEConfig { n_update: 500, m_estimate: 5000, seed: 3, ..Default::default() };
        let report = adaptive_ce_run(&data, &spec, &config).unwrap();
        assert_eq!(report.iterations, 1);
        assert_eq!(report.samples_adaptive, 500);
        let crude = crude_pvalue(&data, &spec, 5500, 3).unwrap();
        let se = (report.se.powi(2) + crude.se.powi(2)).sqrt().max(1e-12);
        assert!((report.p_hat - crude.p_hat).abs() <= 4.0 * se, "{report:?} {crude:?}");
        assert!((report.p_hat - 1.0).abs() <= 4.0 * report.se);
    }

    #[test]
    fn proposal_equal_to_base_is_crude() {
        let data = small_two_group();
        let spec = StatisticSpec::diff_means();
        let gamma = observed_statistic(&spec, &data).unwrap();
        let base = Proposal::crude(&data);
        let terms: Vec<f64> = draw_batch(
            &Partitions::new(CBModel::uniform(12, 4), CBModel::uniform(12, 4)),
            &spec,
            &data,
            300,
            9,
            Phase::Estimate,
            0,
        )
        .unwrap()
        .into_iter()
        .map(|(_, _, lr)| lr)
        .collect();
        assert!(terms.iter().all(|&lr| lr.abs() < 1e-12));
        let (p, se) = estimate_step(&base, &base, &data, &spec, gamma, 20_000, 9).unwrap();
        let exact = exact_pvalue(&data, &spec).unwrap().p;
        assert!((p - exact).abs() <= 4.0 * se);
    }

    #[test]
    fn unreachable_gamma_gives_zero() {
        let data = small_two_group();
        let spec = StatisticSpec::diff_means();
        let base = Proposal::crude(&data);
        let (p, se) = estimate_step(&base, &base, &data, &spec, 1e6, 1000, 1).unwrap();
        assert_eq!((p, se), (0.0, 0.0));
    }

    #[test]
    fn estimate_step_rejects_wrong_family() {
        let data = small_two_group();
        let spec = StatisticSpec::diff_means();
        let signs = Proposal::Signs(BernoulliModel::uniform(12));
        assert!(estimate_step(&signs, &signs, &data, &spec, 0.0, 10, 1).is_err());
    }

    #[test]
    fn two_group_run_matches_enumeration() {
        let data = small_two_group();
        let spec = StatisticSpec::diff_means();
        let exact = exact_pvalue(&data, &spec).unwrap();
        assert!(exact.p < 0.02, "{exact:?}");
        let mut hits = 0;
        for seed in 0..40 {
            let config = CEConfig { n_update: 1000, m_estimate: 4000, seed, ..Default::default() };
            let r = adaptive_ce_run(&data, &spec, &config).unwrap();
            assert!(r.gamma_trace.iter().all(|&g| g <= r.gamma));
            assert_eq!(*r.gamma_trace.last().unwrap(), r.gamma);
            hits += usize::from((r.p_hat - exact.p).abs() <= 3.0 * r.se);
        }
        assert!(hits >= 36, "{hits}/40");
    }

    #[test]
    fn one_group_run_matches_enumeration() {
        let data = ObservedData::one_group(vec![1.2, 0.8, 2.1, 0.3, 1.7, -0.2, 0.9, 1.4, 0.6, 1.1, -0.4, 0.7]).unwrap();
        let spec = StatisticSpec::one_group_mean();
        let exact = exact_pvalue(&data, &spec).unwrap();
        let mut hits = 0;
        for seed in 0..40 {
            let config = CEConfig { n_update: 1000, m_estimate: 4000, seed, ..Default::default() };
            let r = adaptive_ce_run(&data, &spec, &config).unwrap();
            assert_eq!(r.method, Method::Aisp1);
            hits += usize::from((r.p_hat - exact.p).abs() <= 3.0 * r.se);
        }
        assert!(hits >= 36, "{hits}/40, exact {exact:?}");
    }

    #[test]
    fn runs_are_deterministic() {
        let data = small_two_group();
        let spec = StatisticSpec::diff_means();
        let config = CEConfig { n_update: 400, m_estimate: 1000, seed: 77, ..Default::default() };
        let a = adaptive_ce_run(&data, &spec, &config).unwrap();
        let b = adaptive_ce_run(&data, &spec, &config).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
        let c = adaptive_ce_run(&data, &spec, &CEConfig { seed: 78, ..config }).unwrap();
        assert_ne!(a.p_hat, c.p_hat);
    }

    #[test]
    fn max_iters_reports_partial_trace() {
        // The observed labelling is the unique maximum of 2^20 sign patterns.
        let data = ObservedData::one_group((1..=20).map(f64::from).collect()).unwrap();
        let spec = StatisticSpec::one_group_mean();
        let config = CEConfig { n_update: 200, max_iters: 1, seed: 1, ..Default::default() };
        match adaptive_ce_run(&data, &spec, &config) {
            Err(Error::ThresholdNotReached { gamma, gamma_trace, .. }) => {
                assert_eq!(gamma_trace.len(), 1);
                assert!(gamma_trace[0] < gamma);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn observer_sees_every_update() {
        let data = small_two_group();
        let spec = StatisticSpec::diff_means();
        let config = CEConfig { n_update: 500, m_estimate: 500, seed: 4, ..Default::default() };
        let mut states = Vec::new();
        let r = adaptive_ce_run_observed(&data, &spec, &config, |s| states.push(s.clone())).unwrap();
        assert_eq!(states.len(), r.iterations);
        assert!(states.last().unwrap().reached);
        assert!(states[..states.len() - 1].iter().all(|s| !s.reached));
        assert_eq!(Some(states.last().unwrap().params.clone()), r.proposal);
    }

    #[test]
    fn smoothing_still_estimates() {
        let data = small_two_group();
        let spec = StatisticSpec::diff_means();
        let exact = exact_pvalue(&data, &spec).unwrap();
        let config = CEConfig { n_update: 1000, m_estimate: 5000, alpha: 0.7, seed: 5, ..Default::default() };
        let r = adaptive_ce_run(&data, &spec, &config).unwrap();
        assert!((r.p_hat - exact.p).abs() <= 4.0 * r.se);
        let one = ObservedData::one_group(vec![1.2, 0.8, 2.1, 0.3, 1.7, -0.2, 0.9, 1.4]).unwrap();
        let spec1 = StatisticSpec::one_group_mean();
        let exact1 = exact_pvalue(&one, &spec1).unwrap();
        let r1 = adaptive_ce_run(&one, &spec1, &config).unwrap();
        assert!((r1.p_hat - exact1.p).abs() <= 4.0 * r1.se.max(1e-12));
    }
}
