//! Estimation of very small permutation-test p-values by adaptive
//! importance sampling.
//!
//! The permutation space is parameterized by a proposal family (independent
//! Bernoulli signs for one-group tests, the conditional Bernoulli law over
//! `k`-subsets for two-group tests). The cross-entropy method tilts the
//! proposal towards the permutations whose statistic reaches the observed one,
//! and a final importance-sampling step estimates the p-value.
//!
//! ```
//! use rareperm::{adaptive_ce_run, CEConfig, ObservedData, StatisticSpec};
//!
//! let data = ObservedData::two_group(
//!     vec![2.1, 1.7, 2.5, 1.9, 0.2, -0.4, 0.1, 0.6, -0.3, 0.0],
//!     4,
//!     6,
//! )
//! .unwrap();
//! let config = CEConfig { n_update: 500, m_estimate: 2000, seed: 7, ..CEConfig::default() };
//! let report = adaptive_ce_run(&data, &StatisticSpec::diff_means(), &config).unwrap();
//! assert!(report.p_hat > 0.0 && report.p_hat < 0.05);
//! ```

pub mod condbern;
pub mod data;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod onegroup;
pub mod oracle;
pub mod seed;
pub mod simulate;

pub use data::{observed_statistic, statistic_eval, Assignment, Design, ObservedData, PartitionVector, SignVector, StatisticKind, StatisticSpec};
pub use engine::{adaptive_ce_run, adaptive_ce_run_observed, estimate_step, sample_quantile, CEConfig, CEState, EstimateReport, Method, Proposal};
pub use error::{Error, Result};
pub use metrics::{replicate_metrics, ReplicationSummary};
pub use oracle::{crude_pvalue, exact_pvalue, exact_pvalue_onegroup, exact_pvalue_twogroup, ExactPValue};
pub use simulate::{simulate_dataset, SimulateSpec};
