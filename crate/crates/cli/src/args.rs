//! Command-line flags.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rareperm::{CEConfig, SimulateSpec, StatisticKind, StatisticSpec};

use crate::run::{MethodChoice, OutputFormat, RunRequest, Source};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Adaptive importance sampling (sign flips for one group, partitions for two).
    Aisp,
    /// Plain Monte Carlo over random permutations.
    Crude,
    /// Full enumeration (small instances only).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    OneGroupMean,
    DiffMeans,
    #[value(alias = "student-t")]
    T,
    #[value(alias = "moderated-t")]
    ModT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputArg {
    Json,
    Tsv,
}

/// Permutation-test p-values, including very small ones, by adaptive
/// importance sampling.
#[derive(Debug, Parser)]
#[command(name = "rareperm", version)]
pub struct Cli {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Tab-separated matrix, one feature per row.
    #[arg(long, conflicts_with = "simulate", requires = "group_sizes")]
    pub input: Option<PathBuf>,
    /// Column counts of group 1 and group 2 as `K,M`; `M = 0` for one-group data.
    #[arg(long, value_parser = parse_group_sizes)]
    pub group_sizes: Option<(usize, usize)>,
    /// Normal data `n1,mu1,sigma1,n2,mu2,sigma2` (n2 = 0 for one group).
    #[arg(long)]
    pub simulate: Option<String>,
    /// Seed for --simulate.
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    /// Defaults to one-group-mean or diff-means to match the design.
    #[arg(long, value_enum)]
    pub statistic: Option<StatisticArg>,
    /// Fudge constant of the moderated t.
    #[arg(long, default_value_t = 0.0)]
    pub s0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub rho: f64,
    #[arg(long, default_value_t = 2000)]
    pub n_update: usize,
    #[arg(long, default_value_t = 10_000)]
    pub m_estimate: usize,
    #[arg(long, default_value_t = 20)]
    pub max_iters: usize,
    /// Weight on freshly fitted parameters (1 = no smoothing).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Permutations for --method crude.
    #[arg(long, default_value_t = 1_000_000)]
    pub n_perms: usize,
    /// Master seed; required for aisp and crude.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    #[arg(long, value_enum, default_value_t = OutputArg::Json)]
    pub output: OutputArg,
    /// True p-value used for replicate error metrics.
    #[arg(long)]
    pub reference_p: Option<f64>,
    /// Worker threads (defaults to one per core).
    #[arg(long)]
    pub threads: Option<usize>,
}

fn parse_group_sizes(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [k, m] => Ok((
            k.parse().map_err(|_| format!("bad group size {k:?}"))?,
            m.parse().map_err(|_| format!("bad group size {m:?}"))?,
        )),
        _ => Err(format!("expected K,M, got {s:?}")),
    }
}

fn parse_simulate(s: &str, data_seed: u64) -> Result<SimulateSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n1, mu1, sigma1, n2, mu2, sigma2] = parts.as_slice() else {
        return Err(format!("--simulate needs n1,mu1,sigma1,n2,mu2,sigma2, got {s:?}"));
    };
    let int = |v: &str| v.parse::<usize>().map_err(|_| format!("bad group size {v:?} in --simulate"));
    let real = |v: &str| v.parse::<f64>().map_err(|_| format!("bad number {v:?} in --simulate"));
    Ok(SimulateSpec {
        n1: int(n1)?,
        mu1: real(mu1)?,
        sigma1: real(sigma1)?,
        n2: int(n2)?,
        mu2: real(mu2)?,
        sigma2: real(sigma2)?,
        data_seed,
    })
}

impl Cli {
    /// Validates flag combinations that clap cannot express.
    pub fn into_request(self) -> Result<RunRequest, String> {
        let method = match self.method {
            MethodArg::Aisp => MethodChoice::Aisp,
            MethodArg::Crude => MethodChoice::Crude,
            MethodArg::Exact => MethodChoice::Exact,
        };
        if method != MethodChoice::Exact && self.seed.is_none() {
            return Err("--seed is required for aisp and crude".into());
        }
        let source = match (self.input, self.simulate) {
            (Some(path), None) => Source::File {
                path,
                group_sizes: self.group_sizes.ok_or("--input needs --group-sizes")?,
            },
            (None, Some(spec)) => Source::Simulate(parse_simulate(&spec, self.data_seed)?),
            _ => return Err("exactly one of --input and --simulate is required".into()),
        };
        let statistic = self
            .statistic
            .map(|s| {
                let kind = match s {
                    StatisticArg::OneGroupMean => StatisticKind::OneGroupMean,
                    StatisticArg::DiffMeans => StatisticKind::DiffMeans,
                    StatisticArg::T => StatisticKind::StudentT,
                    StatisticArg::ModT => StatisticKind::ModeratedT,
                };
                StatisticSpec::new(kind, self.s0)
            })
            .transpose()
            .map_err(|e| e.to_string())?;
        let config = CEConfig {
            rho: self.rho,
            n_update: self.n_update,
            m_estimate: self.m_estimate,
            max_iters: self.max_iters,
            alpha: self.alpha,
            seed: self.seed.unwrap_or(0),
        };
        config.validate().map_err(|e| e.to_string())?;
        if self.replicates == 0 {
            return Err("--replicates must be at least 1".into());
        }
        if self.n_perms == 0 {
            return Err("--n-perms must be positive".into());
        }
        if let Some(p) = self.reference_p {
            if !(p > 0.0 && p <= 1.0) {
                return Err(format!("--reference-p must lie in (0, 1], got {p}"));
            }
        }
        if self.threads == Some(0) {
            return Err("--threads must be positive".into());
        }
        Ok(RunRequest {
            method,
            source,
            statistic,
            config,
            n_perms: self.n_perms,
            replicates: self.replicates,
            output: match self.output {
                OutputArg::Json => OutputFormat::Json,
                OutputArg::Tsv => OutputFormat::Tsv,
            },
            reference_p: self.reference_p,
            threads: self.threads,
        })
    }
}
