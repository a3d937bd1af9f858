//! Executes a [`RunRequest`] and renders its report streams.

use std::path::PathBuf;

use rareperm::seed::replicate_seed;
use rareperm::{
    adaptive_ce_run, crude_pvalue, exact_pvalue, observed_statistic, replicate_metrics, simulate_dataset, CEConfig,
    Design, Error, Method, SimulateSpec, StatisticKind, StatisticSpec,
};
use rayon::prelude::*;

use crate::input::{load_matrix, Feature, LoadError};
use crate::report::{
    json_line, tsv_run_row, tsv_summary_row, ConfigRecord, ErrorRecord, Metrics, RunRecord, SummaryRecord,
    RUN_COLUMNS, SUMMARY_COLUMNS,
};

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const ESTIMATOR: i32 = 5;
    pub const THRESHOLD_NOT_REACHED: i32 = 6;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Aisp,
    Crude,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File { path: PathBuf, group_sizes: (usize, usize) },
    Simulate(SimulateSpec),
    /// Features already in memory.
    Features(Vec<Feature>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub method: MethodChoice,
    pub source: Source,
    /// `None` picks the mean (one-group) or difference of means (two-group).
    pub statistic: Option<StatisticSpec>,
    /// Its `seed` is the master seed.
    pub config: CEConfig,
    pub n_perms: usize,
    pub replicates: usize,
    pub output: OutputFormat,
    pub reference_p: Option<f64>,
    pub threads: Option<usize>,
}

/// Everything a run writes, plus its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

impl RunOutput {
    fn failure(error: ErrorRecord) -> Self {
        Self {
            stdout: String::new(),
            exit_code: error.exit_code,
            stderr: json_line(&error) + "\n",
        }
    }
}

/// Seed for replicate `r`; replicate 0 runs with the master seed itself, so a
/// recorded `run_seed` passed back as `--seed` reproduces that record.
pub fn run_seed(master: u64, replicate: usize) -> u64 {
    if replicate == 0 {
        master
    } else {
        replicate_seed(master, replicate as u64)
    }
}

fn statistic_name(kind: StatisticKind) -> &'static str {
    match kind {
        StatisticKind::OneGroupMean => "one-group-mean",
        StatisticKind::DiffMeans => "diff-means",
        StatisticKind::StudentT => "t",
        StatisticKind::ModeratedT => "mod-t",
    }
}

fn error_kind(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Contract(_) => ("contract", exit::ESTIMATOR),
        Error::DegenerateStatistic(_) => ("degenerate-statistic", exit::ESTIMATOR),
        Error::NoEliteSamples { .. } => ("no-elite-samples", exit::ESTIMATOR),
        Error::NonConvergence { .. } => ("non-convergence", exit::ESTIMATOR),
        Error::ThresholdNotReached { .. } => ("threshold-not-reached", exit::THRESHOLD_NOT_REACHED),
        Error::InstanceTooLarge(_) => ("instance-too-large", exit::ESTIMATOR),
        Error::InvalidConfig(_) => ("invalid-config", exit::USAGE),
    }
}

fn features(source: &Source) -> Result<Vec<Feature>, ErrorRecord> {
    match source {
        Source::File { path, group_sizes } => load_matrix(path, *group_sizes).map_err(|e| match e {
            LoadError::Io(io) => ErrorRecord::new("io", format!("{}: {io}", path.display()), exit::IO),
            LoadError::Parse(p) => ErrorRecord {
                row: Some(p.row),
                column: p.column,
                ..ErrorRecord::new("parse", p.to_string(), exit::PARSE)
            },
        }),
        Source::Simulate(spec) => simulate_dataset(spec)
            .map(|data| vec![Feature { id: "simulated".into(), data }])
            .map_err(|e| ErrorRecord::new("usage", e.to_string(), exit::USAGE)),
        Source::Features(f) => Ok(f.clone()),
    }
}

fn default_statistic(design: Design) -> StatisticSpec {
    match design {
        Design::OneGroup => StatisticSpec::one_group_mean(),
        Design::TwoGroup { .. } => StatisticSpec::diff_means(),
    }
}

fn execute(req: &RunRequest, feature: &Feature, replicate: usize) -> Result<RunRecord, Error> {
    let spec = req.statistic.unwrap_or_else(|| default_statistic(feature.data.design()));
    let seed = run_seed(req.config.seed, replicate);
    let mut record = RunRecord {
        record: "run",
        feature_id: feature.id.clone(),
        replicate,
        method: "",
        p_hat: 0.0,
        se: 0.0,
        iterations: 0,
        gamma: 0.0,
        gamma_trace: Vec::new(),
        samples_adaptive: 0,
        samples_estimate: 0,
        seed: req.config.seed,
        run_seed: seed,
        data_digest: format!("{:016x}", feature.data.digest()),
        statistic: statistic_name(spec.kind()),
        s0: spec.s0(),
        config: None,
        n_perms: None,
        exceed: None,
        total: None,
        elapsed_seconds: 0.0,
    };
    let report = match req.method {
        MethodChoice::Exact => {
            let exact = exact_pvalue(&feature.data, &spec)?;
            return Ok(RunRecord {
                method: Method::Exact.as_str(),
                p_hat: exact.p,
                gamma: observed_statistic(&spec, &feature.data)?,
                exceed: Some(exact.exceed),
                total: Some(exact.total),
                ..record
            });
        }
        MethodChoice::Crude => {
            record.n_perms = Some(req.n_perms);
            crude_pvalue(&feature.data, &spec, req.n_perms, seed)?
        }
        MethodChoice::Aisp => {
            let c = req.config;
            record.config = Some(ConfigRecord {
                rho: c.rho,
                n_update: c.n_update,
                m_estimate: c.m_estimate,
                max_iters: c.max_iters,
                alpha: c.alpha,
            });
            adaptive_ce_run(&feature.data, &spec, &CEConfig { seed, ..c })?
        }
    };
    Ok(RunRecord {
        method: report.method.as_str(),
        p_hat: report.p_hat,
        se: report.se,
        iterations: report.iterations,
        gamma: report.gamma,
        gamma_trace: report.gamma_trace,
        samples_adaptive: report.samples_adaptive,
        samples_estimate: report.samples_estimate,
        elapsed_seconds: report.elapsed,
        ..record
    })
}

fn error_record(e: &Error, feature: &Feature, replicate: usize, seed: u64) -> ErrorRecord {
    let (kind, code) = error_kind(e);
    let mut record = ErrorRecord {
        feature_id: Some(feature.id.clone()),
        replicate: Some(replicate),
        run_seed: Some(seed),
        ..ErrorRecord::new(kind, e.to_string(), code)
    };
    if let Error::ThresholdNotReached { gamma, gamma_trace, p_hat, se } = e {
        record.gamma = Some(*gamma);
        record.gamma_trace = Some(gamma_trace.clone());
        record.p_hat = Some(*p_hat);
        record.se = Some(*se);
    }
    record
}

fn metrics(p_hats: &[f64], reference: f64) -> Option<Metrics> {
    let s = replicate_metrics(p_hats, reference).ok()?;
    Some(Metrics {
        runs: s.runs,
        mean_p_hat: s.mean_p_hat,
        sd_p_hat: s.sd_p_hat,
        mse: s.mse,
        are: s.are,
        mcre: s.mcre,
    })
}

fn summarize(req: &RunRequest, feature: &Feature, runs: &[Result<RunRecord, Error>]) -> SummaryRecord {
    let kept: Vec<f64> = runs.iter().filter_map(|r| r.as_ref().ok()).map(|r| r.p_hat).collect();
    let fallback: Vec<f64> = runs
        .iter()
        .filter_map(|r| match r {
            Err(Error::ThresholdNotReached { p_hat, .. }) => Some(*p_hat),
            _ => None,
        })
        .collect();
    let method = runs
        .iter()
        .find_map(|r| r.as_ref().ok().map(|r| r.method))
        .unwrap_or(match (req.method, feature.data.design()) {
            (MethodChoice::Aisp, Design::OneGroup) => Method::Aisp1.as_str(),
            (MethodChoice::Aisp, _) => Method::Aisp2.as_str(),
            (MethodChoice::Crude, _) => Method::Crude.as_str(),
            (MethodChoice::Exact, _) => Method::Exact.as_str(),
        });

    let spec = req.statistic.unwrap_or_else(|| default_statistic(feature.data.design()));
    let reference = match req.reference_p {
        Some(p) => Some((p, "user")),
        None => match exact_pvalue(&feature.data, &spec) {
            Ok(e) => Some((e.p, "exact")),
            Err(_) if !kept.is_empty() => {
                let mean = kept.iter().sum::<f64>() / kept.len() as f64;
                (mean > 0.0).then_some((mean, "mean"))
            }
            Err(_) => None,
        },
    };
    let all: Vec<f64> = kept.iter().chain(&fallback).copied().collect();
    SummaryRecord {
        record: "summary",
        feature_id: feature.id.clone(),
        method,
        replicates: runs.len(),
        outliers: fallback.len(),
        reference_p: reference.map(|r| r.0),
        reference_source: reference.map(|r| r.1),
        metrics: reference.and_then(|(p, _)| metrics(&kept, p)),
        all_runs: reference.filter(|_| !fallback.is_empty()).and_then(|(p, _)| metrics(&all, p)),
    }
}

/// Runs every (feature, replicate) pair and renders the reports in that order,
/// whatever the worker count.
pub fn run(req: &RunRequest) -> RunOutput {
    if req.replicates == 0 {
        return RunOutput::failure(ErrorRecord::new("usage", "replicates must be at least 1", exit::USAGE));
    }
    let features = match features(&req.source) {
        Ok(f) => f,
        Err(e) => return RunOutput::failure(e),
    };
    let tasks: Vec<(usize, usize)> = (0..features.len())
        .flat_map(|f| (0..req.replicates).map(move |r| (f, r)))
        .collect();
    let work = || {
        let results: Vec<Result<RunRecord, Error>> =
            tasks.par_iter().map(|&(f, r)| execute(req, &features[f], r)).collect();
        let summaries: Vec<SummaryRecord> = if req.replicates > 1 {
            results
                .par_chunks(req.replicates)
                .zip(&features)
                .map(|(runs, feature)| summarize(req, feature, runs))
                .collect()
        } else {
            Vec::new()
        };
        (results, summaries)
    };
    let (results, summaries) = match req.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => return RunOutput::failure(ErrorRecord::new("usage", e.to_string(), exit::USAGE)),
        },
        None => work(),
    };

    let mut stdout = String::new();
    let mut stderr = String::new();
    let mut exit_code = exit::OK;
    if req.output == OutputFormat::Tsv {
        stdout += &RUN_COLUMNS.join("\t");
        stdout.push('\n');
    }
    for (result, &(f, r)) in results.iter().zip(&tasks) {
        match result {
            Ok(record) => {
                stdout += &match req.output {
                    OutputFormat::Json => json_line(record),
                    OutputFormat::Tsv => tsv_run_row(record),
                };
                stdout.push('\n');
            }
            Err(e) => {
                let record = error_record(e, &features[f], r, run_seed(req.config.seed, r));
                if exit_code == exit::OK {
                    exit_code = record.exit_code;
                }
                stderr += &json_line(&record);
                stderr.push('\n');
            }
        }
    }
    if !summaries.is_empty() {
        if req.output == OutputFormat::Tsv {
            stdout.push('\n');
            stdout += &SUMMARY_COLUMNS.join("\t");
            stdout.push('\n');
        }
        for s in &summaries {
            stdout += &match req.output {
                OutputFormat::Json => json_line(s),
                OutputFormat::Tsv => tsv_summary_row(s),
            };
            stdout.push('\n');
        }
    }
    RunOutput { stdout, stderr, exit_code }
}
