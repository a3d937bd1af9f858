//! Report records and their NDJSON / TSV encodings.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// One estimator run on one feature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub record: &'static str,
    pub feature_id: String,
    pub replicate: usize,
    pub method: &'static str,
    pub p_hat: f64,
    pub se: f64,
    pub iterations: usize,
    pub gamma: f64,
    pub gamma_trace: Vec<f64>,
    pub samples_adaptive: usize,
    pub samples_estimate: usize,
    /// Master seed of the invocation.
    pub seed: u64,
    /// Seed this replicate actually ran with.
    pub run_seed: u64,
    pub data_digest: String,
    pub statistic: &'static str,
    pub s0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_perms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exceed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<u64>,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfigRecord {
    pub rho: f64,
    pub n_update: usize,
    pub m_estimate: usize,
    pub max_iters: usize,
    pub alpha: f64,
}

/// Error metrics over a set of replicate runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub runs: usize,
    pub mean_p_hat: f64,
    pub sd_p_hat: f64,
    pub mse: f64,
    pub are: f64,
    pub mcre: f64,
}

/// Replicate summary for one feature. The top-level metrics leave out runs
/// whose adaptive phase never reached the observed statistic; `all_runs`
/// keeps them, and is present only when there were such runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRecord {
    pub record: &'static str,
    pub feature_id: String,
    pub method: &'static str,
    pub replicates: usize,
    pub outliers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_p: Option<f64>,
    /// `user`, `exact` or `mean` (mean of the retained runs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_source: Option<&'static str>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_runs: Option<Metrics>,
}

/// Machine-readable error, written to the error stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub record: &'static str,
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feature_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicate: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_trace: Option<Vec<f64>>,
    /// Estimate from the last proposal of a run that never reached the
    /// observed statistic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
}

impl ErrorRecord {
    pub fn new(kind: &'static str, message: impl Into<String>, exit_code: i32) -> Self {
        Self {
            record: "error",
            kind,
            message: message.into(),
            exit_code,
            feature_id: None,
            replicate: None,
            run_seed: None,
            row: None,
            column: None,
            gamma: None,
            gamma_trace: None,
            p_hat: None,
            se: None,
        }
    }
}

/// Writes every float in scientific notation with 17 significant digits.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", number(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// `value` with 17 significant digits, enough to parse back to the same bits.
pub fn number(value: f64) -> String {
    format!("{value:.16e}")
}

/// One JSON object on one line.
pub fn json_line<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
    value.serialize(&mut ser).expect("report records always serialize");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub const RUN_COLUMNS: [&str; 15] = [
    "feature_id",
    "replicate",
    "method",
    "p_hat",
    "se",
    "iterations",
    "gamma",
    "samples_adaptive",
    "samples_estimate",
    "seed",
    "run_seed",
    "data_digest",
    "statistic",
    "elapsed_seconds",
    "gamma_trace",
];

pub fn tsv_run_row(r: &RunRecord) -> String {
    let trace: Vec<String> = r.gamma_trace.iter().map(|g| number(*g)).collect();
    [
        r.feature_id.clone(),
        r.replicate.to_string(),
        r.method.to_string(),
        number(r.p_hat),
        number(r.se),
        r.iterations.to_string(),
        number(r.gamma),
        r.samples_adaptive.to_string(),
        r.samples_estimate.to_string(),
        r.seed.to_string(),
        r.run_seed.to_string(),
        r.data_digest.clone(),
        r.statistic.to_string(),
        number(r.elapsed_seconds),
        trace.join(","),
    ]
    .join("\t")
}

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "feature_id",
    "method",
    "replicates",
    "outliers",
    "reference_p",
    "reference_source",
    "runs",
    "mean_p_hat",
    "sd_p_hat",
    "mse",
    "are",
    "mcre",
    "all_runs_mean_p_hat",
];

pub fn tsv_summary_row(s: &SummaryRecord) -> String {
    let opt = |v: Option<f64>| v.map(number).unwrap_or_default();
    let m = s.metrics.as_ref();
    [
        s.feature_id.clone(),
        s.method.to_string(),
        s.replicates.to_string(),
        s.outliers.to_string(),
        opt(s.reference_p),
        s.reference_source.unwrap_or_default().to_string(),
        m.map(|m| m.runs.to_string()).unwrap_or_default(),
        opt(m.map(|m| m.mean_p_hat)),
        opt(m.map(|m| m.sd_p_hat)),
        opt(m.map(|m| m.mse)),
        opt(m.map(|m| m.are)),
        opt(m.map(|m| m.mcre)),
        opt(s.all_runs.as_ref().map(|m| m.mean_p_hat)),
    ]
    .join("\t")
}
