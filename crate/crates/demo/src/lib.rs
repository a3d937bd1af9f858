//! Three operations for the browser page in `www/`. Each takes plain numbers
//! and returns a JSON string for the page to draw.

use rareperm::condbern::{coverage_probs, norm_constants, CBModel, Drafter};
use rareperm::seed::{stream, Phase};
use rareperm::{
    adaptive_ce_run_observed, crude_pvalue, exact_pvalue, CEConfig, Error, ObservedData, StatisticSpec,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("{t:?} is not a number")),
        })
        .collect()
}

/// `k = 0` or `k = n` means a one-group (sign-flip) test.
fn dataset(values: &str, k: usize) -> Result<(ObservedData, StatisticSpec), String> {
    let v = numbers(values)?;
    let n = v.len();
    if k == 0 || k >= n {
        let data = ObservedData::one_group(v).map_err(|e| e.to_string())?;
        Ok((data, StatisticSpec::one_group_mean()))
    } else {
        let data = ObservedData::two_group(v, k, n - k).map_err(|e| e.to_string())?;
        Ok((data, StatisticSpec::diff_means()))
    }
}

#[derive(Serialize)]
struct Step {
    gamma_k: f64,
    reached: bool,
    marginals: Vec<f64>,
}

#[derive(Serialize)]
struct AispTrace {
    gamma: f64,
    p_hat: f64,
    se: f64,
    method: &'static str,
    samples: usize,
    steps: Vec<Step>,
    /// Last proposal's estimate when the threshold was never reached.
    reached: bool,
}

pub fn aisp_trace(values: &str, k: usize, seed: u64, n_update: usize, m_estimate: usize, rho: f64) -> Result<String, String> {
    let (data, spec) = dataset(values, k)?;
    let config = CEConfig { rho, n_update, m_estimate, seed, ..CEConfig::default() };
    let mut steps = Vec::new();
    let result = adaptive_ce_run_observed(&data, &spec, &config, |state| {
        steps.push(Step { gamma_k: state.gamma_k, reached: state.reached, marginals: state.params.marginals() });
    });
    let trace = match result {
        Ok(r) => AispTrace {
            gamma: r.gamma,
            p_hat: r.p_hat,
            se: r.se,
            method: r.method.as_str(),
            samples: r.samples_adaptive + r.samples_estimate,
            steps,
            reached: true,
        },
        Err(Error::ThresholdNotReached { gamma, p_hat, se, .. }) => AispTrace {
            gamma,
            p_hat,
            se,
            method: if k == 0 || k >= data.len() { "aisp1" } else { "aisp2" },
            samples: steps.len() * n_update + m_estimate,
            steps,
            reached: false,
        },
        Err(e) => return Err(e.to_string()),
    };
    serde_json::to_string(&trace).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Coverage {
    exact: Vec<f64>,
    sampled: Vec<f64>,
    draws: usize,
}

pub fn coverage(weights: &str, k: usize, draws: usize, seed: u64) -> Result<String, String> {
    let model = CBModel::new(numbers(weights)?, k).map_err(|e| e.to_string())?;
    let exact = coverage_probs(&model, &norm_constants(&model)).pi;
    let drafter = Drafter::new(&model);
    let mut rng = stream(seed, Phase::Simulate, 0, 0);
    let mut counts = vec![0usize; model.len()];
    for _ in 0..draws {
        for (c, &inc) in counts.iter_mut().zip(drafter.sample(&mut rng).indicators()) {
            *c += usize::from(inc);
        }
    }
    let sampled = counts.iter().map(|&c| c as f64 / draws.max(1) as f64).collect();
    serde_json::to_string(&Coverage { exact, sampled, draws }).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Row {
    method: &'static str,
    p: f64,
    se: f64,
    samples: u64,
}

pub fn compare(values: &str, k: usize, seed: u64) -> Result<String, String> {
    let (data, spec) = dataset(values, k)?;
    let mut rows = Vec::new();
    match exact_pvalue(&data, &spec) {
        Ok(e) => rows.push(Row { method: "exact", p: e.p, se: 0.0, samples: e.total }),
        Err(Error::InstanceTooLarge(_)) => {}
        Err(e) => return Err(e.to_string()),
    }
    let config = CEConfig { seed, ..CEConfig::default() };
    match rareperm::adaptive_ce_run(&data, &spec, &config) {
        Ok(r) => rows.push(Row {
            method: r.method.as_str(),
            p: r.p_hat,
            se: r.se,
            samples: (r.samples_adaptive + r.samples_estimate) as u64,
        }),
        Err(Error::ThresholdNotReached { .. }) => {}
        Err(e) => return Err(e.to_string()),
    }
    let budget = rows.last().map_or(20_000, |r| r.samples as usize);
    let crude = crude_pvalue(&data, &spec, budget, seed).map_err(|e| e.to_string())?;
    rows.push(Row { method: "crude", p: crude.p_hat, se: crude.se, samples: budget as u64 });
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// Adaptive run on comma-separated values; the first `k` form group 1.
#[wasm_bindgen]
pub fn run_aisp(values: &str, k: usize, seed: u64, n_update: usize, m_estimate: usize, rho: f64) -> Result<String, JsError> {
    aisp_trace(values, k, seed, n_update, m_estimate, rho).map_err(|e| JsError::new(&e))
}

/// Exact CB inclusion probabilities next to drafting-sampler frequencies.
#[wasm_bindgen]
pub fn cb_coverage(weights: &str, k: usize, draws: usize, seed: u64) -> Result<String, JsError> {
    coverage(weights, k, draws, seed).map_err(|e| JsError::new(&e))
}

/// Exact (when small enough), adaptive and crude estimates side by side, with
/// crude given the adaptive sample budget.
#[wasm_bindgen]
pub fn compare_small(values: &str, k: usize, seed: u64) -> Result<String, JsError> {
    compare(values, k, seed).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn trace_has_one_step_per_iteration() {
        let out: Value = serde_json::from_str(
            &aisp_trace("2.1,1.7,2.5,1.9,0.2,-0.4,0.1,0.6,-0.3,0.0", 4, 7, 500, 2000, 0.1).unwrap(),
        )
        .unwrap();
        let steps = out["steps"].as_array().unwrap();
        assert!(!steps.is_empty());
        assert_eq!(steps.last().unwrap()["reached"], true);
        let sum: f64 = steps[0]["marginals"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert!((sum - 4.0).abs() < 1e-9);
        assert_eq!(out["method"], "aisp2");
    }

    #[test]
    fn coverage_tracks_exact() {
        let out: Value = serde_json::from_str(&coverage("1 2 3 4 5", 2, 20_000, 3).unwrap()).unwrap();
        let exact = out["exact"].as_array().unwrap();
        let sampled = out["sampled"].as_array().unwrap();
        for (e, s) in exact.iter().zip(sampled) {
            assert!((e.as_f64().unwrap() - s.as_f64().unwrap()).abs() < 0.02);
        }
    }

    #[test]
    fn comparison_rows() {
        let out: Value = serde_json::from_str(&compare("3,1,2,0", 2, 1).unwrap()).unwrap();
        let rows = out.as_array().unwrap();
        assert_eq!(rows[0]["method"], "exact");
        assert!((rows[0]["p"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(rows.last().unwrap()["method"], "crude");
        let one: Value = serde_json::from_str(&compare("0.9 1.4 -0.3 0.8 1.1", 0, 1).unwrap()).unwrap();
        assert_eq!(one[1]["method"], "aisp1");
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(aisp_trace("1,x,3", 1, 0, 500, 100, 0.1).is_err());
        assert!(coverage("1,2", 3, 10, 0).is_err());
    }
}
