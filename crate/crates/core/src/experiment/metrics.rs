use serde::{Deserialize, Serialize};

/// Per-parameter root mean squared error of `samples` about `truth`.
pub fn rmse(samples: &[Vec<f64>], truth: &[f64]) -> Vec<f64> {
    let n = samples.len().max(1) as f64;
    (0..truth.len())
        .map(|k| (samples.iter().map(|s| (s[k] - truth[k]).powi(2)).sum::<f64>() / n).sqrt())
        .collect()
}

/// Mean with a normal-approximation 95% half-width, `1.96 · sd / √n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub ci95: f64,
    pub n: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let ci95 = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            1.96 * (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, ci95, n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub truth: f64,
    pub rmse: Option<Stat>,
    pub posterior_mean: Option<Stat>,
}

/// Aggregate over replications. Only solved replications contribute to
/// the statistics; `solved + failed == reps` always holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub name: String,
    pub sampler: String,
    pub reps: usize,
    pub solved: usize,
    pub failed: usize,
    pub params: Vec<ParamSummary>,
    pub lambda_max: Option<Stat>,
    pub n1: Option<Stat>,
    pub n2: Option<Stat>,
    pub hessian_evals: Option<Stat>,
    pub acceptance_rate: Option<Stat>,
    pub failures: Vec<(usize, String)>,
}
