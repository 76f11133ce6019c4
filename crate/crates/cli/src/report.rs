use serde::{Deserialize, Serialize};

/// One bandwidth selection run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub kernel: String,
    #[serde(rename = "Np")]
    pub np: usize,
    /// Zero when the sample came from a file.
    pub seed: u64,
    pub selected_h: f64,
    pub analytic_h: Option<f64>,
    /// `(selected_h − analytic_h) / analytic_h`.
    pub relative_error: Option<f64>,
    /// Non-backoff iterations.
    pub iterations: usize,
    pub backoffs: usize,
    pub converged: bool,
    pub wall_time_ms: u64,
    pub rng_name: String,
}

/// Per-`Np` summary over seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aggregate {
    #[serde(rename = "Np")]
    pub np: usize,
    pub runs: usize,
    pub converged_runs: usize,
    pub analytic_h: Option<f64>,
    pub mean_selected_h: f64,
    pub mean_relative_error: Option<f64>,
    pub mean_abs_relative_error: Option<f64>,
    pub max_iterations: usize,
}

impl Aggregate {
    /// Expects `reports` sorted by `Np`.
    pub fn per_size(reports: &[ExperimentReport]) -> Vec<Aggregate> {
        reports
            .chunk_by(|a, b| a.np == b.np)
            .map(|group| {
                let k = group.len() as f64;
                let errors: Option<Vec<f64>> = group.iter().map(|r| r.relative_error).collect();
                Aggregate {
                    np: group[0].np,
                    runs: group.len(),
                    converged_runs: group.iter().filter(|r| r.converged).count(),
                    analytic_h: group[0].analytic_h,
                    mean_selected_h: group.iter().map(|r| r.selected_h).sum::<f64>() / k,
                    mean_relative_error: errors.as_ref().map(|e| e.iter().sum::<f64>() / k),
                    mean_abs_relative_error: errors
                        .as_ref()
                        .map(|e| e.iter().map(|x| x.abs()).sum::<f64>() / k),
                    max_iterations: group.iter().map(|r| r.iterations).max().unwrap_or(0),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalReference {
    pub sample_size: usize,
    pub analytic_h: f64,
    pub selected_h: f64,
    pub relative_error: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDocument {
    pub experiment: String,
    pub kernel: String,
    pub dimension: usize,
    pub rng_name: String,
    pub reports: Vec<ExperimentReport>,
    pub aggregates: Vec<Aggregate>,
    pub external_reference: Option<ExternalReference>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}
