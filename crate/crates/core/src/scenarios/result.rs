use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qalg::DensityMatrix;

/// Per-level population time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSeries {
    pub label: String,
    pub values: Vec<f64>,
}

/// Worst-case invariant deviations seen over a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    /// Smallest density-matrix eigenvalue checked during the run.
    pub min_eigenvalue: f64,
    pub max_population_sum_error: f64,
    pub warnings: Vec<String>,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            max_trace_drift: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_population_sum_error: 0.0,
            warnings: Vec::new(),
        }
    }
}

/// Output of every scenario runner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub scenario: String,
    pub time_grid: Vec<f64>,
    pub populations: Vec<LevelSeries>,
    /// Comparison trajectories on the same time grid (e.g. an effective-model
    /// prediction); empty for most scenarios.
    #[serde(default)]
    pub reference: Vec<LevelSeries>,
    pub trace: Vec<f64>,
    pub purity: Vec<f64>,
    pub summary: BTreeMap<String, f64>,
    pub diagnostics: Diagnostics,
    pub config_echo: serde_json::Value,
    pub rng_seed: Option<u64>,
}

impl ExperimentResult {
    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.get(key).copied()
    }

    pub fn series(&self, label: &str) -> Option<&[f64]> {
        self.populations
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.values.as_slice())
    }
}

/// Collects samples and diagnostics while a scenario runs.
#[derive(Debug)]
pub(crate) struct Recorder {
    labels: Vec<String>,
    /// Groups of basis levels summed into each reported series.
    groups: Vec<Vec<usize>>,
    time_grid: Vec<f64>,
    populations: Vec<Vec<f64>>,
    trace: Vec<f64>,
    purity: Vec<f64>,
    diagnostics: Diagnostics,
    eigen_every_sample: bool,
}

/// Above this dimension eigenvalues are checked at the final state only.
const EIGEN_EVERY_SAMPLE_MAX_DIM: usize = 16;

impl Recorder {
    /// One series per basis level, labelled `p1, p2, …`.
    pub(crate) fn per_level(dim: usize) -> Self {
        let labels = (1..=dim).map(|k| format!("p{k}")).collect();
        let groups = (0..dim).map(|k| vec![k]).collect();
        Self::grouped(labels, groups, dim)
    }

    pub(crate) fn grouped(labels: Vec<String>, groups: Vec<Vec<usize>>, dim: usize) -> Self {
        let series = groups.len();
        Self {
            labels,
            groups,
            time_grid: Vec::new(),
            populations: vec![Vec::new(); series],
            trace: Vec::new(),
            purity: Vec::new(),
            diagnostics: Diagnostics::default(),
            eigen_every_sample: dim <= EIGEN_EVERY_SAMPLE_MAX_DIM,
        }
    }

    pub(crate) fn record(&mut self, t: f64, rho: &DensityMatrix) {
        self.time_grid.push(t);
        self.trace.push(0.0);
        self.purity.push(0.0);
        for series in &mut self.populations {
            series.push(0.0);
        }
        self.replace_last(t, rho);
    }

    /// Overwrites the latest sample, e.g. with the post-measurement state.
    pub(crate) fn replace_last(&mut self, t: f64, rho: &DensityMatrix) {
        let Some(idx) = self.time_grid.len().checked_sub(1) else {
            return self.record(t, rho);
        };
        self.time_grid[idx] = t;
        let pops = rho.populations();
        let mut total = 0.0;
        for (series, group) in self.populations.iter_mut().zip(&self.groups) {
            let p: f64 = group.iter().map(|&k| pops[k]).sum();
            series[idx] = p;
            total += p;
        }
        let trace = rho.trace();
        self.trace[idx] = trace;
        self.purity[idx] = rho.purity();
        let d = &mut self.diagnostics;
        d.max_trace_drift = d.max_trace_drift.max((trace - 1.0).abs());
        d.max_population_sum_error = d.max_population_sum_error.max((total - 1.0).abs());
        d.max_hermiticity_error = d
            .max_hermiticity_error
            .max(rho.matrix().hermiticity_error());
        if self.eigen_every_sample {
            self.check_eigenvalues(rho);
        }
    }

    pub(crate) fn check_eigenvalues(&mut self, rho: &DensityMatrix) {
        if let Some(&min) = rho.eigenvalues().ok().as_ref().and_then(|v| v.first()) {
            self.diagnostics.min_eigenvalue = self.diagnostics.min_eigenvalue.min(min);
        }
    }

    pub(crate) fn warn(&mut self, message: impl Into<String>) {
        self.diagnostics.warnings.push(message.into());
    }

    pub(crate) fn finish(
        mut self,
        scenario: &str,
        final_state: &DensityMatrix,
        summary: BTreeMap<String, f64>,
        config_echo: serde_json::Value,
        rng_seed: Option<u64>,
    ) -> ExperimentResult {
        self.check_eigenvalues(final_state);
        ExperimentResult {
            scenario: scenario.to_string(),
            time_grid: self.time_grid,
            populations: self
                .labels
                .into_iter()
                .zip(self.populations)
                .map(|(label, values)| LevelSeries { label, values })
                .collect(),
            reference: Vec::new(),
            trace: self.trace,
            purity: self.purity,
            summary,
            diagnostics: self.diagnostics,
            config_echo,
            rng_seed,
        }
    }
}
