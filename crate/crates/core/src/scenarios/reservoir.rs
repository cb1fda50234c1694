//! An excited level coupled to a discretized band of `N` modes, observed at
//! regular intervals.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::measure::{project_nonselective, subspace_projectors};
use crate::qalg::{ComplexMatrix, DensityMatrix};

use super::engine::UnitaryPlan;
use super::result::{ExperimentResult, Recorder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirConfig {
    /// Number of band modes N.
    pub mode_count: usize,
    /// Band centre Δ, measured from the excited-level energy.
    pub band_center: f64,
    /// Band width W; modes sit at `Δ − W/2 + kW/(N−1)`.
    pub band_width: f64,
    /// Uniform excited-to-mode coupling g.
    pub coupling: f64,
    /// Measurement interval τ.
    pub measurement_interval: f64,
    /// Number of measurements m; the run lasts `mτ`.
    pub measurement_count: usize,
    #[serde(default = "default_samples")]
    pub samples_per_interval: usize,
}

fn default_samples() -> usize {
    4
}

impl ReservoirConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mode_count < 2 {
            return Err(ZenoError::config("mode_count", "must be at least 2"));
        }
        if !self.band_center.is_finite() {
            return Err(ZenoError::config("band_center", "must be finite"));
        }
        if !(self.band_width > 0.0) || !self.band_width.is_finite() {
            return Err(ZenoError::config("band_width", "must be positive and finite"));
        }
        if !self.coupling.is_finite() {
            return Err(ZenoError::config("coupling", "must be finite"));
        }
        if !(self.measurement_interval > 0.0) || !self.measurement_interval.is_finite() {
            return Err(ZenoError::config(
                "measurement_interval",
                "must be positive and finite",
            ));
        }
        if self.samples_per_interval == 0 {
            return Err(ZenoError::config("samples_per_interval", "must be positive"));
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.measurement_interval * self.measurement_count as f64
    }

    /// Revival time `2πN/W` of the discretized band.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI * self.mode_count as f64 / self.band_width
    }

    pub fn mode_frequency(&self, k: usize) -> f64 {
        let n = self.mode_count as f64;
        self.band_center - 0.5 * self.band_width + k as f64 * self.band_width / (n - 1.0)
    }
}

/// Level 0 is the excited state at zero energy, levels `1..=N` the modes.
pub fn reservoir_hamiltonian(cfg: &ReservoirConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let dim = cfg.mode_count + 1;
    let mut h = ComplexMatrix::zeros(dim);
    for k in 0..cfg.mode_count {
        h[(k + 1, k + 1)] = cfg.mode_frequency(k).into();
        h[(0, k + 1)] = cfg.coupling.into();
        h[(k + 1, 0)] = cfg.coupling.into();
    }
    Ok(h)
}

/// Runs the measured decay and an unmeasured reference over the same horizon.
pub fn run_unstable(cfg: &ReservoirConfig) -> Result<ExperimentResult> {
    let h = reservoir_hamiltonian(cfg)?;
    let dim = h.dim();
    let total = cfg.total_time();
    let tau = cfg.measurement_interval;
    let times: Vec<f64> = (1..=cfg.measurement_count)
        .map(|k| if k == cfg.measurement_count { total } else { tau * k as f64 })
        .collect();
    let projectors = subspace_projectors(dim, &[0])?;
    let rho0 = DensityMatrix::basis(dim, 0)?;

    let groups = vec![vec![0], (1..dim).collect()];
    let mut recorder = Recorder::grouped(
        vec!["excited".to_string(), "reservoir".to_string()],
        groups,
        dim,
    );
    let measured = UnitaryPlan::new(&h, &times, total, cfg.samples_per_interval)?.execute(
        rho0.clone(),
        |_, rho| project_nonselective(rho, &projectors),
        Some(&mut recorder),
    )?;
    let unmeasured = UnitaryPlan::new(&h, &[], total, 1)?.execute(rho0, |_, r| Ok(r.clone()), None)?;

    let survival = measured.population(0);
    let unmeasured_survival = unmeasured.population(0);
    let mut summary = BTreeMap::new();
    summary.insert("survival".into(), survival);
    summary.insert("unmeasured_survival".into(), unmeasured_survival);
    summary.insert("total_time".into(), total);
    summary.insert("recurrence_time".into(), cfg.recurrence_time());
    if total > 0.0 {
        summary.insert("effective_rate".into(), -survival.ln() / total);
        summary.insert(
            "unmeasured_effective_rate".into(),
            -unmeasured_survival.ln() / total,
        );
    }
    if total > cfg.recurrence_time() {
        recorder.warn(format!(
            "recurrence: total time {total} exceeds the band revival time {}",
            cfg.recurrence_time()
        ));
    }
    let echo = serde_json::to_value(cfg).expect("config serializes");
    Ok(recorder.finish("unstable", &measured, summary, echo, None))
}
