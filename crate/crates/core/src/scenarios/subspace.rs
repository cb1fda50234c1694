//! Frequent subspace-resolving measurements confining the dynamics to a
//! subspace, compared against evolution under the projected Hamiltonian PHP.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::measure::{project_nonselective, subspace_projectors};
use crate::qalg::{hermitian_eig, ComplexMatrix, DensityMatrix};
use crate::schedule::equal_times;

use super::engine::UnitaryPlan;
use super::result::{ExperimentResult, LevelSeries, Recorder};
use super::MatrixSpec;

/// Level indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceConfig {
    pub dim: usize,
    pub hamiltonian: MatrixSpec,
    pub subspace: Vec<usize>,
    /// Starting level; must lie in the subspace. Defaults to its first level.
    #[serde(default)]
    pub initial_level: Option<usize>,
    pub pulse_count: usize,
    pub total_time: f64,
    #[serde(default = "default_samples")]
    pub samples_per_segment: usize,
}

fn default_samples() -> usize {
    4
}

/// Chain 0 ↔ 1 ↔ 2 with Rabi frequencies `a` and `b`, i.e. `H₀₁ = a/2`,
/// `H₁₂ = b/2`.
pub fn three_level_chain(a: f64, b: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![0.0, 0.5 * a, 0.0],
        vec![0.5 * a, 0.0, 0.5 * b],
        vec![0.0, 0.5 * b, 0.0],
    ])
    .expect("square")
}

impl SubspaceConfig {
    /// Chain with subspace `{0, 1}` starting in level 0.
    pub fn chain(a: f64, b: f64, pulse_count: usize, total_time: f64) -> Self {
        Self {
            dim: 3,
            hamiltonian: MatrixSpec::from_matrix(&three_level_chain(a, b)),
            subspace: vec![0, 1],
            initial_level: None,
            pulse_count,
            total_time,
            samples_per_segment: default_samples(),
        }
    }

    fn initial(&self) -> usize {
        self.initial_level
            .unwrap_or_else(|| self.subspace.iter().copied().min().unwrap_or(0))
    }

    pub fn validate(&self) -> Result<ComplexMatrix> {
        let h = self.hamiltonian.to_matrix("hamiltonian")?;
        if h.dim() != self.dim {
            return Err(ZenoError::config(
                "hamiltonian",
                format!("expected {0}×{0}, got {1}×{1}", self.dim, h.dim()),
            ));
        }
        if !h.is_hermitian(crate::tolerance::HERMITIAN_TOL) {
            return Err(ZenoError::config("hamiltonian", "must be Hermitian"));
        }
        subspace_projectors(self.dim, &self.subspace)
            .map_err(|e| ZenoError::config("subspace", e.to_string()))?;
        if !self.subspace.contains(&self.initial()) {
            return Err(ZenoError::config("initial_level", "must lie in the subspace"));
        }
        if !(self.total_time > 0.0) || !self.total_time.is_finite() {
            return Err(ZenoError::config("total_time", "must be positive and finite"));
        }
        if self.samples_per_segment == 0 {
            return Err(ZenoError::config("samples_per_segment", "must be positive"));
        }
        Ok(h)
    }
}

pub fn run_zeno_subspace(cfg: &SubspaceConfig) -> Result<ExperimentResult> {
    let h = cfg.validate()?;
    let projectors = subspace_projectors(cfg.dim, &cfg.subspace)?;
    let p = &projectors.projectors()[0];
    let times = if cfg.pulse_count == 0 {
        Vec::new()
    } else {
        equal_times(cfg.pulse_count, cfg.total_time)
    };
    let rho0 = DensityMatrix::basis(cfg.dim, cfg.initial())?;
    let mut recorder = Recorder::per_level(cfg.dim);
    let plan = UnitaryPlan::new(&h, &times, cfg.total_time, cfg.samples_per_segment)?;
    let rho = plan.execute(
        rho0.clone(),
        |_, rho| project_nonselective(rho, &projectors),
        Some(&mut recorder),
    )?;

    let leakage = 1.0 - (p * rho.matrix()).trace().re;
    let mut result = recorder.finish(
        "zeno_subspace",
        &rho,
        BTreeMap::new(),
        serde_json::to_value(cfg).expect("config serializes"),
        None,
    );

    // Reference: unitary evolution under PHP on the recorded grid.
    let php = &(p * &h) * p;
    let eig = hermitian_eig(&php)?;
    let mut reference: Vec<Vec<f64>> = vec![Vec::with_capacity(result.time_grid.len()); cfg.dim];
    let mut deviation: f64 = 0.0;
    for (idx, &t) in result.time_grid.iter().enumerate() {
        let u = eig.propagator(t);
        let pops = DensityMatrix::from_matrix_unchecked(u.conjugate_unchecked(rho0.matrix()))
            .populations();
        for (k, p_ref) in pops.into_iter().enumerate() {
            reference[k].push(p_ref);
            if cfg.subspace.contains(&k) {
                deviation = deviation.max((result.populations[k].values[idx] - p_ref).abs());
            }
        }
    }
    result.reference = reference
        .into_iter()
        .enumerate()
        .map(|(k, values)| LevelSeries {
            label: format!("php_p{}", k + 1),
            values,
        })
        .collect();

    let s = &mut result.summary;
    s.insert("leakage".into(), leakage);
    s.insert("php_sup_deviation".into(), deviation);
    for (k, pk) in rho.populations().iter().enumerate() {
        s.insert(format!("p{}_final", k + 1), *pk);
    }
    Ok(result)
}
