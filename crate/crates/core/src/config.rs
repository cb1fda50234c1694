//! Experiment documents: one scenario per TOML file, with an optional sweep
//! over a single scenario parameter.
//!
//! ```toml
//! seed = 7
//!
//! [scenario]
//! kind = "ihbw_ideal"
//! pulse_count = 4
//!
//! [sweep]
//! parameter = "pulse_count"
//! values = [1, 2, 4, 8]
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::scenarios::{
    run_bangbang, run_ihbw_full, run_ihbw_ideal, run_partial, run_reversed, run_selective,
    run_super_zeno, run_unstable, run_zeno_subspace, BangBangConfig, ExperimentResult,
    IhbwConfig, IhbwMode, PartialConfig, ReservoirConfig, SelectiveConfig, SubspaceConfig,
    SuperZenoConfig,
};

/// Scenario selected by the `kind` key of the `[scenario]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioConfig {
    IhbwIdeal(IhbwConfig),
    IhbwFull(IhbwConfig),
    Reversed(IhbwConfig),
    Partial(PartialConfig),
    Bangbang(BangBangConfig),
    Selective(SelectiveConfig),
    SuperZeno(SuperZenoConfig),
    Unstable(ReservoirConfig),
    ZenoSubspace(SubspaceConfig),
}

impl ScenarioConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioConfig::IhbwIdeal(_) => "ihbw_ideal",
            ScenarioConfig::IhbwFull(_) => "ihbw_full",
            ScenarioConfig::Reversed(_) => "reversed",
            ScenarioConfig::Partial(_) => "partial",
            ScenarioConfig::Bangbang(_) => "bangbang",
            ScenarioConfig::Selective(_) => "selective",
            ScenarioConfig::SuperZeno(_) => "super_zeno",
            ScenarioConfig::Unstable(_) => "unstable",
            ScenarioConfig::ZenoSubspace(_) => "zeno_subspace",
        }
    }

    pub fn ihbw_mut(&mut self) -> Option<&mut IhbwConfig> {
        match self {
            ScenarioConfig::IhbwIdeal(c) | ScenarioConfig::IhbwFull(c) | ScenarioConfig::Reversed(c) => {
                Some(c)
            }
            ScenarioConfig::Partial(c) => Some(&mut c.ihbw),
            ScenarioConfig::Bangbang(c) => Some(&mut c.ihbw),
            ScenarioConfig::Selective(c) => Some(&mut c.ihbw),
            ScenarioConfig::SuperZeno(c) => Some(&mut c.ihbw),
            ScenarioConfig::Unstable(_) | ScenarioConfig::ZenoSubspace(_) => None,
        }
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        match self {
            ScenarioConfig::IhbwIdeal(c) => run_ihbw_ideal(c),
            ScenarioConfig::IhbwFull(c) => {
                // The kind already selects the model.
                let c = IhbwConfig {
                    mode: IhbwMode::Full,
                    ..c.clone()
                };
                run_ihbw_full(&c)
            }
            ScenarioConfig::Reversed(c) => run_reversed(c),
            ScenarioConfig::Partial(c) => run_partial(c),
            ScenarioConfig::Bangbang(c) => run_bangbang(c),
            ScenarioConfig::Selective(c) => run_selective(c),
            ScenarioConfig::SuperZeno(c) => run_super_zeno(c),
            ScenarioConfig::Unstable(c) => run_unstable(c),
            ScenarioConfig::ZenoSubspace(c) => run_zeno_subspace(c),
        }
    }
}

/// One swept parameter, addressed by a dotted path inside `[scenario]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Overrides the seed of sampling scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub scenario: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// Command-line overrides applied on top of a parsed document.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
}

/// A sweep point: the swept value and the scenario it produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: toml::Value,
    pub scenario: ScenarioConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ZenoError::ConfigParse(e.to_string().trim_end().to_string()))
    }

    /// Applies the document-level seed and then the command-line overrides.
    pub fn apply_overrides(&mut self, overrides: Overrides) {
        if let Some(seed) = overrides.seed.or(self.seed) {
            self.seed = Some(seed);
            if let ScenarioConfig::Selective(c) = &mut self.scenario {
                c.seed = seed;
            }
        }
        if let Some(steps) = overrides.steps {
            if let Some(ihbw) = self.scenario.ihbw_mut() {
                ihbw.integrator.steps_per_segment = steps;
            }
        }
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        self.scenario.run()
    }

    /// Expands the sweep into concrete scenarios, in declaration order.
    pub fn sweep_points(&self) -> Result<Vec<SweepPoint>> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| ZenoError::config("sweep", "missing [sweep] table"))?;
        if sweep.values.is_empty() {
            return Err(ZenoError::config("sweep.values", "must not be empty"));
        }
        let path: Vec<&str> = sweep.parameter.split('.').collect();
        if path.iter().any(|p| p.is_empty()) || path == ["kind"] {
            return Err(ZenoError::config(
                "sweep.parameter",
                format!("`{}` is not a scenario parameter path", sweep.parameter),
            ));
        }
        let base = toml::Value::try_from(&self.scenario)
            .map_err(|e| ZenoError::config("scenario", e.to_string()))?;
        sweep
            .values
            .iter()
            .map(|value| {
                let mut doc = base.clone();
                set_path(&mut doc, &path, value.clone());
                let scenario = ScenarioConfig::deserialize(doc).map_err(|e| {
                    ZenoError::config(
                        format!("sweep.parameter ({})", sweep.parameter),
                        format!("value {value}: {e}"),
                    )
                })?;
                Ok(SweepPoint {
                    value: value.clone(),
                    scenario,
                })
            })
            .collect()
    }

    /// Runs every sweep point in parallel; results keep the declaration order.
    pub fn run_sweep(&self) -> Result<Vec<(SweepPoint, ExperimentResult)>> {
        let points = self.sweep_points()?;
        points
            .into_par_iter()
            .map(|p| {
                let result = p.scenario.run()?;
                Ok((p, result))
            })
            .collect()
    }
}

fn set_path(doc: &mut toml::Value, path: &[&str], value: toml::Value) {
    let mut node = doc;
    for key in &path[..path.len() - 1] {
        let table = match node {
            toml::Value::Table(t) => t,
            other => {
                *other = toml::Value::Table(toml::Table::new());
                other.as_table_mut().expect("just replaced")
            }
        };
        node = table
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    if let toml::Value::Table(t) = node {
        t.insert(path[path.len() - 1].to_string(), value);
    }
}
