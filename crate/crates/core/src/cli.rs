//! Command-line front end.
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 usage or config error,
//! 3 simulation error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Overrides};
use crate::error::ZenoError;
use crate::output::{format_number, series_csv, summary_csv, sweep_csv, to_json_pretty};
use crate::scenarios::{run_ihbw_full, IhbwConfig};
use crate::schedule::zeno_survival_ideal;

/// Pulse counts of the canonical transition-probability comparison.
pub const FIG4_PULSE_COUNTS: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];

#[derive(Debug, Parser)]
#[command(name = "zeno", version, about = "Deterministic quantum Zeno effect simulations")]
pub struct Cli {
    /// Seed for sampling scenarios; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// RK4 steps per drive segment for Lindblad runs; overrides the config.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario described by a config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a config's `[sweep]` and write one summary table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ideal vs finite-pulse transition probability over the canonical pulse counts.
    Fig4 {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in {path}: {source}")]
    Config { path: String, source: ZenoError },
    #[error("simulation error in scenario `{scenario}`: {source}")]
    Simulation { scenario: String, source: ZenoError },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config { .. } => 2,
            CliError::Simulation { .. } => 3,
        }
    }

    fn from_run(path: &Path, scenario: &str, err: ZenoError) -> Self {
        if err.is_config_error() {
            CliError::Config {
                path: path.display().to_string(),
                source: err,
            }
        } else {
            CliError::Simulation {
                scenario: scenario.to_string(),
                source: err,
            }
        }
    }
}

/// Written next to every set of outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool_version: String,
    pub command: String,
    pub config_echo: serde_json::Value,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
    pub wall_time: f64,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match execute(&cli, &command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, command: &str) -> Result<(), CliError> {
    let overrides = Overrides {
        seed: cli.seed,
        steps: cli.steps,
    };
    let start = Instant::now();
    let (out, config_echo, outputs) = match &cli.command {
        Command::Run {
            config,
            out,
            format,
        } => {
            let cfg = load(config, overrides)?;
            let result = cfg
                .run()
                .map_err(|e| CliError::from_run(config, cfg.scenario.name(), e))?;
            let name = cfg.scenario.name();
            let files = match format {
                Format::Json => vec![(format!("{name}.json"), to_json_pretty(&result))],
                Format::Csv => vec![
                    (format!("{name}_series.csv"), series_csv(&result)),
                    (format!("{name}_summary.csv"), summary_csv(&result)),
                ],
            };
            (out, echo(&cfg), write_all(out, files)?)
        }
        Command::Sweep { config, out } => {
            let cfg = load(config, overrides)?;
            let rows = cfg
                .run_sweep()
                .map_err(|e| CliError::from_run(config, cfg.scenario.name(), e))?;
            let parameter = &cfg.sweep.as_ref().expect("sweep ran").parameter;
            let table: Vec<_> = rows.iter().map(|(p, r)| (p.value.clone(), r)).collect();
            let files = vec![("sweep.csv".to_string(), sweep_csv(parameter, &table))];
            (out, echo(&cfg), write_all(out, files)?)
        }
        Command::Fig4 { out } => {
            let table = fig4_csv(overrides)?;
            let echo = serde_json::json!({
                "pulse_counts": FIG4_PULSE_COUNTS,
                "full": fig4_full_config(1, overrides),
            });
            (out, echo, write_all(out, vec![("fig4.csv".to_string(), table)])?)
        }
    };
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config_echo,
        outputs,
        wall_time: start.elapsed().as_secs_f64(),
    };
    write_all(out, vec![(MANIFEST_FILE.to_string(), to_json_pretty(&manifest))])?;
    Ok(())
}

fn load(path: &Path, overrides: Overrides) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        source: ZenoError::ConfigParse(e.to_string()),
    })?;
    let mut cfg = ExperimentConfig::from_toml_str(&text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        source: e,
    })?;
    cfg.apply_overrides(overrides);
    Ok(cfg)
}

fn echo(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn write_all(out: &Path, files: Vec<(String, String)>) -> Result<Vec<String>, CliError> {
    let io_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut names = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = out.join(&name);
        fs::write(&path, contents).map_err(io_err(&path))?;
        names.push(name);
    }
    Ok(names)
}

fn fig4_full_config(n: usize, overrides: Overrides) -> IhbwConfig {
    let mut cfg = IhbwConfig::full(n);
    if let Some(steps) = overrides.steps {
        cfg.integrator.steps_per_segment = steps;
    }
    cfg
}

/// Columns `n, simplified, full, no_measurement`, one row per canonical pulse count.
pub fn fig4_csv(overrides: Overrides) -> Result<String, CliError> {
    let rows: Vec<(usize, f64, f64, f64)> = FIG4_PULSE_COUNTS
        .par_iter()
        .map(|&n| {
            let fail = |source| CliError::Simulation {
                scenario: format!("ihbw_full (n = {n})"),
                source,
            };
            let simplified = zeno_survival_ideal(n).map_err(fail)?;
            let cfg = fig4_full_config(n, overrides);
            let full = run_ihbw_full(&cfg).map_err(fail)?;
            let p2 = full.summary_value("p2_final").expect("p2_final reported");
            let none = full
                .summary_value("no_measurement_p2")
                .expect("no_measurement_p2 reported");
            Ok((n, simplified, p2, none))
        })
        .collect::<Result<_, CliError>>()?;
    let mut out = String::from("n,simplified,full,no_measurement\n");
    for (n, s, f, z) in rows {
        out.push_str(&format!(
            "{n},{},{},{}\n",
            format_number(s),
            format_number(f),
            format_number(z)
        ));
    }
    Ok(out)
}
