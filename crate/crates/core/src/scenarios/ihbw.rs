//! The driven three-level Zeno experiment: a resonant RF pi-pulse between
//! levels 1 and 2, interrupted by optical "measurement" pulses on 1↔3.
//!
//! Ideal mode works in the two-level rotating frame with `H = (Ω/2)σx` and
//! instantaneous non-selective projections. Full mode keeps level 3, drives
//! 1↔3 coherently during finite laser pulses and lets 3 decay to 1.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{finish_lindblad, IntegratorConfig, JumpOperator, Liouvillian};
use crate::error::{Result, ZenoError};
use crate::measure::{
    apply_kick, measure_selective, partial_collapse, project_nonselective, KickOperator,
    MeasurementStrength, ProjectorSet,
};
use crate::qalg::{ComplexMatrix, DensityMatrix};
use crate::schedule::{equal_spacing, equal_times, optimize_schedule, Schedule};

use super::engine::UnitaryPlan;
use super::result::{ExperimentResult, Recorder};
use super::MatrixSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IhbwMode {
    #[default]
    Ideal,
    Full,
}

/// Configuration of the driven Zeno experiment.
///
/// The full-mode defaults (`omega_laser`, `laser_pulse_duration`, `gamma3`)
/// are representative strong, short pulses for `omega_rf = 1`; they are not
/// historical apparatus values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IhbwConfig {
    /// RF Rabi frequency Ω.
    pub omega_rf: f64,
    /// Drive interval T; defaults to the pi-pulse length π/Ω.
    pub total_time: Option<f64>,
    /// Number of measurement pulses n.
    pub pulse_count: usize,
    /// Initial level, 1 or 2.
    pub init_level: u8,
    pub mode: IhbwMode,
    /// 1↔3 Rabi frequency during a laser pulse (full mode).
    pub omega_laser: f64,
    /// Length of each laser pulse (full mode).
    pub laser_pulse_duration: f64,
    /// Decay rate 3 → 1 (full mode).
    pub gamma3: f64,
    /// Keep the RF drive on while a laser pulse is applied (full mode).
    pub rf_on_during_laser: bool,
    /// Explicit measurement times replacing equal spacing (ideal mode only).
    pub event_times: Option<Vec<f64>>,
    /// Output samples per free-evolution segment.
    pub samples_per_segment: usize,
    pub integrator: IntegratorConfig,
}

impl Default for IhbwConfig {
    fn default() -> Self {
        Self {
            omega_rf: 1.0,
            total_time: None,
            pulse_count: 0,
            init_level: 1,
            mode: IhbwMode::Ideal,
            omega_laser: 5.0e4,
            laser_pulse_duration: 1.0e-3,
            gamma3: 5.0e4,
            rf_on_during_laser: true,
            event_times: None,
            samples_per_segment: 8,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl IhbwConfig {
    pub fn ideal(pulse_count: usize) -> Self {
        Self {
            pulse_count,
            ..Self::default()
        }
    }

    pub fn full(pulse_count: usize) -> Self {
        Self {
            pulse_count,
            mode: IhbwMode::Full,
            ..Self::default()
        }
    }

    pub fn total_time(&self) -> f64 {
        self.total_time.unwrap_or(PI / self.omega_rf)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_rf > 0.0) || !self.omega_rf.is_finite() {
            return Err(ZenoError::config("omega_rf", "must be positive and finite"));
        }
        let t = self.total_time();
        if !(t > 0.0) || !t.is_finite() {
            return Err(ZenoError::config("total_time", "must be positive and finite"));
        }
        if !matches!(self.init_level, 1 | 2) {
            return Err(ZenoError::config("init_level", "must be 1 or 2"));
        }
        if self.samples_per_segment == 0 {
            return Err(ZenoError::config("samples_per_segment", "must be positive"));
        }
        if let Some(times) = &self.event_times {
            if self.mode == IhbwMode::Full {
                return Err(ZenoError::config(
                    "event_times",
                    "explicit event times are supported in ideal mode only",
                ));
            }
            Schedule::projections(t, times)
                .map_err(|e| ZenoError::config("event_times", e.to_string()))?;
        }
        if self.mode == IhbwMode::Full {
            self.integrator.validate()?;
            for (field, value) in [
                ("omega_laser", self.omega_laser),
                ("gamma3", self.gamma3),
            ] {
                if !(value >= 0.0) || !value.is_finite() {
                    return Err(ZenoError::config(field, "must be non-negative and finite"));
                }
            }
            if !(self.laser_pulse_duration > 0.0) || !self.laser_pulse_duration.is_finite() {
                return Err(ZenoError::config(
                    "laser_pulse_duration",
                    "must be positive and finite",
                ));
            }
            if self.pulse_count as f64 * self.laser_pulse_duration >= t {
                return Err(ZenoError::config(
                    "laser_pulse_duration",
                    format!(
                        "{} pulses of length {} do not fit in T = {t}",
                        self.pulse_count, self.laser_pulse_duration
                    ),
                ));
            }
        }
        Ok(())
    }

    fn measurement_times(&self) -> Vec<f64> {
        match &self.event_times {
            Some(times) => times.clone(),
            None if self.pulse_count == 0 => Vec::new(),
            None => equal_times(self.pulse_count, self.total_time()),
        }
    }

    fn require_mode(&self, mode: IhbwMode) -> Result<()> {
        if self.mode != mode {
            return Err(ZenoError::config(
                "mode",
                format!("this scenario needs mode = {mode:?}").to_lowercase(),
            ));
        }
        Ok(())
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// `(Ω/2)σx` on the two-level space.
pub fn rabi_hamiltonian(omega: f64) -> ComplexMatrix {
    ComplexMatrix::pauli_x().scale_real(0.5 * omega)
}

/// Upper-level population for `n` equally spaced ideal projections over `[0, T]`
/// starting from one level: `½[1 − cosⁿ(ΩT/n)]`, or `sin²(ΩT/2)` for `n = 0`.
pub fn equal_spacing_prediction(omega: f64, total_time: f64, n: usize) -> f64 {
    if n == 0 {
        return crate::dynamics::rabi_population(omega, total_time);
    }
    let theta = omega * total_time / n as f64;
    0.5 * (1.0 - theta.cos().powi(n as i32))
}

enum EventAction {
    Project,
    Partial(MeasurementStrength),
    Kick(KickOperator),
}

struct TwoLevelRun {
    final_state: DensityMatrix,
    recorder: Recorder,
}

fn simulate_two_level(cfg: &IhbwConfig, init_level: u8, action: &EventAction) -> Result<TwoLevelRun> {
    let times = cfg.measurement_times();
    let plan = UnitaryPlan::new(
        &rabi_hamiltonian(cfg.omega_rf),
        &times,
        cfg.total_time(),
        cfg.samples_per_segment,
    )?;
    let basis = ProjectorSet::computational_basis(2);
    let rho0 = DensityMatrix::basis(2, usize::from(init_level - 1))?;
    let mut recorder = Recorder::per_level(2);
    let final_state = plan.execute(
        rho0,
        |_, rho| match action {
            EventAction::Project => project_nonselective(rho, &basis),
            EventAction::Partial(eta) => partial_collapse(rho, &basis, *eta),
            EventAction::Kick(k) => apply_kick(rho, k),
        },
        Some(&mut recorder),
    )?;
    Ok(TwoLevelRun {
        final_state,
        recorder,
    })
}

fn base_summary(cfg: &IhbwConfig, rho: &DensityMatrix) -> BTreeMap<String, f64> {
    let mut summary = BTreeMap::new();
    let pops = rho.populations();
    for (k, p) in pops.iter().enumerate() {
        summary.insert(format!("p{}_final", k + 1), *p);
    }
    summary.insert(
        "no_measurement_p2".into(),
        crate::dynamics::rabi_population(cfg.omega_rf, cfg.total_time()),
    );
    if cfg.event_times.is_none() {
        summary.insert(
            "equal_spacing_prediction".into(),
            equal_spacing_prediction(cfg.omega_rf, cfg.total_time(), cfg.pulse_count),
        );
    }
    summary.insert("pulse_count".into(), cfg.measurement_times().len() as f64);
    summary
}

/// Two-level run with instantaneous non-selective projections, starting in level 1.
pub fn run_ihbw_ideal(cfg: &IhbwConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    cfg.require_mode(IhbwMode::Ideal)?;
    if cfg.init_level != 1 {
        return Err(ZenoError::config(
            "init_level",
            "the forward run starts in level 1; use the reversed scenario for level 2",
        ));
    }
    let run = simulate_two_level(cfg, 1, &EventAction::Project)?;
    let summary = base_summary(cfg, &run.final_state);
    Ok(run
        .recorder
        .finish("ihbw_ideal", &run.final_state, summary, cfg.echo(), None))
}

/// Upper-level population of the ideal run for an arbitrary projection schedule.
pub fn ideal_transition_probability(cfg: &IhbwConfig, schedule: &Schedule) -> Result<f64> {
    let plan = UnitaryPlan::new(
        &rabi_hamiltonian(cfg.omega_rf),
        &schedule.times(),
        schedule.total_time(),
        1,
    )?;
    let basis = ProjectorSet::computational_basis(2);
    let rho0 = DensityMatrix::basis(2, usize::from(cfg.init_level.clamp(1, 2) - 1))?;
    let rho = plan.execute(rho0, |_, rho| project_nonselective(rho, &basis), None)?;
    Ok(rho.population(if cfg.init_level == 2 { 0 } else { 1 }))
}

/// The ideal transition probability as a schedule objective.
pub fn ideal_objective(cfg: &IhbwConfig) -> impl Fn(&Schedule) -> Result<f64> + Sync + '_ {
    move |schedule| ideal_transition_probability(cfg, schedule)
}

/// Same experiment started in level 2; reports `p1_final` as the transition
/// probability.
pub fn run_reversed(cfg: &IhbwConfig) -> Result<ExperimentResult> {
    let cfg = IhbwConfig {
        init_level: 2,
        ..cfg.clone()
    };
    cfg.validate()?;
    match cfg.mode {
        IhbwMode::Ideal => {
            let run = simulate_two_level(&cfg, 2, &EventAction::Project)?;
            let summary = base_summary(&cfg, &run.final_state);
            Ok(run
                .recorder
                .finish("reversed", &run.final_state, summary, cfg.echo(), None))
        }
        IhbwMode::Full => {
            let mut result = simulate_full(&cfg)?;
            result.scenario = "reversed".into();
            Ok(result)
        }
    }
}

/// Largest `rate_scale · dt` allowed for an RK4 step; keeps explicit stepping
/// stable when decay rates make the generator stiff.
const STABLE_STEP: f64 = 1.0;

/// Three-level Lindblad run with finite laser pulses ending at `kT/n`.
pub fn run_ihbw_full(cfg: &IhbwConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    cfg.require_mode(IhbwMode::Full)?;
    simulate_full(cfg)
}

fn simulate_full(cfg: &IhbwConfig) -> Result<ExperimentResult> {
    let t_total = cfg.total_time();
    let n = cfg.pulse_count;
    let delta = cfg.laser_pulse_duration;
    let rf = {
        let mut h = ComplexMatrix::zeros(3);
        h[(0, 1)] = (0.5 * cfg.omega_rf).into();
        h[(1, 0)] = (0.5 * cfg.omega_rf).into();
        h
    };
    let laser = {
        let mut h = ComplexMatrix::zeros(3);
        h[(0, 2)] = (0.5 * cfg.omega_laser).into();
        h[(2, 0)] = (0.5 * cfg.omega_laser).into();
        h
    };
    let decay = [JumpOperator::decay(3, 2, 0, cfg.gamma3)?];
    let gap = Liouvillian::new(&rf, &decay)?;
    let pulse_h = if cfg.rf_on_during_laser {
        &rf + &laser
    } else {
        laser
    };
    let pulse = Liouvillian::new(&pulse_h, &decay)?;

    // (generator, start, end, output samples)
    let mut segments: Vec<(&Liouvillian, f64, f64, usize)> = Vec::new();
    if n == 0 {
        segments.push((&gap, 0.0, t_total, cfg.samples_per_segment));
    }
    let mut start = 0.0;
    for k in 1..=n {
        let end = t_total * k as f64 / n as f64;
        let pulse_start = end - delta;
        segments.push((&gap, start, pulse_start, cfg.samples_per_segment));
        segments.push((&pulse, pulse_start, end, 1));
        start = end;
    }

    let mut rho = DensityMatrix::basis(3, usize::from(cfg.init_level - 1))?;
    let mut recorder = Recorder::per_level(3);
    recorder.record(0.0, &rho);
    let limit = cfg.integrator.trace_drift_limit;
    let mut total_steps = 0usize;
    for (generator, seg_start, seg_end, samples) in segments {
        let duration = seg_end - seg_start;
        if duration <= 0.0 {
            continue;
        }
        let sub = duration / samples as f64;
        let requested = cfg.integrator.steps_per_segment.div_ceil(samples);
        let stable = (sub * generator.rate_scale() / STABLE_STEP).ceil() as usize;
        let steps = requested.max(stable).max(1);
        for s in 1..=samples {
            let out = generator.rk4(rho.matrix(), sub, steps);
            rho = finish_lindblad(out, limit)?;
            let t = if s == samples {
                seg_end
            } else {
                seg_start + sub * s as f64
            };
            recorder.record(t, &rho);
            total_steps += steps;
        }
    }

    let mut summary = base_summary(cfg, &rho);
    // Level 3 only decays to level 1, so after relaxation it counts as level 1.
    summary.insert("p1_relaxed".into(), rho.population(0) + rho.population(2));
    summary.insert("integrator_steps".into(), total_steps as f64);
    let name = if cfg.init_level == 2 { "reversed" } else { "ihbw_full" };
    Ok(recorder.finish(name, &rho, summary, cfg.echo(), None))
}

/// Ideal run whose projections are weakened to strength `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub eta: f64,
    #[serde(default)]
    pub ihbw: IhbwConfig,
}

pub fn run_partial(cfg: &PartialConfig) -> Result<ExperimentResult> {
    cfg.ihbw.validate()?;
    cfg.ihbw.require_mode(IhbwMode::Ideal)?;
    let eta = MeasurementStrength::new(cfg.eta)
        .map_err(|_| ZenoError::config("eta", "must lie in [0, 1]"))?;
    let run = simulate_two_level(&cfg.ihbw, cfg.ihbw.init_level, &EventAction::Partial(eta))?;
    let mut summary = base_summary(&cfg.ihbw, &run.final_state);
    summary.insert("eta".into(), cfg.eta);
    let echo = serde_json::to_value(cfg).expect("config serializes");
    Ok(run
        .recorder
        .finish("partial", &run.final_state, summary, echo, None))
}

/// Named or explicit kick unitaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KickSpec {
    Named(NamedKick),
    Matrix(MatrixSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedKick {
    Identity,
    SigmaX,
    SigmaY,
    SigmaZ,
}

impl KickSpec {
    pub fn to_kick(&self) -> Result<KickOperator> {
        let m = match self {
            KickSpec::Named(NamedKick::Identity) => ComplexMatrix::identity(2),
            KickSpec::Named(NamedKick::SigmaX) => ComplexMatrix::pauli_x(),
            KickSpec::Named(NamedKick::SigmaY) => ComplexMatrix::pauli_y(),
            KickSpec::Named(NamedKick::SigmaZ) => ComplexMatrix::pauli_z(),
            KickSpec::Matrix(spec) => spec.to_matrix("kick")?,
        };
        KickOperator::new(m)
    }
}

/// Ideal run with unitary kicks in place of the projections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BangBangConfig {
    pub kick: KickSpec,
    #[serde(default)]
    pub ihbw: IhbwConfig,
}

pub fn run_bangbang(cfg: &BangBangConfig) -> Result<ExperimentResult> {
    cfg.ihbw.validate()?;
    cfg.ihbw.require_mode(IhbwMode::Ideal)?;
    let kick = cfg.kick.to_kick()?;
    if kick.unitary().dim() != 2 {
        return Err(ZenoError::config("kick", "must be a 2×2 unitary"));
    }
    let run = simulate_two_level(&cfg.ihbw, cfg.ihbw.init_level, &EventAction::Kick(kick))?;
    let projected = simulate_two_level(&cfg.ihbw, cfg.ihbw.init_level, &EventAction::Project)?;
    let mut summary = base_summary(&cfg.ihbw, &run.final_state);
    summary.remove("equal_spacing_prediction");
    summary.insert("p2_projection".into(), projected.final_state.population(1));
    let echo = serde_json::to_value(cfg).expect("config serializes");
    Ok(run
        .recorder
        .finish("bangbang", &run.final_state, summary, echo, None))
}

/// Sampled selective-measurement trajectories of the ideal run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectiveConfig {
    pub trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub ihbw: IhbwConfig,
}

/// Each trajectory draws from its own ChaCha20 stream (`stream = index`) of
/// the seeded generator, so results do not depend on thread scheduling.
pub fn run_selective(cfg: &SelectiveConfig) -> Result<ExperimentResult> {
    cfg.ihbw.validate()?;
    cfg.ihbw.require_mode(IhbwMode::Ideal)?;
    if cfg.trajectories == 0 {
        return Err(ZenoError::config("trajectories", "must be positive"));
    }
    let ihbw = &cfg.ihbw;
    let init = usize::from(ihbw.init_level - 1);
    let other = 1 - init;
    let times = ihbw.measurement_times();
    let plan = UnitaryPlan::new(&rabi_hamiltonian(ihbw.omega_rf), &times, ihbw.total_time(), 1)?;
    let basis = ProjectorSet::computational_basis(2);

    let outcomes: Vec<(f64, bool)> = (0..cfg.trajectories)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            rng.set_stream(index as u64);
            let mut survived = true;
            let rho = plan.execute(
                DensityMatrix::basis(2, init)?,
                |_, rho| {
                    let record = measure_selective(rho, &basis, &mut rng)?;
                    survived &= record.outcome_index == init;
                    Ok(record.post_state)
                },
                None,
            )?;
            Ok((rho.population(other), survived))
        })
        .collect::<Result<_>>()?;

    let count = cfg.trajectories as f64;
    let transition_mean = outcomes.iter().map(|(p, _)| p).sum::<f64>() / count;
    let survive_fraction = outcomes.iter().filter(|(_, s)| *s).count() as f64 / count;

    let reference = simulate_two_level(ihbw, ihbw.init_level, &EventAction::Project)?;
    let reference_p = reference.final_state.population(other);
    let binomial_se = |p: f64| (p * (1.0 - p) / count).sqrt();

    let mut summary = base_summary(ihbw, &reference.final_state);
    summary.insert("trajectories".into(), count);
    summary.insert("transition_mean".into(), transition_mean);
    summary.insert("transition_nonselective".into(), reference_p);
    summary.insert("transition_stderr".into(), binomial_se(reference_p));
    summary.insert("all_survive_fraction".into(), survive_fraction);
    summary.insert("all_survive_stderr".into(), binomial_se(survive_fraction));
    if ihbw.event_times.is_none() && ihbw.pulse_count > 0 {
        let n = ihbw.pulse_count;
        let half = 0.5 * ihbw.omega_rf * ihbw.total_time() / n as f64;
        summary.insert("all_survive_closed_form".into(), half.cos().powi(2 * n as i32));
    }
    let echo = serde_json::to_value(cfg).expect("config serializes");
    Ok(reference.recorder.finish(
        "selective",
        &reference.final_state,
        summary,
        echo,
        Some(cfg.seed),
    ))
}

/// Optimized unequal measurement timing for the ideal run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperZenoConfig {
    #[serde(default)]
    pub ihbw: IhbwConfig,
}

pub fn run_super_zeno(cfg: &SuperZenoConfig) -> Result<ExperimentResult> {
    let ihbw = &cfg.ihbw;
    ihbw.validate()?;
    ihbw.require_mode(IhbwMode::Ideal)?;
    if ihbw.pulse_count == 0 {
        return Err(ZenoError::config("ihbw.pulse_count", "must be positive"));
    }
    let optimized = optimize_schedule(ihbw.pulse_count, ihbw.total_time(), ideal_objective(ihbw))?;
    let tuned = IhbwConfig {
        event_times: Some(optimized.schedule.times()),
        ..ihbw.clone()
    };
    let run = simulate_two_level(&tuned, ihbw.init_level, &EventAction::Project)?;
    let mut summary = base_summary(&tuned, &run.final_state);
    summary.insert("objective_optimized".into(), optimized.objective);
    summary.insert(
        "objective_equal_spacing".into(),
        optimized.equal_spacing_objective,
    );
    summary.insert("evaluations".into(), optimized.evaluations as f64);
    for (k, t) in optimized.schedule.times().iter().enumerate() {
        summary.insert(format!("t{:02}", k + 1), *t);
    }
    let echo = serde_json::to_value(cfg).expect("config serializes");
    Ok(run
        .recorder
        .finish("super_zeno", &run.final_state, summary, echo, None))
}

/// Equal-spacing schedule for the configured pulse count.
pub fn ihbw_schedule(cfg: &IhbwConfig) -> Result<Schedule> {
    match (&cfg.event_times, cfg.pulse_count) {
        (Some(times), _) => Schedule::projections(cfg.total_time(), times),
        (None, 0) => Schedule::new(cfg.total_time(), Vec::new()),
        (None, n) => equal_spacing(n, cfg.total_time()),
    }
}
