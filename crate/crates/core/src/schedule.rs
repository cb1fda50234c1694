//! Measurement/kick schedules inside a drive interval `[0, T]`, the
//! closed-form Zeno predictions, and a deterministic schedule optimizer.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Result, ZenoError};
use crate::measure::{KickOperator, MeasurementStrength};

/// What happens at a scheduled time.
#[derive(Debug, Clone)]
pub enum EventKind {
    /// Instantaneous projective measurement.
    InstantProjection,
    /// Measurement pulse of finite length starting at the event time.
    FinitePulse {
        duration: f64,
        strength: MeasurementStrength,
    },
    UnitaryKick(KickOperator),
}

#[derive(Debug, Clone)]
pub struct ScheduleEvent {
    pub time: f64,
    pub kind: EventKind,
}

impl ScheduleEvent {
    pub fn projection(time: f64) -> Self {
        Self {
            time,
            kind: EventKind::InstantProjection,
        }
    }

    /// Time at which the event is over.
    pub fn end_time(&self) -> f64 {
        match self.kind {
            EventKind::FinitePulse { duration, .. } => self.time + duration,
            _ => self.time,
        }
    }
}

/// Rounding allowance (relative to `T`) when checking pulse overlap.
const OVERLAP_SLACK: f64 = 1e-12;

/// Time-ordered events inside `[0, total_time]`.
#[derive(Debug, Clone)]
pub struct Schedule {
    total_time: f64,
    events: Vec<ScheduleEvent>,
}

impl Schedule {
    /// Validates bounds, strict time ordering and pulse overlap.
    pub fn new(total_time: f64, events: Vec<ScheduleEvent>) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(ZenoError::InvalidDuration(total_time));
        }
        let invalid = |msg: String| Err(ZenoError::InvalidSchedule(msg));
        for (k, ev) in events.iter().enumerate() {
            if !(ev.time >= 0.0 && ev.time <= total_time) {
                return invalid(format!("event {k} at t={} outside [0, {total_time}]", ev.time));
            }
            if let EventKind::FinitePulse { duration, .. } = ev.kind {
                if !(duration >= 0.0) || ev.end_time() > total_time * (1.0 + OVERLAP_SLACK) {
                    return invalid(format!(
                        "pulse {k} of duration {duration} does not fit in [0, {total_time}]"
                    ));
                }
            }
            if k > 0 {
                let prev = &events[k - 1];
                if !(ev.time > prev.time) {
                    return invalid(format!("event {k} is not strictly after event {}", k - 1));
                }
                if ev.time < prev.end_time() - OVERLAP_SLACK * total_time {
                    return invalid(format!("event {k} overlaps pulse {}", k - 1));
                }
            }
        }
        Ok(Self { total_time, events })
    }

    /// Instant projections at the given times.
    pub fn projections(total_time: f64, times: &[f64]) -> Result<Self> {
        Self::new(
            total_time,
            times.iter().map(|&t| ScheduleEvent::projection(t)).collect(),
        )
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn events(&self) -> &[ScheduleEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }
}

/// `n` instant projections at `T/n, 2T/n, …, T`.
pub fn equal_spacing(n: usize, total_time: f64) -> Result<Schedule> {
    if n == 0 {
        return Err(ZenoError::InvalidCount(n));
    }
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(ZenoError::InvalidDuration(total_time));
    }
    Schedule::projections(total_time, &equal_times(n, total_time))
}

pub(crate) fn equal_times(n: usize, total_time: f64) -> Vec<f64> {
    (1..=n)
        .map(|k| total_time * k as f64 / n as f64)
        .collect()
}

fn int_pow(base: f64, n: usize) -> f64 {
    match i32::try_from(n) {
        Ok(k) => base.powi(k),
        Err(_) => base.powf(n as f64),
    }
}

/// Upper-level population after a resonant pi-pulse interrupted by `n`
/// equally spaced instantaneous projections: `½[1 − cosⁿ(π/n)]`.
pub fn zeno_survival_ideal(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(ZenoError::InvalidCount(n));
    }
    if n < 3 {
        return Ok(0.5 * (1.0 - int_pow((PI / n as f64).cos(), n)));
    }
    // cos x = 1 − 2 sin²(x/2); the log/expm1 form avoids cancellation for large n.
    let s = (0.5 * PI / n as f64).sin();
    let ln_cos = (-2.0 * s * s).ln_1p();
    Ok(-0.5 * (n as f64 * ln_cos).exp_m1())
}

/// `(ΔH)·T/n` at or below this marks the product formula as valid.
pub const SURVIVAL_PRODUCT_VALIDITY: f64 = 0.25;

/// Value of the interrupted-evolution product `[1 − (ΔH)²(T/n)²]ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalProduct {
    pub value: f64,
    /// Whether `(ΔH)·T/n ≤` [`SURVIVAL_PRODUCT_VALIDITY`], the regime where
    /// the quadratic short-time law underlying the product holds.
    pub valid: bool,
}

/// `[1 − (ΔH)²(T/n)²]ⁿ`, returned even outside its validity regime (where it
/// may be negative).
pub fn survival_product(n: usize, variance: f64, total_time: f64) -> Result<SurvivalProduct> {
    if n == 0 {
        return Err(ZenoError::InvalidCount(n));
    }
    let step = total_time / n as f64;
    let x = variance * step * step;
    let value = if (0.0..1.0).contains(&x) {
        (n as f64 * (-x).ln_1p()).exp()
    } else {
        int_pow(1.0 - x, n)
    };
    let valid = variance >= 0.0 && variance.sqrt() * step.abs() <= SURVIVAL_PRODUCT_VALIDITY;
    Ok(SurvivalProduct { value, valid })
}

/// Knobs of [`optimize_schedule_with`].
#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    /// Maximum number of ordered grid candidates evaluated in the coarse phase.
    pub grid_budget: u128,
    /// Refinement stops once the coordinate step falls below this fraction of `T`.
    pub min_step_fraction: f64,
    /// Hard cap on objective evaluations in the refinement phase.
    pub max_refine_evaluations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_budget: 20_000,
            min_step_fraction: 1e-10,
            max_refine_evaluations: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizedSchedule {
    pub schedule: Schedule,
    pub objective: f64,
    pub equal_spacing_objective: f64,
    pub evaluations: usize,
}

/// [`optimize_schedule_with`] using the default configuration.
pub fn optimize_schedule<F>(n: usize, total_time: f64, objective: F) -> Result<OptimizedSchedule>
where
    F: Fn(&Schedule) -> Result<f64> + Sync,
{
    optimize_schedule_with(n, total_time, &OptimizerConfig::default(), objective)
}

/// Places `n` instant projections in `(0, T]` to minimize `objective`.
///
/// A coarse search enumerates every ordered choice of times from the grid
/// `{jT/G : j = 1..G}` with `G = n·m` and `m` as large as the grid budget
/// allows; equal spacing is always one of the candidates. The best candidate
/// is then refined by coordinate descent with a halving step. The result is
/// never worse than equal spacing.
pub fn optimize_schedule_with<F>(
    n: usize,
    total_time: f64,
    cfg: &OptimizerConfig,
    objective: F,
) -> Result<OptimizedSchedule>
where
    F: Fn(&Schedule) -> Result<f64> + Sync,
{
    if n == 0 {
        return Err(ZenoError::InvalidCount(n));
    }
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(ZenoError::InvalidDuration(total_time));
    }
    let eval = |times: &[f64]| -> Result<f64> {
        let schedule = Schedule::projections(total_time, times)?;
        let value = objective(&schedule)
            .map_err(|e| ZenoError::ObjectiveEvaluationFailed(e.to_string()))?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ZenoError::ObjectiveEvaluationFailed(format!(
                "objective returned {value}"
            )))
        }
    };

    let per_slot = grid_multiplier(n, cfg.grid_budget);
    let grid = n * per_slot;
    let candidates = ordered_subsets(grid, n);
    let to_times = |idx: &[usize]| -> Vec<f64> {
        idx.iter()
            .map(|&j| total_time * j as f64 / grid as f64)
            .collect()
    };
    let values: Vec<f64> = candidates
        .par_iter()
        .map(|idx| eval(&to_times(idx)))
        .collect::<Result<_>>()?;
    let mut evaluations = values.len();

    let equal_idx: Vec<usize> = (1..=n).map(|k| k * per_slot).collect();
    let equal_pos = candidates
        .iter()
        .position(|c| *c == equal_idx)
        .expect("equal spacing is a grid candidate");
    let equal_spacing_objective = values[equal_pos];

    // first minimum wins ties, so the result does not depend on evaluation order
    let (best_pos, mut best) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let mut times = to_times(&candidates[best_pos]);

    let mut step = 0.5 * total_time / grid as f64;
    let min_step = cfg.min_step_fraction * total_time;
    let mut refine_evals = 0usize;
    'refine: while step >= min_step {
        let mut improved = false;
        for i in 0..n {
            for dir in [-1.0, 1.0] {
                let candidate = times[i] + dir * step;
                let lower = if i == 0 { 0.0 } else { times[i - 1] };
                let feasible = candidate > lower
                    && if i + 1 == n {
                        candidate <= total_time
                    } else {
                        candidate < times[i + 1]
                    };
                if !feasible {
                    continue;
                }
                let mut trial = times.clone();
                trial[i] = candidate;
                let value = eval(&trial)?;
                refine_evals += 1;
                if value < best {
                    best = value;
                    times = trial;
                    improved = true;
                }
                if refine_evals >= cfg.max_refine_evaluations {
                    break 'refine;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    evaluations += refine_evals;

    Ok(OptimizedSchedule {
        schedule: Schedule::projections(total_time, &times)?,
        objective: best,
        equal_spacing_objective,
        evaluations,
    })
}

/// Largest `m ≥ 1` with `C(n·m, n) ≤ budget`.
fn grid_multiplier(n: usize, budget: u128) -> usize {
    let mut m = 1;
    while binomial_at_most((m + 1) * n, n, budget).is_some() {
        m += 1;
    }
    m
}

fn binomial_at_most(g: usize, k: usize, budget: u128) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (g - i) as u128 / (i + 1) as u128;
        if c > budget {
            return None;
        }
    }
    Some(c)
}

/// All strictly increasing `k`-tuples drawn from `1..=g`, in lexicographic order.
fn ordered_subsets(g: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=k).collect();
    loop {
        out.push(current.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < g - (k - 1 - i) {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_spacing_examples() {
        let s = equal_spacing(2, PI).unwrap();
        assert_eq!(s.times(), vec![PI / 2.0, PI]);
        assert_eq!(equal_spacing(1, 1.0).unwrap().times(), vec![1.0]);
        assert_eq!(equal_spacing(4, 2.0).unwrap().times(), vec![0.5, 1.0, 1.5, 2.0]);
        assert!(matches!(equal_spacing(0, 1.0), Err(ZenoError::InvalidCount(0))));
        assert!(matches!(equal_spacing(3, -1.0), Err(ZenoError::InvalidDuration(_))));
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::projections(1.0, &[0.5, 0.5]).is_err());
        assert!(Schedule::projections(1.0, &[0.6, 0.5]).is_err());
        assert!(Schedule::projections(1.0, &[1.5]).is_err());
        assert!(Schedule::projections(0.0, &[]).is_err());
        let pulse = |time, duration| ScheduleEvent {
            time,
            kind: EventKind::FinitePulse {
                duration,
                strength: MeasurementStrength::FULL,
            },
        };
        assert!(Schedule::new(1.0, vec![pulse(0.2, 0.1), pulse(0.3, 0.1)]).is_ok());
        assert!(Schedule::new(1.0, vec![pulse(0.2, 0.2), pulse(0.3, 0.1)]).is_err());
        assert!(Schedule::new(1.0, vec![pulse(0.95, 0.1)]).is_err());
        assert!(Schedule::new(1.0, vec![pulse(0.2, -0.1)]).is_err());
    }

    // ½(1 − cosⁿ(π/n)) at 50 significant digits
    const IDEAL: [(usize, f64); 8] = [
        (1, 1.0),
        (2, 0.5),
        (3, 0.4375),
        (4, 0.375),
        (8, 0.234_604_978_527_522_34),
        (16, 0.133_433_279_726_338_37),
        (32, 0.071_561_515_793_080_361),
        (64, 0.037_118_617_197_987_956),
    ];

    #[test]
    fn ideal_zeno_values() {
        for (n, expected) in IDEAL {
            assert!((zeno_survival_ideal(n).unwrap() - expected).abs() < 1e-14, "n={n}");
        }
        assert_eq!(zeno_survival_ideal(1).unwrap(), 1.0);
        assert_eq!(zeno_survival_ideal(2).unwrap(), 0.5);
        assert!(zeno_survival_ideal(0).is_err());
    }

    #[test]
    fn ideal_zeno_monotone_and_asymptotic() {
        for n in 1..512 {
            assert!(zeno_survival_ideal(n + 1).unwrap() < zeno_survival_ideal(n).unwrap());
        }
        let n = 4096;
        let scaled = n as f64 * zeno_survival_ideal(n).unwrap();
        assert!((scaled - PI * PI / 4.0).abs() < 0.05);
    }

    #[test]
    fn survival_product_examples() {
        for n in [1, 7, 1000] {
            assert_eq!(survival_product(n, 0.0, 3.0).unwrap().value, 1.0);
        }
        // 50-digit evaluation of (1 − 0.25(π/10)²)¹⁰
        let p = survival_product(10, 0.25, PI).unwrap();
        assert!((p.value - 0.778_929_169_799_066_49).abs() < 1e-14);
        assert!(p.valid);
        let far = survival_product(1_000_000, 0.25, PI).unwrap();
        assert!((far.value - 1.0).abs() < 1e-5);
        let bad = survival_product(1, 4.0, 1.0).unwrap();
        assert_eq!(bad.value, -3.0);
        assert!(!bad.valid);
        assert!(survival_product(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(grid_multiplier(1, 20_000), 20_000);
        assert_eq!(grid_multiplier(2, 20_000), 100);
        assert_eq!(grid_multiplier(3, 20_000), 16);
        assert_eq!(grid_multiplier(64, 20_000), 1);
        assert_eq!(ordered_subsets(4, 2).len(), 6);
        assert_eq!(ordered_subsets(5, 5), vec![vec![1, 2, 3, 4, 5]]);
    }

    #[test]
    fn optimizer_finds_interior_minimum() {
        // minimum of Σ(t_i − c_i)² at c = (0.3, 0.55)
        let result = optimize_schedule(2, 1.0, |s: &Schedule| {
            let t = s.times();
            Ok((t[0] - 0.3).powi(2) + (t[1] - 0.55).powi(2))
        })
        .unwrap();
        let t = result.schedule.times();
        assert!((t[0] - 0.3).abs() < 1e-6 && (t[1] - 0.55).abs() < 1e-6);
        assert!(result.objective <= result.equal_spacing_objective);
    }

    #[test]
    fn optimizer_reports_objective_failure() {
        let err = optimize_schedule(1, 1.0, |_: &Schedule| Err(ZenoError::DegenerateOutcome));
        assert!(matches!(err, Err(ZenoError::ObjectiveEvaluationFailed(_))));
        let nan = optimize_schedule(1, 1.0, |_: &Schedule| Ok(f64::NAN));
        assert!(matches!(nan, Err(ZenoError::ObjectiveEvaluationFailed(_))));
        assert!(matches!(
            optimize_schedule(0, 1.0, |_: &Schedule| Ok(0.0)),
            Err(ZenoError::InvalidCount(0))
        ));
    }
}
