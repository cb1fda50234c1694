//! Time evolution: exact unitary propagation, short-time survival algebra,
//! and a fixed-step RK4 Lindblad integrator.
//!
//! Units: ħ = 1, all frequencies are angular.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::qalg::{expm_hermitian, ComplexMatrix, DensityMatrix, StateVector};
use crate::tolerance::{HERMITIAN_TOL, NORM_TOL, TRACE_DRIFT_LIMIT};

/// A piecewise-constant stretch of Hamiltonian evolution.
#[derive(Debug, Clone)]
pub struct DriveSegment {
    hamiltonian: ComplexMatrix,
    duration: f64,
}

impl DriveSegment {
    pub fn new(hamiltonian: ComplexMatrix, duration: f64) -> Result<Self> {
        let deviation = hamiltonian.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(ZenoError::NonHermitianInput { deviation });
        }
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(ZenoError::InvalidDuration(duration));
        }
        Ok(Self {
            hamiltonian,
            duration,
        })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        Self::new(self.hamiltonian.clone(), duration)
    }
}

/// Lindblad jump operator `L` with rate `γ`.
#[derive(Debug, Clone)]
pub struct JumpOperator {
    operator: ComplexMatrix,
    rate: f64,
}

impl JumpOperator {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(ZenoError::NegativeRate(rate));
        }
        Ok(Self { operator, rate })
    }

    /// `|to⟩⟨from|` decay channel.
    pub fn decay(dim: usize, from: usize, to: usize, rate: f64) -> Result<Self> {
        for index in [from, to] {
            if index >= dim {
                return Err(ZenoError::IndexOutOfRange { index, dim });
            }
        }
        Self::new(ComplexMatrix::transition(dim, to, from), rate)
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Fixed-step RK4 settings. `steps_per_segment` RK4 steps are taken across
/// every segment passed to [`evolve_lindblad`], whatever its duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub steps_per_segment: usize,
    pub trace_drift_limit: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            steps_per_segment: 5000,
            trace_drift_limit: TRACE_DRIFT_LIMIT,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_segment == 0 {
            return Err(ZenoError::config(
                "integrator.steps_per_segment",
                "must be positive",
            ));
        }
        if !(self.trace_drift_limit > 0.0) {
            return Err(ZenoError::config(
                "integrator.trace_drift_limit",
                "must be positive",
            ));
        }
        Ok(())
    }
}

fn check_density_input(state: &DensityMatrix) -> Result<()> {
    let herm = state.matrix().hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(ZenoError::InvalidDensity(format!(
            "not Hermitian (deviation {herm:.3e})"
        )));
    }
    if (state.trace() - 1.0).abs() > NORM_TOL {
        return Err(ZenoError::InvalidDensity(format!(
            "trace {} differs from 1",
            state.trace()
        )));
    }
    Ok(())
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(ZenoError::DimensionMismatch { expected, actual })
    }
}

/// `ρ → UρU†` with `U = exp(−iHt)`.
pub fn evolve_unitary(state: &DensityMatrix, segment: &DriveSegment) -> Result<DensityMatrix> {
    check_dim(state.dim(), segment.hamiltonian.dim())?;
    check_density_input(state)?;
    let u = expm_hermitian(&segment.hamiltonian, segment.duration)?;
    Ok(DensityMatrix::from_matrix_unchecked(
        u.conjugate_unchecked(state.matrix()),
    ))
}

/// `S(t) = |⟨φ|exp(−iHt)|φ⟩|²`
pub fn survival_probability(h: &ComplexMatrix, phi: &StateVector, t: f64) -> Result<f64> {
    check_dim(h.dim(), phi.dim())?;
    phi.check_normalized()?;
    let u = expm_hermitian(h, t)?;
    let evolved = u.apply(phi.amplitudes())?;
    Ok(phi.inner(&evolved).norm_sqr())
}

/// `(ΔH)² = ⟨φ|H²|φ⟩ − ⟨φ|H|φ⟩²`
pub fn energy_variance(h: &ComplexMatrix, phi: &StateVector) -> Result<f64> {
    check_dim(h.dim(), phi.dim())?;
    let deviation = h.hermiticity_error();
    if deviation > HERMITIAN_TOL {
        return Err(ZenoError::NonHermitianInput { deviation });
    }
    phi.check_normalized()?;
    let h_phi = h.apply(phi.amplitudes())?;
    let second: f64 = h_phi.iter().map(|z| z.norm_sqr()).sum();
    let first = phi.inner(&h_phi).re;
    Ok(second - first * first)
}

/// Quadratic short-time approximation `1 − (ΔH)² t²`; only meaningful while
/// `(ΔH)·t ≪ 1`.
pub fn short_time_survival(h: &ComplexMatrix, phi: &StateVector, t: f64) -> Result<f64> {
    Ok(1.0 - energy_variance(h, phi)? * t * t)
}

/// Resonant Rabi population of the upper level, `sin²(Ωt/2)`.
pub fn rabi_population(omega: f64, t: f64) -> f64 {
    let s = (0.5 * omega * t).sin();
    s * s
}

/// Lindblad generator in the form `dρ/dt = −i(H_eff ρ − ρ H_eff†) + Σ γ LρL†`
/// with `H_eff = H − (i/2) Σ γ L†L`.
pub(crate) struct Liouvillian {
    dim: usize,
    h_eff: ComplexMatrix,
    jumps: Vec<(f64, ComplexMatrix, ComplexMatrix)>,
}

impl Liouvillian {
    pub(crate) fn new(h: &ComplexMatrix, jumps: &[JumpOperator]) -> Result<Self> {
        let dim = h.dim();
        let mut damping = ComplexMatrix::zeros(dim);
        let mut active = Vec::new();
        for jump in jumps {
            check_dim(dim, jump.operator.dim())?;
            if jump.rate < 0.0 {
                return Err(ZenoError::NegativeRate(jump.rate));
            }
            if jump.rate == 0.0 {
                continue;
            }
            let l_dag = jump.operator.adjoint();
            damping = &damping + &l_dag.mul_unchecked(&jump.operator).scale_real(jump.rate);
            active.push((jump.rate, jump.operator.clone(), l_dag));
        }
        let h_eff = h - &damping.scale(Complex64::new(0.0, 0.5));
        Ok(Self {
            dim,
            h_eff,
            jumps: active,
        })
    }

    /// Upper bound on the generator's spectral radius, from the induced
    /// ∞-norm of `ρ ↦ H_eff ρ − ρ H_eff† + Σ γ LρL†`. Used to size stable RK4
    /// steps.
    pub(crate) fn rate_scale(&self) -> f64 {
        let jump_sum: f64 = self
            .jumps
            .iter()
            .map(|(g, l, _)| g * max_row_sum(l) * max_col_sum(l))
            .sum();
        max_row_sum(&self.h_eff) + max_col_sum(&self.h_eff) + jump_sum
    }

    fn derivative(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let a = self.h_eff.mul_unchecked(rho);
        let mut out = ComplexMatrix::zeros(self.dim);
        let minus_i = Complex64::new(0.0, -1.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = minus_i * (a[(i, j)] - a[(j, i)].conj());
            }
        }
        for (rate, l, l_dag) in &self.jumps {
            let feed = l.mul_unchecked(rho).mul_unchecked(l_dag);
            for (o, f) in out.data_mut().iter_mut().zip(feed.as_slice()) {
                *o += f * rate;
            }
        }
        out
    }

    pub(crate) fn rk4(&self, rho: &ComplexMatrix, duration: f64, steps: usize) -> ComplexMatrix {
        let h = duration / steps as f64;
        let mut rho = rho.clone();
        for _ in 0..steps {
            let k1 = self.derivative(&rho);
            let k2 = self.derivative(&axpy(&rho, &k1, 0.5 * h));
            let k3 = self.derivative(&axpy(&rho, &k2, 0.5 * h));
            let k4 = self.derivative(&axpy(&rho, &k3, h));
            let w = h / 6.0;
            let data = rho.data_mut();
            for (idx, d) in data.iter_mut().enumerate() {
                *d += (k1.as_slice()[idx]
                    + k2.as_slice()[idx] * 2.0
                    + k3.as_slice()[idx] * 2.0
                    + k4.as_slice()[idx])
                    * w;
            }
        }
        rho
    }
}

fn max_row_sum(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_col_sum(m: &ComplexMatrix) -> f64 {
    max_row_sum(&m.adjoint())
}

fn axpy(y: &ComplexMatrix, x: &ComplexMatrix, a: f64) -> ComplexMatrix {
    let mut out = y.clone();
    for (o, &xi) in out.data_mut().iter_mut().zip(x.as_slice()) {
        *o += xi * a;
    }
    out
}

/// Integrates `dρ/dt = −i[H,ρ] + Σ γ(LρL† − ½{L†L,ρ})` over one segment with
/// fixed-step RK4. Trace drift beyond the configured limit is an error.
pub fn evolve_lindblad(
    state: &DensityMatrix,
    segment: &DriveSegment,
    jumps: &[JumpOperator],
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    cfg.validate()?;
    check_dim(state.dim(), segment.hamiltonian.dim())?;
    let liouvillian = Liouvillian::new(&segment.hamiltonian, jumps)?;
    let out = liouvillian.rk4(state.matrix(), segment.duration, cfg.steps_per_segment);
    finish_lindblad(out, cfg.trace_drift_limit)
}

pub(crate) fn finish_lindblad(out: ComplexMatrix, limit: f64) -> Result<DensityMatrix> {
    let drift = (out.trace().re - 1.0).abs();
    if !(drift <= limit) {
        return Err(ZenoError::TraceDriftExceeded { drift, limit });
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}
