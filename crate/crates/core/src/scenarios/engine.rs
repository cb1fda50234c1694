use crate::error::Result;
use crate::qalg::{hermitian_eig, ComplexMatrix, DensityMatrix};

use super::result::Recorder;

struct PlanSegment {
    start: f64,
    end: f64,
    /// Propagator over one sub-step of the segment.
    step: ComplexMatrix,
    sub_steps: usize,
    /// Index of the event that fires at `end`, if any.
    event: Option<usize>,
}

/// Piecewise-unitary evolution under a fixed Hamiltonian, interrupted by
/// events at given times. All propagators are computed up front, so one plan
/// can be executed many times (and from many threads).
pub(crate) struct UnitaryPlan {
    segments: Vec<PlanSegment>,
}

impl UnitaryPlan {
    /// `event_times` must be sorted and lie in `[0, total_time]`.
    pub(crate) fn new(
        h: &ComplexMatrix,
        event_times: &[f64],
        total_time: f64,
        samples_per_segment: usize,
    ) -> Result<Self> {
        let eig = hermitian_eig(h)?;
        let samples = samples_per_segment.max(1);
        let mut segments = Vec::with_capacity(event_times.len() + 1);
        let mut start = 0.0;
        let mut push = |start: f64, end: f64, event: Option<usize>| {
            let duration = end - start;
            let sub_steps = if duration > 0.0 { samples } else { 0 };
            let step = if sub_steps > 0 {
                eig.propagator(duration / sub_steps as f64)
            } else {
                ComplexMatrix::identity(h.dim())
            };
            segments.push(PlanSegment {
                start,
                end,
                step,
                sub_steps,
                event,
            });
        };
        for (k, &t) in event_times.iter().enumerate() {
            push(start, t, Some(k));
            start = t;
        }
        if start < total_time {
            push(start, total_time, None);
        }
        Ok(Self { segments })
    }

    pub(crate) fn execute<F>(
        &self,
        rho0: DensityMatrix,
        mut on_event: F,
        mut recorder: Option<&mut Recorder>,
    ) -> Result<DensityMatrix>
    where
        F: FnMut(usize, &DensityMatrix) -> Result<DensityMatrix>,
    {
        let mut rho = rho0;
        if let Some(rec) = recorder.as_deref_mut() {
            rec.record(0.0, &rho);
        }
        for seg in &self.segments {
            let dt = (seg.end - seg.start) / seg.sub_steps.max(1) as f64;
            for s in 1..=seg.sub_steps {
                rho = DensityMatrix::from_matrix_unchecked(seg.step.conjugate_unchecked(rho.matrix()));
                if let Some(rec) = recorder.as_deref_mut() {
                    let t = if s == seg.sub_steps {
                        seg.end
                    } else {
                        seg.start + dt * s as f64
                    };
                    rec.record(t, &rho);
                }
            }
            if let Some(k) = seg.event {
                rho = on_event(k, &rho)?;
                if let Some(rec) = recorder.as_deref_mut() {
                    rec.replace_last(seg.end, &rho);
                }
            }
        }
        Ok(rho)
    }
}
