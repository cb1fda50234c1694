//! Numerical tolerances shared by invariant checks.
//!
//! These are fixed; callers that need a looser check must name their own
//! threshold explicitly rather than edit these.

/// Max elementwise deviation for Hermiticity of inputs (Hamiltonians, states).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Max elementwise deviation of `U†U` from the identity.
pub const UNITARY_TOL: f64 = 1e-10;
/// Allowed deviation of a squared norm or a trace from one.
pub const NORM_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted for a density matrix.
pub const EIGENVALUE_FLOOR: f64 = -1e-9;
/// Idempotence, orthogonality and completeness of projector sets.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// Hermiticity allowed for integrator output.
pub const LINDBLAD_HERMITIAN_TOL: f64 = 1e-9;
/// Eigenvalue floor allowed for integrator output.
pub const LINDBLAD_EIGENVALUE_FLOOR: f64 = -1e-7;
/// Default trace drift limit for the fixed-step integrator.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-7;

/// Jacobi sweeps stop once the off-diagonal Frobenius mass drops below this
/// (relative to the Frobenius norm of the input, floored at 1).
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-14;

/// Outcome probabilities below this are treated as zero.
pub const OUTCOME_FLOOR: f64 = 1e-12;
