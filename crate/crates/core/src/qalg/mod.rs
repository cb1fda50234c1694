//! Small dense complex linear algebra: matrices, states, Hermitian
//! eigendecomposition and the exact propagator `exp(−iHt)`.

mod eig;
mod matrix;
mod state;

pub use eig::{hermitian_eig, HermitianEig};
pub use matrix::ComplexMatrix;
pub use state::{DensityCheck, DensityMatrix, StateVector};

use crate::error::{Result, ZenoError};

/// `exp(−iHt)` for Hermitian `H`, via eigendecomposition (no series truncation).
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(ZenoError::InvalidDuration(t));
    }
    let eig = hermitian_eig(h)?;
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(h.dim()));
    }
    Ok(eig.propagator(t))
}

/// `|φ⟩⟨φ|` for a normalized state.
pub fn density_from_state(state: &StateVector) -> Result<DensityMatrix> {
    DensityMatrix::from_state(state)
}
