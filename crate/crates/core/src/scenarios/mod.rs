//! End-to-end experiments built from the dynamics, measurement and schedule
//! layers. Every runner is a pure function of its config (and seed, where
//! sampling is involved) returning an [`ExperimentResult`].

mod engine;
mod ihbw;
mod reservoir;
mod result;
mod subspace;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::qalg::ComplexMatrix;

pub use ihbw::{
    equal_spacing_prediction, ideal_objective, ideal_transition_probability, ihbw_schedule,
    rabi_hamiltonian, run_bangbang, run_ihbw_full, run_ihbw_ideal, run_partial, run_reversed,
    run_selective, run_super_zeno, BangBangConfig, IhbwConfig, IhbwMode, KickSpec, NamedKick,
    PartialConfig, SelectiveConfig, SuperZenoConfig,
};
pub use reservoir::{reservoir_hamiltonian, run_unstable, ReservoirConfig};
pub use result::{Diagnostics, ExperimentResult, LevelSeries};
pub use subspace::{run_zeno_subspace, three_level_chain, SubspaceConfig};

/// A square complex matrix written as row lists of real and (optional)
/// imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let re = (0..d).map(|i| (0..d).map(|j| m[(i, j)].re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| m[(i, j)].im).collect()).collect();
        let has_im = im.iter().flatten().any(|&x| x != 0.0);
        Self {
            re,
            im: has_im.then_some(im),
        }
    }

    /// Builds the matrix, reporting shape problems against `field`.
    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix> {
        let d = self.re.len();
        if d == 0 {
            return Err(ZenoError::config(field, "matrix is empty"));
        }
        let square = |rows: &[Vec<f64>]| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !square(&self.re) {
            return Err(ZenoError::config(field, format!("`re` must be {d}×{d}")));
        }
        if let Some(im) = &self.im {
            if !square(im) {
                return Err(ZenoError::config(field, format!("`im` must be {d}×{d}")));
            }
        }
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let im = self.im.as_ref().map_or(0.0, |im| im[i][j]);
                let (re, im) = (self.re[i][j], im);
                if !re.is_finite() || !im.is_finite() {
                    return Err(ZenoError::config(field, "entries must be finite"));
                }
                m[(i, j)] = num_complex::Complex64::new(re, im);
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_spec_round_trip() {
        let m = ComplexMatrix::pauli_y();
        let spec = MatrixSpec::from_matrix(&m);
        assert!(spec.im.is_some());
        assert_eq!(spec.to_matrix("h").unwrap(), m);
        let real = MatrixSpec::from_matrix(&ComplexMatrix::pauli_x());
        assert!(real.im.is_none());
    }

    #[test]
    fn ragged_matrix_names_field() {
        let spec = MatrixSpec {
            re: vec![vec![0.0, 1.0], vec![1.0]],
            im: None,
        };
        let err = spec.to_matrix("hamiltonian").unwrap_err();
        assert!(err.to_string().contains("hamiltonian"));
    }
}
