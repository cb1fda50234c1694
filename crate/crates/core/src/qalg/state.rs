use num_complex::Complex64;

use super::eig::hermitian_eig;
use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Result, ZenoError};
use crate::tolerance::{EIGENVALUE_FLOOR, HERMITIAN_TOL, NORM_TOL};

/// Pure state over a `d`-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes as-is; normalization is checked by the operations that need it.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(ZenoError::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, level: usize) -> Result<Self> {
        if level >= dim {
            return Err(ZenoError::IndexOutOfRange { index: level, dim });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[level] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub(crate) fn check_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(ZenoError::NotNormalized {
                norm_sqr: self.norm_sqr(),
            })
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨φ|M|φ⟩`
    pub fn expectation(&self, m: &ComplexMatrix) -> Result<Complex64> {
        let mv = m.apply(&self.amplitudes)?;
        Ok(self.inner(&mv))
    }
}

/// Diagnostics of how far a matrix is from being a valid density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCheck {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityCheck {
    pub fn within(&self, hermitian_tol: f64, trace_tol: f64, eigen_floor: f64) -> bool {
        self.hermiticity_error <= hermitian_tol
            && self.trace_error <= trace_tol
            && self.min_eigenvalue >= eigen_floor
    }
}

/// Density matrix. Construction through [`DensityMatrix::new`] enforces
/// Hermiticity (1e−10), unit trace (1e−9) and an eigenvalue floor of −1e−9.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self { matrix };
        let check = rho.check();
        if check.hermiticity_error > HERMITIAN_TOL {
            return Err(ZenoError::InvalidDensity(format!(
                "not Hermitian (deviation {:.3e})",
                check.hermiticity_error
            )));
        }
        if check.trace_error > NORM_TOL {
            return Err(ZenoError::InvalidDensity(format!(
                "trace {} differs from 1",
                rho.trace()
            )));
        }
        if check.min_eigenvalue < EIGENVALUE_FLOOR {
            return Err(ZenoError::InvalidDensity(format!(
                "negative eigenvalue {:.3e}",
                check.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    /// Skips validation; used for channel outputs whose validity follows from
    /// the channel and is asserted by the tests.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|φ⟩⟨φ|`
    pub fn from_state(state: &StateVector) -> Result<Self> {
        state.check_normalized()?;
        let amps = state.amplitudes();
        let n = amps.len();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = amps[i] * amps[j].conj();
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn basis(dim: usize, level: usize) -> Result<Self> {
        Self::from_state(&StateVector::basis(dim, level)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        let n = self.dim();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                sum += (self.matrix[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        sum
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn population(&self, level: usize) -> f64 {
        self.matrix[(level, level)].re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix.hermitian_part())?.values)
    }

    pub fn check(&self) -> DensityCheck {
        let min_eigenvalue = self
            .eigenvalues()
            .ok()
            .and_then(|v| v.first().copied())
            .unwrap_or(f64::NEG_INFINITY);
        DensityCheck {
            hermiticity_error: self.matrix.hermiticity_error(),
            trace_error: (self.matrix.trace() - Complex64::new(1.0, 0.0)).norm(),
            min_eigenvalue,
        }
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ground_state_density() {
        let rho = DensityMatrix::basis(2, 0).unwrap();
        assert_eq!(rho.matrix(), &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn plus_state_density() {
        let s = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        let rho = DensityMatrix::from_state(&s).unwrap();
        for z in rho.matrix().as_slice() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn plus_i_state_density() {
        let s = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap();
        let rho = DensityMatrix::from_state(&s).unwrap();
        let m = rho.matrix();
        assert!((m[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m[(1, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m[(0, 1)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((m[(1, 0)] - c(0.0, 0.5)).norm() < 1e-15);
        assert!((rho.trace() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let s = StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            DensityMatrix::from_state(&s),
            Err(ZenoError::NotNormalized { .. })
        ));
    }

    #[test]
    fn validation_errors() {
        let bad_trace = ComplexMatrix::from_real_diagonal(&[0.5, 0.4]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = ComplexMatrix::from_real_diagonal(&[1.1, -0.1]);
        assert!(DensityMatrix::new(negative).is_err());
        let non_herm = ComplexMatrix::from_real_rows(&[vec![0.5, 0.1], vec![0.0, 0.5]]).unwrap();
        assert!(DensityMatrix::new(non_herm).is_err());
        let ok = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(DensityMatrix::new(ok).is_ok());
    }

    #[test]
    fn density_eigenvalues_sum_to_one() {
        let s = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let pure = DensityMatrix::from_state(&s).unwrap();
        let mixed = DensityMatrix::new(
            &pure.matrix().scale_real(0.3) + &ComplexMatrix::from_real_diagonal(&[0.7, 0.0]),
        )
        .unwrap();
        let sum: f64 = mixed.eigenvalues().unwrap().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}
