//! Cyclic complex Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Sweeps visit pivots in row-major order `(0,1), (0,2), …, (d-2,d-1)`, so
//! identical inputs give bit-identical outputs.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Result, ZenoError};
use crate::tolerance::{HERMITIAN_TOL, JACOBI_OFF_DIAGONAL};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `M = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V diag(f(λ)) V†`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let weights: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for (j, w) in weights.iter().enumerate() {
                scaled[(i, j)] *= w;
            }
        }
        scaled.mul_unchecked(&self.vectors.adjoint())
    }

    /// `exp(−iMt)`
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.map_spectrum(|l| Complex64::from_polar(1.0, -l * t))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| Complex64::new(l, 0.0))
    }
}

/// Diagonalizes a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let deviation = m.hermiticity_error();
    if deviation > HERMITIAN_TOL {
        return Err(ZenoError::NonHermitianInput { deviation });
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_DIAGONAL * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok(HermitianEig { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            sum += a[(p, q)].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}

/// Annihilates `a[p][q]` with `A ← J†AJ`, `V ← VJ` where
/// `J = [[c, s·e], [−s·ē, c]]` on the `(p, q)` plane and `e = a_pq/|a_pq|`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let mag = b.norm();
    if mag == 0.0 {
        return;
    }
    let phase = b / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let jpq = phase * s;
    let jqp = -phase.conj() * s;
    let n = a.dim();

    // A ← A J and V ← V J (column update)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * jqp;
        a[(k, q)] = akp * jpq + akq * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * c;
    }
    // A ← J† A (row update)
    let (cjqp, cjpq) = (jqp.conj(), jpq.conj());
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * cjqp;
        a[(q, k)] = apk * cjpq + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}
