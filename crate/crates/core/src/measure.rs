//! Measurement channels: non-selective projection, sampled selective
//! collapse, partial-strength dephasing, subspace projectors and unitary kicks.
//!
//! The partial-strength channel is the convex mixture
//! `(1−η)ρ + η Σ P_k ρ P_k`. It interpolates between no measurement (η = 0)
//! and full projection (η = 1); it is a stand-in for a weak measurement whose
//! physical mechanism (pulse shortening, detuning, intensity) is left open.

use rand::Rng;

use crate::error::{Result, ZenoError};
use crate::qalg::{ComplexMatrix, DensityMatrix};
use crate::tolerance::{OUTCOME_FLOOR, PROJECTOR_TOL, UNITARY_TOL};

/// Complete set of mutually orthogonal projectors.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    projectors: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl ProjectorSet {
    pub fn new(projectors: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        let invalid = |msg: String| Err(ZenoError::InvalidProjectorSet(msg));
        if projectors.is_empty() {
            return invalid("no projectors".into());
        }
        if labels.len() != projectors.len() {
            return invalid(format!(
                "{} labels for {} projectors",
                labels.len(),
                projectors.len()
            ));
        }
        let dim = projectors[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (k, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return invalid(format!("projector {k} has dimension {}", p.dim()));
            }
            if !p.is_hermitian(PROJECTOR_TOL) {
                return invalid(format!("projector {k} is not Hermitian"));
            }
            if (p * p).max_abs_diff(p) > PROJECTOR_TOL {
                return invalid(format!("projector {k} is not idempotent"));
            }
            for (j, q) in projectors.iter().enumerate().skip(k + 1) {
                if (p * q).max_abs_diff(&ComplexMatrix::zeros(dim)) > PROJECTOR_TOL {
                    return invalid(format!("projectors {k} and {j} are not orthogonal"));
                }
            }
            sum = &sum + p;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > PROJECTOR_TOL {
            return invalid("projectors do not sum to the identity".into());
        }
        Ok(Self { projectors, labels })
    }

    /// One rank-1 projector per basis level, labelled `1..=dim`.
    pub fn computational_basis(dim: usize) -> Self {
        let projectors = (0..dim).map(|k| ComplexMatrix::transition(dim, k, k)).collect();
        let labels = (1..=dim).map(|k| format!("level{k}")).collect();
        Self { projectors, labels }
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(ZenoError::DimensionMismatch {
                expected: self.dim(),
                actual: rho.dim(),
            });
        }
        Ok(())
    }

    /// `Tr(P_k ρ)` for every outcome.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.check_dim(rho)?;
        Ok(self
            .projectors
            .iter()
            .map(|p| p.mul_unchecked(rho.matrix()).trace().re)
            .collect())
    }
}

/// Measurement strength `η ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MeasurementStrength(f64);

impl MeasurementStrength {
    pub const FULL: Self = Self(1.0);

    pub fn new(eta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&eta) {
            Ok(Self(eta))
        } else {
            Err(ZenoError::StrengthOutOfRange(eta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Unitary applied instantaneously (bang-bang pulse).
#[derive(Debug, Clone)]
pub struct KickOperator {
    unitary: ComplexMatrix,
}

impl KickOperator {
    pub fn new(unitary: ComplexMatrix) -> Result<Self> {
        let deviation = unitary.unitarity_error();
        if deviation > UNITARY_TOL {
            return Err(ZenoError::NonUnitaryKick { deviation });
        }
        Ok(Self { unitary })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }
}

/// One sampled measurement outcome.
#[derive(Debug, Clone)]
pub struct OutcomeRecord {
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state: DensityMatrix,
}

/// `ρ → Σ P_k ρ P_k`
pub fn project_nonselective(rho: &DensityMatrix, set: &ProjectorSet) -> Result<DensityMatrix> {
    set.check_dim(rho)?;
    let mut out = ComplexMatrix::zeros(rho.dim());
    for p in &set.projectors {
        out = &out + &p.mul_unchecked(rho.matrix()).mul_unchecked(p);
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Every branch `(k, p_k, P_k ρ P_k / p_k)` with `p_k` above the outcome floor.
pub fn selective_branches(rho: &DensityMatrix, set: &ProjectorSet) -> Result<Vec<OutcomeRecord>> {
    let probs = set.probabilities(rho)?;
    if probs.iter().all(|&p| p < OUTCOME_FLOOR) {
        return Err(ZenoError::DegenerateOutcome);
    }
    Ok(probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p >= OUTCOME_FLOOR)
        .map(|(k, &p)| collapse(rho, set, k, p))
        .collect())
}

fn collapse(rho: &DensityMatrix, set: &ProjectorSet, k: usize, probability: f64) -> OutcomeRecord {
    let p = &set.projectors[k];
    let post = p
        .mul_unchecked(rho.matrix())
        .mul_unchecked(p)
        .scale_real(1.0 / probability);
    OutcomeRecord {
        outcome_index: k,
        probability,
        post_state: DensityMatrix::from_matrix_unchecked(post),
    }
}

/// Samples outcome `k` with probability `Tr(P_k ρ)` and returns the
/// renormalized post-measurement state.
pub fn measure_selective<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    set: &ProjectorSet,
    rng: &mut R,
) -> Result<OutcomeRecord> {
    let probs = set.probabilities(rho)?;
    let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if probs.iter().all(|&p| p < OUTCOME_FLOOR) {
        return Err(ZenoError::DegenerateOutcome);
    }
    let draw = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    let mut chosen = None;
    for (k, &p) in probs.iter().enumerate() {
        if p < OUTCOME_FLOOR {
            continue;
        }
        chosen = Some(k);
        cumulative += p;
        if draw < cumulative {
            break;
        }
    }
    // `chosen` is the last eligible outcome if rounding left `draw` past the end.
    let k = chosen.ok_or(ZenoError::DegenerateOutcome)?;
    Ok(collapse(rho, set, k, probs[k]))
}

/// `(1−η)ρ + η Σ P_k ρ P_k`
pub fn partial_collapse(
    rho: &DensityMatrix,
    set: &ProjectorSet,
    strength: MeasurementStrength,
) -> Result<DensityMatrix> {
    let projected = project_nonselective(rho, set)?;
    let eta = strength.value();
    if eta == 1.0 {
        return Ok(projected);
    }
    if eta == 0.0 {
        return Ok(rho.clone());
    }
    let mixed = &rho.matrix().scale_real(1.0 - eta) + &projected.matrix().scale_real(eta);
    Ok(DensityMatrix::from_matrix_unchecked(mixed))
}

/// `ρ → KρK†`
pub fn apply_kick(rho: &DensityMatrix, kick: &KickOperator) -> Result<DensityMatrix> {
    if rho.dim() != kick.unitary.dim() {
        return Err(ZenoError::DimensionMismatch {
            expected: kick.unitary.dim(),
            actual: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_matrix_unchecked(
        kick.unitary.conjugate_unchecked(rho.matrix()),
    ))
}

/// `{P, I − P}` with `P` the projector onto the listed basis levels.
pub fn subspace_projectors(dim: usize, subspace: &[usize]) -> Result<ProjectorSet> {
    let mut inside = vec![false; dim];
    for &index in subspace {
        if index >= dim {
            return Err(ZenoError::IndexOutOfRange { index, dim });
        }
        inside[index] = true;
    }
    let count = inside.iter().filter(|&&b| b).count();
    if count == 0 {
        return Err(ZenoError::EmptySubspace);
    }
    if count == dim {
        return Err(ZenoError::FullSubspace);
    }
    let p: Vec<f64> = inside.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let q: Vec<f64> = p.iter().map(|x| 1.0 - x).collect();
    ProjectorSet::new(
        vec![
            ComplexMatrix::from_real_diagonal(&p),
            ComplexMatrix::from_real_diagonal(&q),
        ],
        vec!["subspace".into(), "complement".into()],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn plus() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap())
            .unwrap()
    }

    #[test]
    fn diagonal_state_unchanged_by_projection() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap();
        let out = project_nonselective(&rho, &ProjectorSet::computational_basis(2)).unwrap();
        assert!(out.max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn projection_kills_coherences() {
        let z = ProjectorSet::computational_basis(2);
        let out = project_nonselective(&plus(), &z).unwrap();
        assert_eq!(out.matrix(), &ComplexMatrix::from_real_diagonal(&[0.5, 0.5]));
        let twice = project_nonselective(&out, &z).unwrap();
        assert!(twice.max_abs_diff(&out) < 1e-12);
    }

    #[test]
    fn projection_dimension_mismatch() {
        let z = ProjectorSet::computational_basis(3);
        assert!(matches!(
            project_nonselective(&plus(), &z),
            Err(ZenoError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projector_set_validation() {
        let p = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let labels = vec!["a".to_string(), "b".to_string()];
        // incomplete
        assert!(ProjectorSet::new(vec![p.clone(), ComplexMatrix::zeros(2)], labels.clone()).is_err());
        // not idempotent
        let half = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        assert!(ProjectorSet::new(vec![half.clone(), half], labels.clone()).is_err());
        // overlapping
        assert!(ProjectorSet::new(vec![p.clone(), ComplexMatrix::identity(2)], labels.clone()).is_err());
        // label count
        assert!(ProjectorSet::new(vec![ComplexMatrix::identity(2)], labels.clone()).is_err());
        let q = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert!(ProjectorSet::new(vec![p, q], labels).is_ok());
    }

    #[test]
    fn certain_outcome() {
        let rho = DensityMatrix::basis(2, 0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..20 {
            let rec = measure_selective(&rho, &ProjectorSet::computational_basis(2), &mut rng).unwrap();
            assert_eq!(rec.outcome_index, 0);
            assert_eq!(rec.probability, 1.0);
        }
    }

    #[test]
    fn balanced_outcome_statistics() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.5])).unwrap();
        let z = ProjectorSet::computational_basis(2);
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let draws = 10_000;
        let zeros = (0..draws)
            .filter(|_| measure_selective(&rho, &z, &mut rng).unwrap().outcome_index == 0)
            .count();
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((zeros as f64 - 0.5 * draws as f64).abs() < 3.0 * sigma);
    }

    #[test]
    fn branch_average_equals_nonselective() {
        let rho = DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![Complex64::new(0.6, 0.0), Complex64::new(0.2, 0.3)],
                vec![Complex64::new(0.2, -0.3), Complex64::new(0.4, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let z = ProjectorSet::computational_basis(2);
        let mut avg = ComplexMatrix::zeros(2);
        for b in selective_branches(&rho, &z).unwrap() {
            avg = &avg + &b.post_state.matrix().scale_real(b.probability);
        }
        let ns = project_nonselective(&rho, &z).unwrap();
        assert!(avg.max_abs_diff(ns.matrix()) < 1e-12);
    }

    #[test]
    fn degenerate_outcome() {
        let zero = DensityMatrix::from_matrix_unchecked(ComplexMatrix::zeros(2));
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(matches!(
            measure_selective(&zero, &ProjectorSet::computational_basis(2), &mut rng),
            Err(ZenoError::DegenerateOutcome)
        ));
    }

    #[test]
    fn partial_collapse_endpoints_and_midpoint() {
        let z = ProjectorSet::computational_basis(2);
        let rho = plus();
        let none = partial_collapse(&rho, &z, MeasurementStrength::new(0.0).unwrap()).unwrap();
        assert_eq!(none, rho);
        let full = partial_collapse(&rho, &z, MeasurementStrength::FULL).unwrap();
        assert_eq!(full, project_nonselective(&rho, &z).unwrap());
        let half = partial_collapse(&rho, &z, MeasurementStrength::new(0.5).unwrap()).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        assert!(half.matrix().max_abs_diff(&expected) < 1e-15);
        assert!(matches!(
            MeasurementStrength::new(1.5),
            Err(ZenoError::StrengthOutOfRange(_))
        ));
    }

    #[test]
    fn kicks() {
        let rho = plus();
        let id = KickOperator::new(ComplexMatrix::identity(2)).unwrap();
        assert_eq!(apply_kick(&rho, &id).unwrap(), rho);
        let z = KickOperator::new(ComplexMatrix::pauli_z()).unwrap();
        let once = apply_kick(&rho, &z).unwrap();
        let minus = ComplexMatrix::from_real_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]).unwrap();
        assert!(once.matrix().max_abs_diff(&minus) < 1e-15);
        assert!(apply_kick(&once, &z).unwrap().max_abs_diff(&rho) < 1e-15);
        assert!(matches!(
            KickOperator::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.5])),
            Err(ZenoError::NonUnitaryKick { .. })
        ));
        let k3 = KickOperator::new(ComplexMatrix::identity(3)).unwrap();
        assert!(apply_kick(&rho, &k3).is_err());
    }

    #[test]
    fn subspace_projector_examples() {
        let s = subspace_projectors(3, &[0, 1]).unwrap();
        assert_eq!(s.projectors()[0], ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]));
        assert_eq!(s.projectors()[1], ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0]));
        let s = subspace_projectors(2, &[0]).unwrap();
        assert_eq!(s.projectors(), ProjectorSet::computational_basis(2).projectors());
        let s = subspace_projectors(4, &[1, 3]).unwrap();
        assert_eq!(s.projectors()[0], ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0, 1.0]));
        assert_eq!(s.projectors()[1], ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn subspace_projector_errors() {
        assert!(matches!(subspace_projectors(3, &[]), Err(ZenoError::EmptySubspace)));
        assert!(matches!(subspace_projectors(2, &[0, 1]), Err(ZenoError::FullSubspace)));
        assert!(matches!(
            subspace_projectors(2, &[2]),
            Err(ZenoError::IndexOutOfRange { index: 2, dim: 2 })
        ));
    }
}
