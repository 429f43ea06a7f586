use std::fmt;

use super::linalg::{self, CMatrix, Ket, EQ_TOL, PSD_TOL};
use super::QuantumError;

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self, QuantumError> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(QuantumError::NotSquare);
        }
        if !linalg::is_hermitian(&m, EQ_TOL) {
            return Err(QuantumError::NotHermitian);
        }
        let t = linalg::trace(&m);
        if (t.re - 1.0).abs() > EQ_TOL || t.im.abs() > EQ_TOL {
            return Err(QuantumError::TraceNotOne(t.re));
        }
        let (values, _) = linalg::hermitian_eigen(&m);
        if let Some(&min) = values.first() {
            if min < -PSD_TOL {
                return Err(QuantumError::NotPositive(min));
            }
        }
        Ok(Self { m })
    }

    /// `|ψ⟩⟨ψ|`; the ket must be normalized within tolerance.
    pub fn pure(psi: &Ket) -> Result<Self, QuantumError> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QuantumError::NotNormalized(norm));
        }
        Self::new(linalg::projector(psi))
    }

    /// `|i⟩⟨i|`.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self { m: linalg::projector(&linalg::basis_ket(dim, i)) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.m * &self.m)).re
    }

    /// `tr(ρ O)` for a Hermitian observable.
    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        linalg::trace(&(&self.m * observable)).re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn overlap_with(&self, psi: &Ket) -> f64 {
        (psi.adjoint() * &self.m * psi)[(0, 0)].re
    }

    /// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`. When either state is pure this
    /// is `⟨ψ|σ|ψ⟩`, computed directly: rounding noise in the zero
    /// eigenvalues would otherwise survive the square root at the 1e-8 level.
    pub fn fidelity(&self, other: &Self) -> f64 {
        if let Some(psi) = self.pure_ket() {
            return other.overlap_with(&psi);
        }
        if let Some(psi) = other.pure_ket() {
            return self.overlap_with(&psi);
        }
        let sqrt_rho = linalg::hermitian_map(&self.m, |v| v.max(0.0).sqrt());
        let inner = &sqrt_rho * &other.m * &sqrt_rho;
        let (values, _) = linalg::hermitian_eigen(&inner);
        let t: f64 = values.iter().map(|v| v.max(0.0).sqrt()).sum();
        t * t
    }

    /// The dominant eigenvector, when the purity is 1 within tolerance.
    fn pure_ket(&self) -> Option<Ket> {
        if (self.purity() - 1.0).abs() > EQ_TOL {
            return None;
        }
        let (_, vectors) = linalg::hermitian_eigen(&self.m);
        Some(vectors.column(self.dim() - 1).into_owned())
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let (values, _) = linalg::hermitian_eigen(&(&self.m - &other.m));
        0.5 * values.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Reduced state on the factors in `keep`.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self, QuantumError> {
        if dims.iter().product::<usize>() != self.dim() {
            return Err(QuantumError::DimensionMismatch { expected: dims.iter().product(), found: self.dim() });
        }
        Self::new(linalg::partial_trace(&self.m, dims, keep))
    }

    /// `U ρ U†` without revalidating; `u` must be unitary.
    pub(crate) fn conjugate_unchecked(&self, u: &CMatrix) -> Self {
        Self { m: u * &self.m * u.adjoint() }
    }

    /// Renormalized `P ρ P` and the probability `tr(P ρ)`.
    pub(crate) fn project(&self, p: &CMatrix) -> Option<(Self, f64)> {
        let out = p * &self.m * p;
        let prob = linalg::trace(&out).re;
        (prob > EQ_TOL).then(|| (Self { m: out / linalg::r(prob) }, prob))
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix{}", self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{gates, r};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_invalid_matrices() {
        let not_unit = linalg::identity(2);
        assert!(matches!(DensityMatrix::new(not_unit), Err(QuantumError::TraceNotOne(_))));
        let negative = linalg::real_matrix(2, &[1.5, 0.0, 0.0, -0.5]);
        assert!(matches!(DensityMatrix::new(negative), Err(QuantumError::NotPositive(_))));
        assert!(matches!(DensityMatrix::new(gates::y()), Err(QuantumError::TraceNotOne(_))));
        let skew = linalg::real_matrix(2, &[0.5, 0.1, -0.1, 0.5]);
        assert!(matches!(DensityMatrix::new(skew), Err(QuantumError::NotHermitian)));
        assert!(matches!(DensityMatrix::pure(&(gates::plus() * r(2.0))), Err(QuantumError::NotNormalized(_))));
    }

    #[test]
    fn self_fidelity_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let rho = DensityMatrix::new(linalg::random_density(4, &mut rng)).unwrap();
            assert!((rho.fidelity(&rho) - 1.0).abs() < EQ_TOL);
            assert!(rho.trace_distance(&rho).abs() < EQ_TOL);
        }
    }

    #[test]
    fn pure_self_fidelity_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let rho = DensityMatrix::pure(&linalg::random_ket(8, &mut rng)).unwrap();
            let mixed = DensityMatrix::new(linalg::random_density(8, &mut rng)).unwrap();
            assert!((rho.fidelity(&rho) - 1.0).abs() < EQ_TOL);
            assert!((rho.fidelity(&mixed) - mixed.fidelity(&rho)).abs() < EQ_TOL);
        }
    }

    #[test]
    fn fidelity_of_pure_states_is_squared_overlap() {
        let a = DensityMatrix::pure(&gates::plus()).unwrap();
        let b = DensityMatrix::basis(2, 0);
        assert!((a.fidelity(&b) - 0.5).abs() < 1e-12);
        assert!((a.trace_distance(&b) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_states_are_at_distance_one() {
        let a = DensityMatrix::basis(2, 0);
        let b = DensityMatrix::basis(2, 1);
        assert!((a.trace_distance(&b) - 1.0).abs() < EQ_TOL);
        assert!(a.fidelity(&b).abs() < EQ_TOL);
    }
}
