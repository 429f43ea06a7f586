use super::linalg::{self, CMatrix, Ket, EQ_TOL};
use super::{DensityMatrix, QuantumError};

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self, QuantumError> {
        let first = ops.first().ok_or(QuantumError::NotComplete(1.0))?;
        let (dim_out, dim_in) = first.shape();
        for k in &ops {
            if k.shape() != (dim_out, dim_in) {
                return Err(QuantumError::DimensionMismatch { expected: dim_in, found: k.ncols() });
            }
        }
        let sum = ops.iter().fold(CMatrix::zeros(dim_in, dim_in), |acc, k| acc + k.adjoint() * k);
        let deviation = linalg::max_abs_diff(&sum, &linalg::identity(dim_in));
        if deviation > EQ_TOL {
            return Err(QuantumError::NotComplete(deviation));
        }
        Ok(Self { dim_in, dim_out, ops })
    }

    pub fn unitary(u: CMatrix) -> Result<Self, QuantumError> {
        if !u.is_square() {
            return Err(QuantumError::NotSquare);
        }
        Self::new(vec![u])
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, ops: vec![linalg::identity(dim)] }
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// The single Kraus operator of a unitary channel.
    pub fn as_unitary(&self) -> Option<&CMatrix> {
        match self.ops.as_slice() {
            [u] if linalg::is_unitary(u, EQ_TOL) => Some(u),
            _ => None,
        }
    }

    /// `Σ Kᵢ m Kᵢ†` for any matrix of the input dimension.
    pub fn map_matrix(&self, m: &CMatrix) -> CMatrix {
        self.ops.iter().fold(CMatrix::zeros(self.dim_out, self.dim_out), |acc, k| acc + k * m * k.adjoint())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, QuantumError> {
        if rho.dim() != self.dim_in {
            return Err(QuantumError::DimensionMismatch { expected: self.dim_in, found: rho.dim() });
        }
        let out = self.map_matrix(rho.matrix());
        DensityMatrix::new((&out + out.adjoint()) * linalg::r(0.5))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Self) -> Result<Self, QuantumError> {
        if next.dim_in != self.dim_out {
            return Err(QuantumError::DimensionMismatch { expected: self.dim_out, found: next.dim_in });
        }
        let ops = next.ops.iter().flat_map(|b| self.ops.iter().map(move |a| b * a)).collect();
        Self::new(ops)
    }
}

fn check_basis(basis: &[Ket]) -> Result<usize, QuantumError> {
    let dim = basis.first().map(|k| k.len()).ok_or(QuantumError::NotOrthonormal)?;
    if basis.len() != dim || basis.iter().any(|k| k.len() != dim) || !linalg::is_orthonormal(basis, EQ_TOL) {
        return Err(QuantumError::NotOrthonormal);
    }
    Ok(dim)
}

/// Dephasing in `basis`, with Kraus operators `|bᵢ⟩⟨bᵢ|`.
pub fn dephase(basis: &[Ket]) -> Result<KrausChannel, QuantumError> {
    check_basis(basis)?;
    KrausChannel::new(basis.iter().map(linalg::projector).collect())
}

/// Generalized CNOT `|bᵢ⟩|bⱼ⟩ → |bᵢ⟩|bᵢ₊ⱼ⟩` on two copies of the space
/// spanned by `basis`. Index arithmetic is XOR when the dimension is a power
/// of two, so the gate is its own inverse; otherwise addition mod d.
pub fn measurer_channel(basis: &[Ket], dim_target: usize) -> Result<KrausChannel, QuantumError> {
    let d = check_basis(basis)?;
    if dim_target != d {
        return Err(QuantumError::ArityMismatch { arity: d, dim: dim_target });
    }
    let combine = |i: usize, j: usize| if d.is_power_of_two() { i ^ j } else { (i + j) % d };
    let mut u = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let input = linalg::kron_ket(&basis[i], &basis[j]);
            let output = linalg::kron_ket(&basis[i], &basis[combine(i, j)]);
            u += linalg::outer(&output, &input);
        }
    }
    KrausChannel::unitary(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{basis_ket, gates, kron_ket, projector, r};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z_basis() -> Vec<Ket> {
        vec![basis_ket(2, 0), basis_ket(2, 1)]
    }

    fn x_basis() -> Vec<Ket> {
        vec![gates::plus(), gates::minus()]
    }

    #[test]
    fn rejects_incomplete_sets() {
        let half = linalg::identity(2) * r(0.5);
        assert!(matches!(KrausChannel::new(vec![half]), Err(QuantumError::NotComplete(_))));
        assert!(KrausChannel::unitary(gates::h() * r(2.0)).is_err());
    }

    #[test]
    fn identity_leaves_state() {
        let rho = DensityMatrix::pure(&gates::plus_i()).unwrap();
        assert_eq!(KrausChannel::identity(2).apply(&rho).unwrap(), rho);
    }

    #[test]
    fn dephasing_plus_gives_maximally_mixed() {
        let rho = DensityMatrix::pure(&gates::plus()).unwrap();
        let out = dephase(&z_basis()).unwrap().apply(&rho).unwrap();
        assert!(linalg::approx_eq(out.matrix(), &(linalg::identity(2) * r(0.5)), EQ_TOL));
    }

    #[test]
    fn dephasing_fixes_basis_states_and_is_idempotent() {
        let d = dephase(&z_basis()).unwrap();
        for i in 0..2 {
            let rho = DensityMatrix::basis(2, i);
            assert!(linalg::approx_eq(d.apply(&rho).unwrap().matrix(), rho.matrix(), EQ_TOL));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let rho = DensityMatrix::new(linalg::random_density(2, &mut rng)).unwrap();
            let once = d.apply(&rho).unwrap();
            let twice = d.apply(&once).unwrap();
            assert!(linalg::approx_eq(once.matrix(), twice.matrix(), EQ_TOL));
            assert!(once.matrix()[(0, 1)].norm() < EQ_TOL);
        }
    }

    #[test]
    fn dephase_rejects_non_orthonormal() {
        assert_eq!(dephase(&[basis_ket(2, 0), gates::plus()]), Err(QuantumError::NotOrthonormal));
        assert_eq!(dephase(&[basis_ket(2, 0)]), Err(QuantumError::NotOrthonormal));
    }

    #[test]
    fn cnot_makes_bell_state() {
        let input = DensityMatrix::pure(&kron_ket(&gates::plus(), &basis_ket(2, 0))).unwrap();
        let out = KrausChannel::unitary(gates::cnot()).unwrap().apply(&input).unwrap();
        let bell = projector(&gates::bell_states()[0]);
        assert!(linalg::approx_eq(out.matrix(), &bell, EQ_TOL));
    }

    #[test]
    fn z_measurer_is_cnot() {
        let m = measurer_channel(&z_basis(), 2).unwrap();
        assert!(linalg::approx_eq(m.as_unitary().unwrap(), &gates::cnot(), EQ_TOL));
        assert!(matches!(measurer_channel(&z_basis(), 3), Err(QuantumError::ArityMismatch { .. })));
    }

    #[test]
    fn z_measurer_records_value() {
        let m = measurer_channel(&z_basis(), 2).unwrap();
        for (i, expected) in [(0, 0), (1, 3)] {
            let out = m.apply(&DensityMatrix::basis(4, 2 * i)).unwrap();
            assert!(linalg::approx_eq(out.matrix(), DensityMatrix::basis(4, expected).matrix(), EQ_TOL));
        }
    }

    #[test]
    fn x_measurer_discriminates_z_states() {
        let m = measurer_channel(&x_basis(), 2).unwrap();
        let outs: Vec<DensityMatrix> = z_basis()
            .iter()
            .map(|z| m.apply(&DensityMatrix::pure(&kron_ket(z, &gates::plus())).unwrap()).unwrap())
            .collect();
        assert!((outs[0].trace_distance(&outs[1]) - 1.0).abs() < EQ_TOL);
    }

    #[test]
    fn ternary_measurer_is_unitary() {
        let basis: Vec<Ket> = (0..3).map(|i| basis_ket(3, i)).collect();
        let m = measurer_channel(&basis, 3).unwrap();
        assert!(m.as_unitary().is_some());
        let out = m.apply(&DensityMatrix::basis(9, 3)).unwrap();
        assert!(linalg::approx_eq(out.matrix(), DensityMatrix::basis(9, 4).matrix(), EQ_TOL));
    }

    #[test]
    fn composition_order() {
        let h = KrausChannel::unitary(gates::h()).unwrap();
        let x = KrausChannel::unitary(gates::x()).unwrap();
        let hx = h.then(&x).unwrap();
        assert!(linalg::approx_eq(&hx.ops()[0], &(gates::x() * gates::h()), EQ_TOL));
        let wide = KrausChannel::identity(4);
        assert!(h.then(&wide).is_err());
    }
}
