use super::channel::{dephase, KrausChannel};
use super::linalg::{self, CMatrix, Ket, EQ_TOL};
use super::QuantumError;

/// An orthogonal projector, read as the attribute "the state lies in its
/// range".
#[derive(Debug, Clone, PartialEq)]
pub struct ProjAttribute {
    p: CMatrix,
}

impl ProjAttribute {
    pub fn new(p: CMatrix) -> Result<Self, QuantumError> {
        if !p.is_square() {
            return Err(QuantumError::NotSquare);
        }
        if !linalg::is_hermitian(&p, EQ_TOL) {
            return Err(QuantumError::NotHermitian);
        }
        if !linalg::approx_eq(&(&p * &p), &p, EQ_TOL) {
            return Err(QuantumError::NotIdempotent);
        }
        if linalg::trace(&p).re < 0.5 {
            return Err(QuantumError::ZeroRank);
        }
        Ok(Self { p })
    }

    /// Rank-1 projector onto `k`, normalized first.
    pub fn from_ket(k: &Ket) -> Result<Self, QuantumError> {
        let norm = k.norm();
        if norm < 1e-9 {
            return Err(QuantumError::ZeroRank);
        }
        Self::new(linalg::projector(&(k / linalg::r(norm))))
    }

    /// Projector onto the span of `kets`.
    pub fn span(kets: &[Ket]) -> Result<Self, QuantumError> {
        let mut basis: Vec<Ket> = Vec::new();
        for k in kets {
            let mut v = k.clone();
            for b in &basis {
                let ip = b.dotc(&v);
                v -= b * ip;
            }
            let norm = v.norm();
            if norm > 1e-9 {
                basis.push(v / linalg::r(norm));
            }
        }
        let first = basis.first().ok_or(QuantumError::ZeroRank)?;
        let dim = first.len();
        Self::new(basis.iter().fold(CMatrix::zeros(dim, dim), |acc, b| acc + linalg::projector(b)))
    }

    /// Projector onto the joint range of several projectors.
    pub fn span_of(parts: &[ProjAttribute]) -> Result<Self, QuantumError> {
        let kets: Vec<Ket> = parts
            .iter()
            .flat_map(|p| {
                let (values, vectors) = linalg::hermitian_eigen(&p.p);
                values
                    .into_iter()
                    .enumerate()
                    .filter(|(_, v)| *v > 0.5)
                    .map(|(i, _)| vectors.column(i).into_owned())
                    .collect::<Vec<_>>()
            })
            .collect();
        Self::span(&kets)
    }

    pub fn projector(&self) -> &CMatrix {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn rank(&self) -> usize {
        linalg::trace(&self.p).re.round() as usize
    }

    /// The spanning ket of a rank-1 projector, with its largest entry made
    /// real and positive.
    pub fn ket(&self) -> Option<Ket> {
        if self.rank() != 1 {
            return None;
        }
        let col = (0..self.dim()).max_by(|&i, &j| self.p[(i, i)].re.total_cmp(&self.p[(j, j)].re))?;
        let v: Ket = self.p.column(col).into_owned();
        let norm = v.norm();
        let v = v / linalg::r(norm);
        let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
        Some(v * (pivot.conj() / pivot.norm()))
    }

    /// `‖P_a P_b‖ ≤ 1e-12`.
    pub fn is_orthogonal_to(&self, other: &Self) -> bool {
        self.dim() == other.dim() && (&self.p * &other.p).norm() <= EQ_TOL
    }

    pub fn same_as(&self, other: &Self) -> bool {
        linalg::approx_eq(&self.p, &other.p, 1e-10)
    }

    /// Whether the range of `self` lies in the range of `other`.
    pub fn is_within(&self, other: &Self) -> bool {
        self.dim() == other.dim() && linalg::approx_eq(&(&other.p * &self.p), &self.p, 1e-10)
    }

    /// `U P U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self { p: u * &self.p * u.adjoint() }
    }
}

/// `max |Im mᵢⱼ| ≤ tol` in the computational basis.
pub fn is_real_operator(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && linalg::max_imag(m) <= tol
}

/// What may be measured on one tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub enum RestrictionTag {
    Full,
    /// Only real operators in the computational basis.
    Real,
    /// Only operators diagonal in the given orthonormal basis.
    Dephased(Vec<Ket>),
}

/// Per-factor restriction tags of a composite space; factor 0 is the most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    factors: Vec<(usize, RestrictionTag)>,
}

impl Restriction {
    pub fn full(dim: usize) -> Self {
        Self { factors: vec![(dim, RestrictionTag::Full)] }
    }

    pub fn real(dim: usize) -> Self {
        Self { factors: vec![(dim, RestrictionTag::Real)] }
    }

    pub fn dephased(basis: Vec<Ket>) -> Result<Self, QuantumError> {
        dephase(&basis)?;
        Ok(Self { factors: vec![(basis.len(), RestrictionTag::Dephased(basis))] })
    }

    /// Dephased in the computational basis.
    pub fn classical(dim: usize) -> Self {
        Self::dephased((0..dim).map(|i| linalg::basis_ket(dim, i)).collect()).expect("computational basis")
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { factors: self.factors.iter().chain(&other.factors).cloned().collect() }
    }

    pub fn factors(&self) -> &[(usize, RestrictionTag)] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(d, _)| *d).collect()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(d, _)| d).product()
    }

    fn has_real(&self) -> bool {
        self.factors.iter().any(|(_, t)| *t == RestrictionTag::Real)
    }

    /// Dephasing on factor `k` alone, if that factor is dephased.
    fn factor_dephasing(&self, k: usize) -> Option<KrausChannel> {
        let RestrictionTag::Dephased(basis) = &self.factors[k].1 else {
            return None;
        };
        let dims = self.dims();
        let ops = basis.iter().map(|b| linalg::embed(&linalg::projector(b), &dims, &[k])).collect();
        Some(KrausChannel::new(ops).expect("dephasing on one factor is complete"))
    }

    /// The channel that dephases every dephased factor, identity elsewhere.
    pub fn sector_channel(&self) -> KrausChannel {
        (0..self.factors.len())
            .filter_map(|k| self.factor_dephasing(k))
            .fold(KrausChannel::identity(self.dim()), |acc, d| acc.then(&d).expect("same dimension"))
    }

    /// Whether a measurement operator may be used: real when any factor is
    /// real-tagged, and unchanged by dephasing of each dephased factor.
    pub fn allows_operator(&self, m: &CMatrix) -> bool {
        if m.nrows() != self.dim() || (self.has_real() && !is_real_operator(m, EQ_TOL)) {
            return false;
        }
        (0..self.factors.len())
            .filter_map(|k| self.factor_dephasing(k))
            .all(|d| linalg::approx_eq(&d.map_matrix(m), m, 1e-10))
    }

    pub fn allows_projector(&self, p: &ProjAttribute) -> bool {
        self.allows_operator(p.projector())
    }

    /// Whether a unitary may be applied: real when any factor is
    /// real-tagged, and mapping each basis projector of a dephased factor to
    /// an operator that dephasing leaves alone.
    pub fn allows_unitary(&self, u: &CMatrix) -> bool {
        if u.nrows() != self.dim() || (self.has_real() && !is_real_operator(u, EQ_TOL)) {
            return false;
        }
        let dims = self.dims();
        self.factors.iter().enumerate().all(|(k, (_, tag))| {
            let RestrictionTag::Dephased(basis) = tag else {
                return true;
            };
            let d = self.factor_dephasing(k).expect("factor is dephased");
            basis.iter().all(|b| {
                let q = linalg::embed(&linalg::projector(b), &dims, &[k]);
                let image = u * q * u.adjoint();
                linalg::approx_eq(&d.map_matrix(&image), &image, 1e-10)
            })
        })
    }
}

/// Orthogonal ranges, with both discriminating projectors allowed by `r`.
pub fn q_distinguishable(a: &ProjAttribute, b: &ProjAttribute, r: &Restriction) -> bool {
    a.is_orthogonal_to(b) && r.allows_projector(a) && r.allows_projector(b)
}
