//! Numerical quantum theory in small dimension: density matrices, Kraus
//! channels, projector attributes and per-factor measurement restrictions.

mod attribute;
mod backend;
mod channel;
pub mod linalg;
mod state;

use thiserror::Error;

use crate::kernel::KernelError;

pub use attribute::{is_real_operator, q_distinguishable, ProjAttribute, Restriction, RestrictionTag};
pub use backend::{gate_search, pure_variable, GateSearch, QAttribute, QuantumBackend};
pub use channel::{dephase, measurer_channel, KrausChannel};
pub use state::DensityMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("trace is {0}, not 1")]
    TraceNotOne(f64),
    #[error("matrix has negative eigenvalue {0}")]
    NotPositive(f64),
    #[error("Kraus operators are not complete (deviation {0:e})")]
    NotComplete(f64),
    #[error("basis is not orthonormal")]
    NotOrthonormal,
    #[error("projector is not idempotent")]
    NotIdempotent,
    #[error("projector has rank zero")]
    ZeroRank,
    #[error("state has norm {0}, not 1")]
    NotNormalized(f64),
    #[error("variable has {arity} attributes but the target has dimension {dim}")]
    ArityMismatch { arity: usize, dim: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Kronecker composition of like objects.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        DensityMatrix::new(linalg::kron(self.matrix(), other.matrix())).expect("product of states is a state")
    }
}

impl Tensor for ProjAttribute {
    fn tensor(&self, other: &Self) -> Self {
        ProjAttribute::new(linalg::kron(self.projector(), other.projector()))
            .expect("product of projectors is a projector")
    }
}

impl Tensor for KrausChannel {
    fn tensor(&self, other: &Self) -> Self {
        let ops = self.ops().iter().flat_map(|a| other.ops().iter().map(move |b| linalg::kron(a, b))).collect();
        KrausChannel::new(ops).expect("product of channels is complete")
    }
}
