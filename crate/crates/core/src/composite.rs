//! Composition of two backends of the same kind.

use thiserror::Error;

use crate::finite::{FiniteBackend, FiniteError, NamedMap};
use crate::quantum::linalg::CMatrix;
use crate::quantum::{QuantumBackend, QuantumError};

#[derive(Debug, Clone)]
pub enum Backend {
    Finite(FiniteBackend),
    Quantum(QuantumBackend),
}

impl Backend {
    pub fn kind(&self) -> &'static str {
        match self {
            Backend::Finite(_) => "finite",
            Backend::Quantum(_) => "quantum",
        }
    }
}

/// Interaction generators added to a composite on top of the lifted local
/// ones.
#[derive(Debug, Clone)]
pub enum Joint {
    None,
    Finite(Vec<NamedMap>),
    Quantum(Vec<(String, CMatrix)>),
}

#[derive(Debug, Error)]
pub enum CompositeError {
    #[error("cannot compose a {left} backend with a {right} one")]
    KindMismatch { left: &'static str, right: &'static str },
    #[error(transparent)]
    Finite(#[from] FiniteError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// `S₁ ⊕ S₂`: Cartesian product of state sets for finite backends, tensor
/// product with per-factor restrictions for quantum ones.
pub fn compose(a: &Backend, b: &Backend, joint: Joint) -> Result<Backend, CompositeError> {
    match (a, b, joint) {
        (Backend::Finite(x), Backend::Finite(y), Joint::Finite(maps)) => Ok(Backend::Finite(x.compose(y, maps)?)),
        (Backend::Finite(x), Backend::Finite(y), Joint::None) => Ok(Backend::Finite(x.compose(y, Vec::new())?)),
        (Backend::Quantum(x), Backend::Quantum(y), Joint::Quantum(gates)) => {
            Ok(Backend::Quantum(x.compose(y).with_gates(gates)?))
        }
        (Backend::Quantum(x), Backend::Quantum(y), Joint::None) => Ok(Backend::Quantum(x.compose(y))),
        (Backend::Finite(_), Backend::Finite(_), Joint::Quantum(_)) => {
            Err(CompositeError::KindMismatch { left: "finite", right: "quantum" })
        }
        (Backend::Quantum(_), Backend::Quantum(_), Joint::Finite(_)) => {
            Err(CompositeError::KindMismatch { left: "quantum", right: "finite" })
        }
        (x, y, _) => Err(CompositeError::KindMismatch { left: x.kind(), right: y.kind() }),
    }
}
