//! Constructor-theoretic information media: a theory-agnostic kernel, a
//! finite transformation-monoid backend, a numerical quantum backend, the
//! quantisation argument and qubit/rebit protocols.

pub mod argument;
pub mod composite;
pub mod finite;
pub mod kernel;
pub mod protocols;
pub mod quantum;

pub use argument::{run_argument, run_weak_argument, ArgumentReport, CheckStatus, PropertyCheck};
pub use composite::{compose, Backend, CompositeError, Joint};
pub use finite::{parse_theory, FiniteBackend, FiniteTheory, ParseError, StateSet, TheoryFile};
pub use kernel::{
    are_distinguishable, bar, classify_sector, copy_task, is_distinguishable, is_information_variable, is_observable,
    measurement_task, permutation_task, Decision, KernelError, SectorClassification, Task, TheoryBackend, Variable,
};
pub use protocols::{HybridRegister, ProtocolResult, SubsystemKind};
pub use quantum::{DensityMatrix, KrausChannel, ProjAttribute, QAttribute, QuantumBackend, Restriction};
