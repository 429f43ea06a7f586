//! Qubit and rebit registers with an operation ledger, and the protocols
//! run on them: superdense coding, teleportation through a rebit pair, and
//! the logical versus physical swap.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::quantum::linalg::{self, gates, CMatrix, Ket, EQ_TOL};
use crate::quantum::{DensityMatrix, QuantumError, Restriction};

/// Minimum teleportation fidelity counted as success.
pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("operation `{op}` on {subsystems:?} is not allowed")]
    Disallowed { op: String, subsystems: Vec<usize> },
    #[error("invalid message `{0}`; expected one of 00, 01, 10, 11")]
    InvalidMessage(String),
    #[error("state has norm {0}, not 1")]
    NotNormalized(f64),
    #[error("no subsystem at position {0}")]
    NoSuchSubsystem(usize),
    #[error("outcome has zero probability")]
    ZeroProbability,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsystemKind {
    Qubit,
    Rebit,
    /// A classical wire, modelled as a qubit dephased in the Z basis.
    Cbit,
}

impl SubsystemKind {
    fn restriction(self) -> Restriction {
        match self {
            SubsystemKind::Qubit => Restriction::full(2),
            SubsystemKind::Rebit => Restriction::real(2),
            SubsystemKind::Cbit => Restriction::classical(2),
        }
    }
}

impl fmt::Display for SubsystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsystemKind::Qubit => "qubit",
            SubsystemKind::Rebit => "rebit",
            SubsystemKind::Cbit => "cbit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    pub kind: SubsystemKind,
    pub id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Unitary,
    Measurement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub op: String,
    pub subsystems: Vec<usize>,
    pub allowed: bool,
}

/// A register of two-level carriers. Every attempted operation is logged;
/// a disallowed one is refused and leaves the state untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridRegister {
    subsystems: Vec<Subsystem>,
    state: DensityMatrix,
    ledger: Vec<LedgerEntry>,
}

/// Whether `op`, acting on the listed positions of `reg`, is allowed.
///
/// Unitaries touching a rebit must be real (the Z-basis CNOT is); those
/// touching a cbit must permute its basis. Measurement operators touching a
/// rebit must be real, and those touching a cbit diagonal. Qubit-only
/// operations are always allowed.
pub fn assert_allowed(kind: OpKind, op: &CMatrix, targets: &[usize], reg: &HybridRegister) -> bool {
    if targets.iter().any(|&t| t >= reg.subsystems.len()) || op.nrows() != 1 << targets.len() {
        return false;
    }
    let restriction = targets
        .iter()
        .map(|&t| reg.subsystems[t].kind.restriction())
        .reduce(|a, b| a.tensor(&b))
        .expect("at least one target");
    match kind {
        OpKind::Unitary => {
            let is_cnot = targets.len() == 2 && linalg::approx_eq(op, &gates::cnot(), 0.0);
            (is_cnot && !targets.iter().any(|&t| reg.subsystems[t].kind == SubsystemKind::Cbit))
                || restriction.allows_unitary(op)
        }
        OpKind::Measurement => restriction.allows_operator(op),
    }
}

impl HybridRegister {
    pub fn new(subsystems: Vec<Subsystem>, state: DensityMatrix) -> Result<Self, ProtocolError> {
        let expected = 1usize << subsystems.len();
        if state.dim() != expected {
            return Err(QuantumError::DimensionMismatch { expected, found: state.dim() }.into());
        }
        Ok(Self { subsystems, state, ledger: Vec::new() })
    }

    /// Product of pure states, one per subsystem.
    pub fn from_kets(parts: &[(SubsystemKind, &str, Ket)]) -> Result<Self, ProtocolError> {
        let ket = parts
            .iter()
            .map(|(_, _, k)| k.clone())
            .reduce(|a, b| linalg::kron_ket(&a, &b))
            .ok_or(QuantumError::DimensionMismatch { expected: 2, found: 0 })?;
        let subsystems = parts.iter().map(|(kind, id, _)| Subsystem { kind: *kind, id: id.to_string() }).collect();
        Self::new(subsystems, DensityMatrix::pure(&ket)?)
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn kind(&self, i: usize) -> Option<SubsystemKind> {
        self.subsystems.get(i).map(|s| s.kind)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    fn check_targets(&self, targets: &[usize]) -> Result<(), ProtocolError> {
        match targets.iter().find(|&&t| t >= self.len()) {
            Some(&t) => Err(ProtocolError::NoSuchSubsystem(t)),
            None => Ok(()),
        }
    }

    /// Logs the attempt and fails if any operator is disallowed.
    fn admit(&mut self, name: &str, kind: OpKind, ops: &[&CMatrix], targets: &[usize]) -> Result<(), ProtocolError> {
        self.check_targets(targets)?;
        let allowed = ops.iter().all(|op| assert_allowed(kind, op, targets, self));
        self.ledger.push(LedgerEntry { op: name.to_string(), subsystems: targets.to_vec(), allowed });
        if allowed {
            Ok(())
        } else {
            Err(ProtocolError::Disallowed { op: name.to_string(), subsystems: targets.to_vec() })
        }
    }

    fn embed(&self, op: &CMatrix, targets: &[usize]) -> CMatrix {
        linalg::embed_qubits(op, targets, self.len())
    }

    pub fn apply_unitary(&mut self, name: &str, u: &CMatrix, targets: &[usize]) -> Result<(), ProtocolError> {
        self.admit(name, OpKind::Unitary, &[u], targets)?;
        let full = self.embed(u, targets);
        self.state = self.state.conjugate_unchecked(&full);
        Ok(())
    }

    /// Outcome probabilities of a projective measurement, without collapse.
    pub fn measure(
        &mut self,
        name: &str,
        projectors: &[CMatrix],
        targets: &[usize],
    ) -> Result<Vec<f64>, ProtocolError> {
        let refs: Vec<&CMatrix> = projectors.iter().collect();
        self.admit(name, OpKind::Measurement, &refs, targets)?;
        Ok(projectors.iter().map(|p| self.state.expectation(&self.embed(p, targets))).collect())
    }

    /// Keeps the branch where `projector` fired; returns its probability.
    pub fn postselect(&mut self, name: &str, projector: &CMatrix, targets: &[usize]) -> Result<f64, ProtocolError> {
        self.admit(name, OpKind::Measurement, &[projector], targets)?;
        let (state, prob) =
            self.state.project(&self.embed(projector, targets)).ok_or(ProtocolError::ZeroProbability)?;
        self.state = state;
        Ok(prob)
    }

    /// `⟨O⟩` on the target subsystems.
    pub fn expectation(&mut self, name: &str, observable: &CMatrix, targets: &[usize]) -> Result<f64, ProtocolError> {
        self.admit(name, OpKind::Measurement, &[observable], targets)?;
        Ok(self.state.expectation(&self.embed(observable, targets)))
    }

    /// Reconstructs a single-subsystem state from its X, Y and Z readouts.
    pub fn tomography(&mut self, target: usize) -> Result<DensityMatrix, ProtocolError> {
        let id = self.subsystems.get(target).ok_or(ProtocolError::NoSuchSubsystem(target))?.id.clone();
        let mut rho = linalg::identity(2);
        for (label, pauli) in [("X", gates::x()), ("Y", gates::y()), ("Z", gates::z())] {
            let v = self.expectation(&format!("measure {label}[{id}]"), &pauli, &[target])?;
            rho += pauli * linalg::r(v);
        }
        Ok(DensityMatrix::new(rho * linalg::r(0.5))?)
    }

    /// Swaps the states of `i` and `j` with three Z-basis CNOTs; the carriers
    /// and their kinds stay where they are.
    pub fn logical_swap(&mut self, i: usize, j: usize) -> Result<(), ProtocolError> {
        self.check_targets(&[i, j])?;
        let cnot = gates::cnot();
        let (a, b) = (self.subsystems[i].id.clone(), self.subsystems[j].id.clone());
        self.apply_unitary(&format!("CNOT[{a}→{b}]"), &cnot, &[i, j])?;
        self.apply_unitary(&format!("CNOT[{b}→{a}]"), &cnot, &[j, i])?;
        self.apply_unitary(&format!("CNOT[{a}→{b}]"), &cnot, &[i, j])
    }

    /// Exchanges the carriers themselves: kinds and ids travel with the
    /// state.
    pub fn physical_swap(&mut self, i: usize, j: usize) -> Result<(), ProtocolError> {
        self.check_targets(&[i, j])?;
        let (a, b) = (self.subsystems[i].id.clone(), self.subsystems[j].id.clone());
        self.ledger.push(LedgerEntry { op: format!("move {a}↔{b}"), subsystems: vec![i, j], allowed: true });
        self.state = self.state.conjugate_unchecked(&linalg::swap_positions(i, j, self.len()));
        self.subsystems.swap(i, j);
        Ok(())
    }

    pub fn reduced(&self, target: usize) -> Result<DensityMatrix, ProtocolError> {
        self.check_targets(&[target])?;
        Ok(self.state.partial_trace(&vec![2; self.len()], &[target])?)
    }
}

/// One enumerated measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub label: String,
    pub probability: f64,
    pub fidelity: f64,
    pub decoded: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub success: bool,
    /// Smallest fidelity over branches, against the declared target.
    pub fidelity: f64,
    pub ledger: Vec<LedgerEntry>,
    pub branches: Vec<BranchOutcome>,
    pub notes: Vec<String>,
}

pub const BELL_LABELS: [&str; 4] = ["Φ+", "Ψ+", "Φ−", "Ψ−"];

pub fn bell_projectors() -> [CMatrix; 4] {
    gates::bell_states().map(|b| linalg::projector(&b))
}

/// The encoding of a two-bit message as an operator on the first rebit.
pub fn encoding(message: &str) -> Result<(&'static str, CMatrix), ProtocolError> {
    match message {
        "00" => Ok(("I", linalg::identity(2))),
        "01" => Ok(("X", gates::x())),
        "10" => Ok(("Z", gates::z())),
        "11" => Ok(("iY", gates::iy())),
        _ => Err(ProtocolError::InvalidMessage(message.to_string())),
    }
}

const MESSAGES: [&str; 4] = ["00", "01", "10", "11"];

fn bell_pair(kind: SubsystemKind, ids: [&str; 2]) -> Vec<Subsystem> {
    ids.iter().map(|id| Subsystem { kind, id: id.to_string() }).collect()
}

/// Superdense coding of `message` over two rebits sharing `Φ+`.
pub fn run_superdense(message: &str) -> Result<ProtocolResult, ProtocolError> {
    let (op_name, op) = encoding(message)?;
    let phi = DensityMatrix::pure(&gates::bell_states()[0])?;
    let mut reg = HybridRegister::new(bell_pair(SubsystemKind::Rebit, ["r1", "r2"]), phi)?;
    reg.apply_unitary(&format!("{op_name}[r1]"), &op, &[0])?;
    let probs = reg.measure("Bell measurement[r1,r2]", &bell_projectors(), &[0, 1])?;

    let (best, &p) = probs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("four outcomes");
    let decoded = MESSAGES[best];
    let branches = probs
        .iter()
        .enumerate()
        .map(|(k, &prob)| BranchOutcome {
            label: BELL_LABELS[k].to_string(),
            probability: prob,
            fidelity: prob,
            decoded: Some(MESSAGES[k].to_string()),
        })
        .collect();
    let error = 1.0 - probs[MESSAGES.iter().position(|m| *m == message).expect("valid message")];
    Ok(ProtocolResult {
        success: decoded == message && error.abs() <= EQ_TOL && reg.ledger().iter().all(|e| e.allowed),
        fidelity: p,
        ledger: reg.ledger().to_vec(),
        branches,
        notes: vec![format!("message {message} encoded with {op_name}, decoded {decoded}")],
    })
}

fn teleport_register(psi: &Ket) -> Result<HybridRegister, ProtocolError> {
    let norm = psi.norm();
    if psi.len() != 2 || (norm - 1.0).abs() > 1e-10 {
        return Err(ProtocolError::NotNormalized(norm));
    }
    let ket = linalg::kron_ket(&linalg::kron_ket(psi, &gates::bell_states()[0]), &linalg::basis_ket(2, 0));
    let subsystems = vec![
        Subsystem { kind: SubsystemKind::Qubit, id: "q".into() },
        Subsystem { kind: SubsystemKind::Rebit, id: "r1".into() },
        Subsystem { kind: SubsystemKind::Rebit, id: "r2".into() },
        Subsystem { kind: SubsystemKind::Qubit, id: "a".into() },
    ];
    HybridRegister::new(subsystems, DensityMatrix::pure(&ket)?)
}

/// Correction on the second rebit after each Bell outcome.
fn corrections() -> [(&'static str, CMatrix); 4] {
    [("I", linalg::identity(2)), ("X", gates::x()), ("Z", gates::z()), ("iY", gates::iy())]
}

/// Teleports `psi` from a qubit through a rebit Bell pair onto an ancilla
/// qubit, enumerating all four Bell outcomes.
pub fn run_teleportation(psi: &Ket) -> Result<ProtocolResult, ProtocolError> {
    let base = teleport_register(psi)?;
    let target = DensityMatrix::pure(psi)?;
    let bells = bell_projectors();
    let mut ledger = Vec::new();
    let mut branches = Vec::with_capacity(4);
    for (k, (name, correction)) in corrections().into_iter().enumerate() {
        let mut reg = base.clone();
        let prob = reg.postselect(&format!("Bell {}[q,r1]", BELL_LABELS[k]), &bells[k], &[0, 1])?;
        reg.apply_unitary(&format!("{name}[r2]"), &correction, &[2])?;
        reg.logical_swap(2, 3)?;
        let out = reg.tomography(3)?;
        branches.push(BranchOutcome {
            label: BELL_LABELS[k].to_string(),
            probability: prob,
            fidelity: out.fidelity(&target),
            decoded: None,
        });
        ledger.extend_from_slice(reg.ledger());
    }
    let fidelity = branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min);
    Ok(ProtocolResult {
        success: fidelity >= FIDELITY_FLOOR && ledger.iter().all(|e| e.allowed),
        fidelity,
        ledger,
        branches,
        notes: vec!["Bell measurement on (qubit, rebit) uses real projectors".into()],
    })
}

/// The path that reads the phase straight off the second rebit: the
/// Y readout is refused and the protocol fails.
pub fn run_teleportation_with_rebit_readout(psi: &Ket) -> Result<ProtocolResult, ProtocolError> {
    let mut reg = teleport_register(psi)?;
    reg.postselect("Bell Φ+[q,r1]", &bell_projectors()[0], &[0, 1])?;
    let refused = reg.expectation("measure Y[r2]", &gates::y(), &[2]);
    let note = match refused {
        Err(ProtocolError::Disallowed { op, .. }) => format!("{op} rejected: rebit phases are not measurable"),
        Err(e) => return Err(e),
        Ok(_) => "Y readout on a rebit was accepted".to_string(),
    };
    Ok(ProtocolResult {
        success: false,
        fidelity: 0.0,
        ledger: reg.ledger().to_vec(),
        branches: Vec::new(),
        notes: vec![note],
    })
}

/// Minimum and mean teleportation fidelity over random pure inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportSummary {
    pub trials: usize,
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
    pub success: bool,
}

/// Trial `i` draws its input from a generator seeded with `seed + i`.
pub fn teleport_trials(trials: usize, seed: u64) -> Result<TeleportSummary, ProtocolError> {
    let mut min = f64::INFINITY;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut success = true;
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let psi = linalg::random_ket(2, &mut rng);
        let result = run_teleportation(&psi)?;
        success &= result.success;
        for b in &result.branches {
            min = min.min(b.fidelity);
            sum += b.fidelity;
            count += 1;
        }
    }
    Ok(TeleportSummary {
        trials,
        min_fidelity: if count == 0 { 1.0 } else { min },
        mean_fidelity: if count == 0 { 1.0 } else { sum / count as f64 },
        success,
    })
}

/// A rebit holding `(|0⟩ + i|1⟩)/√2` next to a blank qubit, swapped both
/// ways. The global states agree but the carrier at position 1 differs, so
/// a Y readout there is allowed after one swap and refused after the other.
pub fn swap_divergence_demo() -> Result<ProtocolResult, ProtocolError> {
    let start = HybridRegister::from_kets(&[
        (SubsystemKind::Rebit, "r", gates::plus_i()),
        (SubsystemKind::Qubit, "q", linalg::basis_ket(2, 0)),
    ])?;
    let mut logical = start.clone();
    logical.logical_swap(0, 1)?;
    let mut physical = start;
    physical.physical_swap(0, 1)?;

    let fidelity = logical.state().fidelity(physical.state());
    let (len_logical, len_physical) = (logical.ledger().len(), physical.ledger().len());
    let y_logical = logical.expectation("measure Y[1]", &gates::y(), &[1]).is_ok();
    let y_physical = physical.expectation("measure Y[1]", &gates::y(), &[1]).is_ok();

    let mut ledger = logical.ledger().to_vec();
    ledger.extend_from_slice(physical.ledger());
    Ok(ProtocolResult {
        success: (fidelity - 1.0).abs() <= EQ_TOL && y_logical != y_physical,
        fidelity,
        ledger,
        branches: vec![
            BranchOutcome { label: "logical".into(), probability: 1.0, fidelity, decoded: None },
            BranchOutcome { label: "physical".into(), probability: 1.0, fidelity, decoded: None },
        ],
        notes: vec![
            format!("logical swap: ledger length {len_logical}, position 1 holds a {}", logical.kind(1).expect("two")),
            format!(
                "physical swap: ledger length {len_physical}, position 1 holds a {}",
                physical.kind(1).expect("two")
            ),
            format!("Y readout at position 1 allowed after logical swap: {y_logical}"),
            format!("Y readout at position 1 allowed after physical swap: {y_physical}"),
        ],
    })
}
