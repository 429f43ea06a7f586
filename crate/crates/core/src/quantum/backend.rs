use std::collections::{HashSet, VecDeque};

use crate::kernel::{Decision, KernelError, Task, TheoryBackend, Variable};

use super::attribute::{q_distinguishable, ProjAttribute, Restriction};
use super::linalg::{self, gates, CMatrix, Ket, EQ_TOL};
use super::{QuantumError, Tensor};

/// A finite set of projector attributes; the empty set is the null
/// attribute. Members are kept free of duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct QAttribute {
    members: Vec<ProjAttribute>,
}

impl QAttribute {
    pub fn new(members: impl IntoIterator<Item = ProjAttribute>) -> Self {
        let mut out: Vec<ProjAttribute> = Vec::new();
        for m in members {
            if !out.iter().any(|o| o.same_as(&m)) {
                out.push(m);
            }
        }
        Self { members: out }
    }

    pub fn null() -> Self {
        Self { members: Vec::new() }
    }

    /// The attribute of being in the pure state `k`.
    pub fn pure(k: &Ket) -> Result<Self, QuantumError> {
        Ok(Self { members: vec![ProjAttribute::from_ket(k)?] })
    }

    pub fn members(&self) -> &[ProjAttribute] {
        &self.members
    }

    pub fn is_null(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &ProjAttribute) -> bool {
        self.members.iter().any(|m| m.same_as(p))
    }

    /// The only member, if there is exactly one.
    pub fn single(&self) -> Option<&ProjAttribute> {
        match self.members.as_slice() {
            [m] => Some(m),
            _ => None,
        }
    }

    /// Projector onto the span of all members.
    pub fn span(&self) -> Option<ProjAttribute> {
        ProjAttribute::span_of(&self.members).ok()
    }
}

impl Tensor for QAttribute {
    fn tensor(&self, other: &Self) -> Self {
        QAttribute::new(self.members.iter().flat_map(|a| other.members.iter().map(move |b| a.tensor(b))))
    }
}

/// Outcome of a breadth-first search over the group generated by a gate set.
#[derive(Debug, Clone, PartialEq)]
pub enum GateSearch {
    Found(CMatrix),
    Exhausted,
    Truncated,
}

/// Breadth-first search of the products of `gates`, identified up to global
/// phase, stopping at the first one `accept` takes.
pub fn gate_search(dim: usize, gates: &[CMatrix], cap: usize, mut accept: impl FnMut(&CMatrix) -> bool) -> GateSearch {
    let id = linalg::identity(dim);
    if accept(&id) {
        return GateSearch::Found(id);
    }
    let mut seen = HashSet::from([linalg::phase_key(&id)]);
    let mut queue = VecDeque::from([id]);
    while let Some(u) = queue.pop_front() {
        for g in gates {
            let next = g * &u;
            if seen.contains(&linalg::phase_key(&next)) {
                continue;
            }
            if seen.len() >= cap {
                return GateSearch::Truncated;
            }
            if accept(&next) {
                return GateSearch::Found(next);
            }
            seen.insert(linalg::phase_key(&next));
            queue.push_back(next);
        }
    }
    GateSearch::Exhausted
}

fn realizes(pairs: &[(QAttribute, QAttribute)], u: &CMatrix) -> bool {
    pairs.iter().all(|(input, output)| input.members.iter().all(|p| output.contains(&p.conjugate(u))))
}

fn search_decision(outcome: GateSearch) -> Decision {
    match outcome {
        GateSearch::Found(_) => Decision::Possible,
        GateSearch::Exhausted => Decision::Impossible,
        GateSearch::Truncated => Decision::Inconclusive,
    }
}

/// A finite-dimensional quantum substrate with a measurement restriction, a
/// catalogue of variables, a generating gate set and coupling gates between
/// two replicas.
#[derive(Debug, Clone)]
pub struct QuantumBackend {
    name: String,
    restriction: Restriction,
    catalogue: Vec<Variable<QAttribute>>,
    gates: Vec<(String, CMatrix)>,
    couplings: Vec<(String, CMatrix)>,
    cap: usize,
}

/// A variable of pure states, one per label.
pub fn pure_variable(name: &str, entries: &[(&str, Ket)]) -> Variable<QAttribute> {
    Variable::new(name, entries.iter().map(|(l, k)| (*l, QAttribute::pure(k).expect("non-zero ket"))))
        .expect("labels are distinct")
}

fn z_variable(name: &str, labels: [&str; 2]) -> Variable<QAttribute> {
    pure_variable(name, &[(labels[0], linalg::basis_ket(2, 0)), (labels[1], linalg::basis_ket(2, 1))])
}

fn x_variable() -> Variable<QAttribute> {
    pure_variable("X", &[("x1", gates::plus()), ("x2", gates::minus())])
}

impl QuantumBackend {
    pub fn new(
        name: impl Into<String>,
        restriction: Restriction,
        catalogue: Vec<Variable<QAttribute>>,
        gates: Vec<(String, CMatrix)>,
    ) -> Result<Self, QuantumError> {
        let dim = restriction.dim();
        for v in &catalogue {
            for p in v.attributes().flat_map(|a| a.members()) {
                if p.dim() != dim {
                    return Err(QuantumError::DimensionMismatch { expected: dim, found: p.dim() });
                }
            }
        }
        for (gname, g) in &gates {
            if g.nrows() != dim {
                return Err(QuantumError::DimensionMismatch { expected: dim, found: g.nrows() });
            }
            if !linalg::is_unitary(g, EQ_TOL) {
                return Err(QuantumError::Unsupported(format!("gate `{gname}` is not unitary")));
            }
            if !restriction.allows_unitary(g) {
                return Err(QuantumError::Unsupported(format!("gate `{gname}` violates the restriction")));
            }
        }
        Ok(Self {
            name: name.into(),
            restriction,
            catalogue,
            gates,
            couplings: Vec::new(),
            cap: crate::finite::DEFAULT_CLOSURE_CAP,
        })
    }

    /// Gates acting on two replicas of the substrate, source first.
    pub fn with_couplings(mut self, couplings: Vec<(String, CMatrix)>) -> Result<Self, QuantumError> {
        let d = self.dim() * self.dim();
        let pair = self.restriction.tensor(&self.restriction);
        for (gname, g) in &couplings {
            if g.nrows() != d {
                return Err(QuantumError::DimensionMismatch { expected: d, found: g.nrows() });
            }
            if !linalg::is_unitary(g, EQ_TOL) || !pair.allows_unitary(g) {
                return Err(QuantumError::Unsupported(format!("coupling `{gname}` is not an allowed unitary")));
            }
        }
        self.couplings = couplings;
        Ok(self)
    }

    /// Adds gates to the generating set, with the checks of [`Self::new`].
    pub fn with_gates(mut self, extra: Vec<(String, CMatrix)>) -> Result<Self, QuantumError> {
        let checked = Self::new(self.name.clone(), self.restriction.clone(), Vec::new(), extra)?;
        self.gates.extend(checked.gates);
        Ok(self)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Qubit with catalogue `[X, Z]` and the gate set `{H, S}`.
    pub fn qubit() -> Self {
        Self::new(
            "qubit",
            Restriction::full(2),
            vec![x_variable(), z_variable("Z", ["z1", "z2"])],
            vec![("H".into(), gates::h()), ("S".into(), gates::s())],
        )
        .and_then(|b| b.with_couplings(vec![("CNOT".into(), gates::cnot())]))
        .expect("qubit backend is well formed")
    }

    /// Rebit: real measurements only, real gate set `{H, X, Z}`.
    pub fn rebit() -> Self {
        Self::new(
            "rebit",
            Restriction::real(2),
            vec![x_variable(), z_variable("Z", ["z1", "z2"])],
            vec![("H".into(), gates::h()), ("X".into(), gates::x()), ("Z".into(), gates::z())],
        )
        .and_then(|b| b.with_couplings(vec![("CNOT".into(), gates::cnot())]))
        .expect("rebit backend is well formed")
    }

    /// A bit as a qubit dephased in the computational basis, with
    /// catalogue `[T, X]`.
    pub fn dephased_bit() -> Self {
        Self::new(
            "bit",
            Restriction::classical(2),
            vec![z_variable("T", ["t1", "t2"]), x_variable()],
            vec![("X".into(), gates::x())],
        )
        .and_then(|b| b.with_couplings(vec![("CNOT".into(), gates::cnot())]))
        .expect("dephased bit backend is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.restriction.dim()
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    pub fn catalogue(&self) -> &[Variable<QAttribute>] {
        &self.catalogue
    }

    pub fn variable(&self, name: &str) -> Option<&Variable<QAttribute>> {
        self.catalogue.iter().find(|v| v.name() == name)
    }

    pub fn gates(&self) -> &[(String, CMatrix)] {
        &self.gates
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Tensor product: restriction tags kept per factor, catalogue of
    /// product variables, local gates lifted, couplings embedded on the
    /// matching factors of the composite replica pair.
    pub fn compose(&self, other: &Self) -> Self {
        let (da, db) = (self.dim(), other.dim());
        let id_a = linalg::identity(da);
        let id_b = linalg::identity(db);
        let catalogue = self
            .catalogue
            .iter()
            .flat_map(|v| {
                other.catalogue.iter().map(move |w| {
                    let entries: Vec<(String, QAttribute)> = v
                        .entries()
                        .iter()
                        .flat_map(|(la, a)| {
                            w.entries().iter().map(move |(lb, b)| (format!("({la},{lb})"), a.tensor(b)))
                        })
                        .collect();
                    Variable::new(format!("{}×{}", v.name(), w.name()), entries).expect("product labels are distinct")
                })
            })
            .collect();
        let gates = self
            .gates
            .iter()
            .map(|(n, g)| (format!("{n}⊗id"), linalg::kron(g, &id_b)))
            .chain(other.gates.iter().map(|(n, g)| (format!("id⊗{n}"), linalg::kron(&id_a, g))))
            .collect();
        let dims = [da, db, da, db];
        let couplings = self
            .couplings
            .iter()
            .map(|(n, g)| (format!("{n}[1]"), linalg::embed(g, &dims, &[0, 2])))
            .chain(other.couplings.iter().map(|(n, g)| (format!("{n}[2]"), linalg::embed(g, &dims, &[1, 3]))))
            .collect();
        Self {
            name: format!("{}⊕{}", self.name, other.name),
            restriction: self.restriction.tensor(&other.restriction),
            catalogue,
            gates,
            couplings,
            cap: self.cap.max(other.cap),
        }
    }

    fn label_of(&self, p: &ProjAttribute) -> Option<&str> {
        self.catalogue.iter().flat_map(|v| v.entries()).find_map(|(label, a)| match a.single() {
            Some(m) if m.same_as(p) => Some(label.as_str()),
            _ => None,
        })
    }

    /// Permutation of pairwise orthogonal pure states: realized by the
    /// unitary that permutes them and fixes their orthogonal complement.
    fn permutation_rule(&self, pairs: &[(QAttribute, QAttribute)]) -> Option<Decision> {
        let singles: Option<Vec<(&ProjAttribute, &ProjAttribute)>> =
            pairs.iter().map(|(a, b)| Some((a.single()?, b.single()?))).collect();
        let singles = singles?;
        let is_permutation = singles.iter().all(|(_, out)| singles.iter().any(|(inp, _)| inp.same_as(out)));
        if !is_permutation {
            return None;
        }
        if singles.iter().any(|(a, b)| a.rank() != 1 || b.rank() != 1) {
            return Some(Decision::Unsupported("permutation rule needs rank-1 attributes".into()));
        }
        let orthogonal =
            singles.iter().enumerate().all(|(i, (a, _))| singles[i + 1..].iter().all(|(b, _)| a.is_orthogonal_to(b)));
        if !orthogonal {
            return None;
        }
        let dim = self.dim();
        let mut u = linalg::identity(dim);
        for (a, b) in &singles {
            let (ka, kb) = (a.ket()?, b.ket()?);
            u -= a.projector();
            u += linalg::outer(&kb, &ka);
        }
        self.restriction.allows_unitary(&u).then_some(Decision::Possible)
    }

    /// Decides a task on one copy of the substrate.
    pub fn q_decide_task(&self, task: &Task<QAttribute>) -> Decision {
        let pairs: Vec<(QAttribute, QAttribute)> = task.pairs().iter().filter(|(a, _)| !a.is_null()).cloned().collect();
        if pairs.iter().any(|(_, b)| b.is_null()) {
            return Decision::Impossible;
        }
        if pairs.is_empty() {
            return Decision::Possible;
        }
        if let Some(d) = self.permutation_rule(&pairs) {
            return d;
        }
        let gates: Vec<CMatrix> = self.gates.iter().map(|(_, g)| g.clone()).collect();
        search_decision(gate_search(self.dim(), &gates, self.cap, |u| realizes(&pairs, u)))
    }

    /// `∪ₓ {(x, b) → (x, x)}` on pure, pairwise orthogonal, measurable
    /// states: possible iff the generalized CNOT in a basis extending them is
    /// allowed.
    /// `None` when the blank is not one of the copied attributes.
    fn copy_rule(&self, sources: &[&QAttribute], blank: &QAttribute) -> Option<Decision> {
        let Some(singles) = sources.iter().map(|a| a.single()).collect::<Option<Vec<_>>>() else {
            return Some(Decision::Unsupported("copy rule needs single-state attributes".into()));
        };
        if singles.iter().any(|p| p.rank() != 1) {
            return Some(Decision::Unsupported("copy rule needs rank-1 attributes".into()));
        }
        let b = sources.iter().position(|s| self.same_attribute(s, blank))?;
        let orthogonal =
            singles.iter().enumerate().all(|(i, a)| singles[i + 1..].iter().all(|b| a.is_orthogonal_to(b)));
        // A copy is a measurement, so each copied attribute must be one the
        // restriction lets us discriminate.
        if !orthogonal || !singles.iter().all(|p| self.restriction.allows_projector(p)) {
            return Some(Decision::Impossible);
        }
        let kets: Vec<Ket> = singles.iter().map(|p| p.ket().expect("rank 1")).collect();
        let n = kets.len();
        let basis = linalg::complete_basis(&kets);
        let d = basis.len();
        // Control i swaps the blank with i on the target.
        let sigma = |i: usize, j: usize| {
            if i >= n || i == b {
                j
            } else if j == b {
                i
            } else if j == i {
                b
            } else {
                j
            }
        };
        let mut u = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let input = linalg::kron_ket(&basis[i], &basis[j]);
                let output = linalg::kron_ket(&basis[i], &basis[sigma(i, j)]);
                u += linalg::outer(&output, &input);
            }
        }
        let pair = self.restriction.tensor(&self.restriction);
        Some(Decision::from_bool(pair.allows_unitary(&u)))
    }

    fn replica_gates(&self) -> Vec<CMatrix> {
        let id = linalg::identity(self.dim());
        self.gates
            .iter()
            .flat_map(|(_, g)| [linalg::kron(g, &id), linalg::kron(&id, g)])
            .chain(self.couplings.iter().map(|(_, g)| g.clone()))
            .collect()
    }
}

impl TheoryBackend for QuantumBackend {
    type Attribute = QAttribute;

    fn substrate(&self) -> &str {
        &self.name
    }

    fn overlap(&self, a: &QAttribute, b: &QAttribute) -> Option<String> {
        let shared = QAttribute::new(a.members.iter().filter(|m| b.contains(m)).cloned());
        (!shared.is_null()).then(|| self.describe(&shared))
    }

    fn is_subset(&self, a: &QAttribute, b: &QAttribute) -> bool {
        a.members.iter().all(|m| b.contains(m))
    }

    fn union(&self, parts: &[QAttribute]) -> QAttribute {
        QAttribute::new(parts.iter().flat_map(|p| p.members.iter().cloned()))
    }

    fn universe(&self) -> QAttribute {
        self.union(&self.attribute_family().unwrap_or_default())
    }

    fn is_null(&self, a: &QAttribute) -> bool {
        a.is_null()
    }

    fn describe(&self, a: &QAttribute) -> String {
        let names: Vec<String> = a
            .members
            .iter()
            .map(|m| self.label_of(m).map(str::to_string).unwrap_or_else(|| format!("rank-{} projector", m.rank())))
            .collect();
        format!("{{{}}}", names.join(","))
    }

    fn decide(&self, task: &Task<QAttribute>) -> Decision {
        self.q_decide_task(task)
    }

    fn decide_on_replicas(&self, task: &Task<(QAttribute, QAttribute)>) -> Decision {
        let pairs = task.pairs();
        let blank = &pairs[0].0 .1;
        let copy_shaped = pairs.iter().all(|((x, b), (x2, y))| {
            !x.is_null() && self.same_attribute(x, x2) && self.same_attribute(x, y) && self.same_attribute(b, blank)
        });
        if copy_shaped {
            let sources: Vec<&QAttribute> = pairs.iter().map(|((x, _), _)| x).collect();
            if let Some(d) = self.copy_rule(&sources, blank) {
                return d;
            }
        }
        let lifted: Vec<(QAttribute, QAttribute)> =
            pairs.iter().map(|((a, b), (c, d))| (a.tensor(b), c.tensor(d))).collect();
        let dim = self.dim() * self.dim();
        search_decision(gate_search(dim, &self.replica_gates(), self.cap, |u| realizes(&lifted, u)))
    }

    fn attribute_family(&self) -> Result<Vec<QAttribute>, KernelError> {
        let mut family: Vec<QAttribute> = Vec::new();
        for a in self.catalogue.iter().flat_map(|v| v.attributes()) {
            if !family.iter().any(|f| self.same_attribute(f, a)) {
                family.push(a.clone());
            }
        }
        Ok(family)
    }

    fn output_candidates(&self) -> Vec<Variable<QAttribute>> {
        self.catalogue.clone()
    }

    fn direct_distinguishable(&self, v: &Variable<QAttribute>) -> Option<bool> {
        let spans: Vec<ProjAttribute> = v.attributes().filter_map(|a| a.span()).collect();
        Some(
            spans
                .iter()
                .enumerate()
                .all(|(i, a)| spans[i + 1..].iter().all(|b| q_distinguishable(a, b, &self.restriction))),
        )
    }
}
