//! Theory-agnostic constructor-theoretic predicates.
//!
//! Everything here is parameterized by a [`TheoryBackend`], which owns the
//! notion of an attribute, decides whether a task is possible, and declares
//! the finite attribute family over which [`bar`] is computed. The kernel
//! builds copy, permutation and distinguishing tasks from variables and asks
//! the backend about them.

mod task;

use std::fmt::Debug;

use thiserror::Error;

pub use task::{all_permutations, copy_task, measurement_task, permutation_task, LabelPermutation, Task, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("variable `{0}` has no attributes")]
    EmptyVariable(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("task has no pairs")]
    EmptyTask,
    #[error("permutation is not a bijection on the variable's labels")]
    NotAPermutation,
    #[error("label sets of `{input}` and `{output}` differ")]
    LabelMismatch { input: String, output: String },
    #[error("not a variable: {0}")]
    NotAVariable(String),
    #[error("backend `{0}` does not expose an enumerable attribute family")]
    Unsupported(String),
}

/// Outcome of a possibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Possible,
    Impossible,
    /// The bounded search ran out of budget without finding a witness.
    Inconclusive,
    /// The backend has no decision rule for this task shape.
    Unsupported(String),
}

impl Decision {
    pub fn is_possible(&self) -> bool {
        matches!(self, Decision::Possible)
    }

    pub fn from_bool(possible: bool) -> Self {
        if possible {
            Decision::Possible
        } else {
            Decision::Impossible
        }
    }
}

/// A substrate description together with a decision procedure for tasks on
/// it and on two replicas of it.
pub trait TheoryBackend {
    type Attribute: Clone + Debug + PartialEq;

    fn substrate(&self) -> &str;

    /// `None` when `a` and `b` are disjoint as state sets, otherwise a
    /// description of the shared states.
    fn overlap(&self, a: &Self::Attribute, b: &Self::Attribute) -> Option<String>;

    fn is_subset(&self, a: &Self::Attribute, b: &Self::Attribute) -> bool;

    fn same_attribute(&self, a: &Self::Attribute, b: &Self::Attribute) -> bool {
        self.is_subset(a, b) && self.is_subset(b, a)
    }

    /// Union of attributes; the empty slice gives the null attribute.
    fn union(&self, parts: &[Self::Attribute]) -> Self::Attribute;

    /// The attribute holding every state of the substrate.
    fn universe(&self) -> Self::Attribute;

    fn is_null(&self, a: &Self::Attribute) -> bool;

    fn describe(&self, a: &Self::Attribute) -> String;

    fn decide(&self, task: &Task<Self::Attribute>) -> Decision;

    /// Decides a task on the composite of two replicas of this substrate
    /// (source first, target second).
    fn decide_on_replicas(&self, task: &Task<(Self::Attribute, Self::Attribute)>) -> Decision;

    /// The enumerated attribute family `bar` ranges over.
    fn attribute_family(&self) -> Result<Vec<Self::Attribute>, KernelError>;

    /// Declared variables that may serve as outputs of a distinguishing
    /// task. The kernel keeps only those that are information variables.
    fn output_candidates(&self) -> Vec<Variable<Self::Attribute>>;

    /// Backends with a closed-form distinguishability rule return it here;
    /// the default defers to the catalogue search.
    fn direct_distinguishable(&self, _v: &Variable<Self::Attribute>) -> Option<bool> {
        None
    }
}

/// Checks that the attributes of `v` are pairwise disjoint.
pub fn check_variable<B: TheoryBackend>(backend: &B, v: &Variable<B::Attribute>) -> Result<(), KernelError> {
    let entries = v.entries();
    for (i, (la, a)) in entries.iter().enumerate() {
        for (lb, b) in &entries[i + 1..] {
            if let Some(shared) = backend.overlap(a, b) {
                return Err(KernelError::NotAVariable(format!("intersection of {la} and {lb} is non-empty: {shared}")));
            }
        }
    }
    Ok(())
}

fn fold(acc: Decision, next: Decision) -> Decision {
    match (acc, next) {
        (Decision::Impossible, _) | (_, Decision::Impossible) => Decision::Impossible,
        (Decision::Unsupported(m), _) | (_, Decision::Unsupported(m)) => Decision::Unsupported(m),
        (Decision::Inconclusive, _) | (_, Decision::Inconclusive) => Decision::Inconclusive,
        _ => Decision::Possible,
    }
}

/// Tri-state form of [`is_information_variable`]: `Inconclusive` when a
/// bounded search was cut short before a verdict could be reached.
pub fn information_variable_decision<B: TheoryBackend>(backend: &B, v: &Variable<B::Attribute>) -> Decision {
    if check_variable(backend, v).is_err() {
        return Decision::Impossible;
    }

    let mut copy = Decision::Impossible;
    for blank in v.labels() {
        let task = copy_task(v, blank).expect("blank is a label of v");
        match backend.decide_on_replicas(&task) {
            Decision::Possible => {
                copy = Decision::Possible;
                break;
            }
            Decision::Inconclusive => copy = Decision::Inconclusive,
            Decision::Unsupported(m) if copy == Decision::Impossible => copy = Decision::Unsupported(m),
            _ => {}
        }
    }
    if copy == Decision::Impossible {
        return copy;
    }

    let mut verdict = copy;
    for perm in all_permutations(v) {
        let task = permutation_task(v, &perm).expect("generated permutations are bijections");
        verdict = fold(verdict, backend.decide(&task));
        if verdict == Decision::Impossible {
            break;
        }
    }
    verdict
}

/// True iff the copy task is possible for some blank and every permutation
/// task is possible.
pub fn is_information_variable<B: TheoryBackend>(backend: &B, v: &Variable<B::Attribute>) -> bool {
    information_variable_decision(backend, v).is_possible()
}

/// The declared output candidates that are information variables.
fn information_outputs<B: TheoryBackend>(backend: &B) -> Vec<Variable<B::Attribute>> {
    backend.output_candidates().into_iter().filter(|v| is_information_variable(backend, v)).collect()
}

fn distinguishable_with<B: TheoryBackend>(
    backend: &B,
    v: &Variable<B::Attribute>,
    outputs: &[Variable<B::Attribute>],
) -> bool {
    if let Some(answer) = backend.direct_distinguishable(v) {
        return answer;
    }
    use itertools::Itertools;
    let n = v.arity();
    for out in outputs.iter().filter(|o| o.arity() >= n) {
        let attrs: Vec<&B::Attribute> = out.attributes().collect();
        for chosen in attrs.iter().permutations(n) {
            let pairs = v.attributes().cloned().zip(chosen.into_iter().map(|q| (*q).clone())).collect();
            let task = Task::new(pairs).expect("variables are non-empty");
            if backend.decide(&task).is_possible() {
                return true;
            }
        }
    }
    false
}

/// Whether `{x → q_x}` is possible for some information variable `{q_x}`
/// drawn from the backend's catalogue.
pub fn is_distinguishable<B: TheoryBackend>(backend: &B, v: &Variable<B::Attribute>) -> Result<bool, KernelError> {
    check_variable(backend, v)?;
    Ok(distinguishable_with(backend, v, &information_outputs(backend)))
}

fn pair<A: Clone>(a: &A, b: &A) -> Variable<A> {
    Variable::new("pair", [("a", a.clone()), ("b", b.clone())]).expect("two distinct labels")
}

/// `a ⊥ b`: the two-attribute variable `{a, b}` is distinguishable.
pub fn are_distinguishable<B: TheoryBackend>(
    backend: &B,
    a: &B::Attribute,
    b: &B::Attribute,
) -> Result<bool, KernelError> {
    is_distinguishable(backend, &pair(a, b))
}

fn bar_with<B: TheoryBackend>(
    backend: &B,
    a: &B::Attribute,
    family: &[B::Attribute],
    outputs: &[Variable<B::Attribute>],
) -> B::Attribute {
    // Every attribute is vacuously distinguishable from the null attribute.
    if backend.is_null(a) {
        return backend.universe();
    }
    let members: Vec<B::Attribute> = family
        .iter()
        .filter(|b| {
            !backend.is_null(b)
                && backend.overlap(a, b).is_none()
                && distinguishable_with(backend, &pair(a, b), outputs)
        })
        .cloned()
        .collect();
    backend.union(&members)
}

/// Union of all attributes in the backend's family that are distinguishable
/// from `a`.
pub fn bar<B: TheoryBackend>(backend: &B, a: &B::Attribute) -> Result<B::Attribute, KernelError> {
    let family = backend.attribute_family()?;
    Ok(bar_with(backend, a, &family, &information_outputs(backend)))
}

/// Precomputed family and output catalogue, for callers that evaluate `bar`
/// many times against one backend.
pub struct BarContext<'a, B: TheoryBackend> {
    backend: &'a B,
    family: Vec<B::Attribute>,
    outputs: Vec<Variable<B::Attribute>>,
}

impl<'a, B: TheoryBackend> BarContext<'a, B> {
    pub fn new(backend: &'a B) -> Result<Self, KernelError> {
        Ok(Self { backend, family: backend.attribute_family()?, outputs: information_outputs(backend) })
    }

    pub fn family(&self) -> &[B::Attribute] {
        &self.family
    }

    pub fn bar(&self, a: &B::Attribute) -> B::Attribute {
        bar_with(self.backend, a, &self.family, &self.outputs)
    }

    pub fn distinguishable(&self, a: &B::Attribute, b: &B::Attribute) -> Result<bool, KernelError> {
        let v = pair(a, b);
        check_variable(self.backend, &v)?;
        Ok(distinguishable_with(self.backend, &v, &self.outputs))
    }
}

/// An information variable each of whose attributes equals its double bar.
pub fn is_observable<B: TheoryBackend>(backend: &B, v: &Variable<B::Attribute>) -> Result<bool, KernelError> {
    if !is_information_variable(backend, v) {
        return Ok(false);
    }
    let ctx = BarContext::new(backend)?;
    Ok(v.attributes().all(|x| backend.same_attribute(&ctx.bar(&ctx.bar(x)), x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingKind {
    InformationVariable,
    NotInformationVariable,
    Observable,
    NotObservable,
    Overlap,
    UnionIsInformationVariable,
    Witness,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorFinding {
    pub kind: FindingKind,
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct SectorClassification<A> {
    pub is_information_medium: bool,
    pub superinformation_witness: Option<(Variable<A>, Variable<A>)>,
    pub report: Vec<SectorFinding>,
    /// Some decision was cut short by a search cap.
    pub inconclusive: bool,
}

impl<A> SectorClassification<A> {
    pub fn is_superinformation_medium(&self) -> bool {
        self.superinformation_witness.is_some()
    }

    pub fn lines(&self) -> impl Iterator<Item = &str> {
        self.report.iter().map(|f| f.text.as_str())
    }
}

/// Classifies a substrate from a catalogue of candidate variables. The
/// witness is the first pair, in catalogue order, of information observables
/// with mutually disjoint attributes whose union is not an information
/// variable.
pub fn classify_sector<B: TheoryBackend>(
    backend: &B,
    catalogue: &[Variable<B::Attribute>],
) -> SectorClassification<B::Attribute> {
    let mut report = Vec::new();
    let mut inconclusive = false;
    let mut push = |kind, text: String| report.push(SectorFinding { kind, text });

    let mut info = Vec::with_capacity(catalogue.len());
    for v in catalogue {
        let d = information_variable_decision(backend, v);
        match &d {
            Decision::Possible => {
                push(FindingKind::InformationVariable, format!("{} is an information variable", v.name()))
            }
            Decision::Inconclusive => {
                inconclusive = true;
                push(FindingKind::Inconclusive, format!("{}: inconclusive (closure cap reached)", v.name()))
            }
            Decision::Unsupported(m) => {
                push(FindingKind::NotInformationVariable, format!("{}: not decided ({m})", v.name()))
            }
            Decision::Impossible => {
                push(FindingKind::NotInformationVariable, format!("{} is not an information variable", v.name()))
            }
        }
        info.push(d.is_possible());
    }
    let is_information_medium = info.iter().any(|&b| b);

    let ctx = BarContext::new(backend).ok();
    let mut observables = Vec::new();
    for (v, _) in catalogue.iter().zip(&info).filter(|(_, &ok)| ok) {
        let observable = match &ctx {
            Some(ctx) => v.attributes().all(|x| backend.same_attribute(&ctx.bar(&ctx.bar(x)), x)),
            None => false,
        };
        if observable {
            push(FindingKind::Observable, format!("{} is an observable", v.name()));
            observables.push(v);
        } else {
            push(FindingKind::NotObservable, format!("{} is not an observable", v.name()));
        }
    }

    let mut witness = None;
    'pairs: for (i, x) in observables.iter().enumerate() {
        for z in &observables[i + 1..] {
            let mut disjoint = true;
            for (lx, ax) in x.entries() {
                for (lz, az) in z.entries() {
                    if let Some(shared) = backend.overlap(ax, az) {
                        disjoint = false;
                        push(
                            FindingKind::Overlap,
                            format!("intersection of {}.{lx} and {}.{lz} is non-empty: {shared}", x.name(), z.name()),
                        );
                    }
                }
            }
            if !disjoint {
                continue;
            }
            let union = x.union(z);
            match information_variable_decision(backend, &union) {
                Decision::Possible => push(
                    FindingKind::UnionIsInformationVariable,
                    format!("{} is an information variable", union.name()),
                ),
                Decision::Inconclusive => {
                    inconclusive = true;
                    push(FindingKind::Inconclusive, format!("{}: inconclusive (closure cap reached)", union.name()));
                }
                _ => {
                    push(
                        FindingKind::Witness,
                        format!(
                            "superinformation witness ({}, {}): {} is not an information variable",
                            x.name(),
                            z.name(),
                            union.name()
                        ),
                    );
                    witness = Some(((*x).clone(), (*z).clone()));
                    break 'pairs;
                }
            }
        }
    }

    SectorClassification { is_information_medium, superinformation_witness: witness, report, inconclusive }
}
