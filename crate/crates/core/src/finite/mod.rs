//! Finite ontic-state theories.
//!
//! A theory is a finite state set plus named deterministic maps. A task is
//! possible when some composition of the generators carries every input
//! attribute into its output attribute; the search is a bounded BFS over
//! the generated monoid.

pub mod closure;
mod parse;
mod spekkens;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::kernel::{Decision, KernelError, Task, TheoryBackend, Variable};
use closure::{SearchOutcome, Transformation};

pub use closure::ClosureResult;
pub use parse::{parse_theory, JointMap, ParseError, TheoryFile};
pub use spekkens::{bundled, spekkens_demo, BIT_CT, SPEKKENS_CT, TRIT_CT};

pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteError {
    #[error("map `{map}` is not total: state `{state}` has no image")]
    NonTotalMap { map: String, state: String },
    #[error("map `{map}` sends state index {index} outside the state set")]
    ImageOutOfRange { map: String, index: u32 },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("closure cap {cap} is smaller than the number of generators {generators}")]
    CapTooSmall { cap: usize, generators: usize },
    #[error("theory has no states")]
    NoStates,
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A set of ontic states, by index into the owning theory's state list.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(BTreeSet<usize>);

impl StateSet {
    pub fn new(states: impl IntoIterator<Item = usize>) -> Self {
        Self(states.into_iter().collect())
    }

    pub fn contains(&self, s: usize) -> bool {
        self.0.contains(&s)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.0.intersection(&other.0).copied().collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        Self(self.0.union(&other.0).copied().collect())
    }

    /// `a × b` on a product whose second factor has `width` states.
    pub fn product(&self, other: &Self, width: usize) -> Self {
        Self(self.iter().flat_map(|i| other.iter().map(move |j| i * width + j)).collect())
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter)
    }
}

/// A named total map on a theory's states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMap {
    pub name: String,
    pub images: Transformation,
}

impl NamedMap {
    pub fn new(name: impl Into<String>, images: Transformation) -> Self {
        Self { name: name.into(), images }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteTheory {
    name: String,
    states: Vec<String>,
    generators: Vec<NamedMap>,
    closure_cap: usize,
    attributes: Vec<(String, StateSet)>,
    variables: Vec<(String, Vec<String>)>,
}

impl FiniteTheory {
    pub fn new(name: impl Into<String>, states: Vec<String>, generators: Vec<NamedMap>) -> Result<Self, FiniteError> {
        if states.is_empty() {
            return Err(FiniteError::NoStates);
        }
        let n = states.len();
        let mut names = BTreeSet::new();
        for g in &generators {
            if !names.insert(g.name.as_str()) {
                return Err(FiniteError::DuplicateName(g.name.clone()));
            }
            if g.images.len() != n {
                return Err(FiniteError::NonTotalMap {
                    map: g.name.clone(),
                    state: states[g.images.len().min(n - 1)].clone(),
                });
            }
            if let Some(&bad) = g.images.iter().find(|&&i| i as usize >= n) {
                return Err(FiniteError::ImageOutOfRange { map: g.name.clone(), index: bad });
            }
        }
        let closure_cap = DEFAULT_CLOSURE_CAP.max(generators.len());
        Ok(Self { name: name.into(), states, generators, closure_cap, attributes: Vec::new(), variables: Vec::new() })
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self, FiniteError> {
        if cap < self.generators.len() {
            return Err(FiniteError::CapTooSmall { cap, generators: self.generators.len() });
        }
        self.closure_cap = cap;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn generators(&self) -> &[NamedMap] {
        &self.generators
    }

    pub fn closure_cap(&self) -> usize {
        self.closure_cap
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    /// Builds a state set from labels; panics on an unknown label.
    pub fn set(&self, labels: &[&str]) -> StateSet {
        labels.iter().map(|l| self.state_index(l).unwrap_or_else(|| panic!("unknown state `{l}`"))).collect()
    }

    pub fn add_generator(&mut self, map: NamedMap) -> Result<(), FiniteError> {
        if self.generators.iter().any(|g| g.name == map.name) {
            return Err(FiniteError::DuplicateName(map.name));
        }
        if map.images.len() != self.size() {
            return Err(FiniteError::NonTotalMap {
                map: map.name,
                state: self.states[map.images.len().min(self.size() - 1)].clone(),
            });
        }
        self.generators.push(map);
        self.closure_cap = self.closure_cap.max(self.generators.len());
        Ok(())
    }

    pub fn declare_attribute(&mut self, name: impl Into<String>, set: StateSet) -> Result<(), FiniteError> {
        let name = name.into();
        if self.attributes.iter().any(|(n, _)| *n == name) {
            return Err(FiniteError::DuplicateName(name));
        }
        self.attributes.push((name, set));
        Ok(())
    }

    pub fn declare_variable(&mut self, name: impl Into<String>, attrs: Vec<String>) -> Result<(), FiniteError> {
        let name = name.into();
        if self.variables.iter().any(|(n, _)| *n == name) {
            return Err(FiniteError::DuplicateName(name));
        }
        for a in &attrs {
            if self.attribute(a).is_none() {
                return Err(FiniteError::UnknownAttribute(a.clone()));
            }
        }
        self.variables.push((name, attrs));
        Ok(())
    }

    pub fn attribute(&self, name: &str) -> Option<&StateSet> {
        self.attributes.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn attributes(&self) -> &[(String, StateSet)] {
        &self.attributes
    }

    pub fn variable(&self, name: &str) -> Result<Variable<StateSet>, FiniteError> {
        let (_, attrs) = self
            .variables
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| FiniteError::UnknownVariable(name.to_string()))?;
        Ok(Variable::new(
            name,
            attrs.iter().map(|a| (a.clone(), self.attribute(a).expect("checked at declaration").clone())),
        )?)
    }

    pub fn variables(&self) -> Vec<Variable<StateSet>> {
        self.variables.iter().map(|(n, _)| self.variable(n).expect("declared variables resolve")).collect()
    }

    pub fn label_set(&self, set: &StateSet) -> String {
        let labels: Vec<&str> = set.iter().map(|i| self.states[i].as_str()).collect();
        format!("{{{}}}", labels.join(","))
    }

    fn generator_tables(&self) -> Vec<Transformation> {
        self.generators.iter().map(|g| g.images.clone()).collect()
    }

    pub fn monoid_closure(&self) -> ClosureResult {
        closure::close(self.size(), &self.generator_tables(), self.closure_cap)
    }

    /// Searches the generated monoid for a map `f` with `f(in) ⊆ out` for
    /// every pair of the task.
    pub fn decide_task(&self, task: &Task<StateSet>) -> Decision {
        let outcome = closure::search(self.size(), &self.generator_tables(), self.closure_cap, |f| {
            task.pairs().iter().all(|(input, output)| input.iter().all(|s| output.contains(f[s] as usize)))
        });
        match outcome {
            SearchOutcome::Found(_) => Decision::Possible,
            SearchOutcome::Exhausted => Decision::Impossible,
            SearchOutcome::Truncated => Decision::Inconclusive,
        }
    }

    /// Product theory. Local generators are lifted as `g⊗id` and `id⊗g`;
    /// `joint` maps act on the product index `i * |b| + j`. Declared
    /// attributes and variables become their pairwise products.
    pub fn compose(a: &Self, b: &Self, joint: Vec<NamedMap>) -> Result<Self, FiniteError> {
        let (na, nb) = (a.size(), b.size());
        let states = a.states.iter().flat_map(|s| b.states.iter().map(move |t| format!("({s},{t})"))).collect();
        let mut gens = Vec::new();
        for g in &a.generators {
            let images = (0..na * nb).map(|k| g.images[k / nb] * nb as u32 + (k % nb) as u32).collect();
            gens.push(NamedMap::new(format!("{}⊗id", grouped(&g.name)), images));
        }
        for g in &b.generators {
            let images = (0..na * nb).map(|k| (k / nb * nb) as u32 + g.images[k % nb]).collect();
            gens.push(NamedMap::new(format!("id⊗{}", grouped(&g.name)), images));
        }
        gens.extend(joint);
        let mut t = FiniteTheory::new(format!("{}⊕{}", a.name, b.name), states, gens)?;
        t.closure_cap = a.closure_cap.max(b.closure_cap).max(t.generators.len());
        for (an, aset) in &a.attributes {
            for (bn, bset) in &b.attributes {
                t.declare_attribute(format!("{an}×{bn}"), aset.product(bset, nb))?;
            }
        }
        for (vn, vattrs) in &a.variables {
            for (wn, wattrs) in &b.variables {
                let attrs = vattrs.iter().flat_map(|x| wattrs.iter().map(move |y| format!("{x}×{y}"))).collect();
                t.declare_variable(format!("{vn}×{wn}"), attrs)?;
            }
        }
        Ok(t)
    }
}

/// Parenthesizes compound generator names so that lifts stay unambiguous.
fn grouped(name: &str) -> String {
    if name.contains('⊗') {
        format!("({name})")
    } else {
        name.to_string()
    }
}

/// Lifts a map on the pair space `A×A'` to `(A×B)×(A'×B')`, acting on the
/// `A` slots (`first == true`) or the `B` slots.
fn lift_replica_joint(map: &NamedMap, na: usize, nb: usize, first: bool) -> NamedMap {
    let nab = na * nb;
    let images = (0..nab * nab)
        .map(|k| {
            let (ab, ab2) = (k / nab, k % nab);
            let (a, b, a2, b2) = (ab / nb, ab % nb, ab2 / nb, ab2 % nb);
            let (a, b, a2, b2) = if first {
                let img = map.images[a * na + a2] as usize;
                (img / na, b, img % na, b2)
            } else {
                let img = map.images[b * nb + b2] as usize;
                (a, img / nb, a2, img % nb)
            };
            ((a * nb + b) * nab + a2 * nb + b2) as u32
        })
        .collect();
    NamedMap::new(format!("{}[{}]", map.name, if first { "left" } else { "right" }), images)
}

/// A finite theory together with the composite of two of its replicas,
/// which is where copy tasks are decided.
#[derive(Clone, Debug)]
pub struct FiniteBackend {
    theory: FiniteTheory,
    replica_joints: Vec<NamedMap>,
    replica: FiniteTheory,
}

impl FiniteBackend {
    /// `replica_joints` act on the pair index `source * n + target`.
    pub fn new(theory: FiniteTheory, replica_joints: Vec<NamedMap>) -> Result<Self, FiniteError> {
        let replica = FiniteTheory::compose(&theory, &theory, replica_joints.clone())?;
        Ok(Self { theory, replica_joints, replica })
    }

    /// The first theory of a parsed file, with the joint maps it declares on
    /// two copies of itself.
    pub fn from_file(file: &TheoryFile) -> Result<Self, FiniteError> {
        let theory = file.primary().clone();
        Self::from_file_theory(file, theory.name())
    }

    pub fn from_file_theory(file: &TheoryFile, name: &str) -> Result<Self, FiniteError> {
        let theory = file.theory(name).ok_or_else(|| FiniteError::UnknownVariable(name.to_string()))?.clone();
        let joints =
            file.joint_maps().iter().filter(|j| j.left == name && j.right == name).map(|j| j.map.clone()).collect();
        Self::new(theory, joints)
    }

    pub fn theory(&self) -> &FiniteTheory {
        &self.theory
    }

    pub fn replica(&self) -> &FiniteTheory {
        &self.replica
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self, FiniteError> {
        self.theory = self.theory.with_cap(cap)?;
        let floor = self.replica.generators.len();
        self.replica = self.replica.with_cap(cap.max(floor))?;
        Ok(self)
    }

    /// `self ⊕ other` with extra `joint` generators on the product. The
    /// replicas of the composite carry both components' replica couplings,
    /// which is what makes the product variable copiable.
    pub fn compose(&self, other: &Self, joint: Vec<NamedMap>) -> Result<Self, FiniteError> {
        let theory = FiniteTheory::compose(&self.theory, &other.theory, joint)?;
        let (na, nb) = (self.theory.size(), other.theory.size());
        let replica_joints = self
            .replica_joints
            .iter()
            .map(|m| lift_replica_joint(m, na, nb, true))
            .chain(other.replica_joints.iter().map(|m| lift_replica_joint(m, na, nb, false)))
            .collect();
        Self::new(theory, replica_joints)
    }

    pub fn declared_variables(&self) -> Vec<Variable<StateSet>> {
        self.theory.variables()
    }
}

impl TheoryBackend for FiniteBackend {
    type Attribute = StateSet;

    fn substrate(&self) -> &str {
        self.theory.name()
    }

    fn overlap(&self, a: &StateSet, b: &StateSet) -> Option<String> {
        let shared = a.intersection(b);
        (!shared.is_empty()).then(|| self.theory.label_set(&shared))
    }

    fn is_subset(&self, a: &StateSet, b: &StateSet) -> bool {
        a.is_subset(b)
    }

    fn union(&self, parts: &[StateSet]) -> StateSet {
        parts.iter().fold(StateSet::default(), |acc, p| acc.union(p))
    }

    fn universe(&self) -> StateSet {
        (0..self.theory.size()).collect()
    }

    fn is_null(&self, a: &StateSet) -> bool {
        a.is_empty()
    }

    fn describe(&self, a: &StateSet) -> String {
        self.theory.label_set(a)
    }

    fn decide(&self, task: &Task<StateSet>) -> Decision {
        self.theory.decide_task(task)
    }

    fn decide_on_replicas(&self, task: &Task<(StateSet, StateSet)>) -> Decision {
        let n = self.theory.size();
        let pairs = task.pairs().iter().map(|((a, b), (c, d))| (a.product(b, n), c.product(d, n))).collect();
        self.replica.decide_task(&Task::new(pairs).expect("task is non-empty"))
    }

    /// Declared attributes, or every singleton when none are declared.
    fn attribute_family(&self) -> Result<Vec<StateSet>, KernelError> {
        if self.theory.attributes.is_empty() {
            Ok((0..self.theory.size()).map(|s| StateSet::new([s])).collect())
        } else {
            Ok(self.theory.attributes.iter().map(|(_, s)| s.clone()).collect())
        }
    }

    fn output_candidates(&self) -> Vec<Variable<StateSet>> {
        self.theory.variables()
    }
}

impl fmt::Display for FiniteTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} states, {} generators)", self.name, self.size(), self.generators.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{copy_task, Task};

    fn bit(perm_only: bool) -> FiniteTheory {
        let mut gens = vec![NamedMap::new("not", vec![1, 0])];
        if !perm_only {
            gens.push(NamedMap::new("reset", vec![0, 0]));
        }
        FiniteTheory::new("bit", vec!["0".into(), "1".into()], gens).unwrap()
    }

    fn single(t: &FiniteTheory, pairs: &[(&[&str], &[&str])]) -> Task<StateSet> {
        Task::new(pairs.iter().map(|(i, o)| (t.set(i), t.set(o))).collect()).unwrap()
    }

    #[test]
    fn not_task_possible() {
        let t = bit(true);
        assert_eq!(t.decide_task(&single(&t, &[(&["0"], &["1"]), (&["1"], &["0"])])), Decision::Possible);
    }

    #[test]
    fn merge_impossible_with_bijections() {
        let t = bit(true);
        assert_eq!(t.decide_task(&single(&t, &[(&["0"], &["0"]), (&["1"], &["0"])])), Decision::Impossible);
        let t = bit(false);
        assert_eq!(t.decide_task(&single(&t, &[(&["0"], &["0"]), (&["1"], &["0"])])), Decision::Possible);
    }

    #[test]
    fn cnot_copies_a_bit() {
        let t = bit(true);
        let cnot = NamedMap::new("cnot", vec![0, 1, 3, 2]);
        let backend = FiniteBackend::new(t.clone(), vec![cnot]).unwrap();
        let v = Variable::new("T", [("0", t.set(&["0"])), ("1", t.set(&["1"]))]).unwrap();
        let task = copy_task(&v, "0").unwrap();
        assert_eq!(backend.decide_on_replicas(&task), Decision::Possible);

        let uncoupled = FiniteBackend::new(t, vec![]).unwrap();
        assert_eq!(uncoupled.decide_on_replicas(&task), Decision::Impossible);
    }

    #[test]
    fn non_total_generator_rejected() {
        let err = FiniteTheory::new("x", vec!["a".into(), "b".into()], vec![NamedMap::new("f", vec![0])]);
        assert!(matches!(err, Err(FiniteError::NonTotalMap { .. })));
    }

    #[test]
    fn cap_below_generator_count_rejected() {
        let t = bit(false);
        assert!(matches!(t.with_cap(1), Err(FiniteError::CapTooSmall { .. })));
    }

    #[test]
    fn compose_lifts_generators() {
        let t = bit(true);
        let c = FiniteTheory::compose(&t, &t, vec![]).unwrap();
        assert_eq!(c.size(), 4);
        assert_eq!(c.generators()[0].images, vec![2, 3, 0, 1]);
        assert_eq!(c.generators()[1].images, vec![1, 0, 3, 2]);
        assert_eq!(c.states()[2], "(1,0)");
    }

    #[test]
    fn replica_joint_lift_matches_direct_construction() {
        // cnot on (a, a') of (a,b,a',b') for bits: flip a' when a = 1.
        let cnot = NamedMap::new("cnot", vec![0, 1, 3, 2]);
        let lifted = lift_replica_joint(&cnot, 2, 2, true);
        for k in 0..16u32 {
            let (a, b, a2, b2) = (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1);
            let expect = (a << 3) | (b << 2) | ((a2 ^ a) << 1) | b2;
            assert_eq!(lifted.images[k as usize], expect, "state {k}");
        }
        let lifted = lift_replica_joint(&cnot, 2, 2, false);
        for k in 0..16u32 {
            let (a, b, a2, b2) = (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1);
            let expect = (a << 3) | (b << 2) | (a2 << 1) | (b2 ^ b);
            assert_eq!(lifted.images[k as usize], expect, "state {k}");
        }
    }
}
