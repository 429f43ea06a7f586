//! Variables and tasks, the two value types every backend consumes.

use std::collections::{BTreeMap, BTreeSet};

use super::KernelError;

/// A label-indexed family of attributes on one substrate.
///
/// Construction checks only what can be checked without a backend: at least
/// one entry and unique labels. Pairwise disjointness of the attributes is a
/// backend question, see [`super::check_variable`].
#[derive(Clone, Debug, PartialEq)]
pub struct Variable<A> {
    name: String,
    entries: Vec<(String, A)>,
}

impl<A: Clone> Variable<A> {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        entries: impl IntoIterator<Item = (S, A)>,
    ) -> Result<Self, KernelError> {
        let name = name.into();
        let entries: Vec<(String, A)> = entries.into_iter().map(|(l, a)| (l.into(), a)).collect();
        if entries.is_empty() {
            return Err(KernelError::EmptyVariable(name));
        }
        let mut seen = BTreeSet::new();
        for (label, _) in &entries {
            if !seen.insert(label.as_str()) {
                return Err(KernelError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { name, entries })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(String, A)] {
        &self.entries
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn attributes(&self) -> impl Iterator<Item = &A> {
        self.entries.iter().map(|(_, a)| a)
    }

    pub fn get(&self, label: &str) -> Option<&A> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, a)| a)
    }

    pub fn label_set(&self) -> BTreeSet<&str> {
        self.labels().collect()
    }

    /// Renames labels through `mapping`; labels absent from the map are kept.
    pub fn relabel(&self, mapping: &BTreeMap<String, String>) -> Result<Self, KernelError> {
        Variable::new(
            self.name.clone(),
            self.entries.iter().map(|(l, a)| (mapping.get(l).cloned().unwrap_or_else(|| l.clone()), a.clone())),
        )
    }

    /// Union of two variables. Labels are qualified with the variable name
    /// (`Z.z1`) so that the result always has unique labels.
    pub fn union(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(l, a)| (format!("{}.{}", self.name, l), a.clone()))
            .chain(other.entries.iter().map(|(l, a)| (format!("{}.{}", other.name, l), a.clone())))
            .collect();
        Self { name: format!("{}∪{}", self.name, other.name), entries }
    }

    /// The sub-variable holding only the listed labels, in the listed order.
    pub fn restrict(&self, labels: &[&str]) -> Result<Self, KernelError> {
        let entries = labels
            .iter()
            .map(|l| {
                self.get(l).cloned().map(|a| (l.to_string(), a)).ok_or_else(|| KernelError::UnknownLabel(l.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Variable::new(self.name.clone(), entries)
    }
}

/// Ordered list of `input -> output` attribute pairs on a fixed substrate.
#[derive(Clone, Debug, PartialEq)]
pub struct Task<A> {
    pairs: Vec<(A, A)>,
}

impl<A> Task<A> {
    pub fn new(pairs: Vec<(A, A)>) -> Result<Self, KernelError> {
        if pairs.is_empty() {
            return Err(KernelError::EmptyTask);
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(A, A)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn inputs(&self) -> impl Iterator<Item = &A> {
        self.pairs.iter().map(|(i, _)| i)
    }
}

/// A permutation of a variable's labels, given as `label -> image`.
pub type LabelPermutation = BTreeMap<String, String>;

/// `∪ₓ {(x, x₀) → (x, x)}`: copy the source replica's attribute onto a
/// target replica that starts in the blank attribute.
pub fn copy_task<A: Clone>(v: &Variable<A>, blank_label: &str) -> Result<Task<(A, A)>, KernelError> {
    measurement_task(v, v, blank_label)
}

/// `∪ₓ {x → Π(x)}`.
pub fn permutation_task<A: Clone>(v: &Variable<A>, perm: &LabelPermutation) -> Result<Task<A>, KernelError> {
    let labels = v.label_set();
    let domain: BTreeSet<&str> = perm.keys().map(String::as_str).collect();
    let image: BTreeSet<&str> = perm.values().map(String::as_str).collect();
    if domain != labels || image != labels {
        return Err(KernelError::NotAPermutation);
    }
    let pairs = v
        .entries()
        .iter()
        .map(|(label, attr)| {
            let target = &perm[label];
            (attr.clone(), v.get(target).expect("image checked above").clone())
        })
        .collect();
    Task::new(pairs)
}

/// `∪ₓ {(x, x₀) → (x, pₓ)}` with the source on the first substrate and the
/// output variable on the second. Pairs follow the source's label order.
pub fn measurement_task<A: Clone, B: Clone>(
    source: &Variable<A>,
    output: &Variable<B>,
    blank_label: &str,
) -> Result<Task<(A, B)>, KernelError> {
    if source.label_set() != output.label_set() {
        return Err(KernelError::LabelMismatch { input: source.name().to_string(), output: output.name().to_string() });
    }
    let blank = output.get(blank_label).ok_or_else(|| KernelError::UnknownLabel(blank_label.to_string()))?;
    let pairs = source
        .entries()
        .iter()
        .map(|(label, x)| {
            let p = output.get(label).expect("label sets are equal");
            ((x.clone(), blank.clone()), (x.clone(), p.clone()))
        })
        .collect();
    Task::new(pairs)
}

/// Every permutation of `v`'s labels, identity first.
pub fn all_permutations<A: Clone>(v: &Variable<A>) -> Vec<LabelPermutation> {
    use itertools::Itertools;
    let labels: Vec<String> = v.labels().map(str::to_string).collect();
    labels.iter().cloned().permutations(labels.len()).map(|image| labels.iter().cloned().zip(image).collect()).collect()
}
