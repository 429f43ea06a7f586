//! Monoid-closure and task-decision properties on random finite theories.

use std::collections::HashSet;

use ctwb_core::finite::closure::{self, Transformation};
use ctwb_core::finite::NamedMap;
use ctwb_core::kernel::Decision;
use ctwb_core::{FiniteTheory, StateSet, Task};
use proptest::prelude::*;

/// Naive fixpoint: keep composing every known map with every generator
/// until nothing new appears.
fn oracle_closure(n: usize, gens: &[Transformation]) -> HashSet<Transformation> {
    let mut all: HashSet<Transformation> = HashSet::from([(0..n as u32).collect()]);
    loop {
        let mut grown = all.clone();
        for f in &all {
            for g in gens {
                grown.insert(f.iter().map(|&s| g[s as usize]).collect());
            }
        }
        if grown.len() == all.len() {
            return all;
        }
        all = grown;
    }
}

fn theory(n: usize, gens: &[Transformation]) -> FiniteTheory {
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let named = gens.iter().enumerate().map(|(i, g)| NamedMap::new(format!("g{i}"), g.clone())).collect();
    FiniteTheory::new("random", states, named).unwrap()
}

fn maps(n: usize, count: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Transformation>> {
    prop::collection::vec(prop::collection::vec(0..n as u32, n), count)
}

fn perms(n: usize, count: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Transformation>> {
    prop::collection::vec(Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle(), count)
}

fn set_from(mask: u32, n: usize) -> StateSet {
    StateSet::new((0..n).filter(|i| mask & (1 << i) != 0))
}

fn theory_and_task() -> impl Strategy<Value = (usize, Vec<Transformation>, Vec<(u32, u32)>)> {
    (2usize..=4).prop_flat_map(|n| {
        let full = (1u32 << n) - 1;
        (Just(n), maps(n, 1..4), prop::collection::vec((1..=full, 1..=full), 1..3))
    })
}

proptest! {
    #[test]
    fn closure_matches_naive_fixpoint(gens in (2usize..=4).prop_flat_map(|n| (Just(n), maps(n, 1..4)))) {
        let (n, gens) = gens;
        let c = closure::close(n, &gens, usize::MAX);
        prop_assert!(!c.truncated);
        prop_assert_eq!(c.as_set(), oracle_closure(n, &gens));
        prop_assert_eq!(c.maps[0].clone(), closure::identity(n));
    }

    #[test]
    fn closure_ignores_generator_order(
        input in (2usize..=4).prop_flat_map(|n| (Just(n), maps(n, 1..4))).prop_flat_map(|(n, g)| {
            let shuffled = Just(g.clone()).prop_shuffle();
            (Just(n), Just(g), shuffled)
        })
    ) {
        let (n, gens, shuffled) = input;
        prop_assert_eq!(closure::close(n, &gens, usize::MAX).as_set(), closure::close(n, &shuffled, usize::MAX).as_set());
    }

    #[test]
    fn closure_is_closed_under_composition(gens in (2usize..=4).prop_flat_map(|n| (Just(n), maps(n, 1..3)))) {
        let (n, gens) = gens;
        let set = closure::close(n, &gens, usize::MAX).as_set();
        for f in &set {
            for g in &set {
                prop_assert!(set.contains(&closure::then(f, g)));
            }
        }
    }

    #[test]
    fn decision_agrees_with_brute_force((n, gens, pairs) in theory_and_task()) {
        let t = theory(n, &gens);
        let task = Task::new(pairs.iter().map(|&(a, b)| (set_from(a, n), set_from(b, n))).collect()).unwrap();
        let expected = oracle_closure(n, &gens).iter().any(|f| {
            task.pairs().iter().all(|(i, o)| i.iter().all(|s| o.contains(f[s] as usize)))
        });
        prop_assert_eq!(t.decide_task(&task), Decision::from_bool(expected));
    }

    #[test]
    fn decision_is_monotone_in_generators((n, gens, pairs) in theory_and_task(), extra in prop::collection::vec(0u32..4, 4)) {
        let task = Task::new(pairs.iter().map(|&(a, b)| (set_from(a, n), set_from(b, n))).collect()).unwrap();
        let before = theory(n, &gens).decide_task(&task);
        let mut more = gens.clone();
        more.push(extra[..n].iter().map(|&s| s % n as u32).collect());
        let after = theory(n, &more).decide_task(&task);
        prop_assert!(!(before.is_possible() && !after.is_possible()));
    }

    #[test]
    fn identity_task_is_possible((n, gens, pairs) in theory_and_task()) {
        let t = theory(n, &gens);
        let task = Task::new(pairs.iter().map(|&(a, _)| (set_from(a, n), set_from(a, n))).collect()).unwrap();
        prop_assert!(t.decide_task(&task).is_possible());
    }

    #[test]
    fn bijections_cannot_merge(
        (n, gens) in (3usize..=5).prop_flat_map(|n| (Just(n), perms(n, 1..4))),
        split in 1usize..3,
    ) {
        // Disjoint inputs {0..split} and {split..n} both sent into a set
        // smaller than their union.
        let left = StateSet::new(0..split);
        let right = StateSet::new(split..n);
        let target = StateSet::new(0..n - 1);
        let task = Task::new(vec![(left, target.clone()), (right, target)]).unwrap();
        prop_assert_eq!(theory(n, &gens).decide_task(&task), Decision::Impossible);
    }
}

#[test]
fn truncated_closure_reports_inconclusive() {
    let gens = vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]];
    let c = closure::close(4, &gens, 3);
    assert!(c.truncated);
    let t = theory(4, &gens).with_cap(3).unwrap();
    let task =
        Task::new(vec![(StateSet::new([0]), StateSet::new([3])), (StateSet::new([3]), StateSet::new([1]))]).unwrap();
    assert_eq!(theory(4, &gens).decide_task(&task), Decision::Possible);
    assert_eq!(t.decide_task(&task), Decision::Inconclusive);
}
