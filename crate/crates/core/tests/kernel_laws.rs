//! Kernel laws checked exhaustively on the bundled finite theories.

use std::collections::BTreeMap;

use ctwb_core::finite::{BIT_CT, SPEKKENS_CT, TRIT_CT};
use ctwb_core::kernel::BarContext;
use ctwb_core::{
    classify_sector, is_information_variable, parse_theory, FiniteBackend, FiniteTheory, StateSet, TheoryBackend,
};
use proptest::prelude::*;

fn backend(text: &str) -> FiniteBackend {
    FiniteBackend::from_file(&parse_theory(text).unwrap()).unwrap()
}

fn bundled() -> Vec<(&'static str, FiniteBackend)> {
    vec![("bit", backend(BIT_CT)), ("trit", backend(TRIT_CT)), ("spekkens", backend(SPEKKENS_CT))]
}

fn subsets(n: usize) -> Vec<StateSet> {
    (0u32..1 << n).map(|mask| StateSet::new((0..n).filter(|i| mask & (1 << i) != 0))).collect()
}

#[test]
fn distinguishability_is_symmetric_and_irreflexive() {
    for (name, b) in bundled() {
        let ctx = BarContext::new(&b).unwrap();
        let all = subsets(b.theory().size());
        for x in all.iter().filter(|x| !x.is_empty()) {
            assert!(!ctx.distinguishable(x, x).unwrap_or(false), "{name}: {x:?} ⊥ itself");
            for y in all.iter().filter(|y| !y.is_empty()) {
                let xy = ctx.distinguishable(x, y).unwrap_or(false);
                let yx = ctx.distinguishable(y, x).unwrap_or(false);
                assert_eq!(xy, yx, "{name}: {x:?} vs {y:?}");
            }
        }
    }
}

#[test]
fn bar_is_antitone_on_all_subsets() {
    for (name, b) in bundled() {
        let ctx = BarContext::new(&b).unwrap();
        let all = subsets(b.theory().size());
        let bars: Vec<StateSet> = all.iter().map(|a| ctx.bar(a)).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, c) in all.iter().enumerate() {
                if a.is_subset(c) {
                    assert!(bars[j].is_subset(&bars[i]), "{name}: bar({c:?}) ⊄ bar({a:?})");
                }
            }
        }
    }
}

#[test]
fn bar_is_extensive_over_the_family() {
    for (name, b) in bundled() {
        let ctx = BarContext::new(&b).unwrap();
        for a in ctx.family() {
            assert!(a.is_subset(&ctx.bar(&ctx.bar(a))), "{name}: {a:?}");
        }
    }
}

#[test]
fn double_bar_fixes_bit_values() {
    let b = backend(BIT_CT);
    let ctx = BarContext::new(&b).unwrap();
    let zero = StateSet::new([0]);
    assert_eq!(ctx.bar(&zero), StateSet::new([1]));
    assert_eq!(ctx.bar(&ctx.bar(&zero)), zero);
}

#[test]
fn information_variables_have_pairwise_distinguishable_attributes() {
    for (name, b) in bundled() {
        let ctx = BarContext::new(&b).unwrap();
        for v in b.declared_variables().iter().filter(|v| is_information_variable(&b, v)) {
            let attrs: Vec<&StateSet> = v.attributes().collect();
            for (i, x) in attrs.iter().enumerate() {
                for y in &attrs[i + 1..] {
                    assert!(ctx.distinguishable(x, y).unwrap(), "{name}: {}", v.name());
                }
            }
        }
    }
}

#[test]
fn relabeling_preserves_information_variables_exhaustively() {
    use itertools::Itertools;
    for (name, b) in bundled() {
        for v in b.declared_variables() {
            let expected = is_information_variable(&b, &v);
            let labels: Vec<String> = v.labels().map(str::to_string).collect();
            let fresh: Vec<String> = (0..labels.len()).map(|i| format!("q{i}")).collect();
            for image in fresh.iter().cloned().permutations(labels.len()) {
                let mapping: BTreeMap<String, String> = labels.iter().cloned().zip(image).collect();
                let w = v.relabel(&mapping).unwrap();
                assert_eq!(is_information_variable(&b, &w), expected, "{name}: {} as {mapping:?}", v.name());
            }
        }
    }
}

#[test]
fn singleton_permutation_theories_are_media() {
    for n in 2..=4usize {
        let states: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let cycle: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
        let swap: Vec<u32> = (0..n as u32).map(|i| if i < 2 { 1 - i } else { i }).collect();
        let mut t = FiniteTheory::new(
            "perm",
            states,
            vec![ctwb_core::finite::NamedMap::new("cycle", cycle), ctwb_core::finite::NamedMap::new("swap", swap)],
        )
        .unwrap();
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        for (i, a) in names.iter().enumerate() {
            t.declare_attribute(a.clone(), StateSet::new([i])).unwrap();
        }
        t.declare_variable("V", names).unwrap();
        let width = n as u32;
        let add: Vec<u32> =
            (0..width * width).map(|k| (k / width) * width + ((k / width + k % width) % width)).collect();
        let b = FiniteBackend::new(t, vec![ctwb_core::finite::NamedMap::new("add", add)]).unwrap();
        let c = classify_sector(&b, &b.declared_variables());
        assert!(c.is_information_medium, "n = {n}");
        assert!(c.superinformation_witness.is_none());
    }
}

#[test]
fn spekkens_union_has_overlap_finding() {
    let c = ctwb_core::finite::spekkens_demo();
    assert!(c.is_information_medium);
    assert!(c.superinformation_witness.is_none());
    assert!(c.lines().any(|l| l.contains("intersection") && l.contains('1')));
}

proptest! {
    #[test]
    fn distinguishability_symmetric_on_random_spekkens_pairs(x in 1u32..16, y in 1u32..16) {
        let b = backend(SPEKKENS_CT);
        let set = |m: u32| StateSet::new((0..4).filter(|i| m & (1 << i) != 0));
        let (a, c) = (set(x), set(y));
        let ab = ctwb_core::are_distinguishable(&b, &a, &c);
        let ba = ctwb_core::are_distinguishable(&b, &c, &a);
        prop_assert_eq!(ab.is_ok(), ba.is_ok());
        prop_assert_eq!(ab.unwrap_or(false), ba.unwrap_or(false));
        prop_assert_eq!(b.overlap(&a, &c).is_some(), b.overlap(&c, &a).is_some());
    }

    #[test]
    fn relabeling_bit_variable_by_arbitrary_names(l0 in "[a-z]{1,6}", l1 in "[A-Z]{1,6}") {
        let b = backend(BIT_CT);
        let v = b.theory().variable("T").unwrap();
        let labels: Vec<String> = v.labels().map(str::to_string).collect();
        let mapping: BTreeMap<String, String> = labels.into_iter().zip([l0, l1]).collect();
        prop_assert!(is_information_variable(&b, &v.relabel(&mapping).unwrap()));
    }
}
