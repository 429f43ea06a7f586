//! Bundled theories and the toy-model comparison.

use super::{parse_theory, FiniteBackend, StateSet};
use crate::kernel::{classify_sector, SectorClassification};

pub const BIT_CT: &str = include_str!("../../examples/bit.ct");
pub const TRIT_CT: &str = include_str!("../../examples/trit.ct");
pub const SPEKKENS_CT: &str = include_str!("../../examples/spekkens.ct");

/// Source text of a bundled theory by name (`bit`, `trit`, `spekkens`).
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "bit" => Some(BIT_CT),
        "trit" => Some(TRIT_CT),
        "spekkens" => Some(SPEKKENS_CT),
        _ => None,
    }
}

/// Classifies the four-state toy model with catalogue `[Z, X]`. Both are
/// information observables, but their attributes share ontic states, so the
/// pair cannot witness a superinformation medium.
pub fn spekkens_demo() -> SectorClassification<StateSet> {
    let file = parse_theory(SPEKKENS_CT).expect("bundled theory parses");
    let backend = FiniteBackend::from_file(&file).expect("bundled theory is well formed");
    let t = backend.theory();
    let catalogue = [t.variable("Z").unwrap(), t.variable("X").unwrap()];
    classify_sector(&backend, &catalogue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{is_information_variable, FindingKind, TheoryBackend};

    #[test]
    fn toy_model_has_no_witness() {
        let c = spekkens_demo();
        assert!(c.is_information_medium);
        assert!(c.superinformation_witness.is_none());
        let overlaps: Vec<_> = c.report.iter().filter(|f| f.kind == FindingKind::Overlap).collect();
        assert!(!overlaps.is_empty());
        assert!(overlaps[0].text.contains("z1") && overlaps[0].text.contains("x1"));
        assert!(overlaps[0].text.ends_with("{1}"), "{}", overlaps[0].text);
    }

    #[test]
    fn z_alone_is_an_information_variable() {
        let backend = FiniteBackend::from_file(&parse_theory(SPEKKENS_CT).unwrap()).unwrap();
        let z = backend.theory().variable("Z").unwrap();
        assert!(is_information_variable(&backend, &z));
        // Without the coupling the copy has nothing to act with.
        let bare = FiniteBackend::new(backend.theory().clone(), vec![]).unwrap();
        assert!(!is_information_variable(&bare, &z));
        assert_eq!(bare.substrate(), "spekkens");
    }

    #[test]
    fn bundled_names() {
        assert!(bundled("bit").is_some());
        assert!(bundled("trit").is_some());
        assert!(bundled("qubit").is_none());
    }
}
