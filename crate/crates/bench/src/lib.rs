//! Fixtures shared by the workbench benchmarks.

use ctwb_core::finite::{SPEKKENS_CT, TRIT_CT};
use ctwb_core::{parse_theory, FiniteBackend};

/// The toy model together with its replica couplings.
pub fn spekkens() -> FiniteBackend {
    FiniteBackend::from_file(&parse_theory(SPEKKENS_CT).expect("bundled theory parses")).expect("well formed")
}

pub fn trit() -> FiniteBackend {
    FiniteBackend::from_file(&parse_theory(TRIT_CT).expect("bundled theory parses")).expect("well formed")
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_load() {
        assert_eq!(super::spekkens().replica().size(), 16);
        assert_eq!(super::trit().theory().size(), 3);
    }
}
