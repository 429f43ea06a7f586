//! The quantisation argument, step by step, on a qubit `S_Q` coupled to a
//! two-level sector `S_C`.
//!
//! The joint basis is ordered `z1t1, z1t2, z2t1, z2t2`, with `S_Q` as the
//! most significant factor.

use thiserror::Error;

use crate::kernel::is_observable;
use crate::quantum::linalg::{self, basis_ket, gates, CMatrix, Ket, EQ_TOL};
use crate::quantum::{
    measurer_channel, DensityMatrix, KrausChannel, ProjAttribute, QAttribute, QuantumBackend, QuantumError, Restriction,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArgumentError {
    #[error("internal consistency check `{check}` failed (witness {witness:e})")]
    Inconsistent { check: String, witness: f64 },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    fn from_bool(pass: bool) -> Self {
        if pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        }
    }
}

/// One verified property and the number that decided it.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub witness: f64,
}

impl PropertyCheck {
    fn new(name: &'static str, pass: bool, witness: f64) -> Self {
        Self { name, status: CheckStatus::from_bool(pass), witness }
    }
}

pub const CONCLUSION: &str = "S_C must carry complementary observables {r1,r2}";
pub const WEAK_CONCLUSION: &str = "S_C must at least carry mixtures of r1 and r2";

#[derive(Debug, Clone)]
pub struct ArgumentReport {
    pub p_plus: DensityMatrix,
    pub p_minus: DensityMatrix,
    pub r1: DensityMatrix,
    pub r2: DensityMatrix,
    pub property_checks: Vec<PropertyCheck>,
    pub nogo_trace_distance: f64,
    /// Facts about the hybrid qubit ⊕ dephased-bit backend.
    pub notes: Vec<String>,
    pub verdict: bool,
    pub conclusion: &'static str,
}

impl ArgumentReport {
    pub fn passed(&self) -> usize {
        self.property_checks.iter().filter(|c| c.status == CheckStatus::Pass).count()
    }

    pub fn evaluated(&self) -> usize {
        self.property_checks.iter().filter(|c| c.status != CheckStatus::Skipped).count()
    }
}

fn z_basis() -> [Ket; 2] {
    [basis_ket(2, 0), basis_ket(2, 1)]
}

fn r_basis() -> [Ket; 2] {
    [gates::plus(), gates::minus()]
}

/// `|z t⟩` for `z, t ∈ {0, 1}`.
pub fn joint(z: usize, t: usize) -> Ket {
    basis_ket(4, 2 * z + t)
}

/// Measurer of Z with output on S_C: a z-controlled NOT on the t factor.
pub fn build_measurer_z() -> KrausChannel {
    measurer_channel(&z_basis(), 2).expect("Z basis is orthonormal")
}

/// Measurer of T with output on S_Q: a t-controlled NOT on the z factor.
pub fn build_measurer_t() -> KrausChannel {
    KrausChannel::unitary(linalg::embed_qubits(&gates::cnot(), &[1, 0], 2)).expect("CNOT is unitary")
}

/// `x₁ ⊗ t₁` and `x₂ ⊗ t₁`.
fn x_inputs() -> [DensityMatrix; 2] {
    [gates::plus(), gates::minus()]
        .map(|x| DensityMatrix::pure(&linalg::kron_ket(&x, &basis_ket(2, 0))).expect("unit ket"))
}

/// `p± = M_Z(x± ⊗ t₁)`.
pub fn derive_p_states() -> (DensityMatrix, DensityMatrix) {
    let m = build_measurer_z();
    let [a, b] = x_inputs().map(|rho| m.apply(&rho).expect("dimensions match"));
    (a, b)
}

/// Projector onto `span{|z1t1⟩, |z2t2⟩}`: the attribute "S_Q and S_C carry
/// the same label".
pub fn s_projector() -> CMatrix {
    linalg::projector(&joint(0, 0)) + linalg::projector(&joint(1, 1))
}

pub fn s_expectation(p: &DensityMatrix) -> f64 {
    p.expectation(&s_projector())
}

pub fn check_s_sharp(p: &DensityMatrix) -> bool {
    p.dim() == 4 && (s_expectation(p) - 1.0).abs() <= EQ_TOL
}

/// `M_T(p±)` factorizes as `z1 ⊗ r₁,₂`; returns the S_C marginals.
pub fn extract_r_attributes() -> Result<(DensityMatrix, DensityMatrix), ArgumentError> {
    let (p_plus, p_minus) = derive_p_states();
    let m = build_measurer_t();
    let z1 = DensityMatrix::basis(2, 0);
    let mut out = Vec::with_capacity(2);
    for p in [p_plus, p_minus] {
        let after = m.apply(&p)?;
        let sq = after.partial_trace(&[2, 2], &[0])?;
        let deviation = linalg::max_abs_diff(sq.matrix(), z1.matrix());
        if deviation > EQ_TOL {
            return Err(ArgumentError::Inconsistent { check: "S_Q marginal is z1".into(), witness: deviation });
        }
        out.push(after.partial_trace(&[2, 2], &[1])?);
    }
    let r2 = out.pop().expect("two marginals");
    let r1 = out.pop().expect("two marginals");
    Ok((r1, r2))
}

/// Checks (i) to (iv) on the extracted `r` states. With `weak`, check (i)
/// is skipped.
pub fn verify_r_properties(r1: &DensityMatrix, r2: &DensityMatrix, weak: bool) -> Vec<PropertyCheck> {
    let t = [DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)];
    let rs = [r1, r2];
    let pairs: Vec<f64> = rs.iter().flat_map(|r| t.iter().map(|ti| r.fidelity(ti))).collect();

    let orthogonal = if weak {
        PropertyCheck { name: "r_orthogonal", status: CheckStatus::Skipped, witness: r1.fidelity(r2) }
    } else {
        let overlap = r1.fidelity(r2);
        PropertyCheck::new("r_orthogonal", overlap <= EQ_TOL && r_is_observable(r1, r2), overlap)
    };

    let max_fidelity = pairs.iter().copied().fold(0.0, f64::max);
    let max_deviation = pairs.iter().map(|f| (f - 0.5).abs()).fold(0.0, f64::max);

    let u_t = ProjAttribute::span(&z_basis()).expect("basis spans");
    let min_in_span = rs.iter().map(|r| r.expectation(u_t.projector())).fold(f64::INFINITY, f64::min);

    vec![
        orthogonal,
        PropertyCheck::new("r_not_in_t", max_fidelity < 1.0 - EQ_TOL, max_fidelity),
        PropertyCheck::new("r_t_overlap_half", max_deviation <= EQ_TOL, max_deviation),
        PropertyCheck::new("r_in_span_uT", (min_in_span - 1.0).abs() <= EQ_TOL, min_in_span),
    ]
}

/// `{r1, r2}` is an information observable on a qubit whose catalogue is
/// `[T, R]`.
fn r_is_observable(r1: &DensityMatrix, r2: &DensityMatrix) -> bool {
    let attr = |rho: &DensityMatrix| ProjAttribute::new(rho.matrix().clone()).map(|p| QAttribute::new([p]));
    let (Ok(a1), Ok(a2)) = (attr(r1), attr(r2)) else {
        return false;
    };
    let t = crate::kernel::Variable::new(
        "T",
        z_basis().iter().enumerate().map(|(i, k)| (format!("t{}", i + 1), QAttribute::pure(k).expect("unit ket"))),
    )
    .expect("distinct labels");
    let r = crate::kernel::Variable::new("R", [("r1", a1), ("r2", a2)]).expect("distinct labels");
    let backend = QuantumBackend::new(
        "S_C",
        Restriction::full(2),
        vec![t, r.clone()],
        vec![("H".into(), gates::h()), ("S".into(), gates::s())],
    )
    .and_then(|b| b.with_couplings(vec![("CNOT".into(), gates::cnot())]))
    .expect("well-formed backend");
    is_observable(&backend, &r).unwrap_or(false)
}

/// `M_T ∘ M_Z` records the value of Z on S_C: `(z1,t1) → (z1,t1)` and
/// `(z2,t1) → (z1,t2)`. Returns the largest deviation from those rows.
pub fn composed_measurer_deviation() -> f64 {
    let u = build_measurer_z().then(&build_measurer_t()).expect("same dimension");
    [((0, 0), (0, 0)), ((1, 0), (0, 1))]
        .iter()
        .map(|&((zi, ti), (zo, to))| {
            let out = u.apply(&DensityMatrix::pure(&joint(zi, ti)).expect("basis ket")).expect("dim 4");
            linalg::max_abs_diff(out.matrix(), &linalg::projector(&joint(zo, to)))
        })
        .fold(0.0, f64::max)
}

pub fn composed_measurer_check() -> bool {
    composed_measurer_deviation() <= EQ_TOL
}

/// Where the classical constraint acts on S_C in the no-go computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoGoVariant {
    /// Dephased in the T basis: the classical sector.
    TDephased,
    /// No dephasing at all.
    Undephased,
    /// Dephased in the complementary R basis.
    RDephased,
}

fn sector_restriction(variant: NoGoVariant) -> Restriction {
    match variant {
        NoGoVariant::TDephased => {
            QuantumBackend::qubit().compose(&QuantumBackend::dephased_bit()).restriction().clone()
        }
        NoGoVariant::Undephased => Restriction::full(2).tensor(&Restriction::full(2)),
        NoGoVariant::RDephased => {
            Restriction::full(2).tensor(&Restriction::dephased(r_basis().to_vec()).expect("R basis is orthonormal"))
        }
    }
}

/// Trace distance between `D ∘ M_Z(x₁ ⊗ t₁)` and `D ∘ M_Z(x₂ ⊗ t₁)`, where
/// `D` dephases S_C as `variant` prescribes.
pub fn classical_no_go_with(variant: NoGoVariant) -> f64 {
    let sector = sector_restriction(variant).sector_channel();
    let m = build_measurer_z().then(&sector).expect("same dimension");
    let [a, b] = x_inputs().map(|rho| m.apply(&rho).expect("dimensions match"));
    a.trace_distance(&b)
}

/// Zero: once S_C is classical, nothing downstream can tell `x₁` from `x₂`.
pub fn classical_no_go() -> f64 {
    classical_no_go_with(NoGoVariant::TDephased)
}

fn hybrid_notes() -> Vec<String> {
    let hybrid = QuantumBackend::qubit().compose(&QuantumBackend::dephased_bit());
    let r = hybrid.restriction();
    let mz = build_measurer_z();
    let mt = build_measurer_t();
    let r1_on_sc = linalg::kron(&linalg::identity(2), &linalg::projector(&gates::plus()));
    let t1_on_sc = linalg::kron(&linalg::identity(2), &linalg::projector(&basis_ket(2, 0)));
    vec![
        format!("M_Z allowed on {}: {}", hybrid.name(), r.allows_unitary(mz.as_unitary().expect("unitary"))),
        format!("M_T allowed on {}: {}", hybrid.name(), r.allows_unitary(mt.as_unitary().expect("unitary"))),
        format!("t1 measurable on S_C: {}", r.allows_operator(&t1_on_sc)),
        format!("r1 measurable on S_C: {}", r.allows_operator(&r1_on_sc)),
    ]
}

fn run(weak: bool) -> Result<ArgumentReport, ArgumentError> {
    let (p_plus, p_minus) = derive_p_states();
    let p_overlap = p_plus.fidelity(&p_minus);
    let s_min = s_expectation(&p_plus).min(s_expectation(&p_minus));
    let mut checks = vec![
        PropertyCheck::new("p_orthogonal", p_overlap <= EQ_TOL, p_overlap),
        PropertyCheck::new("s_sharp", check_s_sharp(&p_plus) && check_s_sharp(&p_minus), s_min),
    ];
    let (r1, r2) = extract_r_attributes()?;
    checks.extend(verify_r_properties(&r1, &r2, weak));
    checks.push(PropertyCheck::new("composed_measurer", composed_measurer_check(), composed_measurer_deviation()));

    let nogo = classical_no_go();
    let verdict = checks.iter().all(|c| c.status != CheckStatus::Fail) && nogo <= EQ_TOL;
    Ok(ArgumentReport {
        p_plus,
        p_minus,
        r1,
        r2,
        property_checks: checks,
        nogo_trace_distance: nogo,
        notes: hybrid_notes(),
        verdict,
        conclusion: if weak { WEAK_CONCLUSION } else { CONCLUSION },
    })
}

/// All seven checks and the no-go distance.
pub fn run_argument() -> Result<ArgumentReport, ArgumentError> {
    run(false)
}

/// The mixtures-only variant: `r_orthogonal` is skipped.
pub fn run_weak_argument() -> Result<ArgumentReport, ArgumentError> {
    run(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// `Σ c_i |i⟩` from real coefficients.
    fn real_ket(coeffs: &[f64]) -> Ket {
        linalg::ket(&coeffs.iter().map(|&c| linalg::r(c)).collect::<Vec<_>>())
    }

    fn is_state(rho: &DensityMatrix, k: &Ket) -> bool {
        linalg::approx_eq(rho.matrix(), &linalg::projector(k), EQ_TOL)
    }

    fn maps(u: &CMatrix, from: (usize, usize), to: (usize, usize)) -> bool {
        (u * joint(from.0, from.1) - joint(to.0, to.1)).norm() < EQ_TOL
    }

    #[test]
    fn measurer_z_rows() {
        let m = build_measurer_z();
        let u = m.as_unitary().unwrap();
        assert!(maps(u, (0, 0), (0, 0)));
        assert!(maps(u, (1, 0), (1, 1)));
    }

    #[test]
    fn measurer_t_table() {
        let m = build_measurer_t();
        let u = m.as_unitary().unwrap();
        for (from, to) in [((0, 0), (0, 0)), ((1, 1), (0, 1)), ((1, 0), (1, 0)), ((0, 1), (1, 1))] {
            assert!(maps(u, from, to), "{from:?} -> {to:?}");
        }
        assert!(linalg::approx_eq(&(u * u), &linalg::identity(4), EQ_TOL));
    }

    #[test]
    fn p_states_are_bell_states() {
        let (p, m) = derive_p_states();
        let s = FRAC_1_SQRT_2;
        assert!(is_state(&p, &real_ket(&[s, 0.0, 0.0, s])));
        assert!(is_state(&m, &real_ket(&[s, 0.0, 0.0, -s])));
        assert!(p.fidelity(&m) < EQ_TOL);
        assert!((p.purity() - 1.0).abs() < EQ_TOL);
    }

    #[test]
    fn s_projector_expectations() {
        let (p, m) = derive_p_states();
        assert!(check_s_sharp(&p) && check_s_sharp(&m));
        assert!(!check_s_sharp(&DensityMatrix::basis(4, 1)));
        assert!(s_expectation(&DensityMatrix::basis(4, 1)).abs() < EQ_TOL);
        assert!(s_expectation(&DensityMatrix::basis(4, 2)).abs() < EQ_TOL);
    }

    #[test]
    fn r_states() {
        let (r1, r2) = extract_r_attributes().unwrap();
        assert!(is_state(&r1, &gates::plus()));
        assert!(is_state(&r2, &gates::minus()));
        assert!((r1.purity() - 1.0).abs() < EQ_TOL && (r2.purity() - 1.0).abs() < EQ_TOL);
    }

    #[test]
    fn r_properties_all_pass() {
        let (r1, r2) = extract_r_attributes().unwrap();
        let checks = verify_r_properties(&r1, &r2, false);
        assert_eq!(checks.len(), 4);
        assert!(checks.iter().all(|c| c.status == CheckStatus::Pass), "{checks:?}");
        assert!((checks[1].witness - 0.5).abs() < EQ_TOL);
        let weak = verify_r_properties(&r1, &r2, true);
        assert_eq!(weak[0].status, CheckStatus::Skipped);
    }

    #[test]
    fn r_not_orthogonal_fails_check_i() {
        let r1 = DensityMatrix::pure(&gates::plus()).unwrap();
        let checks = verify_r_properties(&r1, &r1, false);
        assert_eq!(checks[0].status, CheckStatus::Fail);
    }

    #[test]
    fn composed_measurer_records_z() {
        assert!(composed_measurer_check());
    }

    #[test]
    fn no_go_distances() {
        assert!(classical_no_go().abs() < EQ_TOL);
        assert!((classical_no_go_with(NoGoVariant::Undephased) - 1.0).abs() < EQ_TOL);
        assert!((classical_no_go_with(NoGoVariant::RDephased) - 1.0).abs() < EQ_TOL);
    }

    #[test]
    fn full_run_passes_seven_checks() {
        let report = run_argument().unwrap();
        assert_eq!(report.property_checks.len(), 7);
        assert_eq!(report.passed(), 7);
        assert!(report.verdict);
        assert_eq!(report.conclusion, CONCLUSION);
        assert!(report.notes.iter().any(|n| n == "r1 measurable on S_C: false"));
        assert!(report.notes.iter().any(|n| n.starts_with("M_Z allowed") && n.ends_with("true")));
    }

    #[test]
    fn weak_run_skips_check_i() {
        let report = run_weak_argument().unwrap();
        assert!(report.verdict);
        assert_eq!(report.evaluated(), 6);
        assert_eq!(report.property_checks[2].status, CheckStatus::Skipped);
    }
}
