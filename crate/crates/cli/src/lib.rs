//! The `ctwb` command line: theory checks, the quantisation argument and
//! protocol runs, each producing a [`Report`].

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use ctwb_core::argument::{classical_no_go_with, ArgumentReport, CheckStatus, NoGoVariant};
use ctwb_core::finite::{bundled, FiniteError};
use ctwb_core::kernel::{information_variable_decision, Decision, FindingKind};
use ctwb_core::protocols::{
    run_superdense, run_teleportation_with_rebit_readout, swap_divergence_demo, teleport_trials, ProtocolError,
    FIDELITY_FLOOR,
};
use ctwb_core::quantum::is_real_operator;
use ctwb_core::quantum::linalg::{self, gates, EQ_TOL};
use ctwb_core::{
    classify_sector, parse_theory, run_argument, run_weak_argument, FiniteBackend, HybridRegister, ParseError,
    ProjAttribute, StateSet, SubsystemKind, TheoryBackend, Variable,
};

pub const CAP_ENV: &str = "CTWB_CLOSURE_CAP";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "ctwb", version, about = "Constructor-theoretic information workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the first theory of a `.ct` file.
    Check {
        /// Path to a theory file, or a bundled name (`bit`, `trit`, `spekkens`).
        file: PathBuf,
        /// Check every declared variable for being an information variable (default).
        #[arg(long, conflicts_with = "superinfo")]
        medium: bool,
        /// Classify the declared variables as a (super)information medium.
        #[arg(long)]
        superinfo: bool,
        #[arg(long)]
        json: bool,
    },
    /// Verify the quantisation argument.
    Argument {
        #[arg(value_enum)]
        mode: ArgumentMode,
        #[arg(long)]
        json: bool,
    },
    /// Simulate a qubit/rebit protocol.
    Protocol {
        #[arg(value_enum)]
        name: ProtocolName,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

impl Command {
    pub fn json(&self) -> bool {
        match self {
            Command::Check { json, .. } | Command::Argument { json, .. } | Command::Protocol { json, .. } => *json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArgumentMode {
    Run,
    NoGo,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolName {
    Teleport,
    Superdense,
    SwapDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// `pass`, `fail`, `inconclusive`, `skipped`, or `info` for lines that
/// only explain the outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub name: String,
    pub status: &'static str,
    pub witness: f64,
}

impl Finding {
    fn new(name: impl Into<String>, status: &'static str, witness: f64) -> Self {
        Self { name: name.into(), status, witness }
    }

    fn check(name: impl Into<String>, pass: bool, witness: f64) -> Self {
        Self::new(name, if pass { "pass" } else { "fail" }, witness)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub findings: Vec<Finding>,
    pub seed: u64,
    pub version: String,
    /// Human-readable context; not part of the JSON document.
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl Report {
    /// The verdict follows the findings: any failure fails, otherwise any
    /// inconclusive finding makes the report inconclusive.
    fn from_findings(command: String, findings: Vec<Finding>, seed: u64, notes: Vec<String>) -> Self {
        let verdict = if findings.iter().any(|f| f.status == "fail") {
            Verdict::Fail
        } else if findings.iter().any(|f| f.status == "inconclusive") {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        Self { command, verdict, findings, seed, version: VERSION.to_string(), notes }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.command).unwrap();
        for f in &self.findings {
            writeln!(out, "  [{}] {} ({})", f.status, f.name, format_witness(f.witness)).unwrap();
        }
        for n in &self.notes {
            writeln!(out, "  note: {n}").unwrap();
        }
        writeln!(out, "verdict: {}", self.verdict).unwrap();
        out
    }
}

fn format_witness(w: f64) -> String {
    if w != 0.0 && w.abs() < 1e-4 {
        format!("{w:.3e}")
    } else {
        w.to_string()
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{}:{}: {}", path.display(), source.line, source.column, source.message)]
    Parse { path: PathBuf, source: ParseError },
    #[error("invalid theory: {0}")]
    Theory(FiniteError),
    #[error("{CAP_ENV} must be a positive integer, got `{0}`")]
    BadCap(String),
    #[error("protocol error: {0}")]
    Protocol(#[from] ProtocolError),
    #[error("argument error: {0}")]
    Argument(String),
}

impl CliError {
    /// 2 for unreadable or malformed input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Theory(_) | CliError::BadCap(_) => 2,
            CliError::Protocol(_) | CliError::Argument(_) => 1,
        }
    }
}

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Check { file, superinfo, .. } => {
            let cap = closure_cap_from_env()?;
            cmd_check(file, *superinfo, cap)
        }
        Command::Argument { mode, .. } => cmd_argument(*mode),
        Command::Protocol { name, trials, seed, .. } => cmd_protocol(*name, *trials, *seed),
    }
}

pub fn closure_cap_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(CAP_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::BadCap(v)),
        },
        Err(_) => Ok(None),
    }
}

/// Reads `path`, or a bundled theory when no such file exists and the name
/// (with or without `.ct`) is one of the bundled ones.
fn load_theory_text(path: &Path) -> Result<String, CliError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) => {
            let stem = path.to_str().map(|s| s.trim_end_matches(".ct"));
            match stem.and_then(bundled) {
                Some(text) if !path.exists() => Ok(text.to_string()),
                _ => Err(CliError::Io { path: path.to_path_buf(), source: e }),
            }
        }
    }
}

fn load_backend(path: &Path, cap: Option<usize>) -> Result<FiniteBackend, CliError> {
    let text = load_theory_text(path)?;
    let file = parse_theory(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })?;
    let backend = FiniteBackend::from_file(&file).map_err(CliError::Theory)?;
    match cap {
        Some(cap) => backend.with_cap(cap).map_err(CliError::Theory),
        None => Ok(backend),
    }
}

/// Declared variables, or one variable of all singletons when none are
/// declared.
fn catalogue(backend: &FiniteBackend) -> Vec<Variable<StateSet>> {
    let declared = backend.declared_variables();
    if !declared.is_empty() {
        return declared;
    }
    let t = backend.theory();
    let singletons = t.states().iter().enumerate().map(|(i, s)| (s.clone(), StateSet::new([i])));
    Variable::new("states", singletons).into_iter().collect()
}

pub fn cmd_check(path: &Path, superinfo: bool, cap: Option<usize>) -> Result<Report, CliError> {
    let backend = load_backend(path, cap)?;
    let vars = catalogue(&backend);
    let mode = if superinfo { "superinfo" } else { "medium" };
    let command = format!("check {} --{mode}", path.display());
    let mut notes = vec![format!("theory {} with {} states", backend.substrate(), backend.theory().size())];

    if !superinfo {
        let findings = vars
            .iter()
            .map(|v| {
                let name = format!("{} is an information variable", v.name());
                match information_variable_decision(&backend, v) {
                    Decision::Possible => Finding::new(name, "pass", 1.0),
                    Decision::Inconclusive => Finding::new(name, "inconclusive", 0.0),
                    Decision::Impossible | Decision::Unsupported(_) => Finding::new(name, "fail", 0.0),
                }
            })
            .collect();
        return Ok(Report::from_findings(command, findings, 0, notes));
    }

    let c = classify_sector(&backend, &vars);
    let witnessed = c.superinformation_witness.is_some();
    let mut findings: Vec<Finding> = c
        .report
        .iter()
        .map(|f| {
            let status = match f.kind {
                FindingKind::Inconclusive => "inconclusive",
                // Overlaps explain a missing witness.
                FindingKind::Overlap if !witnessed => "fail",
                _ => "info",
            };
            Finding::new(f.text.clone(), status, 0.0)
        })
        .collect();
    let media = c.report.iter().filter(|f| f.kind == FindingKind::InformationVariable).count();
    findings.push(Finding::check("information medium", c.is_information_medium, media as f64));
    let status = match (witnessed, c.inconclusive) {
        (true, _) => "pass",
        (false, true) => "inconclusive",
        (false, false) => "fail",
    };
    findings.push(Finding::new("superinformation medium", status, if witnessed { 1.0 } else { 0.0 }));
    if let Some((x, z)) = &c.superinformation_witness {
        notes.push(format!("witness: ({}, {})", x.name(), z.name()));
    }
    Ok(Report::from_findings(command, findings, 0, notes))
}

fn argument_findings(report: &ArgumentReport) -> Vec<Finding> {
    let mut findings: Vec<Finding> =
        report.property_checks.iter().map(|c| Finding::new(c.name, c.status.as_str(), c.witness)).collect();
    findings.push(Finding::check(
        "no-go trace distance",
        report.nogo_trace_distance <= EQ_TOL,
        report.nogo_trace_distance,
    ));
    findings
}

/// Amplitudes of a pure state with the first non-zero entry made positive.
fn describe_ket_state(rho: &ctwb_core::DensityMatrix) -> String {
    let Some(k) = ProjAttribute::new(rho.matrix().clone()).ok().and_then(|p| p.ket()) else {
        return "mixed".to_string();
    };
    let parts: Vec<String> = k.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn cmd_argument(mode: ArgumentMode) -> Result<Report, CliError> {
    match mode {
        ArgumentMode::Run | ArgumentMode::Weak => {
            let (report, label) = match mode {
                ArgumentMode::Run => (run_argument(), "run"),
                _ => (run_weak_argument(), "weak"),
            };
            let report = report.map_err(|e| CliError::Argument(e.to_string()))?;
            let mut notes = vec![
                format!("{}/{} checks passed", report.passed(), report.evaluated()),
                format!("p+ = {}", describe_ket_state(&report.p_plus)),
                format!("p- = {}", describe_ket_state(&report.p_minus)),
                format!("r1 = {}", describe_ket_state(&report.r1)),
                format!("r2 = {}", describe_ket_state(&report.r2)),
            ];
            notes.extend(report.notes.iter().cloned());
            notes.push(format!("conclusion: {}", report.conclusion));
            let skipped = report.property_checks.iter().filter(|c| c.status == CheckStatus::Skipped).count();
            if skipped > 0 {
                notes.push(format!("{skipped} check(s) skipped"));
            }
            Ok(Report::from_findings(format!("argument {label}"), argument_findings(&report), 0, notes))
        }
        ArgumentMode::NoGo => {
            let dephased = classical_no_go_with(NoGoVariant::TDephased);
            let bare = classical_no_go_with(NoGoVariant::Undephased);
            let r_basis = classical_no_go_with(NoGoVariant::RDephased);
            let findings = vec![
                Finding::check("T-dephased outputs coincide", dephased <= EQ_TOL, dephased),
                Finding::check("undephased outputs are orthogonal", (bare - 1.0).abs() <= EQ_TOL, bare),
                Finding::check("R-dephased outputs are orthogonal", (r_basis - 1.0).abs() <= EQ_TOL, r_basis),
            ];
            let notes = vec![format!("trace distance with S_C classical: {dephased:e}")];
            Ok(Report::from_findings("argument no-go".into(), findings, 0, notes))
        }
    }
}

pub fn cmd_protocol(name: ProtocolName, trials: usize, seed: u64) -> Result<Report, CliError> {
    match name {
        ProtocolName::Teleport => {
            let summary = teleport_trials(trials, seed)?;
            let refused = run_teleportation_with_rebit_readout(&gates::plus_i())?;
            let y_refused = refused.ledger.last().is_some_and(|e| !e.allowed);
            let findings = vec![
                Finding::check("min fidelity", summary.min_fidelity >= FIDELITY_FLOOR, summary.min_fidelity),
                Finding::check("mean fidelity", summary.mean_fidelity >= FIDELITY_FLOOR, summary.mean_fidelity),
                Finding::check("all operations allowed", summary.success, trials as f64),
                Finding::check("Y readout on rebit refused", y_refused, 0.0),
            ];
            let mut notes = vec![format!("{trials} trials x 4 Bell branches, seeds {seed}..")];
            notes.extend(refused.notes);
            Ok(Report::from_findings(
                format!("protocol teleport --trials {trials} --seed {seed}"),
                findings,
                seed,
                notes,
            ))
        }
        ProtocolName::Superdense => {
            let mut findings = Vec::new();
            let mut notes = Vec::new();
            let mut real = true;
            for msg in ["00", "01", "10", "11"] {
                let result = run_superdense(msg)?;
                findings.push(Finding::check(format!("message {msg} decoded"), result.success, result.fidelity));
                notes.extend(result.notes);
                real &= ctwb_core::protocols::encoding(msg).is_ok_and(|(_, op)| is_real_operator(&op, EQ_TOL));
            }
            real &= ctwb_core::protocols::bell_projectors().iter().all(|p| is_real_operator(p, EQ_TOL));
            findings.push(Finding::check("all operators real", real, 0.0));
            Ok(Report::from_findings("protocol superdense".into(), findings, seed, notes))
        }
        ProtocolName::SwapDemo => {
            let demo = swap_divergence_demo()?;
            let mut findings = vec![
                Finding::check("qubit-rebit states agree", (demo.fidelity - 1.0).abs() <= EQ_TOL, demo.fidelity),
                Finding::check("allowed measurements diverge", demo.success, 0.0),
            ];
            let (same, deviation) = two_qubit_swaps_agree()?;
            findings.push(Finding::check("two-qubit registers identical", same, deviation));
            Ok(Report::from_findings("protocol swap-demo".into(), findings, seed, demo.notes))
        }
    }
}

/// Logical and physical swap of `|+⟩|0⟩` on two qubits; returns whether the
/// registers match and the largest entrywise state difference.
fn two_qubit_swaps_agree() -> Result<(bool, f64), ProtocolError> {
    let start = HybridRegister::from_kets(&[
        (SubsystemKind::Qubit, "a", gates::plus_i()),
        (SubsystemKind::Qubit, "b", linalg::basis_ket(2, 0)),
    ])?;
    let mut logical = start.clone();
    logical.logical_swap(0, 1)?;
    let mut physical = start;
    physical.physical_swap(0, 1)?;
    let deviation = linalg::max_abs_diff(logical.state().matrix(), physical.state().matrix());
    let kinds = |r: &HybridRegister| r.subsystems().iter().map(|s| s.kind).collect::<Vec<_>>();
    Ok((deviation <= EQ_TOL && kinds(&logical) == kinds(&physical), deviation))
}
