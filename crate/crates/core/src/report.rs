//! Run reports written by the command-line front end.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::dilation::{BoundednessEntry, DilationReport, PositiveDefiniteReport};
use crate::framing::{DualReport, GenerationReport, ReconstructionReport};
use crate::naimark::PvmReport;
use crate::numlin::Tolerance;
use crate::ovm::{PovmConversionReport, TotalReport, TransformReport};
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: String,
    pub tolerance: Tolerance,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    /// Seconds since the Unix epoch; the only field that varies between
    /// runs with the same inputs.
    pub timestamp: u64,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FmaxSection {
    pub dim: usize,
    pub fmax_dim: usize,
    pub full_space: bool,
    /// `‖(I − P_h)·Q‖₂` with `P_h` projecting onto `span{h_n}`.
    pub distance_from_span_h: f64,
    pub fmax: Subspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub space_dim: usize,
    pub condition1_residual: f64,
    pub condition2_distance: f64,
    pub space: Subspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSection {
    /// `‖(I − P_Fmax)·Q‖₂` for the requested space `Q`.
    pub distance_from_fmax: f64,
    pub threshold: f64,
    pub contained: bool,
}

/// One verification stage. Stages whose [`Section::verdict`] is `None` never affect
/// [`RunReport::passed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "section", rename_all = "snake_case")]
pub enum Section {
    Fmax(FmaxSection),
    Subspace(SubspaceSection),
    Reconstruction(ReconstructionReport),
    GeneratorPair(GeneratorSection),
    Generation(GenerationReport),
    Dual(DualReport),
    OvmTotal(TotalReport),
    OvmTransform(TransformReport),
    PovmConversion(PovmConversionReport),
    PositiveDefinite(PositiveDefiniteReport),
    Dilation(DilationReport),
    Boundedness { table: Vec<BoundednessEntry>, passed: bool },
    Pvm(PvmReport),
    Failure { stage: String, message: String },
}

impl Section {
    /// Whether this stage counts toward the overall verdict, and its result.
    pub fn verdict(&self) -> Option<bool> {
        match self {
            Section::Fmax(_) | Section::Dual(_) | Section::PovmConversion(_) => None,
            Section::Subspace(s) => Some(s.contained),
            Section::Reconstruction(r) => Some(r.passed),
            Section::GeneratorPair(_) => Some(true),
            Section::Generation(r) => Some(r.passed),
            Section::OvmTotal(r) => Some(r.passed),
            Section::OvmTransform(r) => Some(r.passed),
            Section::PositiveDefinite(r) => Some(r.positive_definite),
            Section::Dilation(r) => Some(r.passed),
            Section::Boundedness { passed, .. } => Some(*passed),
            Section::Pvm(r) => Some(r.passed),
            Section::Failure { .. } => Some(false),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Section::Fmax(_) => "fmax",
            Section::Subspace(_) => "subspace",
            Section::Reconstruction(_) => "reconstruction",
            Section::GeneratorPair(_) => "generator_pair",
            Section::Generation(_) => "generation",
            Section::Dual(_) => "dual",
            Section::OvmTotal(_) => "ovm_total",
            Section::OvmTransform(_) => "ovm_transform",
            Section::PovmConversion(_) => "povm_conversion",
            Section::PositiveDefinite(_) => "positive_definite",
            Section::Dilation(_) => "dilation",
            Section::Boundedness { .. } => "boundedness",
            Section::Pvm(_) => "pvm",
            Section::Failure { .. } => "failure",
        }
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let verdict = match self.verdict() {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        let detail = match self {
            Section::Fmax(s) => format!("dim F_max = {} of {}", s.fmax_dim, s.dim),
            Section::Subspace(s) => format!("distance from F_max {:.3e}", s.distance_from_fmax),
            Section::Reconstruction(r) => format!(
                "{} trials on a {}-dim space, max error {:.3e}",
                r.trials, r.subspace_dim, r.max_terminal_error
            ),
            Section::GeneratorPair(g) => format!(
                "dim F = {}, B·A* defect {:.3e}",
                g.space_dim, g.condition1_residual
            ),
            Section::Generation(r) => format!(
                "new F_max has dim {}, soundness residual {:.3e}",
                r.new_fmax_dim, r.soundness_residual
            ),
            Section::Dual(r) => match &r.failure {
                Some(msg) => format!("no dual framing: {msg}"),
                None => format!("dual framing on a {}-dim space", r.space_dim),
            },
            Section::OvmTotal(r) => format!(
                "F(all) = I on F_max (residual {:.3e}), proper: {}",
                r.residual_on_fmax, r.proper
            ),
            Section::OvmTransform(r) => format!(
                "{} subsets, max residual {:.3e}",
                r.subsets_checked, r.max_residual
            ),
            Section::PovmConversion(r) => match &r.reason {
                Some(reason) => format!("not a POVM: {reason}"),
                None => format!("POVM with {} atoms", r.atoms),
            },
            Section::PositiveDefinite(r) => {
                format!("Gram size {}, min eigenvalue {:.6e}", r.gram_size, r.min_eigenvalue)
            }
            Section::Dilation(r) => format!(
                "dim K = {}, homomorphism {:.3e}, dilation formula {:.3e}",
                r.rank, r.homomorphism_residual, r.dilation_formula_residual
            ),
            Section::Boundedness { table, .. } => {
                let max = table.iter().map(|e| e.c).fold(0.0, f64::max);
                format!("{} constants, max c(u) = {max:.6}", table.len())
            }
            Section::Pvm(r) => format!(
                "dim K = {}, projection ranks {:?}, factorization {:.3e}",
                r.k_dim, r.projection_ranks, r.factorization
            ),
            Section::Failure { stage, message } => format!("{stage}: {message}"),
        };
        format!("[{verdict}] {}: {detail}", self.name())
    }
}

impl RunReport {
    pub fn new(command: impl Into<String>, tolerance: Tolerance, seed: u64, trials: usize) -> Self {
        Self {
            command: command.into(),
            tolerance,
            seed,
            trials,
            passed: true,
            timestamp: 0,
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, section: Section) {
        if section.verdict() == Some(false) {
            self.passed = false;
        }
        self.sections.push(section);
    }

    pub fn fail(&mut self, stage: &str, message: impl ToString) {
        self.push(Section::Failure {
            stage: stage.into(),
            message: message.to_string(),
        });
    }

    /// Sets the timestamp to the current time.
    pub fn stamp(&mut self) {
        self.timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers")
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} ({}; seed {})\n",
            self.command,
            if self.passed { "passed" } else { "FAILED" },
            self.seed
        );
        for s in &self.sections {
            out.push_str("  ");
            out.push_str(&s.summary());
            out.push('\n');
        }
        out
    }
}
