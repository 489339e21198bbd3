//! Command-line front end: problem dispatch, report assembly and exit codes.
//!
//! Exit codes: 0 when every verification stage passes, 1 when one fails,
//! 2 when the input cannot be used.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::demos::{self, Demo};
use crate::dilation::{self, OperatorMap};
use crate::error::Error;
use crate::framing::{self, Framing};
use crate::naimark::{self, Povm};
use crate::numlin::{self, Tolerance};
use crate::ovm::{self, FramingOvm, PovmConversion};
use crate::problem::{self, GeneratorPayload, InputError, Kind, OvmPayload, Payload, ProblemFile};
use crate::report::{FmaxSection, GeneratorSection, RunReport, Section, SubspaceSection};
use crate::subspace::Subspace;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRIALS: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "framedil", version, about = "Framings, operator-valued measures and dilations of positive-definite maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Relative tolerance (overrides the problem file).
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Absolute tolerance (overrides the problem file).
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random trials for reconstruction checks.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress the human-readable summary.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Framing problems.
    #[command(subcommand)]
    Framing(FramingCommand),
    /// Operator-valued measure problems.
    #[command(subcommand)]
    Ovm(OvmCommand),
    /// Build and verify the dilation of an operator map.
    Dilate { input: PathBuf },
    /// Dilate a POVM to a projection-valued measure.
    Naimark { input: PathBuf },
    /// Run a bundled example.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(demos::DEMO_NAMES))]
        name: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum FramingCommand {
    /// F_max and reconstruction on it (or on a given subspace).
    Check { input: PathBuf },
    /// Generate a framing from a pair (A, B).
    Generate { input: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum OvmCommand {
    /// Total-mass and transform checks of a framing OVM.
    Check { input: PathBuf },
}

/// Settings resolved from flags, the problem file and defaults, in that
/// order of precedence.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: Tolerance,
    pub seed: u64,
    pub trials: usize,
}

impl Settings {
    pub fn resolve(flags: &Flags, file: Option<&ProblemFile>) -> Result<Self, InputError> {
        let base = file.and_then(|f| f.tolerance).unwrap_or_default();
        let rel = flags.tol_rel.unwrap_or(base.rel);
        let abs = flags.tol_abs.unwrap_or(base.abs);
        let tol = Tolerance::new(rel, abs).map_err(|e| InputError::new("--tol-rel/--tol-abs", e))?;
        let trials = flags
            .trials
            .or(file.and_then(|f| f.trials))
            .unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(InputError::new("trials", "at least one trial is required"));
        }
        Ok(Self {
            tol,
            seed: flags.seed.or(file.and_then(|f| f.seed)).unwrap_or(DEFAULT_SEED),
            trials,
        })
    }
}

pub fn exit_code(outcome: &Result<RunReport, InputError>) -> i32 {
    match outcome {
        Ok(r) if r.passed => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(_) => EXIT_INPUT,
    }
}

/// Parses a problem file and runs it. `expected` restricts the kind.
pub fn run_problem_text(
    command: &str,
    text: &str,
    expected: Option<Kind>,
    flags: &Flags,
) -> Result<RunReport, InputError> {
    let file = ProblemFile::parse(text)?;
    if let Some(kind) = expected {
        if file.kind != kind {
            return Err(InputError::new(
                "kind",
                format!("`{command}` needs a `{kind}` problem, got `{}`", file.kind),
            ));
        }
    }
    let settings = Settings::resolve(flags, Some(&file))?;
    let payload = file.payload()?;
    run_payload(command, &payload, false, &settings)
}

pub fn run_demo(name: &str, flags: &Flags) -> Result<RunReport, InputError> {
    let Demo {
        payload,
        chain_naimark,
        ..
    } = demos::demo(name).ok_or_else(|| InputError::new("name", format!("unknown demo `{name}`")))?;
    let settings = Settings::resolve(flags, None)?;
    run_payload(&format!("demo {name}"), &payload, chain_naimark, &settings)
}

pub fn run_payload(
    command: &str,
    payload: &Payload,
    chain_naimark: bool,
    s: &Settings,
) -> Result<RunReport, InputError> {
    let mut report = RunReport::new(command, s.tol, s.seed, s.trials);
    match payload {
        Payload::Framing(p) => framing_check(&mut report, &p.framing, p.subspace.as_ref(), s)?,
        Payload::Generator(p) => framing_generate(&mut report, p, s)?,
        Payload::Ovm(p) => ovm_check(&mut report, p, chain_naimark, s)?,
        Payload::Dilation(om) => dilate(&mut report, om, s)?,
        Payload::Naimark(p) => naimark_run(&mut report, p, s),
    }
    Ok(report)
}

fn check_ambient(space: &Subspace, fr: &Framing, path: &str) -> Result<(), InputError> {
    if space.ambient_dim() == fr.dim() {
        Ok(())
    } else {
        Err(InputError::new(
            path,
            format!(
                "subspace lives in C^{} but the framing in C^{}",
                space.ambient_dim(),
                fr.dim()
            ),
        ))
    }
}

fn fmax_section(fr: &Framing, tol: &Tolerance) -> (Subspace, Section) {
    let fmax = framing::compute_fmax(fr, tol);
    let span_h = numlin::range_basis(&fr.h_matrix(), tol);
    let section = Section::Fmax(FmaxSection {
        dim: fr.dim(),
        fmax_dim: fmax.rank(),
        full_space: fmax.rank() == fr.dim(),
        distance_from_span_h: span_h.distance_of(fmax.basis()),
        fmax: fmax.clone(),
    });
    (fmax, section)
}

fn framing_check(
    report: &mut RunReport,
    fr: &Framing,
    subspace: Option<&Subspace>,
    s: &Settings,
) -> Result<(), InputError> {
    let (fmax, section) = fmax_section(fr, &s.tol);
    report.push(section);
    let space = match subspace {
        Some(q) => {
            check_ambient(q, fr, "payload.subspace")?;
            let distance_from_fmax = fmax.distance_of(q.basis());
            let threshold = s.tol.threshold_for(1.0);
            report.push(Section::Subspace(SubspaceSection {
                distance_from_fmax,
                threshold,
                contained: distance_from_fmax <= threshold,
            }));
            q.clone()
        }
        None => fmax,
    };
    match framing::verify_reconstruction(fr, &space, s.trials, s.seed, &s.tol) {
        Ok(r) => report.push(Section::Reconstruction(r)),
        Err(e) => report.fail("reconstruction", e),
    }
    Ok(())
}

fn operators(
    fr: &Framing,
    a: &problem::MatrixRows,
    b: &problem::MatrixRows,
) -> Result<(numlin::CMatrix, numlin::CMatrix), InputError> {
    Ok((
        problem::operator_from_rows(a, fr.dim(), "payload.A")?,
        problem::operator_from_rows(b, fr.dim(), "payload.B")?,
    ))
}

fn generator_pair(
    report: &mut RunReport,
    fr: &Framing,
    a: &numlin::CMatrix,
    b: &numlin::CMatrix,
    subspace: Option<&Subspace>,
    tol: &Tolerance,
) -> Result<Option<framing::GeneratorPair>, InputError> {
    let space = match subspace {
        Some(q) => {
            check_ambient(q, fr, "payload.subspace")?;
            q.clone()
        }
        None => framing::maximal_generator_space(fr, a, b, tol).map_err(|e| InputError::new("payload", e))?,
    };
    match framing::check_generator_pair(fr, a, b, &space, tol) {
        Ok(gp) => {
            report.push(Section::GeneratorPair(GeneratorSection {
                space_dim: gp.space().rank(),
                condition1_residual: gp.condition1_residual(),
                condition2_distance: gp.condition2_distance(),
                space: gp.space().clone(),
            }));
            Ok(Some(gp))
        }
        Err(e) => {
            report.fail("generator_pair", e);
            Ok(None)
        }
    }
}

fn framing_generate(report: &mut RunReport, p: &GeneratorPayload, s: &Settings) -> Result<(), InputError> {
    let fr = &p.framing;
    let (a, b) = operators(fr, &p.a, &p.b)?;
    report.push(fmax_section(fr, &s.tol).1);
    let Some(gp) = generator_pair(report, fr, &a, &b, p.subspace.as_ref(), &s.tol)? else {
        return Ok(());
    };
    match framing::generate_framing(&gp, fr, s.trials, s.seed, &s.tol) {
        Ok((_, r)) => report.push(Section::Generation(r)),
        Err(e) => report.fail("generation", e),
    }
    match ovm::ovm_transform_check(&FramingOvm::new(fr.clone()), &gp, s.seed, &s.tol) {
        Ok(r) => report.push(Section::OvmTransform(r)),
        Err(e) => report.fail("ovm_transform", e),
    }
    report.push(Section::Dual(framing::dual_framing(&gp, fr, s.trials, s.seed, &s.tol)));
    Ok(())
}

fn ovm_check(report: &mut RunReport, p: &OvmPayload, chain_naimark: bool, s: &Settings) -> Result<(), InputError> {
    let fr = &p.framing;
    let m = FramingOvm::new(fr.clone());
    report.push(fmax_section(fr, &s.tol).1);
    report.push(Section::OvmTotal(ovm::ovm_total_check(&m, &s.tol)));
    match (&p.a, &p.b) {
        (Some(a), Some(b)) => {
            let (a, b) = operators(fr, a, b)?;
            if let Some(gp) = generator_pair(report, fr, &a, &b, p.subspace.as_ref(), &s.tol)? {
                match ovm::ovm_transform_check(&m, &gp, s.seed, &s.tol) {
                    Ok(r) => report.push(Section::OvmTransform(r)),
                    Err(e) => report.fail("ovm_transform", e),
                }
            }
        }
        (None, None) => {
            if p.subspace.is_some() {
                return Err(InputError::new("payload.subspace", "a subspace needs A and B"));
            }
        }
        (Some(_), None) => return Err(InputError::new("payload.B", "A is given without B")),
        (None, Some(_)) => return Err(InputError::new("payload.A", "B is given without A")),
    }
    let conversion = ovm::framing_to_povm(&m, &s.tol);
    report.push(Section::PovmConversion(conversion.report()));
    if chain_naimark {
        match conversion {
            PovmConversion::Accepted(povm) => naimark_run(report, &povm, s),
            PovmConversion::Rejected { reason, .. } => report.fail("povm_conversion", reason),
        }
    }
    Ok(())
}

fn dilate(report: &mut RunReport, om: &OperatorMap, s: &Settings) -> Result<(), InputError> {
    om.semigroup()
        .ensure_valid()
        .map_err(|e| InputError::new("payload.semigroup", e))?;
    let pd = match dilation::check_positive_definite(om, &s.tol) {
        Ok(pd) => pd,
        Err(e) => return Err(InputError::new("payload", e)),
    };
    let positive = pd.positive_definite;
    report.push(Section::PositiveDefinite(pd));
    if !positive {
        return Ok(());
    }
    let dil = match dilation::build_dilation(om, &s.tol) {
        Ok(d) => d,
        Err(e) => {
            report.fail("build_dilation", e);
            return Ok(());
        }
    };
    match dilation::verify_dilation(&dil, om, &s.tol) {
        Ok(r) => report.push(Section::Dilation(r)),
        Err(e) => report.fail("verify_dilation", e),
    }
    match dilation::boundedness_table(&dil, om, &s.tol) {
        Ok(table) => {
            let passed = table.iter().all(|e| e.passed);
            report.push(Section::Boundedness { table, passed });
        }
        Err(e) => report.fail("boundedness", e),
    }
    Ok(())
}

fn naimark_run(report: &mut RunReport, p: &Povm, s: &Settings) {
    let pd = match naimark::naimark_dilate(p, &s.tol) {
        Ok(pd) => pd,
        Err(e @ Error::TooManyAtoms { .. }) => return report.fail("povm", e),
        Err(e) => return report.fail("naimark_dilate", e),
    };
    match dilation::verify_dilation(pd.dilation(), pd.operator_map(), &s.tol) {
        Ok(r) => report.push(Section::Dilation(r)),
        Err(e) => report.fail("verify_dilation", e),
    }
    match naimark::verify_pvm(&pd, &s.tol) {
        Ok(r) => report.push(Section::Pvm(r)),
        Err(e) => report.fail("verify_pvm", e),
    }
}

fn read_input(path: &PathBuf) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::new("", format!("cannot read {}: {e}", path.display())))
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let flags = &cli.flags;
    let from_file = |command: &str, input: &PathBuf, kind: Kind| {
        read_input(input).and_then(|text| run_problem_text(command, &text, Some(kind), flags))
    };
    let outcome = match &cli.command {
        Command::Framing(FramingCommand::Check { input }) => from_file("framing check", input, Kind::Framing),
        Command::Framing(FramingCommand::Generate { input }) => {
            from_file("framing generate", input, Kind::Generator)
        }
        Command::Ovm(OvmCommand::Check { input }) => from_file("ovm check", input, Kind::Ovm),
        Command::Dilate { input } => from_file("dilate", input, Kind::Dilation),
        Command::Naimark { input } => from_file("naimark", input, Kind::Naimark),
        Command::Demo { name } => run_demo(name, flags),
    };
    let code = exit_code(&outcome);
    match outcome {
        Ok(mut report) => {
            report.stamp();
            let json = report.to_json();
            match &flags.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_INPUT;
                    }
                    if !flags.quiet {
                        print!("{}", report.summary());
                    }
                }
                None => {
                    println!("{json}");
                    if !flags.quiet {
                        eprint!("{}", report.summary());
                    }
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    code
}
