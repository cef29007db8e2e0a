//! Command surface of `pbwforge`: instance loading, the commands, and their
//! JSON reports.

pub mod document;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use pbwforge_core::diamond::{brute_force_filtered_dim, cumulative_graded_dims, diamond_check, DiamondError};
use pbwforge_core::fixtures::{fixture, FixtureError, FIXTURE_NAMES};
use pbwforge_core::params::DeformationPresentation;
use pbwforge_core::pbwcheck::{check_auto, CheckError};
use pbwforge_core::quadratic::validate_presentation;
use pbwforge_core::random::{all_verdicts, seeded_instance, HarnessError};
use pbwforge_core::untwist::{modular_counterexample_probe, untwist, untwisted_presentation, verify_untwist, UntwistError};

use document::{canonical_document, parse_and_build};

pub const SCHEMA: &str = include_str!("schema.json");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid instance at `{path}`: {message}")]
    Validation { path: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Diamond(#[from] DiamondError),
    #[error(transparent)]
    Untwist(#[from] UntwistError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

impl CliError {
    /// A non-PBW input to `untwist` is a verdict, not a usage error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Untwist(UntwistError::InputNotPbw) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Validation { .. } => "ValidationError",
            CliError::Io { .. } => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::Fixture(_) => "FixtureError",
            CliError::Check(_) => "CheckError",
            CliError::Diamond(_) => "DiamondError",
            CliError::Untwist(e) => match e {
                UntwistError::ModularObstruction { .. } => "ModularObstruction",
                UntwistError::InputNotPbw => "InputNotPbw",
                UntwistError::NotModular => "NotModular",
                UntwistError::GroupNotAbelian => "GroupNotAbelian",
                UntwistError::NotSymmetricAlgebra => "NotSymmetricAlgebra",
                _ => "UntwistError",
            },
            CliError::Harness(_) => "HarnessError",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut e = Map::new();
        e.insert("kind".into(), json!(self.kind()));
        e.insert("message".into(), json!(self.to_string()));
        match self {
            CliError::Parse { line, column, .. } => {
                e.insert("line".into(), json!(line));
                e.insert("column".into(), json!(column));
            }
            CliError::Validation { path, .. } => {
                e.insert("path".into(), json!(path));
            }
            _ => {}
        }
        Value::Object(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Parse and validate an instance.
    Validate,
    /// Explicit PBW conditions, choosing the poly, invariant or general form.
    Check,
    /// Resolve every overlap of the filtered rewriting system.
    Diamond,
    /// Every decider, with an agreement assertion.
    Full,
    /// Remove lambda by a change of generators (nonmodular only).
    Untwist,
    /// Certify that no filtration-preserving untwist exists (modular only).
    ProbeModular,
    /// List bundled fixtures, or print one with --fixture.
    Fixtures,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Check => "check",
            Command::Diamond => "diamond",
            Command::Full => "full",
            Command::Untwist => "untwist",
            Command::ProbeModular => "probe-modular",
            Command::Fixtures => "fixtures",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "pbwforge", version, about = "PBW deformations of skew group algebras")]
pub struct Args {
    #[arg(value_enum, required_unless_present = "schema")]
    pub command: Option<Command>,
    /// Instance document (JSON).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Bundled fixture name.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Prime for the example-6-1 and example-6-2 fixtures.
    #[arg(long)]
    pub prime: Option<u64>,
    /// Generate a random instance from this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Emit the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Print the instance JSON schema and exit.
    #[arg(long)]
    pub schema: bool,
    /// Brute-force filtered dimensions up to this degree (diamond).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Most V-letters in an ideal generator for the brute force; default degree+1.
    #[arg(long)]
    pub word_cap: Option<usize>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub degree: Option<usize>,
    pub word_cap: Option<usize>,
    pub timings: bool,
}

impl From<&Args> for Options {
    fn from(a: &Args) -> Self {
        Options {
            degree: a.degree,
            word_cap: a.word_cap,
            timings: a.timings,
        }
    }
}

/// Exit status and report of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: u8,
    pub report: Value,
    pub summary: Vec<String>,
}

struct Timer {
    on: bool,
    stages: Map<String, Value>,
}

impl Timer {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        if self.on {
            self.stages.insert(stage.into(), json!(t.elapsed().as_secs_f64() * 1000.0));
        }
        out
    }
}

pub enum Source<'a> {
    File(&'a std::path::Path),
    Fixture { name: &'a str, prime: Option<u64> },
    Seed(u64),
}

pub fn load(source: Source) -> Result<DeformationPresentation, CliError> {
    let d = match source {
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            return Ok(parse_and_build(&text)?.1);
        }
        Source::Fixture { name, prime } => fixture(name, prime)?,
        Source::Seed(seed) => seeded_instance(seed)?,
    };
    validate_presentation(&d.quadratic, &d.group).map_err(|e| CliError::Validation {
        path: "algebra".into(),
        message: e.to_string(),
    })?;
    Ok(d)
}

fn source_of(args: &Args) -> Result<Source<'_>, CliError> {
    if args.prime.is_some() && args.fixture.is_none() {
        return Err(CliError::Usage("--prime applies only to --fixture".into()));
    }
    match (&args.instance, &args.fixture, args.seed) {
        (Some(p), None, None) => Ok(Source::File(p)),
        (None, Some(name), None) => Ok(Source::Fixture { name, prime: args.prime }),
        (None, None, Some(s)) => Ok(Source::Seed(s)),
        (None, None, None) => Err(CliError::Usage("give one of --instance, --fixture or --seed".into())),
        _ => Err(CliError::Usage("--instance, --fixture and --seed are exclusive".into())),
    }
}

/// Runs a command on a loaded instance.
pub fn run_command(command: Command, d: &DeformationPresentation, opts: &Options) -> Result<Outcome, CliError> {
    if opts.word_cap.is_some() && opts.degree.is_none() {
        return Err(CliError::Usage("--word-cap needs --degree".into()));
    }
    if opts.degree.is_some() && command != Command::Diamond {
        return Err(CliError::Usage("--degree applies only to diamond".into()));
    }
    let mut timer = Timer {
        on: opts.timings,
        stages: Map::new(),
    };
    let mut body = Map::new();
    body.insert("format_version".into(), json!(document::FORMAT_VERSION));
    body.insert("command".into(), json!(command.name()));
    body.insert("instance".into(), report::instance_json(d));
    let mut summary = Vec::new();
    let exit = match command {
        Command::Validate => {
            let v = timer
                .time("validate", || validate_presentation(&d.quadratic, &d.group))
                .map_err(|e| CliError::Validation {
                    path: "algebra".into(),
                    message: e.to_string(),
                })?;
            body.insert(
                "validation".into(),
                json!({"group_checks": v.group_checks, "overlaps": v.overlaps}),
            );
            summary.push(format!(
                "valid: |G| = {}, dim V = {}, {} relations, {} homogeneous overlaps resolve",
                d.group.order(),
                d.dim(),
                d.quadratic.r_dim(),
                v.overlaps
            ));
            0
        }
        Command::Check => {
            let rep = timer.time("check", || check_auto(d))?;
            summary.extend(report::check_lines(&rep));
            body.insert("check".into(), report::check_json(&rep, &d.group));
            verdict_exit(rep.pbw)
        }
        Command::Diamond => {
            let rep = timer.time("diamond", || diamond_check(d))?;
            summary.extend(report::diamond_lines(&rep));
            body.insert("diamond".into(), report::diamond_json(&rep, &d.group));
            if let Some(deg) = opts.degree {
                let cap = opts.word_cap.unwrap_or(deg + 1);
                let bf = timer.time("brute_force", || brute_force_filtered_dim(d, deg, cap))?;
                let expected = cumulative_graded_dims(&d.quadratic, &d.group, deg);
                summary.push(format!("filtered dims (V-letter cap {cap}): {bf:?}, PBW predicts {expected:?}"));
                body.insert(
                    "filtered_dims".into(),
                    json!({
                        "degree": deg,
                        "word_cap": cap,
                        "brute_force": report::u128s(&bf),
                        "expected": report::u128s(&expected),
                        "matches": bf == expected,
                    }),
                );
            }
            verdict_exit(rep.pbw)
        }
        Command::Full => {
            let rep = timer.time("check", || check_auto(d))?;
            let dia = timer.time("diamond", || diamond_check(d))?;
            let v = timer.time("verdicts", || all_verdicts(d))?;
            summary.extend(report::check_lines(&rep));
            summary.extend(report::diamond_lines(&dia));
            body.insert("check".into(), report::check_json(&rep, &d.group));
            body.insert("diamond".into(), report::diamond_json(&dia, &d.group));
            body.insert(
                "verdicts".into(),
                json!({
                    "general": v.general,
                    "poly": v.poly,
                    "invariant": v.invariant,
                    "diamond": v.diamond,
                    "agree": v.agree(),
                }),
            );
            if v.agree() {
                summary.push(format!("all deciders agree: {}", if v.general { "PBW" } else { "not PBW" }));
                verdict_exit(v.general)
            } else {
                summary.push(format!("AGREEMENT_VIOLATION: {v:?}"));
                body.insert(
                    "error".into(),
                    json!({"kind": "AGREEMENT_VIOLATION", "message": format!("deciders disagree: {v:?}")}),
                );
                2
            }
        }
        Command::Untwist => {
            let u = timer.time("untwist", || untwist(d))?;
            let ver = timer.time("verify", || verify_untwist(d, &u))?;
            let target = untwisted_presentation(d, &u)?;
            body.insert("untwist".into(), report::untwist_json(d, &u, &ver));
            body.insert("untwisted_instance".into(), report::instance_json(&target));
            summary.push(format!(
                "untwisted: {} relations map to zero; target PBW (poly {}, diamond {})",
                ver.relations_checked, ver.target_poly.pbw, ver.target_diamond.pbw
            ));
            0
        }
        Command::ProbeModular => {
            let p = timer.time("probe", || modular_counterexample_probe(d))?;
            summary.push(if p.certified {
                "certified: no filtration-preserving isomorphism onto a lambda = 0 deformation".to_string()
            } else {
                "not certified".to_string()
            });
            body.insert("probe".into(), report::probe_json(d, &p));
            if p.certified {
                0
            } else {
                1
            }
        }
        Command::Fixtures => {
            return Err(CliError::Usage("fixtures takes no instance".into()));
        }
    };
    if opts.timings {
        body.insert("timings_ms".into(), Value::Object(timer.stages));
    }
    Ok(Outcome {
        exit,
        report: Value::Object(body),
        summary,
    })
}

fn verdict_exit(pbw: bool) -> u8 {
    if pbw {
        0
    } else {
        1
    }
}

fn fixtures_command(args: &Args) -> Result<(u8, String), CliError> {
    if args.instance.is_some() || args.seed.is_some() {
        return Err(CliError::Usage("fixtures takes only --fixture and --prime".into()));
    }
    match &args.fixture {
        None => {
            if args.prime.is_some() {
                return Err(CliError::Usage("--prime applies only to --fixture".into()));
            }
            let out = if args.json {
                serde_json::to_string_pretty(&json!({ "fixtures": FIXTURE_NAMES })).unwrap()
            } else {
                FIXTURE_NAMES.join("\n")
            };
            Ok((0, out))
        }
        Some(name) => {
            let d = fixture(name, args.prime)?;
            Ok((0, document::to_json(&canonical_document(&d))))
        }
    }
}

fn render(args: &Args, o: &Outcome) -> String {
    if args.json {
        serde_json::to_string_pretty(&o.report).expect("reports serialize")
    } else {
        o.summary.join("\n")
    }
}

/// Parses arguments, runs, and returns the exit status with stdout and
/// stderr text.
pub fn run_cli<I, T>(argv: I) -> (u8, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    if args.schema {
        return (0, SCHEMA.trim_end().to_string(), String::new());
    }
    let command = args.command.expect("clap requires a command");
    let result = if command == Command::Fixtures {
        fixtures_command(&args)
    } else {
        source_of(&args)
            .and_then(load)
            .and_then(|d| run_command(command, &d, &Options::from(&args)))
            .map(|o| (o.exit, render(&args, &o)))
    };
    match result {
        Ok((code, out)) => (code, out, String::new()),
        Err(e) => {
            let err = if args.json {
                serde_json::to_string_pretty(&json!({
                    "format_version": document::FORMAT_VERSION,
                    "command": command.name(),
                    "error": e.to_json(),
                }))
                .unwrap()
            } else {
                format!("error: {} ({})", e, e.kind())
            };
            if args.json {
                (e.exit_code(), err, String::new())
            } else {
                (e.exit_code(), String::new(), err)
            }
        }
    }
}
