//! `seuguard`: finds the variables of a control program whose corruption by a single
//! bit flip can change whether its safety property holds.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seuguard_core::analysis::{display_name, prepare, AnalysisError};
use seuguard_core::cfg::{build_cfg, pdg_of};
use seuguard_core::instrument::self_compose;
use seuguard_core::report::{table_row, TABLE_HEADER};
use seuguard_core::slicer::render_slice;
use seuguard_core::{
    analyze, emit_report, AnalysisConfig, AnalysisReport, BitRange, Bounds, Engine, Format,
    IntRange, Manifest, Trigger, VariableSelection,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "seuguard", version, about = "Conditional relevance analysis for control programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the variables of one program.
    Analyze(AnalyzeArgs),
    /// Analyze every benchmark of a manifest and print the summary table.
    Table(TableArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CtrlC source file.
    file: PathBuf,
    /// Safety property, or a file containing it.
    #[arg(long)]
    property: String,
    /// Analyze one variable only.
    #[arg(long, conflicts_with = "all")]
    var: Option<String>,
    /// Analyze every variable (the default).
    #[arg(long)]
    all: bool,
    #[arg(long, default_value = "checker")]
    engine: Engine,
    /// Input range, `name=lo..hi`; `input` names the `input()` reads. Repeatable.
    #[arg(long = "domain", value_name = "NAME=LO..HI", value_parser = parse_domain)]
    domains: Vec<(String, IntRange)>,
    /// Range for inputs without a `--domain`.
    #[arg(long, value_name = "LO..HI", default_value = "0..15")]
    default_domain: IntRange,
    /// Loop iterations per entry; cycles for a control loop.
    #[arg(long, default_value_t = Bounds::DEFAULT_UNWIND, value_parser = clap::value_parser!(u32).range(1..=1000))]
    unwind: u32,
    /// Executed statements per program copy.
    #[arg(long, default_value_t = Bounds::DEFAULT_MAX_STEPS)]
    max_steps: u64,
    /// `input()` reads per cycle (per run for terminating programs).
    #[arg(long, default_value_t = 4)]
    max_reads: usize,
    #[arg(long, value_name = "LO..HI", default_value = "0..31")]
    fault_bits: BitRange,
    #[arg(long, default_value = "nondet")]
    trigger: Trigger,
    #[arg(long, default_value = "table")]
    format: Format,
    /// Program name in the report; defaults to the file name.
    #[arg(long)]
    name: Option<String>,
    /// Print the control-flow graph in DOT and stop.
    #[arg(long)]
    emit_cfg: bool,
    /// Print the dependence graph in DOT and stop.
    #[arg(long)]
    emit_pdg: bool,
    /// Print the source annotated with the backward slice and stop.
    #[arg(long)]
    emit_slice: bool,
    /// Print the self-composed program for `--var` and stop.
    #[arg(long, requires = "var")]
    emit_instrumented: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Benchmark manifest (TOML).
    manifest: PathBuf,
    #[arg(long, default_value = "checker")]
    engine: Engine,
    /// Print the full report of every benchmark instead of the summary table.
    #[arg(long, default_value = "table")]
    format: Format,
    /// Rewrite each benchmark's expected report.
    #[arg(long)]
    update_expected: bool,
}

fn parse_domain(s: &str) -> Result<(String, IntRange), String> {
    let (name, range) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=LO..HI, got `{s}`"))?;
    let range = range.parse::<IntRange>().map_err(|e| e.to_string())?;
    Ok((name.trim().to_string(), range))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match &e {
            AnalysisError::UnknownVariable(_) | AnalysisError::Domain(_) => EXIT_USAGE,
            AnalysisError::Parse(_)
            | AnalysisError::Spec(_)
            | AnalysisError::UnknownOutput(_)
            | AnalysisError::Engine { .. } => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| display_name(&s.to_string_lossy()))
        .unwrap_or_default()
}

fn property_text(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        Ok(read(path)?.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn config(args: &AnalyzeArgs) -> Result<AnalysisConfig, Failure> {
    let source = read(&args.file)?;
    let name = args.name.clone().unwrap_or_else(|| stem(&args.file));
    let mut c = AnalysisConfig::new(name, source, property_text(&args.property)?);
    c.selection = match &args.var {
        Some(v) => VariableSelection::One(v.clone()),
        None => VariableSelection::All,
    };
    c.default_range = args.default_domain;
    c.domains = args.domains.clone();
    c.max_reads = args.max_reads;
    c.bounds = Bounds {
        unwind: args.unwind,
        max_steps: args.max_steps,
    };
    c.bits = args.fault_bits;
    c.trigger = args.trigger;
    c.engine = args.engine;
    Ok(c)
}

/// Prints the requested intermediate artifacts; returns whether any was requested.
fn emit_artifacts(args: &AnalyzeArgs, c: &AnalysisConfig) -> Result<bool, Failure> {
    if !(args.emit_cfg || args.emit_pdg || args.emit_slice || args.emit_instrumented) {
        return Ok(false);
    }
    let p = prepare(c)?;
    let program = &p.program;
    if args.emit_cfg {
        print!("{}", build_cfg(program).to_dot(&program.name));
    }
    if args.emit_pdg {
        let names = |v| program.var_name(v).to_string();
        print!("{}", pdg_of(program).to_dot(&program.name, &names));
    }
    if args.emit_slice {
        print!("{}", render_slice(&c.source, program, &p.slice));
    }
    if args.emit_instrumented {
        let name = args.var.as_deref().unwrap_or_default();
        let x = program
            .find_var(name)
            .ok_or_else(|| Failure::usage(format!("variable `{name}` is not declared in the program")))?;
        let ip = self_compose(program, &p.spec, x).map_err(|e| Failure::usage(e.to_string()))?;
        print!("{}", ip.render());
    }
    Ok(true)
}

/// Exit status for a finished report, with the mismatch details on stderr.
fn verdict_status(report: &AnalysisReport) -> u8 {
    let mut code = 0;
    if report.has_unknown() {
        eprintln!(
            "{}: {} variable(s) could not be decided within the bounds and are counted as CRVs",
            report.program, report.unknown_count
        );
        code = EXIT_UNKNOWN;
    }
    for v in report.mismatches() {
        eprintln!("{}: engines disagree on `{}`", report.program, v.variable);
        eprintln!("  checker: {:?} {:?}", v.verdict.classification, v.verdict.direction);
        eprintln!("    counterexample: {:?}", v.verdict.counterexample);
        if let Some(o) = &v.oracle {
            eprintln!("  oracle:  {:?} {:?}", o.classification, o.direction);
            eprintln!("    counterexample: {:?}", o.counterexample);
        }
        code = EXIT_MISMATCH;
    }
    code
}

fn run_analyze(args: &AnalyzeArgs) -> Result<u8, Failure> {
    let c = config(args)?;
    if emit_artifacts(args, &c)? {
        return Ok(0);
    }
    let report = analyze(&c)?;
    print!("{}", emit_report(&report, args.format));
    Ok(verdict_status(&report))
}

fn run_table(args: &TableArgs) -> Result<u8, Failure> {
    let manifest = Manifest::load(&args.manifest).map_err(|e| Failure::usage(e.to_string()))?;
    let mut code = 0;
    if args.format == Format::Table {
        println!("{TABLE_HEADER}");
    }
    for entry in &manifest.benchmarks {
        let c = manifest
            .config(entry, args.engine)
            .map_err(|e| Failure::usage(e.to_string()))?;
        let report = analyze(&c)?;
        match args.format {
            Format::Table => println!("{}", table_row(&report)),
            f => print!("{}", emit_report(&report, f)),
        }
        if args.update_expected {
            let path = manifest.expected_path(entry);
            fs::write(&path, emit_report(&report, Format::Json))
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
        }
        code = code.max(verdict_status(&report));
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Table(args) => run_table(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
