//! The end-to-end pipeline: parse, slice, classify every selected variable, aggregate.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfg::pdg_of;
use crate::checker::classify_variable;
use crate::lang::{parse, Diagnostic, Program, VarId};
use crate::model::{
    BitRange, Bounds, Classification, DomainError, EngineConfig, EngineError, InputDomain,
    IntRange, Trigger, Verdict,
};
use crate::oracle::oracle_classify;
use crate::property::{parse_spec, SafetySpec, SpecError};
use crate::slicer::{backward_slice_multi, output_criteria, Slice};

/// Which engine decides the variables that survive slicing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Checker,
    Oracle,
    /// Both engines on every variable; any disagreement is reported.
    Differential,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "checker" => Ok(Engine::Checker),
            "oracle" => Ok(Engine::Oracle),
            "differential" => Ok(Engine::Differential),
            other => Err(format!(
                "unknown engine `{other}`; expected checker, oracle or differential"
            )),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Checker => "checker",
            Engine::Oracle => "oracle",
            Engine::Differential => "differential",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableSelection {
    One(String),
    #[default]
    All,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Name shown in the report.
    pub name: String,
    pub source: String,
    pub property: String,
    pub selection: VariableSelection,
    /// Range for every input without an override.
    pub default_range: IntRange,
    /// `name=lo..hi` overrides; `input` stands for `input()` reads.
    pub domains: Vec<(String, IntRange)>,
    pub max_reads: usize,
    pub bounds: Bounds,
    pub bits: BitRange,
    pub trigger: Trigger,
    pub engine: Engine,
}

impl AnalysisConfig {
    pub fn new(name: impl Into<String>, source: impl Into<String>, property: impl Into<String>) -> Self {
        AnalysisConfig {
            name: name.into(),
            source: source.into(),
            property: property.into(),
            selection: VariableSelection::All,
            default_range: InputDomain::DEFAULT_RANGE,
            domains: Vec::new(),
            max_reads: InputDomain::DEFAULT_MAX_READS,
            bounds: Bounds::default(),
            bits: BitRange::ALL,
            trigger: Trigger::NondetAnywhere,
            engine: Engine::Checker,
        }
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{}", render_diagnostics(.0))]
    Parse(Vec<Diagnostic>),
    #[error("invalid property: {0}")]
    Spec(#[from] SpecError),
    #[error("output variable `{0}` of the property is not declared in the program")]
    UnknownOutput(String),
    #[error("variable `{0}` is not declared in the program")]
    UnknownVariable(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("{variable}: {source}")]
    Engine {
        variable: String,
        source: EngineError,
    },
}

fn render_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// The outcome for one variable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariableResult {
    pub variable: String,
    pub in_slice: bool,
    /// The verdict the aggregates use: the oracle's under `--engine oracle`, otherwise
    /// the checker's.
    pub verdict: Verdict,
    pub engine: Engine,
    /// The oracle's verdict in differential mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Verdict>,
    /// Classification and direction agree, in differential mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub program: String,
    pub loc: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// `100·M/S`; absent when `S = 0`.
    pub eta: Option<f64>,
    pub crv_count: usize,
    pub unknown_count: usize,
    pub phi_text: String,
    pub property: String,
    pub engine: Engine,
    pub relevant_variables: Vec<String>,
    pub per_variable: Vec<VariableResult>,
}

impl AnalysisReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &VariableResult> {
        self.per_variable.iter().filter(|v| v.agree == Some(false))
    }

    pub fn has_unknown(&self) -> bool {
        self.unknown_count > 0
    }

    pub fn eta_text(&self) -> String {
        format_eta(self.eta)
    }
}

pub fn eta(s: usize, m: usize) -> Option<f64> {
    (s > 0).then(|| 100.0 * m as f64 / s as f64)
}

/// `25%`, `33.3%`, or `n/a`.
pub fn format_eta(eta: Option<f64>) -> String {
    match eta {
        None => "n/a".to_string(),
        Some(e) if (e - e.round()).abs() < 1e-9 => format!("{}%", e.round() as i64),
        Some(e) => format!("{e:.1}%"),
    }
}

/// Non-blank source lines.
pub fn count_loc(source: &str) -> usize {
    source.lines().filter(|l| !l.trim().is_empty()).count()
}

/// `temperature_control` becomes `Temperature Control`.
pub fn display_name(stem: &str) -> String {
    stem.split(['_', '-', ' '])
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut cs = w.chars();
            match cs.next() {
                Some(c) => c.to_uppercase().chain(cs).collect::<String>(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Everything the pipeline derives before classification.
pub struct Prepared {
    pub program: Program,
    pub spec: SafetySpec,
    pub slice: Slice,
    pub engine_config: EngineConfig,
}

pub fn prepare(config: &AnalysisConfig) -> Result<Prepared, AnalysisError> {
    let program = parse(&config.source).map_err(AnalysisError::Parse)?;
    let spec = parse_spec(&config.property)?;
    let out = program
        .find_var(&spec.output_variable)
        .ok_or_else(|| AnalysisError::UnknownOutput(spec.output_variable.clone()))?;
    let slice = backward_slice_multi(&pdg_of(&program), &output_criteria(&program, out))
        .expect("output points are statements of the program");
    let mut domain =
        InputDomain::uniform(&program, config.default_range).with_overrides(&program, &config.domains)?;
    domain.max_reads = config.max_reads;
    let engine_config = EngineConfig {
        domain,
        bounds: config.bounds,
        bits: config.bits,
        trigger: config.trigger,
    };
    Ok(Prepared {
        program,
        spec,
        slice,
        engine_config,
    })
}

fn agree(a: &Verdict, b: &Verdict) -> bool {
    a.classification == b.classification && a.direction == b.direction
}

fn classify_one(p: &Prepared, x: VarId, engine: Engine) -> Result<VariableResult, EngineError> {
    let started = Instant::now();
    let cfg = &p.engine_config;
    let in_slice = p.slice.relevant_variables.contains(&x);
    let oracle = || -> Result<Verdict, EngineError> {
        if engine == Engine::Oracle && !in_slice {
            return Ok(Verdict::pruned(cfg.bounds, cfg.domain.clone()));
        }
        oracle_classify(&p.program, &p.spec, &cfg.fault_model(x), &cfg.domain, cfg.bounds)
    };
    let (verdict, oracle_verdict) = match engine {
        Engine::Checker => (classify_variable(&p.program, &p.spec, x, cfg, Some(&p.slice))?, None),
        Engine::Oracle => (oracle()?, None),
        Engine::Differential => {
            let checked = classify_variable(&p.program, &p.spec, x, cfg, Some(&p.slice))?;
            (checked, Some(oracle()?))
        }
    };
    Ok(VariableResult {
        variable: p.program.var_name(x).to_string(),
        in_slice,
        agree: oracle_verdict.as_ref().map(|o| agree(&verdict, o)),
        verdict,
        engine,
        oracle: oracle_verdict,
        elapsed_ms: started.elapsed().as_secs_f64() * 1000.0,
    })
}

/// Runs the whole pipeline. Variables are classified in parallel and reported in
/// declaration order.
pub fn analyze(config: &AnalysisConfig) -> Result<AnalysisReport, AnalysisError> {
    let p = prepare(config)?;
    let selected: Vec<VarId> = match &config.selection {
        VariableSelection::All => p.program.list_variables(),
        VariableSelection::One(name) => vec![p
            .program
            .find_var(name)
            .ok_or_else(|| AnalysisError::UnknownVariable(name.clone()))?],
    };
    let per_variable = selected
        .par_iter()
        .map(|&x| {
            classify_one(&p, x, config.engine).map_err(|source| AnalysisError::Engine {
                variable: p.program.var_name(x).to_string(),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let s = p.slice.relevant_variables.len();
    let m = per_variable
        .iter()
        .filter(|v| v.in_slice && v.verdict.classification == Classification::NonCrv)
        .count();
    let unknown_count = per_variable
        .iter()
        .filter(|v| v.verdict.classification == Classification::Unknown)
        .count();
    let relevant: BTreeSet<VarId> = p.slice.relevant_variables.clone();
    Ok(AnalysisReport {
        program: config.name.clone(),
        loc: count_loc(&config.source),
        t: p.program.list_variables().len(),
        s,
        m,
        eta: eta(s, m),
        crv_count: s - m,
        unknown_count,
        phi_text: p.spec.to_string(),
        property: p.spec.to_source(),
        engine: config.engine,
        relevant_variables: relevant
            .iter()
            .map(|&v| p.program.var_name(v).to_string())
            .collect(),
        per_variable,
    })
}
