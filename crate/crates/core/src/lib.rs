//! Conditional relevance analysis for single-procedure control programs.
//!
//! A variable is conditionally relevant (a CRV) when a single bit flip in it can change
//! whether the program's safety property holds at an output point, either by
//! introducing a violation or by masking one. The pipeline parses a CtrlC program,
//! prunes variables outside the backward slice of the output, and classifies the rest
//! by exhaustive bounded checking of a self-composed, fault-instrumented program. An
//! independent brute-force oracle implements the definition directly on paired runs
//! of the original program.

pub mod lang;

mod bitset;
pub mod cfg;
pub mod slicer;
pub mod property;
pub mod model;
pub mod oracle;
pub mod instrument;
pub mod checker;
pub mod analysis;
pub mod report;
pub mod manifest;

pub use analysis::{analyze, AnalysisConfig, AnalysisError, AnalysisReport, Engine, VariableSelection};
pub use cfg::{build_cfg, build_pdg, Cfg, Pdg};
pub use checker::{check, classify_variable};
pub use instrument::{self_compose, InstrumentedProgram};
pub use lang::{parse, Program, ProgramShape, VarId};
pub use manifest::{BenchmarkEntry, Manifest};
pub use model::{
    flip_bit, BitRange, Bounds, Classification, Counterexample, Direction, EngineConfig,
    EngineError, FaultModel, InputDomain, InputVector, IntRange, Trigger, Verdict,
};
pub use oracle::{oracle_classify, run_concrete};
pub use property::{eval_phi, parse_spec, SafetySpec};
pub use report::{emit_report, Format};
pub use slicer::{backward_slice, relevant_variables, Slice, SlicingCriterion};
