//! Fault model, input domains, bounds and verdicts shared by the checker and the oracle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{Program, ScalarType, StmtId, VarId};

/// Inclusive integer range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: i32,
    pub hi: i32,
}

impl IntRange {
    pub fn new(lo: i32, hi: i32) -> Result<Self, DomainError> {
        if lo > hi {
            return Err(DomainError::EmptyRange { lo, hi });
        }
        Ok(IntRange { lo, hi })
    }

    /// Number of values in the range.
    pub fn size(&self) -> u64 {
        (self.hi as i64 - self.lo as i64 + 1) as u64
    }

    pub fn values(&self) -> impl DoubleEndedIterator<Item = i32> + Clone {
        self.lo..=self.hi
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for IntRange {
    type Err = DomainError;

    /// `lo..hi`, both ends inclusive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DomainError::Syntax(s.to_string());
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        IntRange::new(lo, hi)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("range {lo}..{hi} is empty")]
    EmptyRange { lo: i32, hi: i32 },
    #[error("cannot parse range `{0}`; expected lo..hi")]
    Syntax(String),
    #[error("`{0}` is not a parameter of the program")]
    UnknownInput(String),
    #[error("bit positions must lie within 0..31, got {lo}..{hi}")]
    BitRange { lo: u8, hi: u8 },
}

/// Finite value sets for every input: each parameter, and every `input()` read.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDomain {
    /// One range per parameter, in signature order.
    pub params: Vec<IntRange>,
    pub reads: IntRange,
    /// Upper bound on `input()` reads per iteration (per run for terminating programs).
    pub max_reads: usize,
}

impl InputDomain {
    pub const DEFAULT_RANGE: IntRange = IntRange { lo: 0, hi: 15 };
    pub const DEFAULT_MAX_READS: usize = 4;

    /// Every int input gets `default`, bool parameters get `0..1`.
    pub fn uniform(program: &Program, default: IntRange) -> Self {
        InputDomain {
            params: program
                .params()
                .map(|v| match program.var(v).ty {
                    ScalarType::Bool => IntRange { lo: 0, hi: 1 },
                    ScalarType::Int32 => default,
                })
                .collect(),
            reads: default,
            max_reads: Self::DEFAULT_MAX_READS,
        }
    }

    /// Applies `name=lo..hi` style overrides. The name `input` stands for `input()` reads
    /// unless the program has a parameter of that name.
    pub fn with_overrides(
        mut self,
        program: &Program,
        overrides: &[(String, IntRange)],
    ) -> Result<Self, DomainError> {
        for (name, range) in overrides {
            match program.find_var(name).filter(|v| v.index() < self.params.len()) {
                Some(v) => self.params[v.index()] = *range,
                None if name == "input" => self.reads = *range,
                None => return Err(DomainError::UnknownInput(name.clone())),
            }
        }
        Ok(self)
    }

    /// Number of parameter vectors.
    pub fn param_space(&self) -> u64 {
        self.params.iter().map(|r| r.size()).product()
    }

    /// Parameter vectors in ascending lexicographic order.
    pub fn param_vectors(&self) -> ParamVectors<'_> {
        ParamVectors {
            domain: self,
            next: Some(self.params.iter().map(|r| r.lo).collect()),
        }
    }
}

pub struct ParamVectors<'a> {
    domain: &'a InputDomain,
    next: Option<Vec<i32>>,
}

impl Iterator for ParamVectors<'_> {
    type Item = Vec<i32>;

    fn next(&mut self) -> Option<Vec<i32>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ[i] < self.domain.params[i].hi {
                succ[i] += 1;
                for (j, v) in succ.iter_mut().enumerate().skip(i + 1) {
                    *v = self.domain.params[j].lo;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(cur)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trigger {
    /// The flip may happen at any use occurrence of the target, or not at all.
    NondetAnywhere,
    /// The flip happens at the first use occurrence.
    FirstUse,
}

impl FromStr for Trigger {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nondet" | "nondet-anywhere" => Ok(Trigger::NondetAnywhere),
            "first-use" => Ok(Trigger::FirstUse),
            other => Err(format!("unknown trigger `{other}`; expected nondet or first-use")),
        }
    }
}

/// Inclusive range of bit positions within a 32-bit word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitRange {
    pub lo: u8,
    pub hi: u8,
}

impl BitRange {
    pub const ALL: BitRange = BitRange { lo: 0, hi: 31 };

    pub fn new(lo: u8, hi: u8) -> Result<Self, DomainError> {
        if lo > hi || hi > 31 {
            return Err(DomainError::BitRange { lo, hi });
        }
        Ok(BitRange { lo, hi })
    }

    pub fn bits(&self) -> impl DoubleEndedIterator<Item = u8> + Clone {
        self.lo..=self.hi
    }
}

impl FromStr for BitRange {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DomainError::Syntax(s.to_string());
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        BitRange::new(lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?)
    }
}

/// At most one single-bit upset in `target` per execution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaultModel {
    pub target: VarId,
    pub bits: BitRange,
    pub trigger: Trigger,
}

/// Everything an engine needs besides the program, the property and the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub domain: InputDomain,
    pub bounds: Bounds,
    pub bits: BitRange,
    pub trigger: Trigger,
}

impl EngineConfig {
    pub fn fault_model(&self, target: VarId) -> FaultModel {
        FaultModel {
            target,
            bits: self.bits,
            trigger: self.trigger,
        }
    }
}

/// Exploration limits shared by both engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    /// Iterations per loop entry; for a control loop, the number of cycles explored.
    pub unwind: u32,
    /// Executed statements (conditions included) per program copy.
    pub max_steps: u64,
}

impl Bounds {
    pub const DEFAULT_UNWIND: u32 = 16;
    pub const DEFAULT_MAX_STEPS: u64 = 10_000;
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            unwind: Self::DEFAULT_UNWIND,
            max_steps: Self::DEFAULT_MAX_STEPS,
        }
    }
}

/// Flips bit `pos` of `value`.
pub fn flip_bit(value: i32, pos: u8) -> Result<i32, FlipError> {
    if pos > 31 {
        return Err(FlipError(pos));
    }
    Ok(value ^ (1i32 << pos))
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("bit position {0} is outside 0..31")]
pub struct FlipError(pub u8);

/// Concrete values for every input of one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InputVector {
    pub params: Vec<i32>,
    /// `input()` values per segment. A terminating program has one segment; a control
    /// loop has the prelude as segment 0 and iteration `i` as segment `i`.
    pub reads: Vec<Vec<i32>>,
}

impl InputVector {
    pub fn new(params: Vec<i32>) -> Self {
        InputVector {
            params,
            reads: Vec::new(),
        }
    }

    pub fn segment(&self, i: usize) -> &[i32] {
        self.reads.get(i).map_or(&[], |v| v.as_slice())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NonCrv,
    Crv,
    Unknown,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::NonCrv => "non-CRV",
            Classification::Crv => "CRV",
            Classification::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Fault-free run safe, faulted run violates.
    FaultIntroducing,
    /// Fault-free run violates, faulted run safe.
    FaultMasking,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::FaultIntroducing => "fault-introducing",
            Direction::FaultMasking => "fault-masking",
        })
    }
}

/// Where the upset happened: the statement before which the flip was applied and the
/// 1-based dynamic count of uses of the target up to that point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HookSite {
    pub stmt: StmtId,
    pub occurrence: u32,
}

/// One output occurrence in both runs; `None` when that run did not reach it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputPair {
    pub o: Option<i32>,
    pub o_prime: Option<i32>,
    /// Cumulative φ after this output.
    pub phi: Option<bool>,
    pub phi_prime: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub inputs: InputVector,
    /// Extra `input()` values the faulted run needed beyond the recorded ones, per segment.
    pub fresh_reads: Vec<Vec<i32>>,
    pub hook: HookSite,
    pub bit: u8,
    pub direction: Direction,
    /// Number of control-loop cycles the comparison covered; `None` for terminating programs.
    pub cycles: Option<u32>,
    pub base_trace: Vec<StmtId>,
    pub fault_trace: Vec<StmtId>,
    pub output_points: Vec<OutputPair>,
}

impl Counterexample {
    /// The reads seen by the faulted run, per segment.
    pub fn fault_reads(&self) -> Vec<Vec<i32>> {
        let n = self.inputs.reads.len().max(self.fresh_reads.len());
        (0..n)
            .map(|i| {
                let mut v = self.inputs.segment(i).to_vec();
                v.extend(self.fresh_reads.get(i).into_iter().flatten());
                v
            })
            .collect()
    }
}

/// Exploration counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationStats {
    /// Completed paired comparisons.
    pub pairs: u64,
    /// Executions cut short by a bound.
    pub truncated: u64,
    /// Faulted executions that hit a runtime trap.
    pub fault_traps: u64,
    /// Faulted executions that needed reads beyond those of the fault-free run.
    pub fresh_read_runs: u64,
}

impl ExplorationStats {
    pub fn merge(&mut self, other: &ExplorationStats) {
        self.pairs += other.pairs;
        self.truncated += other.truncated;
        self.fault_traps += other.fault_traps;
        self.fresh_read_runs += other.fresh_read_runs;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub classification: Classification,
    pub direction: Option<Direction>,
    pub counterexample: Option<Counterexample>,
    /// Decided by slicing without exploration.
    pub pruned: bool,
    pub bounds: Bounds,
    pub domain: InputDomain,
    pub stats: ExplorationStats,
}

impl Verdict {
    pub fn is_crv(&self) -> bool {
        self.classification == Classification::Crv
    }

    /// Crv if any counterexample exists, else Unknown if any execution was cut short,
    /// else NonCrv.
    pub fn from_search(
        counterexample: Option<Counterexample>,
        stats: ExplorationStats,
        bounds: Bounds,
        domain: InputDomain,
    ) -> Verdict {
        let classification = match (&counterexample, stats.truncated) {
            (Some(_), _) => Classification::Crv,
            (None, 0) => Classification::NonCrv,
            (None, _) => Classification::Unknown,
        };
        Verdict {
            classification,
            direction: counterexample.as_ref().map(|c| c.direction),
            counterexample,
            pruned: false,
            bounds,
            domain,
            stats,
        }
    }

    pub fn pruned(bounds: Bounds, domain: InputDomain) -> Verdict {
        Verdict {
            classification: Classification::NonCrv,
            direction: None,
            counterexample: None,
            pruned: true,
            bounds,
            domain,
            stats: ExplorationStats::default(),
        }
    }
}

/// Failures that stop an engine before it reaches a verdict.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("the fault-free program traps ({trap}) at statement #{} for inputs {inputs:?}", stmt.0)]
    BaseTrap {
        trap: crate::lang::Trap,
        stmt: StmtId,
        inputs: InputVector,
    },
    #[error("variable #{} is not declared in the program", .0.0)]
    UnknownVariable(VarId),
    #[error("counterexample failed to replay: {0}")]
    Validation(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn flip_examples() {
        assert_eq!(flip_bit(4, 0), Ok(5));
        assert_eq!(flip_bit(0, 3), Ok(8));
        assert_eq!(flip_bit(0, 31), Ok(i32::MIN));
        assert_eq!(flip_bit(1, 32), Err(FlipError(32)));
    }

    #[test]
    fn ranges_parse() {
        assert_eq!("0..20".parse::<IntRange>(), Ok(IntRange { lo: 0, hi: 20 }));
        assert_eq!("-5..=5".parse::<IntRange>(), Ok(IntRange { lo: -5, hi: 5 }));
        assert!("3..1".parse::<IntRange>().is_err());
        assert!("3".parse::<IntRange>().is_err());
        assert_eq!("0..31".parse::<BitRange>(), Ok(BitRange::ALL));
        assert!("0..32".parse::<BitRange>().is_err());
    }

    #[test]
    fn param_vectors_are_lexicographic() {
        let p = parse("int f(int a, bool b) { return a; }").unwrap();
        let d = InputDomain::uniform(&p, IntRange { lo: 1, hi: 2 });
        let all: Vec<_> = d.param_vectors().collect();
        assert_eq!(all, vec![vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1]]);
        assert_eq!(d.param_space(), 4);

        let p = parse("int f() { return 1; }").unwrap();
        let d = InputDomain::uniform(&p, InputDomain::DEFAULT_RANGE);
        assert_eq!(d.param_vectors().collect::<Vec<_>>(), vec![Vec::<i32>::new()]);
    }

    #[test]
    fn overrides_apply_by_name() {
        let p = parse("int f(int x, int y) { return x; }").unwrap();
        let d = InputDomain::uniform(&p, InputDomain::DEFAULT_RANGE)
            .with_overrides(
                &p,
                &[
                    ("y".into(), IntRange { lo: 3, hi: 4 }),
                    ("input".into(), IntRange { lo: -1, hi: 1 }),
                ],
            )
            .unwrap();
        assert_eq!(d.params[1], IntRange { lo: 3, hi: 4 });
        assert_eq!(d.reads, IntRange { lo: -1, hi: 1 });
        let err = InputDomain::uniform(&p, InputDomain::DEFAULT_RANGE)
            .with_overrides(&p, &[("z".into(), IntRange { lo: 0, hi: 0 })]);
        assert_eq!(err, Err(DomainError::UnknownInput("z".into())));
    }
}
