//! Brute-force reference semantics.
//!
//! [`run_concrete`] interprets the original program directly on its syntax tree, with
//! an optional single bit flip applied to the target variable just before the
//! statement holding its k-th executed use. [`oracle_classify`] pairs a fault-free run
//! with every faulted run over the whole input domain and classifies the variable from
//! the definition, with no instrumentation involved.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::lang::{apply_binary, apply_unary, truthy, BinaryOp, Expr, Program, ProgramShape, Rhs, Stmt, StmtId, StmtKind, Trap, VarId};
use crate::model::{
    flip_bit, Bounds, Counterexample, Direction, EngineError, ExplorationStats, FaultModel,
    HookSite, InputDomain, InputVector, OutputPair, Trigger, Verdict,
};
use crate::property::{eval_phi, OutputBuffer, SafetySpec};

/// Execution limits for one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub bounds: Bounds,
    pub max_reads: usize,
    /// Control-loop cycles to run; defaults to the unwind bound.
    pub cycles: Option<u32>,
}

impl Limits {
    pub fn new(bounds: Bounds, domain: &InputDomain) -> Self {
        Limits {
            bounds,
            max_reads: domain.max_reads,
            cycles: None,
        }
    }

    pub fn cycle_limit(&self) -> u32 {
        self.cycles.unwrap_or(self.bounds.unwind)
    }
}

/// A single upset: flip `bit` of `target` before its `occurrence`-th executed use (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Fault {
    pub target: VarId,
    pub occurrence: u32,
    pub bit: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum Truncation {
    Unwind { stmt: StmtId },
    Steps,
    Reads { segment: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Truncated(Truncation),
    Trapped { trap: Trap, stmt: StmtId },
    /// The run needs one more `input()` value in `segment` than was supplied.
    NeedInput { segment: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OutputRecord {
    pub stmt: StmtId,
    pub value: i32,
    /// Φ over the history ending at this output.
    pub phi: bool,
    /// Conjunction of Φ over every output so far.
    pub cumulative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExecutionRecord {
    pub trace: Vec<StmtId>,
    pub outputs: Vec<OutputRecord>,
    /// `input()` values consumed, per segment.
    pub input_log: Vec<Vec<i32>>,
    pub status: RunStatus,
    pub steps: u64,
    /// Executed uses per variable, indexed by [`VarId`].
    pub use_counts: Vec<u32>,
    pub flip_site: Option<StmtId>,
    /// Completed control-loop cycles.
    pub cycles: u32,
}

impl ExecutionRecord {
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    /// Cumulative φ after the last output; true when there was none.
    pub fn phi(&self) -> bool {
        self.outputs.last().is_none_or(|o| o.cumulative)
    }
}

enum Ctl {
    Next,
    Return,
    Halt,
}

struct Interp<'a> {
    program: &'a Program,
    spec: &'a SafetySpec,
    inputs: &'a InputVector,
    fault: Option<Fault>,
    limits: &'a Limits,
    vals: Vec<i32>,
    buffer: OutputBuffer,
    segment: usize,
    rec: ExecutionRecord,
}

impl Interp<'_> {
    fn halt(&mut self, status: RunStatus) -> Ctl {
        self.rec.status = status;
        Ctl::Halt
    }

    /// Counts the step, applies a pending flip, and records the location.
    fn enter(&mut self, s: &Stmt) -> Option<Ctl> {
        self.rec.steps += 1;
        if self.rec.steps > self.limits.bounds.max_steps {
            return Some(self.halt(RunStatus::Truncated(Truncation::Steps)));
        }
        for u in s.kind.uses() {
            let n = &mut self.rec.use_counts[u.index()];
            *n += 1;
            if let Some(f) = self.fault {
                if f.target == u && f.occurrence == *n {
                    let v = &mut self.vals[u.index()];
                    *v = flip_bit(*v, f.bit).expect("bit range validated");
                    self.rec.flip_site = Some(s.id);
                }
            }
        }
        self.rec.trace.push(s.id);
        None
    }

    fn eval(&self, e: &Expr) -> Result<i32, Trap> {
        Ok(match e {
            Expr::Int(v) => *v,
            Expr::Bool(b) => *b as i32,
            Expr::Var(v) => self.vals[v.index()],
            Expr::Unary(op, inner) => apply_unary(*op, self.eval(inner)?),
            Expr::Binary(BinaryOp::And, l, r) => {
                (truthy(self.eval(l)?) && truthy(self.eval(r)?)) as i32
            }
            Expr::Binary(BinaryOp::Or, l, r) => {
                (truthy(self.eval(l)?) || truthy(self.eval(r)?)) as i32
            }
            Expr::Binary(op, l, r) => apply_binary(*op, self.eval(l)?, self.eval(r)?)?,
        })
    }

    fn read(&mut self) -> Result<i32, RunStatus> {
        let seg = self.segment;
        if self.rec.input_log.len() <= seg {
            self.rec.input_log.resize(seg + 1, Vec::new());
        }
        let idx = self.rec.input_log[seg].len();
        if idx >= self.limits.max_reads {
            return Err(RunStatus::Truncated(Truncation::Reads { segment: seg }));
        }
        let Some(&v) = self.inputs.segment(seg).get(idx) else {
            return Err(RunStatus::NeedInput { segment: seg });
        };
        self.rec.input_log[seg].push(v);
        Ok(v)
    }

    fn block(&mut self, stmts: &[Stmt]) -> Ctl {
        for s in stmts {
            match self.stmt(s) {
                Ctl::Next => {}
                other => return other,
            }
        }
        Ctl::Next
    }

    fn stmt(&mut self, s: &Stmt) -> Ctl {
        if let StmtKind::While { cond, body } = &s.kind {
            let mut iterations = 0u32;
            loop {
                if let Some(c) = self.enter(s) {
                    return c;
                }
                match self.eval(cond) {
                    Err(trap) => return self.halt(RunStatus::Trapped { trap, stmt: s.id }),
                    Ok(v) if !truthy(v) => return Ctl::Next,
                    Ok(_) => {}
                }
                iterations += 1;
                if iterations > self.limits.bounds.unwind {
                    return self.halt(RunStatus::Truncated(Truncation::Unwind { stmt: s.id }));
                }
                match self.block(body) {
                    Ctl::Next => {}
                    other => return other,
                }
            }
        }

        if let Some(c) = self.enter(s) {
            return c;
        }
        let trapped = |trap| RunStatus::Trapped { trap, stmt: s.id };
        match &s.kind {
            StmtKind::Decl { var, init: rhs } | StmtKind::Assign { target: var, value: rhs } => {
                let v = match rhs {
                    Rhs::Expr(e) => self.eval(e).map_err(trapped),
                    Rhs::Input => self.read(),
                };
                match v {
                    Ok(v) => self.vals[var.index()] = v,
                    Err(status) => return self.halt(status),
                }
                Ctl::Next
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => match self.eval(cond) {
                Err(trap) => self.halt(trapped(trap)),
                Ok(v) if truthy(v) => self.block(then_branch),
                Ok(_) => self.block(else_branch),
            },
            StmtKind::Output(e) | StmtKind::Return(e) => {
                let value = match self.eval(e) {
                    Ok(v) => v,
                    Err(trap) => return self.halt(trapped(trap)),
                };
                self.buffer.append(value);
                let phi = eval_phi(self.spec, &self.buffer).expect("buffer is non-empty");
                let cumulative = self.rec.phi() && phi;
                self.rec.outputs.push(OutputRecord {
                    stmt: s.id,
                    value,
                    phi,
                    cumulative,
                });
                if matches!(s.kind, StmtKind::Return(_)) {
                    Ctl::Return
                } else {
                    Ctl::Next
                }
            }
            StmtKind::Print(e) => match self.eval(e) {
                Ok(_) => Ctl::Next,
                Err(trap) => self.halt(trapped(trap)),
            },
            StmtKind::While { .. } => unreachable!("handled above"),
        }
    }
}

/// Runs the original program once. Parameters take `inputs.params`; the k-th
/// `input()` of a segment takes the k-th value of that segment.
pub fn run_concrete(
    program: &Program,
    spec: &SafetySpec,
    inputs: &InputVector,
    fault: Option<Fault>,
    limits: &Limits,
) -> ExecutionRecord {
    let mut vals = vec![0; program.vars.len()];
    vals[..inputs.params.len()].copy_from_slice(&inputs.params);
    let mut m = Interp {
        program,
        spec,
        inputs,
        fault,
        limits,
        vals,
        buffer: spec.new_buffer(),
        segment: 0,
        rec: ExecutionRecord {
            trace: Vec::new(),
            outputs: Vec::new(),
            input_log: vec![Vec::new()],
            status: RunStatus::Completed,
            steps: 0,
            use_counts: vec![0; program.vars.len()],
            flip_site: None,
            cycles: 0,
        },
    };
    match program.shape() {
        ProgramShape::Terminating => {
            m.block(&m.program.body);
        }
        ProgramShape::ControlLoop { prelude_len } => {
            let (prelude, rest) = m.program.body.split_at(prelude_len);
            let lp = &rest[0];
            let StmtKind::While { body, .. } = &lp.kind else {
                unreachable!("control loop shape ends in a loop")
            };
            if let Ctl::Next = m.block(prelude) {
                for cycle in 1..=limits.cycle_limit() {
                    m.segment = cycle as usize;
                    if m.enter(lp).is_some() {
                        break;
                    }
                    if let Ctl::Halt = m.block(body) {
                        break;
                    }
                    m.rec.cycles = cycle;
                }
            }
        }
    }
    m.rec
}

/// Outcome of comparing a fault-free run with a faulted one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOutcome {
    /// φ and φ′ differ; for a control loop, first at cycle `cycle`.
    Differs { direction: Direction, cycle: Option<u32> },
    Same,
    /// A bound cut one of the runs short before the comparison finished.
    Truncated,
    /// The faulted run trapped before the comparison finished.
    FaultTrapped,
}

/// Compares cumulative φ. A terminating program is compared once at the end; a
/// control loop after every cycle both runs completed.
pub fn compare_runs(
    program: &Program,
    base: &ExecutionRecord,
    faulted: &ExecutionRecord,
    cycles: u32,
) -> PairOutcome {
    let direction = |phi: bool, phi_prime: bool| match (phi, phi_prime) {
        (true, false) => Some(Direction::FaultIntroducing),
        (false, true) => Some(Direction::FaultMasking),
        _ => None,
    };
    let unfinished = |r: &ExecutionRecord| match r.status {
        RunStatus::Trapped { .. } => PairOutcome::FaultTrapped,
        _ => PairOutcome::Truncated,
    };
    match program.shape() {
        ProgramShape::Terminating => {
            if !base.completed() {
                return PairOutcome::Truncated;
            }
            if !faulted.completed() {
                return unfinished(faulted);
            }
            match direction(base.phi(), faulted.phi()) {
                Some(direction) => PairOutcome::Differs {
                    direction,
                    cycle: None,
                },
                None => PairOutcome::Same,
            }
        }
        ProgramShape::ControlLoop { .. } => {
            let n = base.cycles.min(faulted.cycles) as usize;
            for i in 0..n {
                if let Some(d) = direction(base.outputs[i].cumulative, faulted.outputs[i].cumulative) {
                    return PairOutcome::Differs {
                        direction: d,
                        cycle: Some(i as u32 + 1),
                    };
                }
            }
            if base.cycles < cycles {
                PairOutcome::Truncated
            } else if faulted.cycles < cycles {
                unfinished(faulted)
            } else {
                PairOutcome::Same
            }
        }
    }
}

fn pair_outputs(base: &ExecutionRecord, faulted: &ExecutionRecord) -> Vec<OutputPair> {
    let n = base.outputs.len().max(faulted.outputs.len());
    (0..n)
        .map(|i| {
            let b = base.outputs.get(i);
            let f = faulted.outputs.get(i);
            OutputPair {
                o: b.map(|o| o.value),
                o_prime: f.map(|o| o.value),
                phi: b.map(|o| o.cumulative),
                phi_prime: f.map(|o| o.cumulative),
            }
        })
        .collect()
}

fn split_reads(full: &[Vec<i32>], base: &[Vec<i32>]) -> Vec<Vec<i32>> {
    let mut fresh: Vec<Vec<i32>> = full
        .iter()
        .enumerate()
        .map(|(i, seg)| seg[base.get(i).map_or(0, |b| b.len()).min(seg.len())..].to_vec())
        .collect();
    while fresh.last().is_some_and(|s| s.is_empty()) {
        fresh.pop();
    }
    fresh
}

fn trim_reads(mut reads: Vec<Vec<i32>>) -> Vec<Vec<i32>> {
    while reads.last().is_some_and(|s| s.is_empty()) {
        reads.pop();
    }
    reads
}

/// Replays a paired run and assembles a counterexample when φ ⊕ φ′ holds.
/// `fault_reads` are the values the faulted run sees, per segment.
pub fn replay_pair(
    program: &Program,
    spec: &SafetySpec,
    inputs: &InputVector,
    fault_reads: &[Vec<i32>],
    fault: Fault,
    limits: &Limits,
) -> Option<Counterexample> {
    let base = run_concrete(program, spec, inputs, None, limits);
    let faulted_inputs = InputVector {
        params: inputs.params.clone(),
        reads: fault_reads.to_vec(),
    };
    let faulted = run_concrete(program, spec, &faulted_inputs, Some(fault), limits);
    let PairOutcome::Differs { direction, cycle } =
        compare_runs(program, &base, &faulted, limits.cycle_limit())
    else {
        return None;
    };
    let (base, faulted) = match cycle {
        Some(c) => {
            let cut = Limits {
                cycles: Some(c),
                ..*limits
            };
            (
                run_concrete(program, spec, inputs, None, &cut),
                run_concrete(program, spec, &faulted_inputs, Some(fault), &cut),
            )
        }
        None => (base, faulted),
    };
    Some(Counterexample {
        inputs: InputVector {
            params: inputs.params.clone(),
            reads: trim_reads(base.input_log.clone()),
        },
        fresh_reads: split_reads(&faulted.input_log, &base.input_log),
        hook: HookSite {
            stmt: faulted.flip_site?,
            occurrence: fault.occurrence,
        },
        bit: fault.bit,
        direction,
        cycles: cycle,
        output_points: pair_outputs(&base, &faulted),
        base_trace: base.trace,
        fault_trace: faulted.trace,
    })
}

/// Search state for one parameter vector.
struct Search<'a> {
    program: &'a Program,
    spec: &'a SafetySpec,
    fault: &'a FaultModel,
    domain: &'a InputDomain,
    limits: Limits,
    stats: ExplorationStats,
    introducing: Option<Counterexample>,
    masking: Option<Counterexample>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.introducing.is_some()
    }

    fn base(&mut self, inputs: InputVector) -> Result<(), EngineError> {
        if self.done() {
            return Ok(());
        }
        let rec = run_concrete(self.program, self.spec, &inputs, None, &self.limits);
        match rec.status {
            RunStatus::NeedInput { segment } => {
                for v in self.domain.reads.values() {
                    let mut next = inputs.clone();
                    if next.reads.len() <= segment {
                        next.reads.resize(segment + 1, Vec::new());
                    }
                    next.reads[segment].push(v);
                    self.base(next)?;
                }
                Ok(())
            }
            RunStatus::Trapped { trap, stmt } => Err(EngineError::BaseTrap { trap, stmt, inputs }),
            RunStatus::Truncated(_) => {
                self.stats.truncated += 1;
                if self.program.shape() == ProgramShape::Terminating {
                    return Ok(());
                }
                self.faults(&inputs, &rec);
                Ok(())
            }
            RunStatus::Completed => {
                self.faults(&inputs, &rec);
                Ok(())
            }
        }
    }

    fn faults(&mut self, inputs: &InputVector, base: &ExecutionRecord) {
        let uses = base.use_counts[self.fault.target.index()];
        let last = match self.fault.trigger {
            Trigger::NondetAnywhere => uses,
            Trigger::FirstUse => uses.min(1),
        };
        for occurrence in 1..=last {
            for bit in self.fault.bits.bits() {
                let fault = Fault {
                    target: self.fault.target,
                    occurrence,
                    bit,
                };
                self.faulted(inputs, base, fault, inputs.reads.clone(), false);
                if self.done() {
                    return;
                }
            }
        }
    }

    fn faulted(
        &mut self,
        inputs: &InputVector,
        base: &ExecutionRecord,
        fault: Fault,
        reads: Vec<Vec<i32>>,
        fresh: bool,
    ) {
        let run_inputs = InputVector {
            params: inputs.params.clone(),
            reads,
        };
        let rec = run_concrete(self.program, self.spec, &run_inputs, Some(fault), &self.limits);
        if let RunStatus::NeedInput { segment } = rec.status {
            for v in self.domain.reads.values() {
                let mut reads = run_inputs.reads.clone();
                if reads.len() <= segment {
                    reads.resize(segment + 1, Vec::new());
                }
                reads[segment].push(v);
                self.faulted(inputs, base, fault, reads, true);
                if self.done() {
                    return;
                }
            }
            return;
        }
        if fresh {
            self.stats.fresh_read_runs += 1;
        }
        match compare_runs(self.program, base, &rec, self.limits.cycle_limit()) {
            PairOutcome::Differs { direction, .. } => {
                self.stats.pairs += 1;
                let slot = match direction {
                    Direction::FaultIntroducing => &self.introducing,
                    Direction::FaultMasking => &self.masking,
                };
                if slot.is_none() {
                    let cex = replay_pair(
                        self.program,
                        self.spec,
                        inputs,
                        &run_inputs.reads,
                        fault,
                        &self.limits,
                    )
                    .expect("a differing pair replays deterministically");
                    match direction {
                        Direction::FaultIntroducing => self.introducing = Some(cex),
                        Direction::FaultMasking => self.masking = Some(cex),
                    }
                }
            }
            PairOutcome::Same => self.stats.pairs += 1,
            PairOutcome::Truncated => self.stats.truncated += 1,
            PairOutcome::FaultTrapped => self.stats.fault_traps += 1,
        }
    }
}

/// Classifies `fault.target` by exhausting every input vector in `domain`, every
/// occurrence allowed by the trigger and every bit in range.
///
/// A fault-introducing witness takes priority over a fault-masking one. Within a
/// direction the witness reported is the first in the order: parameters ascending,
/// `input()` values ascending, occurrence ascending, bit ascending.
pub fn oracle_classify(
    program: &Program,
    spec: &SafetySpec,
    fault: &FaultModel,
    domain: &InputDomain,
    bounds: Bounds,
) -> Result<Verdict, EngineError> {
    if fault.target.index() >= program.vars.len() {
        return Err(EngineError::UnknownVariable(fault.target));
    }
    let limits = Limits::new(bounds, domain);
    let params: Vec<Vec<i32>> = domain.param_vectors().collect();
    let first_introducing = AtomicUsize::new(usize::MAX);

    let results: Vec<Result<Search, EngineError>> = params
        .par_iter()
        .enumerate()
        .map(|(i, pv)| {
            let mut s = Search {
                program,
                spec,
                fault,
                domain,
                limits,
                stats: ExplorationStats::default(),
                introducing: None,
                masking: None,
            };
            if i > first_introducing.load(Ordering::Relaxed) {
                return Ok(s);
            }
            s.base(InputVector::new(pv.clone()))?;
            if s.introducing.is_some() {
                first_introducing.fetch_min(i, Ordering::Relaxed);
            }
            Ok(s)
        })
        .collect();

    let mut stats = ExplorationStats::default();
    let mut introducing = None;
    let mut masking = None;
    for r in results {
        let s = r?;
        stats.merge(&s.stats);
        if introducing.is_none() {
            introducing = s.introducing;
        }
        if masking.is_none() {
            masking = s.masking;
        }
    }
    Ok(Verdict::from_search(
        introducing.or(masking),
        stats,
        bounds,
        domain.clone(),
    ))
}
