//! Bounded exhaustive checking of the self-composed program.
//!
//! The instrumented program is lowered to flat code and explored depth-first with an
//! explicit state per path. Choice points are `input()` reads of the original copy,
//! reads of the faulted copy beyond the recorded values, and fault hooks. Every
//! counterexample is replayed on the original program by the concrete interpreter
//! before a CRV verdict is returned.

mod lower;

use std::cmp::Ordering as CmpOrdering;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::instrument::{self_compose, Copy, InstrumentedProgram};
use crate::lang::{apply_binary, apply_unary, truthy, BinaryOp, Expr, Program, ProgramShape, StmtId, Trap, VarId};
use crate::model::{
    flip_bit, Bounds, Counterexample, Direction, EngineConfig, EngineError, ExplorationStats,
    FaultModel, InputDomain, InputVector, Trigger, Verdict,
};
use crate::oracle::{replay_pair, Fault, Limits};
use crate::property::{eval_phi, OutputBuffer, SafetySpec};
use crate::slicer::Slice;

use lower::{lower, Code, Op};

pub use crate::model::flip_bit as flip;

const BASE: usize = 0;
const SHADOW: usize = 1;

fn idx(copy: Copy) -> usize {
    match copy {
        Copy::Base => BASE,
        Copy::Shadow => SHADOW,
    }
}

/// How the faulted copy stopped early, for a control loop where the original keeps going.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ShadowStop {
    Truncated,
    Trapped,
}

#[derive(Clone, Debug)]
struct State {
    pc: usize,
    slots: Vec<i32>,
    steps: [u64; 2],
    counters: Vec<u32>,
    buffers: [OutputBuffer; 2],
    phi: [bool; 2],
    outputs: [Vec<i32>; 2],
    segment: [usize; 2],
    /// Values read by the original copy, per segment.
    reads: Vec<Vec<i32>>,
    /// Reads consumed by the faulted copy in its current segment.
    shadow_pos: usize,
    /// Values the faulted copy needed beyond the recorded ones, per segment.
    fresh: Vec<Vec<i32>>,
    occurrence: u32,
    flip: Option<(u32, u8, StmtId)>,
    cycle: u32,
    shadow_stop: Option<ShadowStop>,
    assertions: u32,
}

/// Why a path ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "end", rename_all = "snake_case")]
pub enum PathEnd {
    Complete,
    BaseTruncated,
    ShadowTruncated,
    ShadowTrapped,
    AssertFailed { direction: Direction },
    BaseTrapped { trap: Trap, stmt: StmtId },
    /// Fixed-input execution ran out of supplied `input()` values.
    MissingInput,
}

enum Event {
    BaseRead,
    FreshRead,
    Hook,
    End(PathEnd),
}

struct Machine<'a> {
    code: &'a Code,
    spec: &'a SafetySpec,
    bounds: Bounds,
    max_reads: usize,
    shape: ProgramShape,
}

fn eval(e: &Expr, slots: &[i32]) -> Result<i32, Trap> {
    Ok(match e {
        Expr::Int(v) => *v,
        Expr::Bool(b) => *b as i32,
        Expr::Var(v) => slots[v.index()],
        Expr::Unary(op, inner) => apply_unary(*op, eval(inner, slots)?),
        Expr::Binary(BinaryOp::And, l, r) => {
            (truthy(eval(l, slots)?) && truthy(eval(r, slots)?)) as i32
        }
        Expr::Binary(BinaryOp::Or, l, r) => {
            (truthy(eval(l, slots)?) || truthy(eval(r, slots)?)) as i32
        }
        Expr::Binary(op, l, r) => apply_binary(*op, eval(l, slots)?, eval(r, slots)?)?,
    })
}

impl Machine<'_> {
    fn initial(&self, slot_count: usize, params: &[i32]) -> State {
        let mut slots = vec![0; slot_count];
        let half = slot_count / 2;
        slots[..params.len()].copy_from_slice(params);
        slots[half..half + params.len()].copy_from_slice(params);
        State {
            pc: 0,
            slots,
            steps: [0; 2],
            counters: vec![0; self.code.counters],
            buffers: [self.spec.new_buffer(), self.spec.new_buffer()],
            phi: [true; 2],
            outputs: [Vec::new(), Vec::new()],
            segment: [0; 2],
            reads: vec![Vec::new()],
            shadow_pos: 0,
            fresh: Vec::new(),
            occurrence: 0,
            flip: None,
            cycle: 0,
            shadow_stop: None,
            assertions: 0,
        }
    }

    /// A fault in the faulted copy: ends the path for a terminating program, otherwise
    /// retires the copy and lets the original run on.
    fn shadow_fails(&self, st: &mut State, stop: ShadowStop) -> Option<Event> {
        match self.shape {
            ProgramShape::Terminating => Some(Event::End(match stop {
                ShadowStop::Truncated => PathEnd::ShadowTruncated,
                ShadowStop::Trapped => PathEnd::ShadowTrapped,
            })),
            ProgramShape::ControlLoop { .. } => {
                st.shadow_stop = Some(stop);
                st.pc += 1;
                None
            }
        }
    }

    fn trap(&self, st: &mut State, c: usize, trap: Trap, stmt: StmtId) -> Option<Event> {
        if c == BASE {
            Some(Event::End(PathEnd::BaseTrapped { trap, stmt }))
        } else {
            self.shadow_fails(st, ShadowStop::Trapped)
        }
    }

    /// Runs until the next choice point or the end of the path.
    fn advance(&self, st: &mut State) -> Event {
        loop {
            let instr = &self.code.instrs[st.pc];
            if instr.copy == Some(Copy::Shadow) && st.shadow_stop.is_some() {
                st.pc += 1;
                continue;
            }
            let c = instr.copy.map(idx).unwrap_or(BASE);
            macro_rules! step {
                () => {
                    st.steps[c] += 1;
                    if st.steps[c] > self.bounds.max_steps {
                        if c == BASE {
                            return Event::End(PathEnd::BaseTruncated);
                        }
                        match self.shadow_fails(st, ShadowStop::Truncated) {
                            Some(e) => return e,
                            None => continue,
                        }
                    }
                };
            }
            macro_rules! value {
                ($e:expr, $stmt:expr) => {
                    match eval($e, &st.slots) {
                        Ok(v) => v,
                        Err(trap) => match self.trap(st, c, trap, $stmt) {
                            Some(e) => return e,
                            None => continue,
                        },
                    }
                };
            }
            match &instr.op {
                Op::Assign { dst, expr, stmt } => {
                    step!();
                    let v = value!(expr, *stmt);
                    st.slots[*dst] = v;
                    st.pc += 1;
                }
                Op::Read { dst, .. } => {
                    step!();
                    let seg = st.segment[c];
                    if c == BASE {
                        if st.reads[seg].len() >= self.max_reads {
                            return Event::End(PathEnd::BaseTruncated);
                        }
                        st.steps[c] -= 1;
                        return Event::BaseRead;
                    }
                    if st.shadow_pos >= self.max_reads {
                        match self.shadow_fails(st, ShadowStop::Truncated) {
                            Some(e) => return e,
                            None => continue,
                        }
                    }
                    let recorded = st.reads.get(seg).map_or(0, |r| r.len());
                    if st.shadow_pos < recorded {
                        st.slots[*dst] = st.reads[seg][st.shadow_pos];
                        st.shadow_pos += 1;
                        st.pc += 1;
                    } else {
                        st.steps[c] -= 1;
                        return Event::FreshRead;
                    }
                }
                Op::Branch { cond, on_false, stmt } => {
                    step!();
                    let v = value!(cond, *stmt);
                    st.pc = if truthy(v) { st.pc + 1 } else { *on_false };
                }
                Op::LoopEnter { counter } => {
                    st.counters[*counter] = 0;
                    st.pc += 1;
                }
                Op::LoopTest {
                    cond,
                    exit,
                    counter,
                    stmt,
                } => {
                    step!();
                    let v = value!(cond, *stmt);
                    if !truthy(v) {
                        st.pc = *exit;
                        continue;
                    }
                    st.counters[*counter] += 1;
                    if st.counters[*counter] > self.bounds.unwind {
                        if c == BASE {
                            return Event::End(PathEnd::BaseTruncated);
                        }
                        match self.shadow_fails(st, ShadowStop::Truncated) {
                            Some(e) => return e,
                            None => continue,
                        }
                    }
                    st.pc += 1;
                }
                Op::Jump { to } => st.pc = *to,
                Op::Hook { .. } => {
                    if st.flip.is_some() {
                        st.pc += 1;
                    } else {
                        return Event::Hook;
                    }
                }
                Op::Output { expr, stmt, ret } => {
                    step!();
                    let v = value!(expr, *stmt);
                    st.buffers[c].append(v);
                    let phi = eval_phi(self.spec, &st.buffers[c]).expect("buffer is non-empty");
                    st.phi[c] = st.phi[c] && phi;
                    st.outputs[c].push(v);
                    st.pc = ret.unwrap_or(st.pc + 1);
                }
                Op::Print { expr, stmt } => {
                    step!();
                    value!(expr, *stmt);
                    st.pc += 1;
                }
                Op::CycleHead => {
                    if st.cycle >= self.bounds.unwind {
                        return Event::End(PathEnd::Complete);
                    }
                    st.cycle += 1;
                    st.pc += 1;
                }
                Op::CycleStart => {
                    step!();
                    st.segment[c] = st.cycle as usize;
                    if c == BASE {
                        if st.reads.len() <= st.cycle as usize {
                            st.reads.resize(st.cycle as usize + 1, Vec::new());
                        }
                    } else {
                        st.shadow_pos = 0;
                    }
                    st.pc += 1;
                }
                Op::Assert => {
                    if st.shadow_stop.is_none() {
                        st.assertions += 1;
                        match (st.phi[BASE], st.phi[SHADOW]) {
                            (true, false) => {
                                return Event::End(PathEnd::AssertFailed {
                                    direction: Direction::FaultIntroducing,
                                })
                            }
                            (false, true) => {
                                return Event::End(PathEnd::AssertFailed {
                                    direction: Direction::FaultMasking,
                                })
                            }
                            _ => {}
                        }
                    }
                    st.pc += 1;
                }
                Op::Halt => return Event::End(PathEnd::Complete),
            }
        }
    }

    fn resolve_base_read(&self, st: &mut State, v: i32) {
        let Op::Read { dst, .. } = self.code.instrs[st.pc].op else {
            unreachable!("pending read")
        };
        let seg = st.segment[BASE];
        st.steps[BASE] += 1;
        st.reads[seg].push(v);
        st.slots[dst] = v;
        st.pc += 1;
    }

    fn resolve_fresh_read(&self, st: &mut State, v: i32) {
        let Op::Read { dst, .. } = self.code.instrs[st.pc].op else {
            unreachable!("pending read")
        };
        let seg = st.segment[SHADOW];
        st.steps[SHADOW] += 1;
        if st.fresh.len() <= seg {
            st.fresh.resize(seg + 1, Vec::new());
        }
        st.fresh[seg].push(v);
        st.shadow_pos += 1;
        st.slots[dst] = v;
        st.pc += 1;
    }

    fn resolve_hook(&self, st: &mut State, bit: Option<u8>) {
        let Op::Hook { slot, stmt } = self.code.instrs[st.pc].op else {
            unreachable!("pending hook")
        };
        st.occurrence += 1;
        if let Some(b) = bit {
            st.slots[slot] = flip_bit(st.slots[slot], b).expect("bit range validated");
            st.flip = Some((st.occurrence, b, stmt));
        }
        st.pc += 1;
    }
}

/// Canonical order of witnesses: reads, occurrence, bit, then the extra reads.
type Key = (Vec<i32>, u32, u8, Vec<i32>);

fn key(st: &State) -> Key {
    let (occ, bit, _) = st.flip.expect("a failing path has flipped");
    (
        st.reads.concat(),
        occ,
        bit,
        st.fresh.concat(),
    )
}

#[derive(Clone, Debug)]
struct Witness {
    key: Key,
    params: Vec<i32>,
    reads: Vec<Vec<i32>>,
    fresh: Vec<Vec<i32>>,
    occurrence: u32,
    bit: u8,
    stmt: StmtId,
    cycle: Option<u32>,
    direction: Direction,
}

#[derive(Default)]
struct Partial {
    stats: ExplorationStats,
    introducing: Option<Witness>,
    masking: Option<Witness>,
}

fn offer(slot: &mut Option<Witness>, w: Witness) {
    if slot.as_ref().is_none_or(|cur| w.key.cmp(&cur.key) == CmpOrdering::Less) {
        *slot = Some(w);
    }
}

fn trim(mut v: Vec<Vec<i32>>) -> Vec<Vec<i32>> {
    while v.last().is_some_and(|s| s.is_empty()) {
        v.pop();
    }
    v
}

struct Search<'a> {
    machine: Machine<'a>,
    ip: &'a InstrumentedProgram,
    fault: &'a FaultModel,
    domain: &'a InputDomain,
}

impl Search<'_> {
    fn explore(&self, params: &[i32]) -> Result<Partial, EngineError> {
        let mut out = Partial::default();
        let mut stack = vec![self.machine.initial(self.ip.vars.len(), params)];
        let terminating = self.machine.shape == ProgramShape::Terminating;
        while let Some(mut st) = stack.pop() {
            match self.machine.advance(&mut st) {
                Event::BaseRead => {
                    for v in self.domain.reads.values().rev() {
                        let mut next = st.clone();
                        self.machine.resolve_base_read(&mut next, v);
                        stack.push(next);
                    }
                }
                Event::FreshRead => {
                    for v in self.domain.reads.values().rev() {
                        let mut next = st.clone();
                        self.machine.resolve_fresh_read(&mut next, v);
                        stack.push(next);
                    }
                }
                Event::Hook => {
                    let first = st.occurrence == 0;
                    if self.fault.trigger == Trigger::NondetAnywhere || !first {
                        let mut keep = st.clone();
                        self.machine
                            .resolve_hook(&mut keep, None);
                        if self.fault.trigger == Trigger::NondetAnywhere {
                            stack.push(keep);
                        }
                    }
                    if self.fault.trigger == Trigger::NondetAnywhere || first {
                        for b in self.fault.bits.bits().rev() {
                            let mut next = st.clone();
                            self.machine.resolve_hook(&mut next, Some(b));
                            stack.push(next);
                        }
                    }
                }
                Event::End(end) => {
                    match st.shadow_stop {
                        Some(ShadowStop::Truncated) => out.stats.truncated += 1,
                        Some(ShadowStop::Trapped) => out.stats.fault_traps += 1,
                        None => {}
                    }
                    if !st.fresh.is_empty() {
                        out.stats.fresh_read_runs += 1;
                    }
                    match end {
                        PathEnd::Complete => out.stats.pairs += 1,
                        PathEnd::BaseTruncated | PathEnd::ShadowTruncated => {
                            out.stats.truncated += 1
                        }
                        PathEnd::ShadowTrapped => out.stats.fault_traps += 1,
                        PathEnd::MissingInput => unreachable!("exploration supplies every read"),
                        PathEnd::BaseTrapped { trap, stmt } => {
                            return Err(EngineError::BaseTrap {
                                trap,
                                stmt,
                                inputs: InputVector {
                                    params: params.to_vec(),
                                    reads: trim(st.reads),
                                },
                            })
                        }
                        PathEnd::AssertFailed { direction } => {
                            out.stats.pairs += 1;
                            let (occurrence, bit, stmt) = st.flip.expect("flipped");
                            let w = Witness {
                                key: key(&st),
                                params: params.to_vec(),
                                reads: trim(st.reads.clone()),
                                fresh: trim(st.fresh.clone()),
                                occurrence,
                                bit,
                                stmt,
                                cycle: (!terminating).then_some(st.cycle),
                                direction,
                            };
                            match direction {
                                Direction::FaultIntroducing => {
                                    offer(&mut out.introducing, w);
                                    if terminating {
                                        return Ok(out);
                                    }
                                }
                                Direction::FaultMasking => offer(&mut out.masking, w),
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Replays a witness on the original program and returns the full counterexample.
fn validate(
    ip: &InstrumentedProgram,
    w: &Witness,
    domain: &InputDomain,
    bounds: Bounds,
) -> Result<Counterexample, EngineError> {
    let inputs = InputVector {
        params: w.params.clone(),
        reads: w.reads.clone(),
    };
    let n = w.reads.len().max(w.fresh.len());
    let fault_reads: Vec<Vec<i32>> = (0..n)
        .map(|i| {
            let mut seg = w.reads.get(i).cloned().unwrap_or_default();
            seg.extend(w.fresh.get(i).into_iter().flatten());
            seg
        })
        .collect();
    let limits = Limits {
        cycles: w.cycle,
        ..Limits::new(bounds, domain)
    };
    let fault = Fault {
        target: ip.target,
        occurrence: w.occurrence,
        bit: w.bit,
    };
    let spec = &ip.spec;
    let cex = replay_pair(&ip.original, spec, &inputs, &fault_reads, fault, &limits)
        .ok_or_else(|| EngineError::Validation(format!("no property difference for {w:?}")))?;
    if cex.direction != w.direction || cex.hook.stmt != w.stmt || cex.cycles != w.cycle {
        return Err(EngineError::Validation(format!(
            "replay disagrees: expected {:?} at {:?}, got {:?} at {:?}",
            w.direction, w.stmt, cex.direction, cex.hook.stmt
        )));
    }
    Ok(cex)
}

/// Explores every input vector, every hook resolution and every bit within the bounds.
pub fn check(
    ip: &InstrumentedProgram,
    fault: &FaultModel,
    domain: &InputDomain,
    bounds: Bounds,
) -> Result<Verdict, EngineError> {
    let code = lower(ip);
    let first_introducing = AtomicUsize::new(usize::MAX);
    let params: Vec<Vec<i32>> = domain.param_vectors().collect();
    let partials: Vec<Result<Partial, EngineError>> = params
        .par_iter()
        .enumerate()
        .map(|(i, pv)| {
            if i > first_introducing.load(Ordering::Relaxed) {
                return Ok(Partial::default());
            }
            let search = Search {
                machine: Machine {
                    code: &code,
                    spec: &ip.spec,
                    bounds,
                    max_reads: domain.max_reads,
                    shape: ip.shape,
                },
                ip,
                fault,
                domain,
            };
            let p = search.explore(pv)?;
            if p.introducing.is_some() {
                first_introducing.fetch_min(i, Ordering::Relaxed);
            }
            Ok(p)
        })
        .collect();

    let mut stats = ExplorationStats::default();
    let mut introducing = None;
    let mut masking = None;
    for p in partials {
        let p = p?;
        stats.merge(&p.stats);
        if introducing.is_none() {
            introducing = p.introducing;
        }
        if masking.is_none() {
            masking = p.masking;
        }
    }
    let counterexample = match introducing.or(masking) {
        Some(w) => Some(validate(ip, &w, domain, bounds)?),
        None => None,
    };
    Ok(Verdict::from_search(counterexample, stats, bounds, domain.clone()))
}

/// Slice pruning, then checking of the self-composed program.
pub fn classify_variable(
    program: &Program,
    spec: &SafetySpec,
    x: VarId,
    config: &EngineConfig,
    slice: Option<&Slice>,
) -> Result<Verdict, EngineError> {
    if x.index() >= program.vars.len() {
        return Err(EngineError::UnknownVariable(x));
    }
    if slice.is_some_and(|s| !s.relevant_variables.contains(&x)) {
        return Ok(Verdict::pruned(config.bounds, config.domain.clone()));
    }
    let ip = self_compose(program, spec, x).map_err(|_| EngineError::UnknownVariable(x))?;
    check(&ip, &config.fault_model(x), &config.domain, config.bounds)
}

/// One deterministic run of the composed program.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComposedRun {
    pub end: PathEnd,
    pub base_outputs: Vec<i32>,
    pub shadow_outputs: Vec<i32>,
    /// Assertions evaluated, failing or not.
    pub assertions: u32,
}

/// Runs the composed program on fixed inputs. The faulted copy replays the recorded
/// reads; `flip` picks the hook occurrence and bit, and `None` disables every hook.
pub fn run_composed(
    ip: &InstrumentedProgram,
    inputs: &InputVector,
    flip: Option<(u32, u8)>,
    domain: &InputDomain,
    bounds: Bounds,
) -> ComposedRun {
    let code = lower(ip);
    let m = Machine {
        code: &code,
        spec: &ip.spec,
        bounds,
        max_reads: domain.max_reads,
        shape: ip.shape,
    };
    let mut st = m.initial(ip.vars.len(), &inputs.params);
    let end = loop {
        match m.advance(&mut st) {
            Event::BaseRead => {
                let seg = st.segment[BASE];
                let i = st.reads[seg].len();
                match inputs.segment(seg).get(i) {
                    Some(&v) => m.resolve_base_read(&mut st, v),
                    None => break PathEnd::MissingInput,
                }
            }
            Event::FreshRead => break PathEnd::MissingInput,
            Event::Hook => {
                let next = st.occurrence + 1;
                let bit = flip.filter(|&(k, _)| k == next).map(|(_, b)| b);
                m.resolve_hook(&mut st, bit);
            }
            Event::End(e) => break e,
        }
    };
    let [base_outputs, shadow_outputs] = st.outputs;
    ComposedRun {
        end,
        base_outputs,
        shadow_outputs,
        assertions: st.assertions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::pdg_of;
    use crate::lang::parse;
    use crate::model::{BitRange, Classification, IntRange};
    use crate::property::parse_spec;
    use crate::slicer::{backward_slice_multi, output_criteria};

    const MOTIVATING: &str = include_str!("../../../../benchmarks/motivating_example.ctl");

    fn motivating_config(p: &Program) -> EngineConfig {
        EngineConfig {
            domain: InputDomain::uniform(p, IntRange { lo: 0, hi: 20 }),
            bounds: Bounds {
                unwind: 8,
                ..Bounds::default()
            },
            bits: BitRange::ALL,
            trigger: Trigger::NondetAnywhere,
        }
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip(4, 0), Ok(5));
        assert_eq!(flip(0, 3), Ok(8));
        assert_eq!(flip(flip(-77, 13).unwrap(), 13), Ok(-77));
    }

    #[test]
    fn motivating_check_verdicts() {
        let p = parse(MOTIVATING).unwrap();
        let spec = parse_spec("always output <= 10").unwrap();
        let cfg = motivating_config(&p);
        let verdict = |name: &str| {
            let x = p.find_var(name).unwrap();
            let ip = self_compose(&p, &spec, x).unwrap();
            check(&ip, &cfg.fault_model(x), &cfg.domain, cfg.bounds).unwrap()
        };
        assert_eq!(verdict("y").classification, Classification::NonCrv);

        let x = verdict("x");
        assert_eq!(x.direction, Some(Direction::FaultIntroducing));
        let cex = x.counterexample.unwrap();
        assert!(cex.inputs.params[0] > 10);
        assert_eq!(cex.output_points[0].o_prime, Some(11));

        let count = verdict("count");
        assert_eq!(count.direction, Some(Direction::FaultMasking));
        assert!(count.counterexample.unwrap().inputs.params[0] <= 10);

        assert_eq!(verdict("output").direction, Some(Direction::FaultIntroducing));
    }

    #[test]
    fn motivating_classify_with_pruning() {
        let p = parse(MOTIVATING).unwrap();
        let spec = parse_spec("always output <= 10").unwrap();
        let cfg = motivating_config(&p);
        let out = p.find_var("output").unwrap();
        let slice = backward_slice_multi(&pdg_of(&p), &output_criteria(&p, out)).unwrap();
        let alarm = classify_variable(&p, &spec, p.find_var("alarm").unwrap(), &cfg, Some(&slice)).unwrap();
        assert!(alarm.pruned);
        assert_eq!(alarm.classification, Classification::NonCrv);
        let y = classify_variable(&p, &spec, p.find_var("y").unwrap(), &cfg, Some(&slice)).unwrap();
        assert!(!y.pruned);
        assert_eq!(y.classification, Classification::NonCrv);
        let o = classify_variable(&p, &spec, out, &cfg, Some(&slice)).unwrap();
        assert_eq!(o.classification, Classification::Crv);
    }

    #[test]
    fn checking_is_deterministic() {
        let p = parse(MOTIVATING).unwrap();
        let spec = parse_spec("always output <= 10").unwrap();
        let cfg = motivating_config(&p);
        let count = p.find_var("count").unwrap();
        let a = classify_variable(&p, &spec, count, &cfg, None).unwrap();
        let b = classify_variable(&p, &spec, count, &cfg, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn disabled_hooks_preserve_semantics() {
        let p = parse(MOTIVATING).unwrap();
        let spec = parse_spec("always output <= 10").unwrap();
        let cfg = motivating_config(&p);
        let ip = self_compose(&p, &spec, p.find_var("x").unwrap()).unwrap();
        for params in cfg.domain.param_vectors() {
            let run = run_composed(&ip, &InputVector::new(params), None, &cfg.domain, cfg.bounds);
            assert_eq!(run.end, PathEnd::Complete);
            assert_eq!(run.base_outputs, run.shadow_outputs);
            assert_eq!(run.assertions, 1);
        }
    }

    #[test]
    fn fixed_flip_reproduces_oracle_example() {
        let p = parse(MOTIVATING).unwrap();
        let spec = parse_spec("always output <= 10").unwrap();
        let cfg = motivating_config(&p);
        let ip = self_compose(&p, &spec, p.find_var("x").unwrap()).unwrap();
        let run = run_composed(&ip, &InputVector::new(vec![12, 1]), Some((1, 3)), &cfg.domain, cfg.bounds);
        assert_eq!(run.base_outputs, [2]);
        assert_eq!(run.shadow_outputs, [11]);
        assert_eq!(
            run.end,
            PathEnd::AssertFailed {
                direction: Direction::FaultIntroducing
            }
        );
    }

    #[test]
    fn first_use_trigger_restricts_flips() {
        let p = parse("int f(int a) { int o = a; o = o + a; return o; }").unwrap();
        let spec = parse_spec("always o <= 6").unwrap();
        let cfg = EngineConfig {
            domain: InputDomain::uniform(&p, IntRange { lo: 0, hi: 3 }),
            bounds: Bounds::default(),
            bits: BitRange::new(0, 2).unwrap(),
            trigger: Trigger::FirstUse,
        };
        let a = p.find_var("a").unwrap();
        let v = classify_variable(&p, &spec, a, &cfg, None).unwrap();
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.hook.occurrence, 1);
        let o = oracle_verdict(&p, &spec, a, &cfg);
        assert_eq!(o.direction, v.direction);
    }

    fn oracle_verdict(p: &Program, spec: &SafetySpec, x: VarId, cfg: &EngineConfig) -> Verdict {
        crate::oracle::oracle_classify(p, spec, &cfg.fault_model(x), &cfg.domain, cfg.bounds).unwrap()
    }

    #[test]
    fn control_loop_agrees_with_oracle() {
        let src = "void ctl(int gain) {
            int acc = 0;
            while (true) {
                int r = input();
                if (r > 1) { acc = acc + gain; } else { acc = acc - 1; }
                output acc;
            }
        }";
        let p = parse(src).unwrap();
        let spec = parse_spec("window acc in (-2,3) persist 2").unwrap();
        let mut domain = InputDomain::uniform(&p, IntRange { lo: 0, hi: 2 });
        domain.max_reads = 2;
        let cfg = EngineConfig {
            domain,
            bounds: Bounds {
                unwind: 3,
                ..Bounds::default()
            },
            bits: BitRange::new(0, 3).unwrap(),
            trigger: Trigger::NondetAnywhere,
        };
        for x in p.list_variables() {
            let c = classify_variable(&p, &spec, x, &cfg, None).unwrap();
            let o = oracle_verdict(&p, &spec, x, &cfg);
            assert_eq!(
                (c.classification, c.direction),
                (o.classification, o.direction),
                "{}",
                p.var_name(x)
            );
        }
    }

    #[test]
    fn shadow_traps_are_counted_not_fatal() {
        let p = parse("int f(int a) { int d = a + 1; int o = 12 / d; return o; }").unwrap();
        let spec = parse_spec("always o <= 100").unwrap();
        let cfg = EngineConfig {
            domain: InputDomain::uniform(&p, IntRange { lo: 0, hi: 2 }),
            bounds: Bounds::default(),
            bits: BitRange::ALL,
            trigger: Trigger::NondetAnywhere,
        };
        let d = p.find_var("d").unwrap();
        let v = classify_variable(&p, &spec, d, &cfg, None).unwrap();
        let o = oracle_verdict(&p, &spec, d, &cfg);
        assert_eq!(v.classification, o.classification);
        assert!(v.stats.fault_traps > 0);
        assert!(o.stats.fault_traps > 0);
    }
}
