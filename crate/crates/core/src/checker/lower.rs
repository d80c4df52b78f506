//! Flattening of an instrumented program into jump-based code.

use crate::instrument::{Copy, IKind, INode, InstrumentedProgram};
use crate::lang::{Expr, ProgramShape, Rhs, StmtId};

#[derive(Clone, Debug)]
pub(crate) enum Op {
    Assign { dst: usize, expr: Expr, stmt: StmtId },
    Read { dst: usize },
    /// `if`: jumps to `on_false` when the condition is false.
    Branch { cond: Expr, on_false: usize, stmt: StmtId },
    LoopEnter { counter: usize },
    /// Loop condition; jumps to `exit` when false.
    LoopTest { cond: Expr, exit: usize, counter: usize, stmt: StmtId },
    Jump { to: usize },
    Hook { slot: usize, stmt: StmtId },
    /// Appends to the copy's output history; a `return` then jumps to `ret`.
    Output { expr: Expr, stmt: StmtId, ret: Option<usize> },
    Print { expr: Expr, stmt: StmtId },
    /// Stops the path once the cycle limit is reached, otherwise starts the next cycle.
    CycleHead,
    /// The copy's evaluation of the control loop's `while (true)`.
    CycleStart,
    Assert,
    Halt,
}

/// An operation and the copy it belongs to; `None` for the composition glue.
#[derive(Clone, Debug)]
pub(crate) struct Instr {
    pub copy: Option<Copy>,
    pub op: Op,
}

#[derive(Clone, Debug)]
pub(crate) struct Code {
    pub instrs: Vec<Instr>,
    /// Loop counters, one per loop per copy.
    pub counters: usize,
}

struct Lowerer {
    instrs: Vec<Instr>,
    counters: usize,
}

impl Lowerer {
    fn emit(&mut self, copy: Option<Copy>, op: Op) -> usize {
        self.instrs.push(Instr { copy, op });
        self.instrs.len() - 1
    }

    fn here(&self) -> usize {
        self.instrs.len()
    }

    /// Lowers `nodes`; `returns` collects the jumps to patch to the end of the copy.
    fn block(&mut self, nodes: &[INode], copy: Copy, hooks_slot: &dyn Fn(u32) -> (usize, StmtId), returns: &mut Vec<usize>) {
        let c = Some(copy);
        for n in nodes {
            match n {
                INode::Hook(h) => {
                    let (slot, stmt) = hooks_slot(h.0);
                    self.emit(c, Op::Hook { slot, stmt });
                }
                INode::Stmt { id, kind } => match kind {
                    IKind::Decl { var, init } | IKind::Assign { target: var, value: init } => {
                        let op = match init {
                            Rhs::Expr(e) => Op::Assign {
                                dst: var.index(),
                                expr: e.clone(),
                                stmt: *id,
                            },
                            Rhs::Input => Op::Read { dst: var.index() },
                        };
                        self.emit(c, op);
                    }
                    IKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    } => {
                        let br = self.emit(
                            c,
                            Op::Branch {
                                cond: cond.clone(),
                                on_false: 0,
                                stmt: *id,
                            },
                        );
                        self.block(then_branch, copy, hooks_slot, returns);
                        if else_branch.is_empty() {
                            let end = self.here();
                            self.patch_branch(br, end);
                        } else {
                            let skip = self.emit(c, Op::Jump { to: 0 });
                            let else_at = self.here();
                            self.patch_branch(br, else_at);
                            self.block(else_branch, copy, hooks_slot, returns);
                            let end = self.here();
                            self.patch_jump(skip, end);
                        }
                    }
                    IKind::While {
                        cond,
                        cond_hooks,
                        body,
                    } => {
                        let counter = self.counters;
                        self.counters += 1;
                        self.emit(c, Op::LoopEnter { counter });
                        let head = self.here();
                        for h in cond_hooks {
                            let (slot, stmt) = hooks_slot(h.0);
                            self.emit(c, Op::Hook { slot, stmt });
                        }
                        let test = self.emit(
                            c,
                            Op::LoopTest {
                                cond: cond.clone(),
                                exit: 0,
                                counter,
                                stmt: *id,
                            },
                        );
                        self.block(body, copy, hooks_slot, returns);
                        self.emit(c, Op::Jump { to: head });
                        let exit = self.here();
                        if let Op::LoopTest { exit: e, .. } = &mut self.instrs[test].op {
                            *e = exit;
                        }
                    }
                    IKind::Output(e) => {
                        self.emit(
                            c,
                            Op::Output {
                                expr: e.clone(),
                                stmt: *id,
                                ret: None,
                            },
                        );
                    }
                    IKind::Return(e) => {
                        let at = self.emit(
                            c,
                            Op::Output {
                                expr: e.clone(),
                                stmt: *id,
                                ret: Some(0),
                            },
                        );
                        returns.push(at);
                    }
                    IKind::Print(e) => {
                        self.emit(
                            c,
                            Op::Print {
                                expr: e.clone(),
                                stmt: *id,
                            },
                        );
                    }
                },
            }
        }
    }

    fn patch_branch(&mut self, at: usize, to: usize) {
        if let Op::Branch { on_false, .. } = &mut self.instrs[at].op {
            *on_false = to;
        }
    }

    fn patch_jump(&mut self, at: usize, to: usize) {
        if let Op::Jump { to: t } = &mut self.instrs[at].op {
            *t = to;
        }
    }

    fn patch_returns(&mut self, returns: Vec<usize>, to: usize) {
        for at in returns {
            if let Op::Output { ret, .. } = &mut self.instrs[at].op {
                *ret = Some(to);
            }
        }
    }

    fn copy(&mut self, nodes: &[INode], copy: Copy, hooks_slot: &dyn Fn(u32) -> (usize, StmtId)) {
        let mut returns = Vec::new();
        self.block(nodes, copy, hooks_slot, &mut returns);
        let end = self.here();
        self.patch_returns(returns, end);
    }
}

pub(crate) fn lower(ip: &InstrumentedProgram) -> Code {
    let hooks_slot = |h: u32| {
        let site = ip.hooks[h as usize];
        (site.var.index(), site.stmt)
    };
    let mut l = Lowerer {
        instrs: Vec::new(),
        counters: 0,
    };
    l.copy(&ip.base, Copy::Base, &hooks_slot);
    l.copy(&ip.shadow, Copy::Shadow, &hooks_slot);
    match ip.shape {
        ProgramShape::Terminating => {
            l.emit(None, Op::Assert);
            l.emit(None, Op::Halt);
        }
        ProgramShape::ControlLoop { .. } => {
            let head = l.emit(None, Op::CycleHead);
            l.emit(Some(Copy::Base), Op::CycleStart);
            l.copy(&ip.base_cycle, Copy::Base, &hooks_slot);
            l.emit(Some(Copy::Shadow), Op::CycleStart);
            l.copy(&ip.shadow_cycle, Copy::Shadow, &hooks_slot);
            l.emit(None, Op::Assert);
            l.emit(None, Op::Jump { to: head });
        }
    }
    Code {
        instrs: l.instrs,
        counters: l.counters,
    }
}
