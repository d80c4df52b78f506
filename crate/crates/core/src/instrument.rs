//! Self-composition with fault hooks.
//!
//! The program is paired with a renamed copy of itself. Variable `v` of the copy is
//! written `v'` and has id `v + |V|`. Before every statement that reads the variable
//! under investigation, the copy carries one hook per syntactic read; a hook may flip
//! one bit of the primed variable, at most once per execution.
//!
//! A terminating program runs the original to completion, then the copy, and asserts
//! `!(phi ^ phi')` once. A control loop runs both preludes and then, cycle by cycle,
//! the original body, the copy's body, and the assertion.

use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::lang::{
    print_expr, Expr, Program, ProgramShape, Rhs, Stmt, StmtId, StmtKind, VarDecl, VarId,
};
use crate::property::SafetySpec;

/// Index into [`InstrumentedProgram::hooks`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HookId(pub u32);

/// A static hook: placed before `stmt`, for the `use_index`-th read of the target in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HookSiteDecl {
    pub stmt: StmtId,
    pub use_index: u32,
    /// The primed variable the hook may flip.
    pub var: VarId,
}

/// Statement of an instrumented copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum INode {
    Hook(HookId),
    Stmt { id: StmtId, kind: IKind },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IKind {
    Decl { var: VarId, init: Rhs },
    Assign { target: VarId, value: Rhs },
    If { cond: Expr, then_branch: Vec<INode>, else_branch: Vec<INode> },
    /// `cond_hooks` run before every evaluation of `cond`.
    While { cond: Expr, cond_hooks: Vec<HookId>, body: Vec<INode> },
    Output(Expr),
    Return(Expr),
    Print(Expr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Copy {
    Base,
    Shadow,
}

/// The self-composed program for one investigated variable.
#[derive(Clone, Debug)]
pub struct InstrumentedProgram {
    pub name: String,
    pub shape: ProgramShape,
    /// The original variables, then their primed counterparts.
    pub vars: Vec<VarDecl>,
    pub original_var_count: usize,
    pub target: VarId,
    pub spec: SafetySpec,
    /// I, or the whole body for a terminating program.
    pub base: Vec<INode>,
    /// I′ with hooks.
    pub shadow: Vec<INode>,
    /// S; empty for a terminating program.
    pub base_cycle: Vec<INode>,
    /// S′ with hooks; empty for a terminating program.
    pub shadow_cycle: Vec<INode>,
    pub hooks: Vec<HookSiteDecl>,
    /// The two property flags.
    pub phi_vars: (String, String),
    pub assertion: String,
    /// The uninstrumented program, for replaying counterexamples.
    pub original: Program,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstrumentError {
    #[error("variable #{} is not declared in `{name}`", .var.0)]
    UnknownVariable { var: VarId, name: String },
}

/// Maps every variable id `v` to `v + offset`.
pub fn rename(stmts: &[Stmt], offset: u32) -> Vec<Stmt> {
    let f = |v: VarId| VarId(v.0 + offset);
    let rhs = |r: &Rhs| match r {
        Rhs::Expr(e) => Rhs::Expr(e.map_vars(&f)),
        Rhs::Input => Rhs::Input,
    };
    stmts
        .iter()
        .map(|s| Stmt {
            id: s.id,
            kind: match &s.kind {
                StmtKind::Decl { var, init } => StmtKind::Decl {
                    var: f(*var),
                    init: rhs(init),
                },
                StmtKind::Assign { target, value } => StmtKind::Assign {
                    target: f(*target),
                    value: rhs(value),
                },
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                } => StmtKind::If {
                    cond: cond.map_vars(&f),
                    then_branch: rename(then_branch, offset),
                    else_branch: rename(else_branch, offset),
                },
                StmtKind::While { cond, body } => StmtKind::While {
                    cond: cond.map_vars(&f),
                    body: rename(body, offset),
                },
                StmtKind::Output(e) => StmtKind::Output(e.map_vars(&f)),
                StmtKind::Return(e) => StmtKind::Return(e.map_vars(&f)),
                StmtKind::Print(e) => StmtKind::Print(e.map_vars(&f)),
            },
        })
        .collect()
}

/// Converts statements to instrumented form. With `target` set, every read of it gets
/// a hook registered in `hooks`.
pub fn insert_fault_hooks(
    stmts: &[Stmt],
    target: Option<VarId>,
    hooks: &mut Vec<HookSiteDecl>,
) -> Vec<INode> {
    let mut out = Vec::new();
    for s in stmts {
        let make_hooks = |hooks: &mut Vec<HookSiteDecl>| -> Vec<HookId> {
            let Some(t) = target else { return Vec::new() };
            let n = s.kind.uses().iter().filter(|&&u| u == t).count() as u32;
            (0..n)
                .map(|i| {
                    hooks.push(HookSiteDecl {
                        stmt: s.id,
                        use_index: i + 1,
                        var: t,
                    });
                    HookId(hooks.len() as u32 - 1)
                })
                .collect()
        };
        let kind = match &s.kind {
            StmtKind::While { cond, body } => {
                let cond_hooks = make_hooks(hooks);
                IKind::While {
                    cond: cond.clone(),
                    cond_hooks,
                    body: insert_fault_hooks(body, target, hooks),
                }
            }
            other => {
                out.extend(make_hooks(hooks).into_iter().map(INode::Hook));
                match other {
                    StmtKind::Decl { var, init } => IKind::Decl {
                        var: *var,
                        init: init.clone(),
                    },
                    StmtKind::Assign { target, value } => IKind::Assign {
                        target: *target,
                        value: value.clone(),
                    },
                    StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    } => IKind::If {
                        cond: cond.clone(),
                        then_branch: insert_fault_hooks(then_branch, target, hooks),
                        else_branch: insert_fault_hooks(else_branch, target, hooks),
                    },
                    StmtKind::Output(e) => IKind::Output(e.clone()),
                    StmtKind::Return(e) => IKind::Return(e.clone()),
                    StmtKind::Print(e) => IKind::Print(e.clone()),
                    StmtKind::While { .. } => unreachable!(),
                }
            }
        };
        out.push(INode::Stmt { id: s.id, kind });
    }
    out
}

/// Removes hooks, for comparing a copy with the original statements.
pub fn strip_hooks(nodes: &[INode], offset: u32) -> Vec<Stmt> {
    let f = |v: VarId| VarId(v.0 - offset);
    let rhs = |r: &Rhs| match r {
        Rhs::Expr(e) => Rhs::Expr(e.map_vars(&f)),
        Rhs::Input => Rhs::Input,
    };
    nodes
        .iter()
        .filter_map(|n| match n {
            INode::Hook(_) => None,
            INode::Stmt { id, kind } => Some(Stmt {
                id: *id,
                kind: match kind {
                    IKind::Decl { var, init } => StmtKind::Decl {
                        var: f(*var),
                        init: rhs(init),
                    },
                    IKind::Assign { target, value } => StmtKind::Assign {
                        target: f(*target),
                        value: rhs(value),
                    },
                    IKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    } => StmtKind::If {
                        cond: cond.map_vars(&f),
                        then_branch: strip_hooks(then_branch, offset),
                        else_branch: strip_hooks(else_branch, offset),
                    },
                    IKind::While { cond, body, .. } => StmtKind::While {
                        cond: cond.map_vars(&f),
                        body: strip_hooks(body, offset),
                    },
                    IKind::Output(e) => StmtKind::Output(e.map_vars(&f)),
                    IKind::Return(e) => StmtKind::Return(e.map_vars(&f)),
                    IKind::Print(e) => StmtKind::Print(e.map_vars(&f)),
                },
            }),
        })
        .collect()
}

/// Builds the self-composed program investigating `target`.
pub fn self_compose(
    program: &Program,
    spec: &SafetySpec,
    target: VarId,
) -> Result<InstrumentedProgram, InstrumentError> {
    if target.index() >= program.vars.len() {
        return Err(InstrumentError::UnknownVariable {
            var: target,
            name: program.name.clone(),
        });
    }
    let n = program.vars.len() as u32;
    let primed = VarId(target.0 + n);
    let mut vars = program.vars.clone();
    vars.extend(program.vars.iter().map(|v| VarDecl {
        name: format!("{}'", v.name),
        ..v.clone()
    }));

    let shape = program.shape();
    let (prelude, cycle): (&[Stmt], &[Stmt]) = match shape {
        ProgramShape::Terminating => (&program.body, &[]),
        ProgramShape::ControlLoop { prelude_len } => {
            let StmtKind::While { body, .. } = &program.body[prelude_len].kind else {
                unreachable!("control loop shape ends in a loop")
            };
            (&program.body[..prelude_len], body)
        }
    };

    let mut no_hooks = Vec::new();
    let mut hooks = Vec::new();
    let base = insert_fault_hooks(prelude, None, &mut no_hooks);
    let base_cycle = insert_fault_hooks(cycle, None, &mut no_hooks);
    let shadow = insert_fault_hooks(&rename(prelude, n), Some(primed), &mut hooks);
    let shadow_cycle = insert_fault_hooks(&rename(cycle, n), Some(primed), &mut hooks);

    Ok(InstrumentedProgram {
        name: program.name.clone(),
        shape,
        vars,
        original_var_count: n as usize,
        target,
        spec: spec.clone(),
        base,
        shadow,
        base_cycle,
        shadow_cycle,
        hooks,
        phi_vars: ("phi".into(), "phi'".into()),
        assertion: "assert(!(phi ^ phi'))".into(),
        original: program.clone(),
    })
}

impl InstrumentedProgram {
    pub fn primed_target(&self) -> VarId {
        VarId(self.target.0 + self.original_var_count as u32)
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.index()].name
    }

    /// Pseudo-CtrlC rendering of the composed program, for inspection.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let target = self.var_name(self.primed_target()).to_string();
        let _ = writeln!(
            out,
            "// {}: self-composition for `{}`, property {}",
            self.name,
            self.var_name(self.target),
            self.spec
        );
        let _ = writeln!(out, "// {} fault hook(s) on `{target}`", self.hooks.len());
        let _ = writeln!(out, "void {}_composed() {{", self.name);
        let _ = writeln!(out, "    bool phi = true;\n    bool phi' = true;");
        match self.shape {
            ProgramShape::Terminating => {
                self.render_block(&mut out, &self.base, 1, Copy::Base);
                let _ = writeln!(out, "  end_I:");
                self.render_block(&mut out, &self.shadow, 1, Copy::Shadow);
                let _ = writeln!(out, "  end_I':");
                let _ = writeln!(out, "    {};", self.assertion);
            }
            ProgramShape::ControlLoop { .. } => {
                self.render_block(&mut out, &self.base, 1, Copy::Base);
                self.render_block(&mut out, &self.shadow, 1, Copy::Shadow);
                let _ = writeln!(out, "    while (true) {{");
                self.render_block(&mut out, &self.base_cycle, 2, Copy::Base);
                self.render_block(&mut out, &self.shadow_cycle, 2, Copy::Shadow);
                let _ = writeln!(out, "        {};", self.assertion);
                let _ = writeln!(out, "    }}");
            }
        }
        out.push_str("}\n");
        out
    }

    fn render_block(&self, out: &mut String, nodes: &[INode], depth: usize, copy: Copy) {
        let pad = "    ".repeat(depth);
        let name = |v: VarId| self.var_name(v).to_string();
        let (buf, phi, end) = match copy {
            Copy::Base => ("O", "phi", "end_I"),
            Copy::Shadow => ("O'", "phi'", "end_I'"),
        };
        let rhs = |r: &Rhs| match r {
            Rhs::Expr(e) => print_expr(e, &name),
            Rhs::Input => match copy {
                Copy::Base => "input()".to_string(),
                Copy::Shadow => "replay_input()".to_string(),
            },
        };
        let emit = |out: &mut String, e: &Expr| {
            let _ = writeln!(out, "{pad}{buf}.append({});", print_expr(e, &name));
            let _ = writeln!(out, "{pad}{phi} = {phi} && Phi({buf});");
        };
        for n in nodes {
            match n {
                INode::Hook(h) => {
                    let _ = writeln!(out, "{pad}mimic_seu(&{});  // hook {}", name(self.hooks[h.0 as usize].var), h.0);
                }
                INode::Stmt { kind, .. } => match kind {
                    IKind::Decl { var, init } => {
                        let _ = writeln!(out, "{pad}{} {} = {};", self.vars[var.index()].ty, name(*var), rhs(init));
                    }
                    IKind::Assign { target, value } => {
                        let _ = writeln!(out, "{pad}{} = {};", name(*target), rhs(value));
                    }
                    IKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    } => {
                        let _ = writeln!(out, "{pad}if ({}) {{", print_expr(cond, &name));
                        self.render_block(out, then_branch, depth + 1, copy);
                        if !else_branch.is_empty() {
                            let _ = writeln!(out, "{pad}}} else {{");
                            self.render_block(out, else_branch, depth + 1, copy);
                        }
                        let _ = writeln!(out, "{pad}}}");
                    }
                    IKind::While {
                        cond,
                        cond_hooks,
                        body,
                    } => {
                        let guard: String = cond_hooks
                            .iter()
                            .map(|h| format!("mimic_seu(&{}), ", name(self.hooks[h.0 as usize].var)))
                            .collect();
                        let _ = writeln!(out, "{pad}while ({guard}{}) {{", print_expr(cond, &name));
                        self.render_block(out, body, depth + 1, copy);
                        let _ = writeln!(out, "{pad}}}");
                    }
                    IKind::Output(e) => emit(out, e),
                    IKind::Return(e) => {
                        emit(out, e);
                        let _ = writeln!(out, "{pad}goto {end};");
                    }
                    IKind::Print(e) => {
                        let _ = writeln!(out, "{pad}print {};", print_expr(e, &name));
                    }
                },
            }
        }
    }
}
