//! CtrlC: the deterministic, single-procedure mini-language analysed by this crate.
//!
//! A program is one function whose parameters are the input variables read once at
//! start-up. Locals are declared with an initializer. `input()` provides a fresh
//! environment read and may only appear as the whole right-hand side of a
//! declaration or assignment, so every read is its own statement.

mod lexer;
mod ops;
mod parser;
mod printer;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use ops::{apply_binary, apply_unary, truthy, Trap};
pub use parser::parse;
pub use printer::{print_expr, print_program};

/// Index of a variable in [`Program::vars`]. Parameters come first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Pre-order index of a statement. Also indexes [`Program::source_spans`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StmtId(pub u32);

impl StmtId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarType {
    /// Two's-complement, 32 bits, wrapping arithmetic.
    Int32,
    /// Stored as a 32-bit word; any nonzero payload is true.
    Bool,
}

impl fmt::Display for ScalarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarType::Int32 => f.write_str("int"),
            ScalarType::Bool => f.write_str("bool"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Param,
    Local,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub ty: ScalarType,
    pub kind: VarKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnType {
    Int,
    Void,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i32),
    Bool(bool),
    Var(VarId),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Calls `f` for every variable read, in left-to-right syntactic order.
    pub fn for_each_use(&self, f: &mut impl FnMut(VarId)) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) => f(*v),
            Expr::Unary(_, e) => e.for_each_use(f),
            Expr::Binary(_, l, r) => {
                l.for_each_use(f);
                r.for_each_use(f);
            }
        }
    }

    pub fn uses(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.for_each_use(&mut |v| out.push(v));
        out
    }

    /// Rewrites every variable through `f`.
    pub fn map_vars(&self, f: &impl Fn(VarId) -> VarId) -> Expr {
        match self {
            Expr::Int(v) => Expr::Int(*v),
            Expr::Bool(b) => Expr::Bool(*b),
            Expr::Var(v) => Expr::Var(f(*v)),
            Expr::Unary(op, e) => Expr::Unary(*op, Box::new(e.map_vars(f))),
            Expr::Binary(op, l, r) => {
                Expr::Binary(*op, Box::new(l.map_vars(f)), Box::new(r.map_vars(f)))
            }
        }
    }
}

/// Right-hand side of a declaration or assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rhs {
    Expr(Expr),
    Input,
}

impl Rhs {
    pub fn uses(&self) -> Vec<VarId> {
        match self {
            Rhs::Expr(e) => e.uses(),
            Rhs::Input => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub id: StmtId,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StmtKind {
    Decl {
        var: VarId,
        init: Rhs,
    },
    Assign {
        target: VarId,
        value: Rhs,
    },
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    Output(Expr),
    Return(Expr),
    /// No semantic effect; kept as a use site.
    Print(Expr),
}

impl StmtKind {
    /// Variable written by this statement, if any.
    pub fn def(&self) -> Option<VarId> {
        match self {
            StmtKind::Decl { var, .. } => Some(*var),
            StmtKind::Assign { target, .. } => Some(*target),
            _ => None,
        }
    }

    /// Variables read by this statement's own expression (not by nested statements),
    /// in syntactic order, with repetitions.
    pub fn uses(&self) -> Vec<VarId> {
        match self {
            StmtKind::Decl { init, .. } => init.uses(),
            StmtKind::Assign { value, .. } => value.uses(),
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => cond.uses(),
            StmtKind::Output(e) | StmtKind::Return(e) | StmtKind::Print(e) => e.uses(),
        }
    }

    pub fn is_output_construct(&self) -> bool {
        matches!(self, StmtKind::Output(_) | StmtKind::Return(_))
    }
}

/// Byte range plus 1-based line/column of its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }

    pub fn warning(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
            span,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev} at {}: {}", self.span, self.message)
    }
}

/// How the program emits its control output, which decides how it is self-composed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgramShape {
    /// Runs to completion; output points are `return` / `output` occurrences.
    Terminating,
    /// `prelude; while (true) { body; output e; }` with no other output construct.
    /// `prelude_len` counts the top-level statements before the loop.
    ControlLoop { prelude_len: usize },
}

/// A validated CtrlC procedure. Immutable after parsing.
#[derive(Clone, Debug)]
pub struct Program {
    pub name: String,
    pub return_type: ReturnType,
    /// Parameters in signature order, then locals in declaration order.
    pub vars: Vec<VarDecl>,
    pub body: Vec<Stmt>,
    /// Indexed by [`StmtId`].
    pub source_spans: Vec<Span>,
    /// Indexed by [`VarId`].
    pub var_spans: Vec<Span>,
}

impl Program {
    pub fn var(&self, id: VarId) -> &VarDecl {
        &self.vars[id.index()]
    }

    pub fn var_name(&self, id: VarId) -> &str {
        &self.vars[id.index()].name
    }

    pub fn find_var(&self, name: &str) -> Option<VarId> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .map(|i| VarId(i as u32))
    }

    pub fn param_count(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Param).count()
    }

    pub fn params(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.param_count()).map(|i| VarId(i as u32))
    }

    /// All variables (the set V) in declaration order.
    pub fn list_variables(&self) -> Vec<VarId> {
        (0..self.vars.len()).map(|i| VarId(i as u32)).collect()
    }

    pub fn stmt_count(&self) -> usize {
        self.source_spans.len()
    }

    pub fn span(&self, id: StmtId) -> Span {
        self.source_spans[id.index()]
    }

    /// Pre-order walk over every statement.
    pub fn walk(&self, f: &mut impl FnMut(&Stmt)) {
        fn go(stmts: &[Stmt], f: &mut impl FnMut(&Stmt)) {
            for s in stmts {
                f(s);
                match &s.kind {
                    StmtKind::If {
                        then_branch,
                        else_branch,
                        ..
                    } => {
                        go(then_branch, f);
                        go(else_branch, f);
                    }
                    StmtKind::While { body, .. } => go(body, f),
                    _ => {}
                }
            }
        }
        go(&self.body, f);
    }

    pub fn stmt(&self, id: StmtId) -> Option<&Stmt> {
        fn find(stmts: &[Stmt], id: StmtId) -> Option<&Stmt> {
            for s in stmts {
                if s.id == id {
                    return Some(s);
                }
                let nested = match &s.kind {
                    StmtKind::If {
                        then_branch,
                        else_branch,
                        ..
                    } => find(then_branch, id).or_else(|| find(else_branch, id)),
                    StmtKind::While { body, .. } => find(body, id),
                    _ => None,
                };
                if nested.is_some() {
                    return nested;
                }
            }
            None
        }
        find(&self.body, id)
    }

    /// Statements that emit the control output.
    pub fn output_points(&self) -> Vec<StmtId> {
        let mut out = Vec::new();
        self.walk(&mut |s| {
            if s.kind.is_output_construct() {
                out.push(s.id);
            }
        });
        out
    }

    pub fn shape(&self) -> ProgramShape {
        let Some((last, prelude)) = self.body.split_last() else {
            return ProgramShape::Terminating;
        };
        let StmtKind::While {
            cond: Expr::Bool(true),
            body,
        } = &last.kind
        else {
            return ProgramShape::Terminating;
        };
        let ends_with_output = matches!(body.last().map(|s| &s.kind), Some(StmtKind::Output(_)));
        if self.return_type == ReturnType::Void
            && ends_with_output
            && self.output_points().len() == 1
        {
            ProgramShape::ControlLoop {
                prelude_len: prelude.len(),
            }
        } else {
            ProgramShape::Terminating
        }
    }

    /// Number of statements that read `var` syntactically, counting repeats.
    pub fn use_count(&self, var: VarId) -> usize {
        let mut n = 0;
        self.walk(&mut |s| n += s.kind.uses().iter().filter(|&&u| u == var).count());
        n
    }

    /// Structural equality: same signature, variables and statement trees; spans ignored.
    pub fn same_structure(&self, other: &Program) -> bool {
        self.name == other.name
            && self.return_type == other.return_type
            && self.vars == other.vars
            && self.body == other.body
    }
}
