use std::collections::HashMap;

use super::lexer::{lex, Tok, Token};
use super::{
    BinaryOp, Diagnostic, Expr, Program, ReturnType, Rhs, ScalarType, Span, Stmt, StmtId,
    StmtKind, UnaryOp, VarDecl, VarId, VarKind,
};

const MAX_DEPTH: usize = 200;

/// Parses and validates one CtrlC procedure.
///
/// Never panics: any input yields either a well-formed [`Program`] or at least one
/// error diagnostic.
pub fn parse(source: &str) -> Result<Program, Vec<Diagnostic>> {
    let (toks, lex_errors) = lex(source);
    if !lex_errors.is_empty() {
        return Err(lex_errors);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        errors: Vec::new(),
        vars: Vec::new(),
        var_spans: Vec::new(),
        declared: HashMap::new(),
        scopes: Vec::new(),
        spans: Vec::new(),
        depth: 0,
    };
    match p.program() {
        Ok(program) if p.errors.is_empty() => Ok(program),
        _ => {
            if p.errors.is_empty() {
                p.errors
                    .push(Diagnostic::error("syntax error", p.peek_span()));
            }
            Err(p.errors)
        }
    }
}

/// Fatal syntax error; the diagnostic has already been recorded.
struct Abort;

type PResult<T> = Result<T, Abort>;

/// `None` marks an expression whose type is unknown because of an earlier error.
type Ty = Option<ScalarType>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    errors: Vec<Diagnostic>,
    vars: Vec<VarDecl>,
    var_spans: Vec<Span>,
    declared: HashMap<String, VarId>,
    scopes: Vec<Vec<VarId>>,
    spans: Vec<Span>,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn peek_span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn fail<T>(&mut self, msg: impl Into<String>) -> PResult<T> {
        let span = self.peek_span();
        self.errors.push(Diagnostic::error(msg, span));
        Err(Abort)
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            let found = self.peek().describe();
            self.fail(format!(
                "syntax error: expected {}, found {found}",
                tok.describe()
            ))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => Ok((name, self.bump().span)),
            other => self.fail(format!(
                "syntax error: expected identifier, found {}",
                other.describe()
            )),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("nesting too deep");
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn error(&mut self, msg: impl Into<String>, span: Span) {
        self.errors.push(Diagnostic::error(msg, span));
    }

    fn declare(&mut self, name: String, ty: ScalarType, kind: VarKind, span: Span) -> VarId {
        if let Some(prev) = self.declared.get(&name) {
            let prev_span = self.var_spans[prev.index()];
            self.error(
                format!("duplicate declaration of `{name}` (first declared at {prev_span})"),
                span,
            );
        }
        let id = VarId(self.vars.len() as u32);
        self.vars.push(VarDecl {
            name: name.clone(),
            ty,
            kind,
        });
        self.var_spans.push(span);
        self.declared.entry(name).or_insert(id);
        if let Some(scope) = self.scopes.last_mut() {
            scope.push(id);
        }
        id
    }

    fn lookup(&mut self, name: &str, span: Span) -> Option<VarId> {
        for scope in self.scopes.iter().rev() {
            if let Some(&id) = scope.iter().rev().find(|&&id| self.vars[id.index()].name == name) {
                return Some(id);
            }
        }
        let msg = if self.declared.contains_key(name) {
            format!("use before declaration: `{name}` is not in scope here")
        } else {
            format!("use before declaration: `{name}` is not declared")
        };
        self.error(msg, span);
        None
    }

    fn new_stmt(&mut self, start: Span) -> StmtId {
        let id = StmtId(self.spans.len() as u32);
        self.spans.push(start);
        id
    }

    fn finish_stmt(&mut self, id: StmtId) {
        let end = self.prev_end();
        self.spans[id.index()].end = end;
    }

    fn program(&mut self) -> PResult<Program> {
        let return_type = match self.peek() {
            Tok::KwInt => ReturnType::Int,
            Tok::KwVoid => ReturnType::Void,
            other => {
                let found = other.describe();
                return self.fail(format!(
                    "syntax error: expected `int` or `void` return type, found {found}"
                ));
            }
        };
        self.bump();
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        self.scopes.push(Vec::new());
        if self.peek() != &Tok::RParen {
            loop {
                let ty = self.scalar_type()?;
                let (pname, span) = self.ident()?;
                self.declare(pname, ty, VarKind::Param, span);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let open = self.expect(Tok::LBrace)?;
        let body = self.stmts_until_rbrace()?;
        self.scopes.pop();
        if self.peek() != &Tok::Eof {
            let found = self.peek().describe();
            return self.fail(format!(
                "syntax error: expected end of input after the procedure, found {found}"
            ));
        }

        let program = Program {
            name,
            return_type,
            vars: std::mem::take(&mut self.vars),
            body,
            source_spans: std::mem::take(&mut self.spans),
            var_spans: std::mem::take(&mut self.var_spans),
        };
        self.check_output_constructs(&program, open);
        Ok(program)
    }

    fn scalar_type(&mut self) -> PResult<ScalarType> {
        match self.peek() {
            Tok::KwInt => {
                self.bump();
                Ok(ScalarType::Int32)
            }
            Tok::KwBool => {
                self.bump();
                Ok(ScalarType::Bool)
            }
            other => {
                let found = other.describe();
                self.fail(format!(
                    "syntax error: expected `int` or `bool`, found {found}"
                ))
            }
        }
    }

    /// Parses statements up to and including the closing brace.
    fn stmts_until_rbrace(&mut self) -> PResult<Vec<Stmt>> {
        let mut out: Vec<Stmt> = Vec::new();
        while self.peek() != &Tok::RBrace {
            if self.peek() == &Tok::Eof {
                return self.fail("syntax error: expected `}`, found end of input");
            }
            let stmt = self.stmt()?;
            if let Some(prev) = out.last() {
                if never_falls_through(prev) {
                    let span = self.spans[stmt.id.index()];
                    self.error("unreachable statement", span);
                }
            }
            out.push(stmt);
        }
        self.bump();
        Ok(out)
    }

    fn block_or_stmt(&mut self) -> PResult<Vec<Stmt>> {
        self.scopes.push(Vec::new());
        let body = if self.eat(&Tok::LBrace) {
            self.stmts_until_rbrace()
        } else if matches!(self.peek(), Tok::KwInt | Tok::KwBool) {
            self.fail("a declaration is not allowed as an unbraced branch or loop body")
        } else {
            self.stmt().map(|s| vec![s])
        };
        self.scopes.pop();
        body
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        self.enter()?;
        let r = self.stmt_inner();
        self.leave();
        r
    }

    fn stmt_inner(&mut self) -> PResult<Stmt> {
        let start = self.peek_span();
        match self.peek().clone() {
            Tok::KwInt | Tok::KwBool => {
                let id = self.new_stmt(start);
                let ty = self.scalar_type()?;
                let (name, span) = self.ident()?;
                self.expect(Tok::Assign)?;
                let init = self.rhs(ty)?;
                self.expect(Tok::Semi)?;
                let var = self.declare(name, ty, VarKind::Local, span);
                self.finish_stmt(id);
                Ok(Stmt {
                    id,
                    kind: StmtKind::Decl { var, init },
                })
            }
            Tok::KwIf => {
                let id = self.new_stmt(start);
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.condition()?;
                self.expect(Tok::RParen)?;
                self.finish_stmt(id);
                let then_branch = self.block_or_stmt()?;
                let else_branch = if self.eat(&Tok::KwElse) {
                    if self.peek() == &Tok::KwIf {
                        vec![self.stmt()?]
                    } else {
                        self.block_or_stmt()?
                    }
                } else {
                    Vec::new()
                };
                Ok(Stmt {
                    id,
                    kind: StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    },
                })
            }
            Tok::KwWhile => {
                let id = self.new_stmt(start);
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.condition()?;
                self.expect(Tok::RParen)?;
                self.finish_stmt(id);
                let body = self.block_or_stmt()?;
                Ok(Stmt {
                    id,
                    kind: StmtKind::While { cond, body },
                })
            }
            Tok::KwReturn | Tok::KwPrint => {
                let id = self.new_stmt(start);
                let is_return = self.bump().tok == Tok::KwReturn;
                let (e, ty, span) = self.expr()?;
                self.expect(Tok::Semi)?;
                self.finish_stmt(id);
                let kind = if is_return {
                    if ty == Some(ScalarType::Bool) {
                        self.error("type mismatch: `return` expects an int expression", span);
                    }
                    StmtKind::Return(e)
                } else {
                    StmtKind::Print(e)
                };
                Ok(Stmt { id, kind })
            }
            Tok::Ident(name) if name == "output" && !is_assign_op(self.peek_at(1)) => {
                let id = self.new_stmt(start);
                self.bump();
                let (e, ty, span) = self.expr()?;
                self.expect(Tok::Semi)?;
                self.finish_stmt(id);
                if ty == Some(ScalarType::Bool) {
                    self.error("type mismatch: `output` expects an int expression", span);
                }
                Ok(Stmt {
                    id,
                    kind: StmtKind::Output(e),
                })
            }
            Tok::Ident(name) => {
                let id = self.new_stmt(start);
                let span = self.bump().span;
                let target = self.lookup(&name, span);
                let target_ty = target.map(|t| self.vars[t.index()].ty);
                let op = self.peek().clone();
                if is_assign_op(&op) {
                    self.bump();
                }
                let value = match op {
                    Tok::Assign => self.rhs_typed(target_ty)?,
                    Tok::PlusPlus | Tok::MinusMinus => {
                        let bop = if op == Tok::PlusPlus {
                            BinaryOp::Add
                        } else {
                            BinaryOp::Sub
                        };
                        self.require_int(target_ty, span);
                        compound(target, bop, Expr::Int(1))
                    }
                    Tok::PlusAssign | Tok::MinusAssign | Tok::StarAssign => {
                        let bop = match op {
                            Tok::PlusAssign => BinaryOp::Add,
                            Tok::MinusAssign => BinaryOp::Sub,
                            _ => BinaryOp::Mul,
                        };
                        self.require_int(target_ty, span);
                        let (e, ty, espan) = self.expr()?;
                        self.require_int(ty, espan);
                        compound(target, bop, e)
                    }
                    other => {
                        return self.fail(format!(
                            "syntax error: expected assignment after `{name}`, found {}",
                            other.describe()
                        ));
                    }
                };
                self.expect(Tok::Semi)?;
                self.finish_stmt(id);
                Ok(Stmt {
                    id,
                    kind: StmtKind::Assign {
                        target: target.unwrap_or(VarId(0)),
                        value,
                    },
                })
            }
            Tok::LBrace => self.fail("syntax error: nested blocks are only allowed as branch or loop bodies"),
            other => self.fail(format!(
                "syntax error: expected a statement, found {}",
                other.describe()
            )),
        }
    }

    fn require_int(&mut self, ty: Ty, span: Span) {
        if ty == Some(ScalarType::Bool) {
            self.error("type mismatch: expected int, found bool", span);
        }
    }

    fn rhs(&mut self, ty: ScalarType) -> PResult<Rhs> {
        self.rhs_typed(Some(ty))
    }

    fn rhs_typed(&mut self, target: Ty) -> PResult<Rhs> {
        if self.peek() == &Tok::KwInput {
            let span = self.bump().span;
            self.expect(Tok::LParen)?;
            self.expect(Tok::RParen)?;
            if target == Some(ScalarType::Bool) {
                self.error("type mismatch: `input()` yields int, target is bool", span);
            }
            if self.peek() != &Tok::Semi {
                return self.fail("`input()` may only appear as the entire right-hand side of a declaration or assignment");
            }
            return Ok(Rhs::Input);
        }
        let (e, ty, span) = self.expr()?;
        if let (Some(want), Some(got)) = (target, ty) {
            if want != got {
                self.error(
                    format!("type mismatch: expected {want}, found {got}"),
                    span,
                );
            }
        }
        Ok(Rhs::Expr(e))
    }

    fn condition(&mut self) -> PResult<Expr> {
        let (e, ty, span) = self.expr()?;
        if ty == Some(ScalarType::Int32) {
            self.error("type mismatch: condition must be bool, found int", span);
        }
        Ok(e)
    }

    fn expr(&mut self) -> PResult<(Expr, Ty, Span)> {
        self.enter()?;
        let start = self.peek_span();
        let r = self.binary(0);
        self.leave();
        let (e, ty) = r?;
        let span = Span {
            end: self.prev_end(),
            ..start
        };
        Ok((e, ty, span))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<(Expr, Ty)> {
        let mut lhs = self.unary()?;
        loop {
            let Some((op, prec)) = binary_op(self.peek()) else {
                break;
            };
            if prec < min_prec {
                break;
            }
            let op_span = self.bump().span;
            self.enter()?;
            let rhs = self.binary(prec + 1);
            self.leave();
            let rhs = rhs?;
            let ty = self.check_binary(op, lhs.1, rhs.1, op_span);
            lhs = (Expr::Binary(op, Box::new(lhs.0), Box::new(rhs.0)), ty);
        }
        Ok(lhs)
    }

    fn check_binary(&mut self, op: BinaryOp, l: Ty, r: Ty, span: Span) -> Ty {
        use BinaryOp::*;
        let (want, result) = match op {
            Add | Sub | Mul | Div | Rem => (Some(ScalarType::Int32), ScalarType::Int32),
            Lt | Le | Gt | Ge => (Some(ScalarType::Int32), ScalarType::Bool),
            And | Or => (Some(ScalarType::Bool), ScalarType::Bool),
            Eq | Ne => (None, ScalarType::Bool),
        };
        let ok = match (want, l, r) {
            (_, None, _) | (_, _, None) => true,
            (Some(w), Some(a), Some(b)) => a == w && b == w,
            (None, Some(a), Some(b)) => a == b,
        };
        if !ok {
            self.error(
                format!(
                    "type mismatch: operands of `{}` are {} and {}",
                    op.symbol(),
                    l.map_or("?".into(), |t| t.to_string()),
                    r.map_or("?".into(), |t| t.to_string())
                ),
                span,
            );
        }
        Some(result)
    }

    fn unary(&mut self) -> PResult<(Expr, Ty)> {
        match self.peek() {
            Tok::Minus => {
                let span = self.bump().span;
                if let Tok::Int(v) = *self.peek() {
                    // fold directly so that -2147483648 is expressible
                    let lit_span = self.bump().span;
                    let Ok(v) = i32::try_from(-(v as i64)) else {
                        self.error("integer literal does not fit in 32 bits", lit_span);
                        return Ok((Expr::Int(0), Some(ScalarType::Int32)));
                    };
                    return Ok((Expr::Int(v), Some(ScalarType::Int32)));
                }
                self.enter()?;
                let inner = self.unary();
                self.leave();
                let (e, ty) = inner?;
                self.require_int(ty, span);
                let e = match e {
                    Expr::Int(v) => Expr::Int(v.wrapping_neg()),
                    e => Expr::Unary(UnaryOp::Neg, Box::new(e)),
                };
                Ok((e, Some(ScalarType::Int32)))
            }
            Tok::Bang => {
                let span = self.bump().span;
                self.enter()?;
                let inner = self.unary();
                self.leave();
                let (e, ty) = inner?;
                if ty == Some(ScalarType::Int32) {
                    self.error("type mismatch: `!` expects bool, found int", span);
                }
                Ok((Expr::Unary(UnaryOp::Not, Box::new(e)), Some(ScalarType::Bool)))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<(Expr, Ty)> {
        let tok = self.toks[self.pos].clone();
        if !matches!(tok.tok, Tok::KwInput | Tok::Eof) {
            self.bump();
        }
        match tok.tok {
            Tok::Int(v) => match i32::try_from(v) {
                Ok(v) => Ok((Expr::Int(v), Some(ScalarType::Int32))),
                Err(_) => {
                    self.error("integer literal does not fit in 32 bits", tok.span);
                    Ok((Expr::Int(0), Some(ScalarType::Int32)))
                }
            },
            Tok::KwTrue => Ok((Expr::Bool(true), Some(ScalarType::Bool))),
            Tok::KwFalse => Ok((Expr::Bool(false), Some(ScalarType::Bool))),
            Tok::Ident(name) => match self.lookup(&name, tok.span) {
                Some(id) => Ok((Expr::Var(id), Some(self.vars[id.index()].ty))),
                None => Ok((Expr::Int(0), None)),
            },
            Tok::LParen => {
                let (e, ty, _) = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok((e, ty))
            }
            Tok::KwInput => {
                self.fail("`input()` may only appear as the entire right-hand side of a declaration or assignment")
            }
            Tok::Eof => self.fail("syntax error: expected an expression, found end of input"),
            other => {
                self.pos -= 1;
                self.fail(format!(
                    "syntax error: expected an expression, found {}",
                    other.describe()
                ))
            }
        }
    }

    fn check_output_constructs(&mut self, program: &Program, fn_span: Span) {
        let mut returns = Vec::new();
        let mut outputs = Vec::new();
        program.walk(&mut |s| match s.kind {
            StmtKind::Return(_) => returns.push(s.id),
            StmtKind::Output(_) => outputs.push(s.id),
            _ => {}
        });
        match program.return_type {
            ReturnType::Int => {
                for id in outputs {
                    self.error(
                        "`output` is not allowed in a function returning int; use `return`",
                        program.span(id),
                    );
                }
                if !guarantees(&program.body, &|k| matches!(k, StmtKind::Return(_))) {
                    self.error(
                        format!(
                            "missing output construct: `{}` can reach its end without `return`",
                            program.name
                        ),
                        fn_span,
                    );
                }
            }
            ReturnType::Void => {
                for id in returns {
                    self.error(
                        "`return` is not allowed in a void function; use `output`",
                        program.span(id),
                    );
                }
                if !guarantees(&program.body, &|k| matches!(k, StmtKind::Output(_))) {
                    self.error(
                        format!(
                            "missing output construct: some terminating path of `{}` emits no `output`",
                            program.name
                        ),
                        fn_span,
                    );
                }
            }
        }
    }
}

fn is_assign_op(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Assign
            | Tok::PlusAssign
            | Tok::MinusAssign
            | Tok::StarAssign
            | Tok::PlusPlus
            | Tok::MinusMinus
    )
}

fn compound(target: Option<VarId>, op: BinaryOp, rhs: Expr) -> Rhs {
    let lhs = target.map_or(Expr::Int(0), Expr::Var);
    Rhs::Expr(Expr::Binary(op, Box::new(lhs), Box::new(rhs)))
}

fn binary_op(t: &Tok) -> Option<(BinaryOp, u8)> {
    Some(match t {
        Tok::OrOr => (BinaryOp::Or, 1),
        Tok::AndAnd => (BinaryOp::And, 2),
        Tok::EqEq => (BinaryOp::Eq, 3),
        Tok::NotEq => (BinaryOp::Ne, 3),
        Tok::Lt => (BinaryOp::Lt, 4),
        Tok::Le => (BinaryOp::Le, 4),
        Tok::Gt => (BinaryOp::Gt, 4),
        Tok::Ge => (BinaryOp::Ge, 4),
        Tok::Plus => (BinaryOp::Add, 5),
        Tok::Minus => (BinaryOp::Sub, 5),
        Tok::Star => (BinaryOp::Mul, 6),
        Tok::Slash => (BinaryOp::Div, 6),
        Tok::Percent => (BinaryOp::Rem, 6),
        _ => return None,
    })
}

fn is_infinite_loop(s: &Stmt) -> bool {
    matches!(
        &s.kind,
        StmtKind::While {
            cond: Expr::Bool(true),
            ..
        }
    )
}

/// True when no terminating path can leave the statement normally.
fn never_falls_through(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::If {
            then_branch,
            else_branch,
            ..
        } => {
            then_branch.last().is_some_and(never_falls_through)
                && else_branch.last().is_some_and(never_falls_through)
        }
        _ => is_infinite_loop(s),
    }
}

/// Every terminating path through `stmts` executes a statement satisfying `pred`.
fn guarantees(stmts: &[Stmt], pred: &dyn Fn(&StmtKind) -> bool) -> bool {
    stmts.iter().any(|s| {
        pred(&s.kind)
            || is_infinite_loop(s)
            || match &s.kind {
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => guarantees(then_branch, pred) && guarantees(else_branch, pred),
                _ => false,
            }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(src: &str) -> Vec<String> {
        parse(src).unwrap_err().into_iter().map(|d| d.message).collect()
    }

    #[test]
    fn minimal_program() {
        let p = parse("int f() { return 0; }").unwrap();
        assert_eq!(p.vars.len(), 0);
        assert_eq!(p.stmt_count(), 1);
        assert!(matches!(p.body[0].kind, StmtKind::Return(Expr::Int(0))));
    }

    #[test]
    fn undeclared_assignment_is_rejected() {
        let errs = errors("int f(int x) { y = 1; }");
        assert!(errs.iter().any(|e| e.contains("use before declaration")), "{errs:?}");
    }

    #[test]
    fn out_of_scope_use_is_rejected() {
        let errs = errors("int f(int x) { if (x > 0) { int t = 1; } return t; }");
        assert!(errs.iter().any(|e| e.contains("not in scope")), "{errs:?}");
    }

    #[test]
    fn self_referential_initializer_is_rejected() {
        let errs = errors("int f() { int a = a; return a; }");
        assert!(errs[0].contains("use before declaration"));
    }

    #[test]
    fn duplicates_and_shadowing_are_rejected() {
        assert!(errors("int f(int x) { int x = 1; return x; }")[0].contains("duplicate"));
        let errs = errors("int f() { int a = 1; if (a > 0) { int a = 2; } return a; }");
        assert!(errs[0].contains("duplicate"));
    }

    #[test]
    fn type_mismatches() {
        assert!(errors("int f(int x) { if (x) { x = 1; } return x; }")[0].contains("type mismatch"));
        assert!(errors("int f() { bool b = 3; return 0; }")[0].contains("type mismatch"));
        assert!(errors("int f(bool b) { return b; }")[0].contains("type mismatch"));
    }

    #[test]
    fn missing_output_construct() {
        assert!(errors("int f(int x) { x = 1; }")[0].contains("missing output construct"));
        assert!(errors("void g(int x) { if (x > 0) { output x; } }")[0]
            .contains("missing output construct"));
        assert!(parse("void g(int x) { while (true) { output x; } }").is_ok());
    }

    #[test]
    fn input_only_as_whole_rhs() {
        assert!(parse("void g() { while (true) { int a = input(); output a; } }").is_ok());
        let errs = errors("void g() { while (true) { int a = input() + 1; output a; } }");
        assert!(errs[0].contains("input()"));
    }

    #[test]
    fn output_can_be_a_variable_name() {
        let p = parse("int f() { int output = 4; output = output + 1; return output; }").unwrap();
        assert_eq!(p.vars[0].name, "output");
        let p = parse("void g() { int output = 4; output output; }").unwrap();
        assert!(matches!(p.body[1].kind, StmtKind::Output(_)));
    }

    #[test]
    fn sugar_desugars() {
        let p = parse("int f() { int c = 0; c++; c += 2; c -= 1; c *= 3; c--; return c; }").unwrap();
        let StmtKind::Assign { value: Rhs::Expr(Expr::Binary(op, _, _)), .. } = &p.body[1].kind else {
            panic!()
        };
        assert_eq!(*op, BinaryOp::Add);
    }

    #[test]
    fn min_literal() {
        let p = parse("int f() { return -2147483648; }").unwrap();
        assert!(matches!(p.body[0].kind, StmtKind::Return(Expr::Int(i32::MIN))));
        assert!(parse("int f() { return 2147483648; }").is_err());
    }

    #[test]
    fn unreachable_after_return() {
        assert!(errors("int f() { return 1; return 2; }")[0].contains("unreachable"));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!("int f() {{ return {}1{}; }}", "(".repeat(5000), ")".repeat(5000));
        assert!(errors(&src).iter().any(|e| e.contains("nesting too deep")));
    }

    #[test]
    fn statement_ids_are_preorder() {
        let p = parse(
            "int f(int x) { int a = 0; while (a < 3) { if (x > 1) { a = a + 2; } else { a++; } } return a; }",
        )
        .unwrap();
        let mut ids = Vec::new();
        p.walk(&mut |s| ids.push(s.id.0));
        assert_eq!(ids, (0..p.stmt_count() as u32).collect::<Vec<_>>());
    }
}
