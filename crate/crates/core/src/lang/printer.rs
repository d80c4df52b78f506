use std::fmt::Write;

use super::{Expr, Program, ReturnType, Rhs, Stmt, StmtKind, UnaryOp, VarId, VarKind};

/// Renders a program in canonical CtrlC syntax. Sugar (`++`, `+=`) comes back
/// desugared; the output re-parses to a structurally identical program.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    let ret = match p.return_type {
        ReturnType::Int => "int",
        ReturnType::Void => "void",
    };
    let params: Vec<String> = p
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Param)
        .map(|v| format!("{} {}", v.ty, v.name))
        .collect();
    let _ = writeln!(out, "{ret} {}({}) {{", p.name, params.join(", "));
    let name = |v: VarId| p.var_name(v).to_string();
    print_block(&mut out, &p.body, 1, &name, &|v| p.var(v).ty.to_string());
    out.push_str("}\n");
    out
}

pub(crate) fn print_block(
    out: &mut String,
    stmts: &[Stmt],
    depth: usize,
    name: &dyn Fn(VarId) -> String,
    ty: &dyn Fn(VarId) -> String,
) {
    for s in stmts {
        print_stmt(out, s, depth, name, ty);
    }
}

fn print_stmt(
    out: &mut String,
    s: &Stmt,
    depth: usize,
    name: &dyn Fn(VarId) -> String,
    ty: &dyn Fn(VarId) -> String,
) {
    let pad = "    ".repeat(depth);
    match &s.kind {
        StmtKind::Decl { var, init } => {
            let _ = writeln!(out, "{pad}{} {} = {};", ty(*var), name(*var), rhs(init, name));
        }
        StmtKind::Assign { target, value } => {
            let _ = writeln!(out, "{pad}{} = {};", name(*target), rhs(value, name));
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = writeln!(out, "{pad}if ({}) {{", print_expr(cond, name));
            print_block(out, then_branch, depth + 1, name, ty);
            if else_branch.is_empty() {
                let _ = writeln!(out, "{pad}}}");
            } else {
                let _ = writeln!(out, "{pad}}} else {{");
                print_block(out, else_branch, depth + 1, name, ty);
                let _ = writeln!(out, "{pad}}}");
            }
        }
        StmtKind::While { cond, body } => {
            let _ = writeln!(out, "{pad}while ({}) {{", print_expr(cond, name));
            print_block(out, body, depth + 1, name, ty);
            let _ = writeln!(out, "{pad}}}");
        }
        StmtKind::Output(e) => {
            let _ = writeln!(out, "{pad}output {};", print_expr(e, name));
        }
        StmtKind::Return(e) => {
            let _ = writeln!(out, "{pad}return {};", print_expr(e, name));
        }
        StmtKind::Print(e) => {
            let _ = writeln!(out, "{pad}print {};", print_expr(e, name));
        }
    }
}

fn rhs(r: &Rhs, name: &dyn Fn(VarId) -> String) -> String {
    match r {
        Rhs::Expr(e) => print_expr(e, name),
        Rhs::Input => "input()".to_string(),
    }
}

/// Renders an expression with every compound subexpression parenthesised.
pub fn print_expr(e: &Expr, name: &dyn Fn(VarId) -> String) -> String {
    fn go(e: &Expr, name: &dyn Fn(VarId) -> String, top: bool, out: &mut String) {
        match e {
            Expr::Int(v) if *v < 0 && !top => {
                let _ = write!(out, "({v})");
            }
            Expr::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Expr::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Expr::Var(v) => out.push_str(&name(*v)),
            Expr::Unary(op, inner) => {
                out.push(match op {
                    UnaryOp::Neg => '-',
                    UnaryOp::Not => '!',
                });
                if matches!(**inner, Expr::Unary(..)) {
                    out.push('(');
                    go(inner, name, false, out);
                    out.push(')');
                } else {
                    go(inner, name, false, out);
                }
            }
            Expr::Binary(op, l, r) => {
                if !top {
                    out.push('(');
                }
                go(l, name, false, out);
                let _ = write!(out, " {} ", op.symbol());
                go(r, name, false, out);
                if !top {
                    out.push(')');
                }
            }
        }
    }
    let mut out = String::new();
    go(e, name, true, &mut out);
    out
}
