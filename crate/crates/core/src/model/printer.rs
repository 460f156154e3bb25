use std::fmt::{self, Write as _};

use crate::data::{Expr, IndexStyle};

use super::{Decl, ModelSource, ProcessTerm, SortDef};

// Term precedence, loosest first.
const P_CHOICE: u8 = 0;
const P_PREFIX: u8 = 1;
const P_SEQ: u8 = 2;
const P_UNIT: u8 = 3;

fn prec(t: &ProcessTerm) -> u8 {
    match t {
        ProcessTerm::Choice(..) => P_CHOICE,
        ProcessTerm::Cond { .. } | ProcessTerm::Sum { .. } => P_PREFIX,
        ProcessTerm::Seq(..) => P_SEQ,
        _ => P_UNIT,
    }
}

/// True when the rightmost part of `t` is a conditional without an else
/// branch, which would capture a following `<>`.
fn ends_open(t: &ProcessTerm) -> bool {
    match t {
        ProcessTerm::Cond { otherwise: None, .. } => true,
        ProcessTerm::Cond { otherwise: Some(e), .. } => ends_open(e),
        ProcessTerm::Seq(_, r) => ends_open(r),
        ProcessTerm::Sum { body, .. } => ends_open(body),
        _ => false,
    }
}

fn expr(e: &Expr) -> impl fmt::Display + '_ {
    e.display(IndexStyle::Bracket)
}

fn is_atomic(e: &Expr) -> bool {
    matches!(e, Expr::Lit(_) | Expr::Var(_) | Expr::ListLit(_) | Expr::Index(..) | Expr::Apply(..) | Expr::If(..))
        && !matches!(e, Expr::Lit(crate::data::Value::Rat(r)) if *r < 0)
}

fn write_args(out: &mut String, name: &str, args: &[Expr]) {
    out.push_str(name);
    if !args.is_empty() {
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{}", expr(a));
        }
        out.push(')');
    }
}

fn write_term(out: &mut String, t: &ProcessTerm, ctx: u8, indent: usize) {
    let paren = prec(t) < ctx;
    if paren {
        out.push('(');
    }
    match t {
        ProcessTerm::Action { name, args } | ProcessTerm::Call { name, args } => write_args(out, name, args),
        ProcessTerm::Skip => out.push_str("skip"),
        ProcessTerm::Done => out.push_str("done"),
        ProcessTerm::Assign { var, value } => {
            if is_atomic(value) {
                let _ = write!(out, "{var} := {}", expr(value));
            } else {
                let _ = write!(out, "{var} := ({})", expr(value));
            }
        }
        ProcessTerm::Seq(a, b) => {
            write_term(out, a, P_UNIT, indent);
            out.push_str(" . ");
            write_term(out, b, P_PREFIX, indent);
        }
        ProcessTerm::Choice(a, b) => {
            write_term(out, a, P_CHOICE, indent);
            out.push('\n');
            out.push_str(&" ".repeat(indent));
            out.push_str("+ ");
            write_term(out, b, P_PREFIX, indent);
        }
        ProcessTerm::Cond { guard, then, otherwise } => {
            let _ = write!(out, "({}) -> ", expr(guard));
            match otherwise {
                Some(e) => {
                    if ends_open(then) {
                        write_term(out, then, P_UNIT, indent + 2);
                    } else {
                        write_term(out, then, P_PREFIX, indent + 2);
                    }
                    out.push_str(" <> ");
                    write_term(out, e, P_PREFIX, indent + 2);
                }
                None => write_term(out, then, P_PREFIX, indent + 2),
            }
        }
        ProcessTerm::Sum { var, sort, body } => {
            let _ = write!(out, "sum {var}: {sort} . ");
            write_term(out, body, P_PREFIX, indent + 2);
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, P_CHOICE, 4);
        f.write_str(&s)
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Sort { name, def: SortDef::Struct(ctors) } => {
                write!(f, "sort {name} = struct {};", ctors.join(" | "))
            }
            Decl::Sort { name, def: SortDef::Alias(s) } => write!(f, "sort {name} = {s};"),
            Decl::Act { names, params } => {
                write!(f, "act {}", names.join(", "))?;
                if !params.is_empty() {
                    let ps: Vec<String> = params.iter().map(|s| s.to_string()).collect();
                    write!(f, ": {}", ps.join(" # "))?;
                }
                f.write_str(";")
            }
            Decl::Glob { name, sort, init } => write!(f, "glob {name}: {sort} = {};", expr(init)),
            Decl::Const { name, sort, value } => write!(f, "const {name}: {sort} = {};", expr(value)),
            Decl::Proc { name, params, body } => {
                f.write_str("proc ")?;
                f.write_str(name)?;
                if !params.is_empty() {
                    let ps: Vec<String> = params.iter().map(|(n, s)| format!("{n}: {s}")).collect();
                    write!(f, "({})", ps.join(", "))?;
                }
                write!(f, " =\n    {body};")
            }
            Decl::Init { name, args } => {
                let mut s = String::from("init ");
                write_args(&mut s, name, args);
                write!(f, "{s};")
            }
        }
    }
}

impl fmt::Display for ModelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}
