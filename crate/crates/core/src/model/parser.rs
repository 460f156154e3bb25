use std::collections::HashSet;

use crate::lexer::{SyntaxError, Tok};
use crate::parse::{Cursor, ExprMode};

use super::{Decl, ModelSource, ProcessTerm, SortDef};

const DECL_KEYWORDS: [&str; 6] = ["sort", "act", "glob", "const", "proc", "init"];

/// Parses a model. Names used as process terms are classified as actions when
/// declared by an `act` clause and as process calls otherwise.
pub fn parse_model(src: &str) -> Result<ModelSource, SyntaxError> {
    let mut c = Cursor::new(src)?;
    let mut decls = Vec::new();
    let mut init_seen = false;
    while *c.peek() != Tok::Eof {
        let kw = match c.peek() {
            Tok::Ident(k) if DECL_KEYWORDS.contains(&k.as_str()) => k.clone(),
            _ => return Err(c.unexpected(&DECL_KEYWORDS)),
        };
        let kw_pos = c.pos();
        c.bump();
        loop {
            let d = decl(&mut c, &kw)?;
            if matches!(d, Decl::Init { .. }) {
                if init_seen {
                    return Err(SyntaxError { pos: kw_pos, message: "duplicate init declaration".into(), expected: vec![] });
                }
                init_seen = true;
            }
            decls.push(d);
            if at_decl_boundary(&c) || kw == "init" {
                break;
            }
        }
    }
    if !init_seen {
        return Err(c.error("missing init declaration", &["init"]));
    }
    let actions: HashSet<String> = decls
        .iter()
        .filter_map(|d| match d {
            Decl::Act { names, .. } => Some(names.clone()),
            _ => None,
        })
        .flatten()
        .collect();
    for d in &mut decls {
        if let Decl::Proc { body, .. } = d {
            classify(body, &actions);
        }
    }
    Ok(ModelSource { decls })
}

fn at_decl_boundary(c: &Cursor) -> bool {
    match c.peek() {
        Tok::Eof => true,
        Tok::Ident(k) => DECL_KEYWORDS.contains(&k.as_str()),
        _ => false,
    }
}

fn classify(t: &mut ProcessTerm, actions: &HashSet<String>) {
    match t {
        ProcessTerm::Call { name, args } if actions.contains(name) => {
            *t = ProcessTerm::Action { name: std::mem::take(name), args: std::mem::take(args) };
        }
        ProcessTerm::Seq(a, b) | ProcessTerm::Choice(a, b) => {
            classify(a, actions);
            classify(b, actions);
        }
        ProcessTerm::Cond { then, otherwise, .. } => {
            classify(then, actions);
            if let Some(e) = otherwise {
                classify(e, actions);
            }
        }
        ProcessTerm::Sum { body, .. } => classify(body, actions),
        _ => {}
    }
}

fn decl(c: &mut Cursor, kw: &str) -> Result<Decl, SyntaxError> {
    let d = match kw {
        "sort" => {
            let name = c.ident()?;
            c.expect(Tok::Eq)?;
            let def = if c.eat_keyword("struct") {
                let mut ctors = vec![c.ident()?];
                while c.eat(&Tok::Bar) {
                    ctors.push(c.ident()?);
                }
                SortDef::Struct(ctors)
            } else {
                SortDef::Alias(c.sort()?)
            };
            Decl::Sort { name, def }
        }
        "act" => {
            let mut names = vec![c.ident()?];
            while c.eat(&Tok::Comma) {
                names.push(c.ident()?);
            }
            let mut params = Vec::new();
            if c.eat(&Tok::Colon) {
                params.push(c.sort()?);
                while c.eat(&Tok::Hash) {
                    params.push(c.sort()?);
                }
            }
            Decl::Act { names, params }
        }
        "glob" | "const" => {
            let name = c.ident()?;
            c.expect(Tok::Colon)?;
            let sort = c.sort()?;
            c.expect(Tok::Eq)?;
            let e = c.expr(ExprMode::FULL)?;
            if kw == "glob" {
                Decl::Glob { name, sort, init: e }
            } else {
                Decl::Const { name, sort, value: e }
            }
        }
        "proc" => {
            let name = c.ident()?;
            let mut params = Vec::new();
            if c.eat(&Tok::LParen) {
                if *c.peek() != Tok::RParen {
                    params = c.binders()?;
                }
                c.expect(Tok::RParen)?;
            }
            c.expect(Tok::Eq)?;
            let body = choice(c)?;
            Decl::Proc { name, params, body }
        }
        "init" => {
            let name = c.ident()?;
            let args = if c.eat(&Tok::LParen) { c.expr_list(Tok::RParen)? } else { Vec::new() };
            Decl::Init { name, args }
        }
        _ => unreachable!("not a declaration keyword"),
    };
    c.expect(Tok::Semi)?;
    Ok(d)
}

fn choice(c: &mut Cursor) -> Result<ProcessTerm, SyntaxError> {
    let mut lhs = prefixed(c)?;
    while c.eat(&Tok::Plus) {
        let rhs = prefixed(c)?;
        lhs = ProcessTerm::choice(lhs, rhs);
    }
    Ok(lhs)
}

/// A guard is an expression followed by `->`; anything else is reparsed as a
/// process term.
fn try_guard(c: &mut Cursor) -> Option<crate::data::Expr> {
    let mark = c.mark();
    match c.expr(ExprMode::PROCESS) {
        Ok(g) if c.eat(&Tok::Arrow) => Some(g),
        _ => {
            c.reset(mark);
            None
        }
    }
}

fn prefixed(c: &mut Cursor) -> Result<ProcessTerm, SyntaxError> {
    if c.eat_keyword("sum") {
        let var = c.ident()?;
        c.expect(Tok::Colon)?;
        let sort = c.sort()?;
        c.expect(Tok::Dot)?;
        let body = prefixed(c)?;
        return Ok(ProcessTerm::Sum { var, sort, body: Box::new(body) });
    }
    if let Some(guard) = try_guard(c) {
        let then = prefixed(c)?;
        let otherwise = if c.eat(&Tok::Diamond) { Some(Box::new(prefixed(c)?)) } else { None };
        return Ok(ProcessTerm::Cond { guard, then: Box::new(then), otherwise });
    }
    let head = unit(c)?;
    if c.eat(&Tok::Dot) {
        let rest = prefixed(c)?;
        return Ok(ProcessTerm::seq(head, rest));
    }
    Ok(head)
}

fn unit(c: &mut Cursor) -> Result<ProcessTerm, SyntaxError> {
    if c.eat(&Tok::LParen) {
        let t = choice(c)?;
        c.expect(Tok::RParen)?;
        return Ok(t);
    }
    if c.eat_keyword("skip") {
        return Ok(ProcessTerm::Skip);
    }
    if c.eat_keyword("done") {
        return Ok(ProcessTerm::Done);
    }
    if !matches!(c.peek(), Tok::Ident(_)) {
        return Err(c.unexpected(&["process term"]));
    }
    let name = c.ident()?;
    if c.eat(&Tok::Assign) {
        let value = c.expr(ExprMode::PROCESS)?;
        return Ok(ProcessTerm::Assign { var: name, value });
    }
    let args = if c.eat(&Tok::LParen) { c.expr_list(Tok::RParen)? } else { Vec::new() };
    Ok(ProcessTerm::Call { name, args })
}
