use crate::lexer::{SyntaxError, Tok};
use crate::parse::{Cursor, ExprMode};

use super::ast::{ActionPattern, Formula, NamedPattern, PredDef, PropertyFile, Regular};

/// Parses a property file without consulting any declarations.
pub fn parse_property(src: &str) -> Result<PropertyFile, SyntaxError> {
    let mut c = Cursor::new(src)?;
    let mut preds = Vec::new();
    while c.eat_keyword("pred") {
        let name = c.ident()?;
        c.expect(Tok::LParen)?;
        let params = if *c.peek() == Tok::RParen { Vec::new() } else { c.binders()? };
        c.expect(Tok::RParen)?;
        c.expect(Tok::Eq)?;
        let body = c.expr(ExprMode::FULL)?;
        c.expect(Tok::Semi)?;
        preds.push(PredDef { name, params, body });
    }
    let formula = formula(&mut c)?;
    if *c.peek() != Tok::Eof {
        return Err(c.unexpected(&["end of formula"]));
    }
    Ok(PropertyFile { preds, formula })
}

/// Parses a single formula.
pub fn parse_formula_text(src: &str) -> Result<Formula, SyntaxError> {
    let mut c = Cursor::new(src)?;
    let f = formula(&mut c)?;
    if *c.peek() != Tok::Eof {
        return Err(c.unexpected(&["end of formula"]));
    }
    Ok(f)
}

fn formula(c: &mut Cursor) -> Result<Formula, SyntaxError> {
    let lhs = or(c)?;
    if c.eat(&Tok::Implies) {
        let rhs = formula(c)?;
        return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
    }
    Ok(lhs)
}

fn or(c: &mut Cursor) -> Result<Formula, SyntaxError> {
    let mut lhs = and(c)?;
    while c.eat(&Tok::OrOr) {
        let rhs = and(c)?;
        lhs = Formula::or(lhs, rhs);
    }
    Ok(lhs)
}

fn and(c: &mut Cursor) -> Result<Formula, SyntaxError> {
    let mut lhs = unary(c)?;
    while c.eat(&Tok::AndAnd) {
        let rhs = unary(c)?;
        lhs = Formula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn unary(c: &mut Cursor) -> Result<Formula, SyntaxError> {
    if c.eat(&Tok::Bang) {
        return Ok(Formula::Not(Box::new(unary(c)?)));
    }
    if c.eat(&Tok::LBracket) {
        let r = regular(c)?;
        c.expect(Tok::RBracket)?;
        return Ok(Formula::boxed(r, unary(c)?));
    }
    if c.eat(&Tok::Lt) {
        let r = regular(c)?;
        c.expect(Tok::Gt)?;
        return Ok(Formula::diamond(r, unary(c)?));
    }
    for (kw, forall) in [("forall", true), ("exists", false)] {
        if c.eat_keyword(kw) {
            let vars = c.binders()?;
            c.expect(Tok::Dot)?;
            let body = Box::new(formula(c)?);
            return Ok(if forall { Formula::Forall(vars, body) } else { Formula::Exists(vars, body) });
        }
    }
    for (kw, mu) in [("mu", true), ("nu", false)] {
        if c.eat_keyword(kw) {
            let x = c.ident()?;
            c.expect(Tok::Dot)?;
            let body = Box::new(formula(c)?);
            return Ok(if mu { Formula::Mu(x, body) } else { Formula::Nu(x, body) });
        }
    }
    if c.eat_keyword("true") {
        return Ok(Formula::True);
    }
    if c.eat_keyword("false") {
        return Ok(Formula::False);
    }
    if c.eat_keyword("val") {
        c.expect(Tok::LParen)?;
        let e = c.expr(ExprMode::FULL)?;
        c.expect(Tok::RParen)?;
        return Ok(Formula::Val(e));
    }
    if c.eat(&Tok::LParen) {
        let f = formula(c)?;
        c.expect(Tok::RParen)?;
        return Ok(f);
    }
    match c.peek() {
        Tok::Ident(_) => Ok(Formula::Var(c.ident()?)),
        _ => Err(c.unexpected(&["formula"])),
    }
}

fn regular(c: &mut Cursor) -> Result<Regular, SyntaxError> {
    let mut lhs = concat(c)?;
    while c.eat(&Tok::Plus) {
        let rhs = concat(c)?;
        lhs = Regular::Union(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn concat(c: &mut Cursor) -> Result<Regular, SyntaxError> {
    let mut lhs = star(c)?;
    while c.eat(&Tok::Dot) {
        let rhs = star(c)?;
        lhs = Regular::Concat(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn star(c: &mut Cursor) -> Result<Regular, SyntaxError> {
    let mut r = if c.eat(&Tok::LParen) {
        let r = regular(c)?;
        c.expect(Tok::RParen)?;
        r
    } else {
        Regular::Atom(pattern(c)?)
    };
    while c.eat(&Tok::Star) {
        r = Regular::Star(Box::new(r));
    }
    Ok(r)
}

fn pattern(c: &mut Cursor) -> Result<ActionPattern, SyntaxError> {
    let mut alts = vec![pattern_prim(c)?];
    while c.eat(&Tok::OrOr) {
        alts.push(pattern_prim(c)?);
    }
    Ok(if alts.len() == 1 { alts.pop().expect("one element") } else { ActionPattern::Union(alts) })
}

fn pattern_prim(c: &mut Cursor) -> Result<ActionPattern, SyntaxError> {
    if c.eat_keyword("true") {
        return Ok(ActionPattern::Any);
    }
    if c.eat(&Tok::Bang) {
        if c.eat(&Tok::LParen) {
            let mut names = vec![named(c)?];
            while c.eat(&Tok::OrOr) {
                names.push(named(c)?);
            }
            c.expect(Tok::RParen)?;
            return Ok(ActionPattern::Not(names));
        }
        return Ok(ActionPattern::Not(vec![named(c)?]));
    }
    if !matches!(c.peek(), Tok::Ident(_)) {
        return Err(c.unexpected(&["action pattern"]));
    }
    Ok(ActionPattern::Named(named(c)?))
}

fn named(c: &mut Cursor) -> Result<NamedPattern, SyntaxError> {
    let name = c.ident()?;
    let args = if c.eat(&Tok::LParen) { Some(c.expr_list(Tok::RParen)?) } else { None };
    Ok(NamedPattern { name, args })
}
