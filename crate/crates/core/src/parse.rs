//! Token cursor plus the expression and sort grammar shared by both
//! languages.

use crate::data::{rational, BinOp, Expr, Quantifier, Sort, UnOp, Value};
use crate::lexer::{tokenize, Pos, SyntaxError, Tok, Token};

pub(crate) struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

/// Operators disabled at the top level of an expression embedded in a
/// process term, where `.` and `+` are process operators. Both are available
/// again inside brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ExprMode {
    pub dot_index: bool,
    pub plus: bool,
}

impl ExprMode {
    pub const FULL: ExprMode = ExprMode { dot_index: true, plus: true };
    pub const PROCESS: ExprMode = ExprMode { dot_index: false, plus: false };
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Self { toks: tokenize(src)?, at: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    pub fn mark(&self) -> usize {
        self.at
    }

    pub fn reset(&mut self, mark: usize) {
        self.at = mark;
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>, expected: &[&str]) -> SyntaxError {
        SyntaxError {
            pos: self.pos(),
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn unexpected(&self, expected: &[&str]) -> SyntaxError {
        self.error(format!("unexpected {}", self.peek()), expected)
    }

    pub fn expect(&mut self, t: Tok) -> Result<(), SyntaxError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&[&t.to_string()]))
        }
    }

    pub fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    pub fn num(&mut self) -> Result<u64, SyntaxError> {
        match *self.peek() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected(&["number"])),
        }
    }

    // -----------------------------------------------------------------------
    // Sorts

    pub fn sort(&mut self) -> Result<Sort, SyntaxError> {
        let name = self.ident()?;
        Ok(match name.as_str() {
            "Bool" => Sort::Bool,
            "Nat" => {
                if self.eat(&Tok::LParen) {
                    let max = self.num()?;
                    self.expect(Tok::RParen)?;
                    Sort::Nat { max: Some(max) }
                } else {
                    Sort::nat()
                }
            }
            "Rat" => {
                if self.eat(&Tok::LBrace) {
                    let mut values = Vec::new();
                    if *self.peek() != Tok::RBrace {
                        loop {
                            match self.signed_number()? {
                                Value::Rat(r) => values.push(r),
                                Value::Nat(n) => values.push(n as i64 * 100),
                                _ => unreachable!(),
                            }
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RBrace)?;
                    Sort::Rat { values: Some(values) }
                } else {
                    Sort::Rat { values: None }
                }
            }
            "List" => {
                self.expect(Tok::LParen)?;
                let elem = self.sort()?;
                let len = if self.eat(&Tok::Comma) { Some(self.num()? as usize) } else { None };
                self.expect(Tok::RParen)?;
                Sort::List { elem: Box::new(elem), len }
            }
            _ => Sort::Named(name),
        })
    }

    fn signed_number(&mut self) -> Result<Value, SyntaxError> {
        let neg = self.eat(&Tok::Minus);
        let v = self.number_literal()?;
        Ok(match (neg, v) {
            (false, v) => v,
            (true, Value::Rat(r)) => Value::Rat(-r),
            (true, Value::Nat(n)) => Value::Rat(-(n as i64) * 100),
            _ => unreachable!(),
        })
    }

    /// `n` or `n/m`.
    fn number_literal(&mut self) -> Result<Value, SyntaxError> {
        let pos = self.pos();
        let n = self.num()?;
        if *self.peek() == Tok::Slash && matches!(self.peek_at(1), Tok::Num(_)) {
            self.bump();
            let d = self.num()?;
            rational(n as i64, d as i64).map_err(|e| SyntaxError { pos, message: e.to_string(), expected: vec![] })
        } else {
            Ok(Value::Nat(n))
        }
    }

    // -----------------------------------------------------------------------
    // Expressions

    pub fn expr(&mut self, mode: ExprMode) -> Result<Expr, SyntaxError> {
        self.implies(mode)
    }

    fn quantifier(&mut self, q: Quantifier) -> Result<Expr, SyntaxError> {
        let vars = self.binders()?;
        self.expect(Tok::Dot)?;
        let body = self.expr(ExprMode::FULL)?;
        Ok(Expr::Quant(q, vars, Box::new(body)))
    }

    /// `a, b: S, c: T` as used by quantifiers.
    pub fn binders(&mut self) -> Result<Vec<(String, Sort)>, SyntaxError> {
        let mut vars = Vec::new();
        loop {
            let mut names = vec![self.ident()?];
            while self.eat(&Tok::Comma) {
                names.push(self.ident()?);
            }
            self.expect(Tok::Colon)?;
            let sort = self.sort()?;
            vars.extend(names.into_iter().map(|n| (n, sort.clone())));
            if !(*self.peek() == Tok::Comma && matches!(self.peek_at(1), Tok::Ident(_))) {
                break;
            }
            self.bump();
        }
        Ok(vars)
    }

    fn implies(&mut self, mode: ExprMode) -> Result<Expr, SyntaxError> {
        let lhs = self.or(mode)?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies(mode)?;
            return Ok(Expr::bin(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self, mode: ExprMode) -> Result<Expr, SyntaxError> {
        let mut lhs = self.and(mode)?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.and(mode)?;
            lhs = Expr::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self, mode: ExprMode) -> Result<Expr, SyntaxError> {
        let mut lhs = self.equality(mode)?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.equality(mode)?;
            lhs = Expr::bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn equality(&mut self, mode: ExprMode) -> Result<Expr, SyntaxError> {
        let mut lhs = self.comparison(mode)?;
        loop {
            let op = match self.peek() {
                Tok::EqEq => BinOp::Eq,
                Tok::NotEq => BinOp::Ne,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.comparison(mode)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn comparison(&mut self, mode: ExprMode) -> Result<Expr, SyntaxError> {
        let mut lhs = self.additive(mode)?;
        loop {
            let op = match self.peek() {
                Tok::Lt => BinOp::Lt,
                Tok::Le => BinOp::Le,
                Tok::Gt => BinOp::Gt,
                Tok::Ge => BinOp::Ge,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.additive(mode)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn additive(&mut self, mode: ExprMode) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary(mode)?;
        loop {
            let op = match self.peek() {
                Tok::Plus if mode.plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary(mode)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self, mode: ExprMode) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Expr::Unary(UnOp::Not, Box::new(self.unary(mode)?)))
            }
            Tok::Hash => {
                self.bump();
                Ok(Expr::Unary(UnOp::Len, Box::new(self.unary(mode)?)))
            }
            Tok::Minus => {
                self.bump();
                if matches!(self.peek(), Tok::Num(_)) {
                    // Negative numeric literals fold into a single rational.
                    let v = match self.number_literal()? {
                        Value::Rat(r) => Value::Rat(-r),
                        Value::Nat(n) => Value::Rat(-(n as i64) * 100),
                        _ => unreachable!(),
                    };
                    return self.postfix(Expr::Lit(v), mode);
                }
                Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary(mode)?)))
            }
            Tok::Ident(k) if k == "forall" => {
                self.bump();
                self.quantifier(Quantifier::Forall)
            }
            Tok::Ident(k) if k == "exists" => {
                self.bump();
                self.quantifier(Quantifier::Exists)
            }
            _ => {
                let a = self.atom()?;
                self.postfix(a, mode)
            }
        }
    }

    fn postfix(&mut self, mut e: Expr, mode: ExprMode) -> Result<Expr, SyntaxError> {
        loop {
            match self.peek() {
                Tok::LBracket => {
                    self.bump();
                    let idx = self.expr(ExprMode::FULL)?;
                    self.expect(Tok::RBracket)?;
                    e = Expr::Index(Box::new(e), Box::new(idx));
                }
                Tok::Dot if mode.dot_index && matches!(self.peek_at(1), Tok::Ident(_) | Tok::Num(_) | Tok::LParen) => {
                    self.bump();
                    let idx = match self.bump() {
                        Tok::Ident(n) => Expr::Var(n),
                        Tok::Num(n) => Expr::Lit(Value::Nat(n)),
                        Tok::LParen => {
                            let i = self.expr(ExprMode::FULL)?;
                            self.expect(Tok::RParen)?;
                            i
                        }
                        _ => unreachable!(),
                    };
                    e = Expr::Index(Box::new(e), Box::new(idx));
                }
                _ => return Ok(e),
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().clone() {
            Tok::Num(_) => Ok(Expr::Lit(self.number_literal()?)),
            Tok::LParen => {
                self.bump();
                let e = self.expr(ExprMode::FULL)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBracket => {
                self.bump();
                let items = self.expr_list(Tok::RBracket)?;
                Ok(Expr::ListLit(items))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "true" => return Ok(Expr::Lit(Value::Bool(true))),
                    "false" => return Ok(Expr::Lit(Value::Bool(false))),
                    _ => {}
                }
                if self.eat(&Tok::LParen) {
                    let args = self.expr_list(Tok::RParen)?;
                    if name == "if" {
                        let [c, a, b]: [Expr; 3] =
                            args.try_into().map_err(|_| self.error("`if` takes three arguments", &[]))?;
                        return Ok(Expr::If(Box::new(c), Box::new(a), Box::new(b)));
                    }
                    return Ok(Expr::Apply(name, args));
                }
                Ok(Expr::Var(name))
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    /// Comma-separated expressions up to and including `close`.
    pub fn expr_list(&mut self, close: Tok) -> Result<Vec<Expr>, SyntaxError> {
        let mut items = Vec::new();
        if self.eat(&close) {
            return Ok(items);
        }
        loop {
            items.push(self.expr(ExprMode::FULL)?);
            if self.eat(&close) {
                return Ok(items);
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.unexpected(&[",", &close.to_string()]));
            }
        }
    }
}

/// Parses a standalone expression (formula style: `.` indexes lists).
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let mut c = Cursor::new(src)?;
    let e = c.expr(ExprMode::FULL)?;
    if *c.peek() != Tok::Eof {
        return Err(c.unexpected(&["end of input"]));
    }
    Ok(e)
}
