//! Finite data universe shared by models, transition labels and formulas.
//!
//! Rationals are fixed-point with denominator 100. Naturals and lists may be
//! declared unbounded for typing purposes, but only bounded sorts can be
//! enumerated.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rustc_hash::FxHasher;
use thiserror::Error;

/// Denominator shared by every rational value.
pub const RAT_DENOMINATOR: i64 = 100;

/// Default cap on the number of values a single sort may expand to.
pub const DEFAULT_EXPANSION_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumDef {
    pub name: String,
    pub ctors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    /// Naturals `0..=max`, unbounded when `max` is `None`.
    Nat { max: Option<u64> },
    /// Admissible fixed-point numerators, unrestricted when `None`.
    Rat { values: Option<Vec<i64>> },
    Enum(Arc<EnumDef>),
    /// Lists of exactly `len` elements; any length when `None`.
    List { elem: Box<Sort>, len: Option<usize> },
    /// Reference to a declared sort, replaced during name resolution.
    Named(String),
}

/// Static type of an expression: a sort with its bounds erased.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Bool,
    Nat,
    Rat,
    Enum(String),
    List(Box<Type>),
    /// Produced for names whose declaration is unavailable (e.g. labels of an
    /// imported LTS). Compatible with every type.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Nat(u64),
    /// Numerator over [`RAT_DENOMINATOR`].
    Rat(i64),
    /// Constructor name. Constructor names are unique across a model, so the
    /// owning sort is recoverable from the declarations.
    Enum(Arc<str>),
    List(Arc<[Value]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
    Len,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Value),
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `xs.i` (formula style) or `xs[i]` (model style).
    Index(Box<Expr>, Box<Expr>),
    ListLit(Vec<Expr>),
    /// `if(c, a, b)`
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Bounded quantifier; Nat and list domains are taken from guards.
    Quant(Quantifier, Vec<(String, Sort)>, Box<Expr>),
    /// Predicate macro application; macros are inlined before evaluation.
    Apply(String, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch in `{expr}`: {detail}")]
    TypeMismatch { expr: String, detail: String },
    #[error("index {index} out of range for list of length {len} in `{expr}`")]
    IndexOutOfRange { expr: String, index: u64, len: usize },
    #[error("arithmetic leaves the natural numbers in `{expr}`")]
    Underflow { expr: String },
    #[error("value {value} is not a member of sort {sort}")]
    OutOfSort { value: String, sort: String },
    #[error("cannot bound the domain of `{var}`: no guard of the form `{var} < e` or `#{var} == e`")]
    UnboundedQuantifier { var: String },
    #[error("sort {sort} has {size} values, more than the expansion cap of {cap}")]
    SortTooLarge { sort: String, size: String, cap: usize },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("rational literal {num}/{den} is not a multiple of 1/100")]
    InexactRational { num: i64, den: i64 },
}

// ---------------------------------------------------------------------------
// Sorts and types

impl Sort {
    pub fn nat() -> Sort {
        Sort::Nat { max: None }
    }

    pub fn list(elem: Sort) -> Sort {
        Sort::List { elem: Box::new(elem), len: None }
    }

    pub fn ty(&self) -> Type {
        match self {
            Sort::Bool => Type::Bool,
            Sort::Nat { .. } => Type::Nat,
            Sort::Rat { .. } => Type::Rat,
            Sort::Enum(def) => Type::Enum(def.name.clone()),
            Sort::List { elem, .. } => Type::List(Box::new(elem.ty())),
            Sort::Named(_) => Type::Unknown,
        }
    }

    /// Whether `v` is a member of this sort (bounds included).
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Sort::Bool, Value::Bool(_)) => true,
            (Sort::Nat { max }, Value::Nat(n)) => max.is_none_or(|m| *n <= m),
            (Sort::Rat { values }, Value::Rat(r)) => values.as_ref().is_none_or(|vs| vs.contains(r)),
            (Sort::Rat { values: None }, Value::Nat(_)) => true,
            (Sort::Enum(def), Value::Enum(c)) => def.ctors.iter().any(|k| **k == **c),
            (Sort::List { elem, len }, Value::List(xs)) => {
                len.is_none_or(|l| l == xs.len()) && xs.iter().all(|x| elem.contains(x))
            }
            _ => false,
        }
    }

    /// Number of values, `None` when unbounded or overflowing `u128`.
    pub fn cardinality(&self) -> Option<u128> {
        match self {
            Sort::Bool => Some(2),
            Sort::Nat { max } => max.map(|m| m as u128 + 1),
            Sort::Rat { values } => values.as_ref().map(|v| v.len() as u128),
            Sort::Enum(def) => Some(def.ctors.len() as u128),
            Sort::List { elem, len } => {
                let len = (*len)?;
                let base = elem.cardinality()?;
                let mut acc: u128 = 1;
                for _ in 0..len {
                    acc = acc.checked_mul(base)?;
                }
                Some(acc)
            }
            Sort::Named(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.cardinality().is_some()
    }
}

impl Type {
    pub fn is_numeric(&self) -> bool {
        matches!(self, Type::Nat | Type::Rat | Type::Unknown)
    }

    /// Compatibility used by the type checkers: equal types, Nat widening to
    /// Rat, or an unknown side.
    pub fn compatible(&self, other: &Type) -> bool {
        match (self, other) {
            (Type::Unknown, _) | (_, Type::Unknown) => true,
            (Type::Nat, Type::Rat) | (Type::Rat, Type::Nat) => true,
            (Type::List(a), Type::List(b)) => a.compatible(b),
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("Bool"),
            Sort::Nat { max: None } => f.write_str("Nat"),
            Sort::Nat { max: Some(m) } => write!(f, "Nat({m})"),
            Sort::Rat { values: None } => f.write_str("Rat"),
            Sort::Rat { values: Some(vs) } => {
                f.write_str("Rat{")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", Value::Rat(*v))?;
                }
                f.write_str("}")
            }
            Sort::Enum(def) => f.write_str(&def.name),
            Sort::List { elem, len: None } => write!(f, "List({elem})"),
            Sort::List { elem, len: Some(l) } => write!(f, "List({elem}, {l})"),
            Sort::Named(n) => f.write_str(n),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => f.write_str("Bool"),
            Type::Nat => f.write_str("Nat"),
            Type::Rat => f.write_str("Rat"),
            Type::Enum(n) => f.write_str(n),
            Type::List(e) => write!(f, "List({e})"),
            Type::Unknown => f.write_str("?"),
        }
    }
}

/// Every value of `sort` exactly once, in canonical order: declaration order
/// for enumerations, ascending for numbers, lexicographic for lists.
pub fn enumerate_sort(sort: &Sort) -> Result<Vec<Value>, EvalError> {
    enumerate_sort_capped(sort, DEFAULT_EXPANSION_CAP)
}

pub fn enumerate_sort_capped(sort: &Sort, cap: usize) -> Result<Vec<Value>, EvalError> {
    let too_large = |size: String| EvalError::SortTooLarge { sort: sort.to_string(), size, cap };
    match sort.cardinality() {
        None => return Err(too_large("unboundedly many".into())),
        Some(n) if n > cap as u128 => return Err(too_large(n.to_string())),
        Some(_) => {}
    }
    Ok(match sort {
        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Sort::Named(_) => unreachable!("unresolved sorts have no cardinality"),
        Sort::Nat { max } => (0..=max.unwrap()).map(Value::Nat).collect(),
        Sort::Rat { values } => {
            let mut vs = values.clone().unwrap();
            vs.sort_unstable();
            vs.dedup();
            vs.into_iter().map(Value::Rat).collect()
        }
        Sort::Enum(def) => def.ctors.iter().map(|c| Value::Enum(Arc::from(c.as_str()))).collect(),
        Sort::List { elem, len } => {
            let elems = enumerate_sort_capped(elem, cap)?;
            let mut out: Vec<Vec<Value>> = vec![Vec::new()];
            for _ in 0..len.unwrap() {
                let mut next = Vec::with_capacity(out.len() * elems.len());
                for prefix in &out {
                    for e in &elems {
                        let mut v = prefix.clone();
                        v.push(e.clone());
                        next.push(v);
                    }
                }
                out = next;
            }
            out.into_iter().map(Value::list).collect()
        }
    })
}

// ---------------------------------------------------------------------------
// Values

impl Value {
    pub fn list(values: Vec<Value>) -> Value {
        Value::List(values.into())
    }

    pub fn ctor(name: &str) -> Value {
        Value::Enum(Arc::from(name))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Static type where it can be read off the value alone.
    pub fn ty(&self) -> Type {
        match self {
            Value::Bool(_) => Type::Bool,
            Value::Nat(_) => Type::Nat,
            Value::Rat(_) => Type::Rat,
            Value::Enum(_) => Type::Unknown,
            Value::List(xs) => Type::List(Box::new(xs.first().map_or(Type::Unknown, Value::ty))),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Rat(r) => write!(f, "{r}/{RAT_DENOMINATOR}"),
            Value::Enum(c) => f.write_str(c),
            Value::List(xs) => {
                f.write_str("[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// 64-bit structural digest, stable for the lifetime of the process.
pub fn hash_value(v: &Value) -> u64 {
    let mut h = FxHasher::default();
    v.hash(&mut h);
    h.finish()
}

/// Converts `num/den` into the fixed-point representation.
pub fn rational(num: i64, den: i64) -> Result<Value, EvalError> {
    if den == 0 || (num * RAT_DENOMINATOR) % den != 0 {
        return Err(EvalError::InexactRational { num, den });
    }
    Ok(Value::Rat(num * RAT_DENOMINATOR / den))
}

// ---------------------------------------------------------------------------
// Environments

/// Name resolution for evaluation. Implementations return the innermost
/// binding of `name`.
pub trait Lookup {
    fn lookup(&self, name: &str) -> Option<Value>;
}

/// Scoped variable bindings; later bindings shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    bindings: Vec<(String, Value)>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Value) {
        self.bindings.push((name.into(), value));
    }

    pub fn with(mut self, name: impl Into<String>, value: Value) -> Self {
        self.bind(name, value);
        self
    }

    pub fn pop(&mut self) {
        self.bindings.pop();
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl Lookup for Env {
    fn lookup(&self, name: &str) -> Option<Value> {
        self.get(name).cloned()
    }
}

struct Overlay<'a> {
    base: &'a dyn Lookup,
    name: &'a str,
    value: Value,
}

impl Lookup for Overlay<'_> {
    fn lookup(&self, name: &str) -> Option<Value> {
        if name == self.name {
            Some(self.value.clone())
        } else {
            self.base.lookup(name)
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation

pub fn eval_expr(e: &Expr, env: &Env) -> Result<Value, EvalError> {
    eval(e, env)
}

fn mismatch(e: &Expr, detail: impl Into<String>) -> EvalError {
    EvalError::TypeMismatch { expr: e.to_string(), detail: detail.into() }
}

fn numeric(v: &Value) -> Option<i64> {
    match v {
        Value::Nat(n) => Some(*n as i64 * RAT_DENOMINATOR),
        Value::Rat(r) => Some(*r),
        _ => None,
    }
}

fn expect_bool(e: &Expr, v: Value) -> Result<bool, EvalError> {
    v.as_bool().ok_or_else(|| mismatch(e, format!("expected Bool, found {v}")))
}

/// Evaluates `e` against any name resolver.
pub fn eval(e: &Expr, env: &dyn Lookup) -> Result<Value, EvalError> {
    match e {
        Expr::Lit(v) => Ok(v.clone()),
        Expr::Var(name) => env.lookup(name).ok_or_else(|| EvalError::UnboundVariable(name.clone())),
        Expr::Unary(op, a) => {
            let v = eval(a, env)?;
            match (op, v) {
                (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                (UnOp::Neg, Value::Rat(r)) => Ok(Value::Rat(-r)),
                (UnOp::Neg, Value::Nat(n)) => Ok(Value::Rat(-(n as i64) * RAT_DENOMINATOR)),
                (UnOp::Len, Value::List(xs)) => Ok(Value::Nat(xs.len() as u64)),
                (op, v) => Err(mismatch(e, format!("operator {op:?} not applicable to {v}"))),
            }
        }
        Expr::Binary(op, a, b) => eval_binary(e, *op, a, b, env),
        Expr::Index(list, index) => {
            let l = eval(list, env)?;
            let i = eval(index, env)?;
            match (l, i) {
                (Value::List(xs), Value::Nat(i)) => xs
                    .get(i as usize)
                    .cloned()
                    .ok_or(EvalError::IndexOutOfRange { expr: e.to_string(), index: i, len: xs.len() }),
                (l, i) => Err(mismatch(e, format!("cannot index {l} with {i}"))),
            }
        }
        Expr::ListLit(items) => {
            let vs = items.iter().map(|x| eval(x, env)).collect::<Result<Vec<_>, _>>()?;
            Ok(Value::list(vs))
        }
        Expr::If(c, a, b) => {
            if expect_bool(c, eval(c, env)?)? {
                eval(a, env)
            } else {
                eval(b, env)
            }
        }
        Expr::Quant(q, vars, body) => {
            let guard = guard_conjuncts(*q, body);
            eval_quant(*q, vars, body, &guard, env).map(Value::Bool)
        }
        Expr::Apply(name, _) => Err(EvalError::UnknownFunction(name.clone())),
    }
}

fn eval_binary(e: &Expr, op: BinOp, a: &Expr, b: &Expr, env: &dyn Lookup) -> Result<Value, EvalError> {
    match op {
        BinOp::And => {
            if !expect_bool(a, eval(a, env)?)? {
                return Ok(Value::Bool(false));
            }
            Ok(Value::Bool(expect_bool(b, eval(b, env)?)?))
        }
        BinOp::Or => {
            if expect_bool(a, eval(a, env)?)? {
                return Ok(Value::Bool(true));
            }
            Ok(Value::Bool(expect_bool(b, eval(b, env)?)?))
        }
        BinOp::Implies => {
            if !expect_bool(a, eval(a, env)?)? {
                return Ok(Value::Bool(true));
            }
            Ok(Value::Bool(expect_bool(b, eval(b, env)?)?))
        }
        _ => {
            let x = eval(a, env)?;
            let y = eval(b, env)?;
            apply_binop(e, op, x, y)
        }
    }
}

fn apply_binop(e: &Expr, op: BinOp, x: Value, y: Value) -> Result<Value, EvalError> {
    use BinOp::*;
    match op {
        Eq | Ne => {
            let same = match (numeric(&x), numeric(&y)) {
                (Some(p), Some(q)) => p == q,
                _ => {
                    if std::mem::discriminant(&x) != std::mem::discriminant(&y) {
                        return Err(mismatch(e, format!("cannot compare {x} with {y}")));
                    }
                    x == y
                }
            };
            Ok(Value::Bool(if op == Eq { same } else { !same }))
        }
        Lt | Le | Gt | Ge => {
            let (Some(p), Some(q)) = (numeric(&x), numeric(&y)) else {
                return Err(mismatch(e, format!("cannot order {x} and {y}")));
            };
            Ok(Value::Bool(match op {
                Lt => p < q,
                Le => p <= q,
                Gt => p > q,
                _ => p >= q,
            }))
        }
        Add | Sub => match (x, y) {
            (Value::Nat(p), Value::Nat(q)) => {
                let r = if op == Add { p.checked_add(q) } else { p.checked_sub(q) };
                r.map(Value::Nat).ok_or_else(|| EvalError::Underflow { expr: e.to_string() })
            }
            (x, y) => {
                let (Some(p), Some(q)) = (numeric(&x), numeric(&y)) else {
                    return Err(mismatch(e, format!("arithmetic on {x} and {y}")));
                };
                Ok(Value::Rat(if op == Add { p + q } else { p - q }))
            }
        },
        And | Or | Implies => unreachable!("short-circuit operators handled by the caller"),
    }
}

/// Conjuncts of the guard that restricts a quantifier's domain: the
/// antecedent of a universal implication, or the body of an existential.
pub fn guard_conjuncts(q: Quantifier, body: &Expr) -> Vec<&Expr> {
    let guard = match (q, body) {
        (Quantifier::Forall, Expr::Binary(BinOp::Implies, g, _)) => g.as_ref(),
        (Quantifier::Exists, b) => b,
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    collect_conjuncts(guard, &mut out);
    out
}

pub fn collect_conjuncts<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Binary(BinOp::And, a, b) => {
            collect_conjuncts(a, out);
            collect_conjuncts(b, out);
        }
        other => out.push(other),
    }
}

fn eval_quant(
    q: Quantifier,
    vars: &[(String, Sort)],
    body: &Expr,
    guard: &[&Expr],
    env: &dyn Lookup,
) -> Result<bool, EvalError> {
    let Some(((name, sort), rest)) = vars.split_first() else {
        return expect_bool(body, eval(body, env)?);
    };
    let domain = enumerate_sort(&refine_sort(name, sort, guard, env)?)?;
    for v in domain {
        let inner = Overlay { base: env, name, value: v };
        let r = eval_quant(q, rest, body, guard, &inner)?;
        match q {
            Quantifier::Forall if !r => return Ok(false),
            Quantifier::Exists if r => return Ok(true),
            _ => {}
        }
    }
    Ok(q == Quantifier::Forall)
}

/// Narrows an unbounded quantifier sort using guard conjuncts such as
/// `x < e`, `x <= e`, `#x == e` and
/// `forall i: Nat. i < k => #(x.i) == m`. The result is a superset of the
/// values satisfying the guard; finite sorts are returned unchanged.
pub fn refine_sort(var: &str, sort: &Sort, guard: &[&Expr], env: &dyn Lookup) -> Result<Sort, EvalError> {
    if sort.is_finite() {
        return Ok(sort.clone());
    }
    let unbounded = || EvalError::UnboundedQuantifier { var: var.to_string() };
    match sort {
        Sort::Nat { max: None } => {
            let mut best: Option<u64> = None;
            for g in guard {
                if let Some(m) = nat_upper_bound(var, g, env) {
                    best = Some(best.map_or(m, |b: u64| b.min(m)));
                }
            }
            match best {
                Some(m) => Ok(Sort::Nat { max: Some(m) }),
                None => Err(unbounded()),
            }
        }
        Sort::List { elem, len } => {
            let len = match len {
                Some(l) => *l,
                None => guard
                    .iter()
                    .find_map(|g| list_length(var, g, env))
                    .ok_or_else(unbounded)?,
            };
            let elem = if elem.is_finite() {
                (**elem).clone()
            } else {
                match elem.as_ref() {
                    Sort::List { elem: inner, len: None } if inner.is_finite() => {
                        let m = guard.iter().find_map(|g| element_length(var, g, env)).ok_or_else(unbounded)?;
                        Sort::List { elem: inner.clone(), len: Some(m) }
                    }
                    _ => return Err(unbounded()),
                }
            };
            Ok(Sort::List { elem: Box::new(elem), len: Some(len) })
        }
        _ => Err(unbounded()),
    }
}

fn is_var(e: &Expr, var: &str) -> bool {
    matches!(e, Expr::Var(n) if n == var)
}

fn closed_nat(e: &Expr, env: &dyn Lookup) -> Option<u64> {
    match eval(e, env) {
        Ok(Value::Nat(n)) => Some(n),
        _ => None,
    }
}

/// Largest admissible value for `var` implied by conjunct `g`.
fn nat_upper_bound(var: &str, g: &Expr, env: &dyn Lookup) -> Option<u64> {
    let Expr::Binary(op, a, b) = g else { return None };
    let (op, bound) = match (is_var(a, var), is_var(b, var)) {
        (true, false) => (*op, b),
        (false, true) => (
            match op {
                BinOp::Gt => BinOp::Lt,
                BinOp::Ge => BinOp::Le,
                other => *other,
            },
            a,
        ),
        _ => return None,
    };
    let k = closed_nat(bound, env)?;
    match op {
        // `x < 0` yields {0}, which the guard itself then rejects.
        BinOp::Lt => Some(k.saturating_sub(1)),
        BinOp::Le | BinOp::Eq => Some(k),
        _ => None,
    }
}

fn list_length(var: &str, g: &Expr, env: &dyn Lookup) -> Option<usize> {
    let Expr::Binary(BinOp::Eq, a, b) = g else { return None };
    let (len_side, other) = match (a.as_ref(), b.as_ref()) {
        (Expr::Unary(UnOp::Len, x), o) if is_var(x, var) => (x, o),
        (o, Expr::Unary(UnOp::Len, x)) if is_var(x, var) => (x, o),
        _ => return None,
    };
    let _ = len_side;
    closed_nat(other, env).map(|n| n as usize)
}

/// Matches `forall i: Nat. G => #(var.i) == m`.
fn element_length(var: &str, g: &Expr, env: &dyn Lookup) -> Option<usize> {
    let Expr::Quant(Quantifier::Forall, vars, body) = g else { return None };
    let [(i, _)] = vars.as_slice() else { return None };
    let Expr::Binary(BinOp::Implies, _, conclusion) = body.as_ref() else { return None };
    let Expr::Binary(BinOp::Eq, a, b) = conclusion.as_ref() else { return None };
    let (len, other) = match (a.as_ref(), b.as_ref()) {
        (Expr::Unary(UnOp::Len, x), o) => (x, o),
        (o, Expr::Unary(UnOp::Len, x)) => (x, o),
        _ => return None,
    };
    match len.as_ref() {
        Expr::Index(list, idx) if is_var(list, var) && is_var(idx, i) => closed_nat(other, env).map(|n| n as usize),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Printing

/// How list indexing is rendered: `xs.i` in formulas, `xs[i]` in models
/// (where `.` is sequential composition).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexStyle {
    Dot,
    Bracket,
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn display(&self, style: IndexStyle) -> ExprDisplay<'_> {
        ExprDisplay { expr: self, style }
    }

    /// Free variables, in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(n) => {
                if !bound.contains(n) && !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Expr::Unary(_, a) => a.collect_free(bound, out),
            Expr::Binary(_, a, b) | Expr::Index(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::ListLit(xs) | Expr::Apply(_, xs) => xs.iter().for_each(|x| x.collect_free(bound, out)),
            Expr::If(c, a, b) => {
                c.collect_free(bound, out);
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Quant(_, vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().map(|(v, _)| v.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Capture-avoiding only in the trivial sense: substitution stops at
    /// quantifiers that rebind a substituted name.
    pub fn substitute(&self, subst: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        self.subst_inner(subst, &mut Vec::new())
    }

    fn subst_inner(&self, subst: &dyn Fn(&str) -> Option<Expr>, bound: &mut Vec<String>) -> Expr {
        match self {
            Expr::Var(n) if !bound.contains(n) => subst(n).unwrap_or_else(|| self.clone()),
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, a) => Expr::Unary(*op, Box::new(a.subst_inner(subst, bound))),
            Expr::Binary(op, a, b) => Expr::bin(*op, a.subst_inner(subst, bound), b.subst_inner(subst, bound)),
            Expr::Index(a, b) => Expr::Index(Box::new(a.subst_inner(subst, bound)), Box::new(b.subst_inner(subst, bound))),
            Expr::ListLit(xs) => Expr::ListLit(xs.iter().map(|x| x.subst_inner(subst, bound)).collect()),
            Expr::Apply(f, xs) => Expr::Apply(f.clone(), xs.iter().map(|x| x.subst_inner(subst, bound)).collect()),
            Expr::If(c, a, b) => Expr::If(
                Box::new(c.subst_inner(subst, bound)),
                Box::new(a.subst_inner(subst, bound)),
                Box::new(b.subst_inner(subst, bound)),
            ),
            Expr::Quant(q, vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().map(|(v, _)| v.clone()));
                let body = body.subst_inner(subst, bound);
                bound.truncate(n);
                Expr::Quant(*q, vars.clone(), Box::new(body))
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(IndexStyle::Dot))
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    style: IndexStyle,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, 0, self.style)
    }
}

// Precedence levels, loosest first. The parsers mirror this table.
const P_QUANT: u8 = 0;
const P_IMPLIES: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_EQ: u8 = 4;
const P_CMP: u8 = 5;
const P_ADD: u8 = 6;
const P_UNARY: u8 = 7;
const P_POSTFIX: u8 = 8;
const P_ATOM: u8 = 9;

pub(crate) fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Implies => P_IMPLIES,
        BinOp::Or => P_OR,
        BinOp::And => P_AND,
        BinOp::Eq | BinOp::Ne => P_EQ,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => P_CMP,
        BinOp::Add | BinOp::Sub => P_ADD,
    }
}

pub(crate) fn binop_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Implies => "=>",
        BinOp::Or => "||",
        BinOp::And => "&&",
        BinOp::Eq => "==",
        BinOp::Ne => "!=",
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        BinOp::Add => "+",
        BinOp::Sub => "-",
    }
}

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Quant(..) => P_QUANT,
        Expr::Binary(op, ..) => binop_prec(*op),
        Expr::Unary(..) => P_UNARY,
        Expr::Lit(Value::Rat(r)) if *r < 0 => P_UNARY,
        Expr::Index(..) => P_POSTFIX,
        _ => P_ATOM,
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, ctx: u8, style: IndexStyle) -> fmt::Result {
    let prec = expr_prec(e);
    if prec < ctx {
        f.write_str("(")?;
        write_expr(f, e, 0, style)?;
        return f.write_str(")");
    }
    match e {
        Expr::Lit(v) => write!(f, "{v}"),
        Expr::Var(n) => f.write_str(n),
        Expr::Unary(op, a) => {
            f.write_str(match op {
                UnOp::Not => "!",
                UnOp::Neg => "-",
                UnOp::Len => "#",
            })?;
            // `-240/100` parses as a single literal, so keep negated numbers bracketed.
            if *op == UnOp::Neg && matches!(a.as_ref(), Expr::Lit(Value::Nat(_) | Value::Rat(_))) {
                f.write_str("(")?;
                write_expr(f, a, 0, style)?;
                return f.write_str(")");
            }
            write_expr(f, a, P_UNARY, style)
        }
        Expr::Binary(op, a, b) => {
            let (lctx, rctx) = if *op == BinOp::Implies { (prec + 1, prec) } else { (prec, prec + 1) };
            write_expr(f, a, lctx, style)?;
            write!(f, " {} ", binop_symbol(*op))?;
            write_expr(f, b, rctx, style)
        }
        Expr::Index(list, idx) => {
            write_expr(f, list, P_POSTFIX, style)?;
            match style {
                IndexStyle::Bracket => {
                    f.write_str("[")?;
                    write_expr(f, idx, 0, style)?;
                    f.write_str("]")
                }
                IndexStyle::Dot => {
                    f.write_str(".")?;
                    match idx.as_ref() {
                        Expr::Var(_) | Expr::Lit(Value::Nat(_)) => write_expr(f, idx, P_ATOM, style),
                        _ => {
                            f.write_str("(")?;
                            write_expr(f, idx, 0, style)?;
                            f.write_str(")")
                        }
                    }
                }
            }
        }
        Expr::ListLit(xs) => {
            f.write_str("[")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(f, x, 0, style)?;
            }
            f.write_str("]")
        }
        Expr::If(c, a, b) => {
            f.write_str("if(")?;
            write_expr(f, c, 0, style)?;
            f.write_str(", ")?;
            write_expr(f, a, 0, style)?;
            f.write_str(", ")?;
            write_expr(f, b, 0, style)?;
            f.write_str(")")
        }
        Expr::Apply(name, xs) => {
            write!(f, "{name}(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(f, x, 0, style)?;
            }
            f.write_str(")")
        }
        Expr::Quant(q, vars, body) => {
            f.write_str(match q {
                Quantifier::Forall => "forall ",
                Quantifier::Exists => "exists ",
            })?;
            for (i, (v, s)) in vars.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}: {s}")?;
            }
            f.write_str(". ")?;
            write_expr(f, body, P_QUANT, style)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> Expr {
        Expr::Lit(Value::Rat(n))
    }

    #[test]
    fn rational_comparison() {
        let e = Expr::bin(BinOp::Lt, rat(350), Expr::Lit(rational(4, 1).unwrap()));
        assert_eq!(eval_expr(&e, &Env::new()), Ok(Value::Bool(true)));
    }

    #[test]
    fn length_of_nested_list() {
        let t = Value::Bool(true);
        let f = Value::Bool(false);
        let xs = Value::list(vec![
            Value::list(vec![t.clone(), f.clone()]),
            Value::list(vec![f.clone(), f.clone()]),
            Value::list(vec![t.clone(), t.clone()]),
        ]);
        let e = Expr::bin(BinOp::Eq, Expr::Unary(UnOp::Len, Box::new(Expr::var("xs"))), Expr::Lit(Value::Nat(3)));
        assert_eq!(eval_expr(&e, &Env::new().with("xs", xs)), Ok(Value::Bool(true)));
    }

    #[test]
    fn positive_head_threshold() {
        let e = Expr::bin(BinOp::Lt, Expr::bin(BinOp::Sub, Expr::var("r"), Expr::var("d")), rat(70));
        let env = Env::new().with("r", Value::Rat(50)).with("d", Value::Rat(0));
        assert_eq!(eval_expr(&e, &env), Ok(Value::Bool(true)));
    }

    #[test]
    fn errors_name_the_subexpression() {
        let env = Env::new().with("xs", Value::list(vec![Value::Bool(true)]));
        let e = Expr::Index(Box::new(Expr::var("xs")), Box::new(Expr::Lit(Value::Nat(1))));
        assert!(matches!(eval_expr(&e, &env), Err(EvalError::IndexOutOfRange { index: 1, len: 1, .. })));
        assert_eq!(eval_expr(&Expr::var("y"), &env), Err(EvalError::UnboundVariable("y".into())));
        let bad = Expr::bin(BinOp::And, Expr::Lit(Value::Nat(1)), Expr::Lit(Value::Bool(true)));
        assert!(matches!(eval_expr(&bad, &env), Err(EvalError::TypeMismatch { .. })));
        let under = Expr::bin(BinOp::Sub, Expr::Lit(Value::Nat(1)), Expr::Lit(Value::Nat(2)));
        assert!(matches!(eval_expr(&under, &env), Err(EvalError::Underflow { .. })));
    }

    #[test]
    fn shadowing_resolves_innermost() {
        let env = Env::new().with("x", Value::Nat(1)).with("x", Value::Nat(2));
        assert_eq!(eval_expr(&Expr::var("x"), &env), Ok(Value::Nat(2)));
    }

    #[test]
    fn enumerate_basic_sorts() {
        assert_eq!(enumerate_sort(&Sort::Bool).unwrap(), vec![Value::Bool(false), Value::Bool(true)]);
        let mode = Sort::Enum(Arc::new(EnumDef {
            name: "ProcessMode".into(),
            ctors: vec!["active".into(), "stopped".into(), "finished".into()],
        }));
        let vs = enumerate_sort(&mode).unwrap();
        assert_eq!(vs, vec![Value::ctor("active"), Value::ctor("stopped"), Value::ctor("finished")]);
        let pairs = enumerate_sort(&Sort::List { elem: Box::new(Sort::Bool), len: Some(2) }).unwrap();
        let b = Value::Bool;
        assert_eq!(
            pairs,
            vec![
                Value::list(vec![b(false), b(false)]),
                Value::list(vec![b(false), b(true)]),
                Value::list(vec![b(true), b(false)]),
                Value::list(vec![b(true), b(true)]),
            ]
        );
    }

    #[test]
    fn enumeration_cap() {
        let big = Sort::List { elem: Box::new(Sort::Bool), len: Some(13) };
        assert!(matches!(enumerate_sort(&big), Err(EvalError::SortTooLarge { .. })));
        assert!(matches!(enumerate_sort(&Sort::nat()), Err(EvalError::SortTooLarge { .. })));
        assert_eq!(enumerate_sort_capped(&big, 8192).unwrap().len(), 8192);
    }

    #[test]
    fn hashing_is_structural() {
        let tf = Value::list(vec![Value::Bool(true), Value::Bool(false)]);
        let ft = Value::list(vec![Value::Bool(false), Value::Bool(true)]);
        assert_eq!(hash_value(&Value::Bool(true)), hash_value(&Value::Bool(true)));
        assert_ne!(hash_value(&tf), hash_value(&ft));
        let r = Value::Rat(-240);
        assert_eq!(hash_value(&r), hash_value(&r.clone()));
    }

    #[test]
    fn guarded_nat_quantifier() {
        // exists i, j: Nat. i < 3 && j < 2 && i != j
        let body = Expr::bin(
            BinOp::And,
            Expr::bin(
                BinOp::And,
                Expr::bin(BinOp::Lt, Expr::var("i"), Expr::Lit(Value::Nat(3))),
                Expr::bin(BinOp::Lt, Expr::var("j"), Expr::Lit(Value::Nat(2))),
            ),
            Expr::bin(BinOp::Ne, Expr::var("i"), Expr::var("j")),
        );
        let e = Expr::Quant(Quantifier::Exists, vec![("i".into(), Sort::nat()), ("j".into(), Sort::nat())], Box::new(body));
        assert_eq!(eval_expr(&e, &Env::new()), Ok(Value::Bool(true)));
        let unguarded = Expr::Quant(Quantifier::Exists, vec![("i".into(), Sort::nat())], Box::new(Expr::Lit(Value::Bool(true))));
        assert!(matches!(eval_expr(&unguarded, &Env::new()), Err(EvalError::UnboundedQuantifier { .. })));
    }

    #[test]
    fn printing_brackets_negated_literals() {
        let e = Expr::Unary(UnOp::Neg, Box::new(rat(240)));
        assert_eq!(e.to_string(), "-(240/100)");
        assert_eq!(rat(-240).to_string(), "-240/100");
        let idx = Expr::Index(Box::new(Expr::var("xs")), Box::new(Expr::bin(BinOp::Add, Expr::var("i"), Expr::Lit(Value::Nat(1)))));
        assert_eq!(idx.to_string(), "xs.(i + 1)");
        assert_eq!(idx.display(IndexStyle::Bracket).to_string(), "xs[i + 1]");
    }
}
