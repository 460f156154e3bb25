//! Static typing of data expressions.

use thiserror::Error;

use crate::data::{BinOp, Expr, Type, UnOp, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("in `{expr}`: {detail}")]
    Mismatch { expr: String, detail: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
}

/// Types of names visible to an expression.
pub trait TypeScope {
    fn var_type(&self, name: &str) -> Option<Type>;
    /// Sort of an enumeration constructor, by name.
    fn ctor_type(&self, ctor: &str) -> Option<Type>;
}

fn mismatch(e: &Expr, detail: String) -> TypeError {
    TypeError::Mismatch { expr: e.to_string(), detail }
}

pub fn value_type(v: &Value, scope: &dyn TypeScope) -> Type {
    match v {
        Value::Enum(c) => scope.ctor_type(c).unwrap_or(Type::Unknown),
        Value::List(xs) => Type::List(Box::new(xs.first().map_or(Type::Unknown, |x| value_type(x, scope)))),
        other => other.ty(),
    }
}

struct Extended<'a> {
    base: &'a dyn TypeScope,
    vars: Vec<(String, Type)>,
}

impl TypeScope for Extended<'_> {
    fn var_type(&self, name: &str) -> Option<Type> {
        self.vars
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.clone())
            .or_else(|| self.base.var_type(name))
    }

    fn ctor_type(&self, ctor: &str) -> Option<Type> {
        self.base.ctor_type(ctor)
    }
}

pub fn expect_type(e: &Expr, want: &Type, scope: &dyn TypeScope) -> Result<(), TypeError> {
    let got = infer(e, scope)?;
    if got.compatible(want) {
        Ok(())
    } else {
        Err(mismatch(e, format!("expected {want}, found {got}")))
    }
}

pub fn infer(e: &Expr, scope: &dyn TypeScope) -> Result<Type, TypeError> {
    Ok(match e {
        Expr::Lit(v) => value_type(v, scope),
        Expr::Var(n) => scope
            .var_type(n)
            .or_else(|| scope.ctor_type(n))
            .ok_or_else(|| TypeError::UnknownName(n.clone()))?,
        Expr::Unary(op, a) => {
            let t = infer(a, scope)?;
            match (op, &t) {
                (UnOp::Not, t) if t.compatible(&Type::Bool) => Type::Bool,
                (UnOp::Neg, t) if t.is_numeric() => Type::Rat,
                (UnOp::Len, Type::List(_) | Type::Unknown) => Type::Nat,
                _ => return Err(mismatch(e, format!("operand has type {t}"))),
            }
        }
        Expr::Binary(op, a, b) => {
            let ta = infer(a, scope)?;
            let tb = infer(b, scope)?;
            match op {
                BinOp::And | BinOp::Or | BinOp::Implies => {
                    if !ta.compatible(&Type::Bool) || !tb.compatible(&Type::Bool) {
                        return Err(mismatch(e, format!("boolean operator on {ta} and {tb}")));
                    }
                    Type::Bool
                }
                BinOp::Eq | BinOp::Ne => {
                    if !ta.compatible(&tb) {
                        return Err(mismatch(e, format!("cannot compare {ta} with {tb}")));
                    }
                    Type::Bool
                }
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                    if !ta.is_numeric() || !tb.is_numeric() {
                        return Err(mismatch(e, format!("cannot order {ta} and {tb}")));
                    }
                    Type::Bool
                }
                BinOp::Add | BinOp::Sub => match (&ta, &tb) {
                    (Type::Nat, Type::Nat) => Type::Nat,
                    _ if ta.is_numeric() && tb.is_numeric() => {
                        if ta == Type::Unknown && tb == Type::Unknown {
                            Type::Unknown
                        } else {
                            Type::Rat
                        }
                    }
                    _ => return Err(mismatch(e, format!("arithmetic on {ta} and {tb}"))),
                },
            }
        }
        Expr::Index(l, i) => {
            let tl = infer(l, scope)?;
            let ti = infer(i, scope)?;
            if !ti.compatible(&Type::Nat) || ti == Type::Rat {
                return Err(mismatch(e, format!("index has type {ti}")));
            }
            match tl {
                Type::List(t) => *t,
                Type::Unknown => Type::Unknown,
                other => return Err(mismatch(e, format!("cannot index {other}"))),
            }
        }
        Expr::ListLit(items) => {
            let mut elem = Type::Unknown;
            for x in items {
                let t = infer(x, scope)?;
                if !t.compatible(&elem) {
                    return Err(mismatch(e, format!("list mixes {elem} and {t}")));
                }
                if elem == Type::Unknown {
                    elem = t;
                }
            }
            Type::List(Box::new(elem))
        }
        Expr::If(c, a, b) => {
            expect_type(c, &Type::Bool, scope)?;
            let ta = infer(a, scope)?;
            let tb = infer(b, scope)?;
            if !ta.compatible(&tb) {
                return Err(mismatch(e, format!("branches have types {ta} and {tb}")));
            }
            if ta == Type::Unknown {
                tb
            } else {
                ta
            }
        }
        Expr::Quant(_, vars, body) => {
            let inner = Extended { base: scope, vars: vars.iter().map(|(n, s)| (n.clone(), s.ty())).collect() };
            expect_type(body, &Type::Bool, &inner)?;
            Type::Bool
        }
        Expr::Apply(f, _) => return Err(TypeError::UnknownFunction(f.clone())),
    })
}
