use std::fmt;

use crate::data::{Expr, Sort};

/// `name` (any arguments) or `name(e1, ..., en)`. The argument `_` matches
/// any value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NamedPattern {
    pub name: String,
    pub args: Option<Vec<Expr>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionPattern {
    /// `true`
    Any,
    Named(NamedPattern),
    /// `!a` or `!(a || b)`: matches labels no member matches.
    Not(Vec<NamedPattern>),
    /// `p || q`
    Union(Vec<ActionPattern>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regular {
    Atom(ActionPattern),
    Concat(Box<Regular>, Box<Regular>),
    Union(Box<Regular>, Box<Regular>),
    Star(Box<Regular>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Val(Expr),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Box(Regular, Box<Formula>),
    Diamond(Regular, Box<Formula>),
    Forall(Vec<(String, Sort)>, Box<Formula>),
    Exists(Vec<(String, Sort)>, Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
    Var(String),
}

/// `pred name(a: S, b: T) = expr;`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredDef {
    pub name: String,
    pub params: Vec<(String, Sort)>,
    pub body: Expr,
}

/// A property file: predicate macros followed by one formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyFile {
    pub preds: Vec<PredDef>,
    pub formula: Formula,
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn boxed(r: Regular, f: Formula) -> Formula {
        Formula::Box(r, Box::new(f))
    }

    pub fn diamond(r: Regular, f: Formula) -> Formula {
        Formula::Diamond(r, Box::new(f))
    }

    /// True when the formula contains no modality, fixpoint or fixpoint
    /// variable, so it denotes a constant.
    pub fn is_val_closed(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Val(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_val_closed() && b.is_val_closed(),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.is_val_closed(),
            Formula::Box(..) | Formula::Diamond(..) | Formula::Mu(..) | Formula::Nu(..) | Formula::Var(_) => false,
        }
    }

    /// Fixpoint variable names in use, bound or free.
    pub fn fixpoint_names(&self, out: &mut Vec<String>) {
        match self {
            Formula::Mu(x, a) | Formula::Nu(x, a) => {
                out.push(x.clone());
                a.fixpoint_names(out);
            }
            Formula::Var(x) => out.push(x.clone()),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.fixpoint_names(out);
                b.fixpoint_names(out);
            }
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Box(_, a) | Formula::Diamond(_, a) => {
                a.fixpoint_names(out)
            }
            Formula::True | Formula::False | Formula::Val(_) => {}
        }
    }

    pub fn is_regular_free(&self) -> bool {
        match self {
            Formula::Box(r, a) | Formula::Diamond(r, a) => matches!(r, Regular::Atom(_)) && a.is_regular_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_regular_free() && b.is_regular_free(),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Mu(_, a) | Formula::Nu(_, a) => {
                a.is_regular_free()
            }
            Formula::True | Formula::False | Formula::Val(_) | Formula::Var(_) => true,
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Expr]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for NamedPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        match &self.args {
            Some(args) => write_args(f, args),
            None => Ok(()),
        }
    }
}

impl fmt::Display for ActionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionPattern::Any => f.write_str("true"),
            ActionPattern::Named(n) => write!(f, "{n}"),
            ActionPattern::Not(ns) if ns.len() == 1 => write!(f, "!{}", ns[0]),
            ActionPattern::Not(ns) => {
                f.write_str("!(")?;
                for (i, n) in ns.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_str(")")
            }
            ActionPattern::Union(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

const R_UNION: u8 = 0;
const R_CONCAT: u8 = 1;
const R_STAR: u8 = 2;

fn write_regular(f: &mut fmt::Formatter<'_>, r: &Regular, ctx: u8) -> fmt::Result {
    let (prec, simple) = match r {
        Regular::Union(..) => (R_UNION, false),
        Regular::Concat(..) => (R_CONCAT, false),
        Regular::Star(_) => (R_STAR, false),
        Regular::Atom(ActionPattern::Any | ActionPattern::Named(_)) => (3, true),
        Regular::Atom(_) => (3, false),
    };
    // Negations and unions are bracketed wherever they meet a regular
    // operator, which keeps `(!a)*` and `(a || b).c` unambiguous to readers.
    let paren = prec < ctx || (!simple && prec == 3 && ctx > R_UNION);
    if paren {
        f.write_str("(")?;
    }
    match r {
        Regular::Atom(p) => write!(f, "{p}")?,
        Regular::Union(a, b) => {
            write_regular(f, a, R_UNION)?;
            f.write_str(" + ")?;
            write_regular(f, b, R_CONCAT)?;
        }
        Regular::Concat(a, b) => {
            write_regular(f, a, R_CONCAT)?;
            f.write_str(" . ")?;
            write_regular(f, b, R_STAR)?;
        }
        Regular::Star(a) => {
            write_regular(f, a, 3)?;
            f.write_str("*")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Regular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_regular(f, self, R_UNION)
    }
}

const F_BINDER: u8 = 0;
const F_IMPLIES: u8 = 1;
const F_OR: u8 = 2;
const F_AND: u8 = 3;
const F_PREFIX: u8 = 4;
const F_ATOM: u8 = 5;

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Forall(..) | Formula::Exists(..) | Formula::Mu(..) | Formula::Nu(..) => F_BINDER,
        Formula::Implies(..) => F_IMPLIES,
        Formula::Or(..) => F_OR,
        Formula::And(..) => F_AND,
        Formula::Not(_) | Formula::Box(..) | Formula::Diamond(..) => F_PREFIX,
        Formula::True | Formula::False | Formula::Val(_) | Formula::Var(_) => F_ATOM,
    }
}

fn write_binders(f: &mut fmt::Formatter<'_>, vars: &[(String, Sort)]) -> fmt::Result {
    for (i, (n, s)) in vars.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{n}: {s}")?;
    }
    Ok(())
}

fn write_formula(f: &mut fmt::Formatter<'_>, x: &Formula, ctx: u8) -> fmt::Result {
    let paren = formula_prec(x) < ctx;
    if paren {
        f.write_str("(")?;
    }
    match x {
        Formula::True => f.write_str("true")?,
        Formula::False => f.write_str("false")?,
        Formula::Val(e) => write!(f, "val({e})")?,
        Formula::Var(v) => f.write_str(v)?,
        Formula::And(a, b) => {
            write_formula(f, a, F_AND)?;
            f.write_str(" && ")?;
            write_formula(f, b, F_PREFIX)?;
        }
        Formula::Or(a, b) => {
            write_formula(f, a, F_OR)?;
            f.write_str(" || ")?;
            write_formula(f, b, F_AND)?;
        }
        Formula::Implies(a, b) => {
            write_formula(f, a, F_OR)?;
            f.write_str(" => ")?;
            write_formula(f, b, F_IMPLIES)?;
        }
        Formula::Not(a) => {
            f.write_str("!")?;
            write_formula(f, a, F_PREFIX)?;
        }
        Formula::Box(r, a) => {
            write!(f, "[{r}]")?;
            write_formula(f, a, F_PREFIX)?;
        }
        Formula::Diamond(r, a) => {
            write!(f, "<{r}>")?;
            write_formula(f, a, F_PREFIX)?;
        }
        Formula::Forall(vs, a) | Formula::Exists(vs, a) => {
            f.write_str(if matches!(x, Formula::Forall(..)) { "forall " } else { "exists " })?;
            write_binders(f, vs)?;
            f.write_str(". ")?;
            write_formula(f, a, F_BINDER)?;
        }
        Formula::Mu(v, a) | Formula::Nu(v, a) => {
            write!(f, "{} {v}. ", if matches!(x, Formula::Mu(..)) { "mu" } else { "nu" })?;
            write_formula(f, a, F_BINDER)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, F_BINDER)
    }
}

impl fmt::Display for PredDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pred {}(", self.name)?;
        write_binders(f, &self.params)?;
        write!(f, ") = {};", self.body)
    }
}

impl fmt::Display for PropertyFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.preds {
            writeln!(f, "{p}")?;
        }
        writeln!(f, "{}", self.formula)
    }
}
