use std::collections::HashMap;

use crate::data::{Expr, Sort, Type, Value};
use crate::lts::Lts;
use crate::model::TypedModel;
use crate::types::{expect_type, infer, TypeScope};

use super::ast::{ActionPattern, Formula, NamedPattern, PredDef, PropertyFile, Regular};
use super::MuError;

/// Maximum nesting of predicate macro expansion.
const MAX_MACRO_DEPTH: usize = 32;

/// Declarations a formula is checked against.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    /// Parameter sorts per action; `None` when only the name is known.
    pub actions: HashMap<String, Option<Vec<Sort>>>,
    pub sorts: HashMap<String, Sort>,
    /// Constructor name to the name of its sort (empty when unknown).
    pub ctors: HashMap<String, String>,
    pub consts: Vec<(String, Sort, Value)>,
}

impl Signature {
    pub fn from_model(m: &TypedModel) -> Signature {
        let mut sig = Signature::default();
        for a in &m.actions {
            sig.actions.insert(a.name.clone(), Some(a.params.clone()));
        }
        for (n, s) in &m.sorts {
            sig.sorts.insert(n.clone(), s.clone());
        }
        for e in &m.enums {
            for c in &e.ctors {
                sig.ctors.insert(c.clone(), e.name.clone());
            }
        }
        sig.consts = m.consts.clone();
        sig
    }

    /// Lenient signature for an imported LTS: action names from the labels,
    /// constructors from the label arguments, no sorts or constants.
    pub fn from_lts(l: &Lts) -> Signature {
        fn ctors(v: &Value, out: &mut HashMap<String, String>) {
            match v {
                Value::Enum(c) => {
                    out.insert(c.to_string(), String::new());
                }
                Value::List(xs) => xs.iter().for_each(|x| ctors(x, out)),
                _ => {}
            }
        }
        let mut sig = Signature::default();
        for l in &l.labels {
            sig.actions.insert(l.action.to_string(), None);
            l.args.iter().for_each(|a| ctors(a, &mut sig.ctors));
        }
        sig
    }

    pub fn const_value(&self, name: &str) -> Option<&Value> {
        self.consts.iter().find(|c| c.0 == name).map(|c| &c.2)
    }
}

struct Scope<'a> {
    sig: &'a Signature,
    vars: &'a [(String, Type)],
}

impl TypeScope for Scope<'_> {
    fn var_type(&self, name: &str) -> Option<Type> {
        if let Some((_, t)) = self.vars.iter().rev().find(|(n, _)| n == name) {
            return Some(t.clone());
        }
        if name == "_" {
            return Some(Type::Unknown);
        }
        self.sig.consts.iter().find(|c| c.0 == name).map(|c| c.1.ty())
    }

    fn ctor_type(&self, ctor: &str) -> Option<Type> {
        self.sig
            .ctors
            .get(ctor)
            .map(|s| if s.is_empty() { Type::Unknown } else { Type::Enum(s.clone()) })
    }
}

/// Replaces predicate applications by their definitions.
pub fn inline_macros(e: &Expr, preds: &[PredDef]) -> Result<Expr, MuError> {
    inline_depth(e, preds, 0)
}

fn inline_depth(e: &Expr, preds: &[PredDef], depth: usize) -> Result<Expr, MuError> {
    if depth > MAX_MACRO_DEPTH {
        return Err(MuError::Invalid("predicate macros nest too deeply".into()));
    }
    Ok(match e {
        Expr::Apply(f, args) => {
            let p = preds.iter().find(|p| &p.name == f).ok_or_else(|| MuError::UnknownName(f.clone()))?;
            if p.params.len() != args.len() {
                return Err(MuError::Arity { name: f.clone(), expected: p.params.len(), found: args.len() });
            }
            let args = args.iter().map(|a| inline_depth(a, preds, depth)).collect::<Result<Vec<_>, _>>()?;
            let body = p.body.substitute(&|n: &str| p.params.iter().position(|(x, _)| x == n).map(|i| args[i].clone()));
            inline_depth(&body, preds, depth + 1)?
        }
        Expr::Lit(_) | Expr::Var(_) => e.clone(),
        Expr::Unary(op, a) => Expr::Unary(*op, Box::new(inline_depth(a, preds, depth)?)),
        Expr::Binary(op, a, b) => Expr::bin(*op, inline_depth(a, preds, depth)?, inline_depth(b, preds, depth)?),
        Expr::Index(a, b) => Expr::Index(Box::new(inline_depth(a, preds, depth)?), Box::new(inline_depth(b, preds, depth)?)),
        Expr::ListLit(xs) => Expr::ListLit(xs.iter().map(|x| inline_depth(x, preds, depth)).collect::<Result<_, _>>()?),
        Expr::If(c, a, b) => Expr::If(
            Box::new(inline_depth(c, preds, depth)?),
            Box::new(inline_depth(a, preds, depth)?),
            Box::new(inline_depth(b, preds, depth)?),
        ),
        Expr::Quant(q, vs, body) => Expr::Quant(*q, vs.clone(), Box::new(inline_depth(body, preds, depth)?)),
    })
}

/// Resolves sort names, inlines predicate macros and checks the formula
/// against `sig`: fixpoint variables bound and positive, negation and
/// implication antecedents constant, actions declared with matching
/// arity, and expressions well typed.
pub fn resolve(p: &PropertyFile, sig: &Signature) -> Result<Formula, MuError> {
    let mut r = Resolver { sig, preds: &p.preds, vars: Vec::new(), fix: Vec::new() };
    for (i, pred) in p.preds.iter().enumerate() {
        if p.preds[..i].iter().any(|q| q.name == pred.name) {
            return Err(MuError::Invalid(format!("predicate `{}` is defined twice", pred.name)));
        }
        let params: Vec<(String, Type)> =
            pred.params.iter().map(|(n, s)| Ok((n.clone(), r.sort(s)?.ty()))).collect::<Result<_, MuError>>()?;
        let body = inline_macros(&pred.body, &p.preds[..i])?;
        let scope = Scope { sig, vars: &params };
        expect_type(&body, &Type::Bool, &scope)?;
    }
    r.formula(&p.formula)
}

struct Resolver<'a> {
    sig: &'a Signature,
    preds: &'a [PredDef],
    vars: Vec<(String, Type)>,
    fix: Vec<String>,
}

impl Resolver<'_> {
    fn sort(&self, s: &Sort) -> Result<Sort, MuError> {
        Ok(match s {
            Sort::Named(n) => self.sig.sorts.get(n).cloned().ok_or_else(|| MuError::UnknownName(n.clone()))?,
            Sort::List { elem, len } => Sort::List { elem: Box::new(self.sort(elem)?), len: *len },
            other => other.clone(),
        })
    }

    fn expr(&self, e: &Expr, want: Option<&Type>) -> Result<Expr, MuError> {
        let e = inline_macros(e, self.preds)?;
        let resolved = resolve_expr_sorts(&e, self)?;
        let scope = Scope { sig: self.sig, vars: &self.vars };
        match want {
            Some(t) => expect_type(&resolved, t, &scope)?,
            None => {
                infer(&resolved, &scope)?;
            }
        }
        Ok(resolved)
    }

    fn named(&self, n: &NamedPattern) -> Result<NamedPattern, MuError> {
        let decl = self.sig.actions.get(&n.name).ok_or_else(|| MuError::UnknownAction(n.name.clone()))?;
        let args = match (&n.args, decl) {
            (None, _) => None,
            (Some(args), Some(params)) => {
                if args.len() != params.len() {
                    return Err(MuError::Arity { name: n.name.clone(), expected: params.len(), found: args.len() });
                }
                let mut out = Vec::new();
                for (a, s) in args.iter().zip(params) {
                    out.push(self.expr(a, Some(&s.ty()))?);
                }
                Some(out)
            }
            (Some(args), None) => Some(args.iter().map(|a| self.expr(a, None)).collect::<Result<_, _>>()?),
        };
        Ok(NamedPattern { name: n.name.clone(), args })
    }

    fn pattern(&self, p: &ActionPattern) -> Result<ActionPattern, MuError> {
        Ok(match p {
            ActionPattern::Any => ActionPattern::Any,
            ActionPattern::Named(n) => ActionPattern::Named(self.named(n)?),
            ActionPattern::Not(ns) => ActionPattern::Not(ns.iter().map(|n| self.named(n)).collect::<Result<_, _>>()?),
            ActionPattern::Union(ps) => ActionPattern::Union(ps.iter().map(|p| self.pattern(p)).collect::<Result<_, _>>()?),
        })
    }

    fn regular(&self, r: &Regular) -> Result<Regular, MuError> {
        Ok(match r {
            Regular::Atom(p) => Regular::Atom(self.pattern(p)?),
            Regular::Concat(a, b) => Regular::Concat(Box::new(self.regular(a)?), Box::new(self.regular(b)?)),
            Regular::Union(a, b) => Regular::Union(Box::new(self.regular(a)?), Box::new(self.regular(b)?)),
            Regular::Star(a) => Regular::Star(Box::new(self.regular(a)?)),
        })
    }

    fn constant_operand(&mut self, f: &Formula, what: &str) -> Result<Formula, MuError> {
        if !f.is_val_closed() {
            let mut names = Vec::new();
            f.fixpoint_names(&mut names);
            if let Some(x) = names.into_iter().find(|x| self.fix.contains(x)) {
                return Err(MuError::NonMonotone(x));
            }
            return Err(MuError::Invalid(format!("{what} applies only to formulas built from val, true and false: `{f}`")));
        }
        self.formula(f)
    }

    fn binders(&mut self, vs: &[(String, Sort)]) -> Result<Vec<(String, Sort)>, MuError> {
        let mut out = Vec::new();
        for (n, s) in vs {
            let s = self.sort(s)?;
            self.vars.push((n.clone(), s.ty()));
            out.push((n.clone(), s));
        }
        Ok(out)
    }

    fn formula(&mut self, f: &Formula) -> Result<Formula, MuError> {
        Ok(match f {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Val(e) => Formula::Val(self.expr(e, Some(&Type::Bool))?),
            Formula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            Formula::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(self.constant_operand(a, "the antecedent of `=>`")?), Box::new(self.formula(b)?))
            }
            Formula::Not(a) => Formula::Not(Box::new(self.constant_operand(a, "negation")?)),
            Formula::Box(r, a) => Formula::boxed(self.regular(r)?, self.formula(a)?),
            Formula::Diamond(r, a) => Formula::diamond(self.regular(r)?, self.formula(a)?),
            Formula::Forall(vs, a) | Formula::Exists(vs, a) => {
                let n = self.vars.len();
                let vs = self.binders(vs)?;
                let body = self.formula(a);
                self.vars.truncate(n);
                let body = Box::new(body?);
                if matches!(f, Formula::Forall(..)) {
                    Formula::Forall(vs, body)
                } else {
                    Formula::Exists(vs, body)
                }
            }
            Formula::Mu(x, a) | Formula::Nu(x, a) => {
                self.fix.push(x.clone());
                let body = self.formula(a);
                self.fix.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::Mu(..)) {
                    Formula::Mu(x.clone(), body)
                } else {
                    Formula::Nu(x.clone(), body)
                }
            }
            Formula::Var(x) => {
                if !self.fix.contains(x) {
                    return Err(MuError::UnknownName(x.clone()));
                }
                Formula::Var(x.clone())
            }
        })
    }
}

fn resolve_expr_sorts(e: &Expr, r: &Resolver<'_>) -> Result<Expr, MuError> {
    Ok(match e {
        Expr::Quant(q, vs, body) => {
            let vs = vs.iter().map(|(n, s)| Ok((n.clone(), r.sort(s)?))).collect::<Result<Vec<_>, MuError>>()?;
            Expr::Quant(*q, vs, Box::new(resolve_expr_sorts(body, r)?))
        }
        Expr::Lit(_) | Expr::Var(_) => e.clone(),
        Expr::Unary(op, a) => Expr::Unary(*op, Box::new(resolve_expr_sorts(a, r)?)),
        Expr::Binary(op, a, b) => Expr::bin(*op, resolve_expr_sorts(a, r)?, resolve_expr_sorts(b, r)?),
        Expr::Index(a, b) => Expr::Index(Box::new(resolve_expr_sorts(a, r)?), Box::new(resolve_expr_sorts(b, r)?)),
        Expr::ListLit(xs) => Expr::ListLit(xs.iter().map(|x| resolve_expr_sorts(x, r)).collect::<Result<_, _>>()?),
        Expr::If(c, a, b) => Expr::If(
            Box::new(resolve_expr_sorts(c, r)?),
            Box::new(resolve_expr_sorts(a, r)?),
            Box::new(resolve_expr_sorts(b, r)?),
        ),
        Expr::Apply(..) => e.clone(),
    })
}
