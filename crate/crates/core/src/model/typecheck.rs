use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::data::{enumerate_sort, eval_expr, EnumDef, Env, EvalError, Expr, Sort, Type, Value};
use crate::lexer::SyntaxError;
use crate::types::{expect_type, infer, TypeError, TypeScope};

use super::{Decl, ModelSource, ProcessTerm, SortDef};

/// Action declared implicitly by every model.
pub const SKIP_ACTION: &str = "skip";

/// Maximum number of local variable slots (parameters plus sum variables) of
/// one process definition.
const MAX_SLOTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("in {site}: {source}")]
    Type { site: String, source: TypeError },
    #[error("in {site}: unknown name `{name}`")]
    UnknownName { site: String, name: String },
    #[error("`{0}` is declared more than once")]
    DuplicateName(String),
    #[error("in {site}: {source}")]
    Eval { site: String, source: EvalError },
    #[error("in {site}: {message}")]
    Invalid { site: String, message: String },
}

pub type TermId = u32;

/// Compiled process term. Expressions refer to locals and globals by name;
/// constructors and constants are already replaced by literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Action { action: usize, args: Vec<Expr> },
    Call { proc: usize, args: Vec<Expr> },
    Seq(TermId, TermId),
    Choice(TermId, TermId),
    Cond { guard: Expr, then: TermId, otherwise: Option<TermId> },
    Sum { slot: usize, values: Vec<Value>, body: TermId },
    Assign { global: usize, value: Expr },
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub params: Vec<Sort>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Global {
    pub name: String,
    pub sort: Sort,
    pub init: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proc {
    pub name: String,
    pub params: Vec<(String, Sort)>,
    /// Parameters followed by one slot per `sum` binder.
    pub slots: Vec<(String, Sort)>,
    pub body: TermId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedModel {
    pub enums: Vec<Arc<EnumDef>>,
    pub sorts: Vec<(String, Sort)>,
    pub actions: Vec<ActionDecl>,
    pub globals: Vec<Global>,
    pub consts: Vec<(String, Sort, Value)>,
    pub procs: Vec<Proc>,
    pub terms: Vec<Term>,
    /// Bit mask of the local slots each term reads, directly or below it.
    pub live: Vec<u64>,
    pub init_proc: usize,
    pub init_args: Vec<Value>,
    ctor_sort: HashMap<String, String>,
}

impl TypedModel {
    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn global_index(&self, name: &str) -> Option<usize> {
        self.globals.iter().position(|g| g.name == name)
    }

    pub fn const_value(&self, name: &str) -> Option<&Value> {
        self.consts.iter().find(|c| c.0 == name).map(|c| &c.2)
    }

    pub fn sort(&self, name: &str) -> Option<&Sort> {
        self.sorts.iter().find(|s| s.0 == name).map(|s| &s.1)
    }

    /// Name of the enumeration that declares `ctor`.
    pub fn ctor_sort(&self, ctor: &str) -> Option<&str> {
        self.ctor_sort.get(ctor).map(String::as_str)
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }
}

struct Scope<'a> {
    ctor_sort: &'a HashMap<String, String>,
    globals: &'a [Global],
    locals: &'a [(String, Type)],
}

impl TypeScope for Scope<'_> {
    fn var_type(&self, name: &str) -> Option<Type> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.clone())
            .or_else(|| self.globals.iter().find(|g| g.name == name).map(|g| g.sort.ty()))
    }

    fn ctor_type(&self, ctor: &str) -> Option<Type> {
        self.ctor_sort.get(ctor).map(|s| Type::Enum(s.clone()))
    }
}

pub fn typecheck(src: &ModelSource) -> Result<TypedModel, ModelError> {
    Checker::default().run(src)
}

#[derive(Default)]
struct Checker {
    tm: Option<TypedModel>,
    names: HashMap<String, &'static str>,
    aliases: HashMap<String, Sort>,
    resolving: Vec<String>,
    proc_index: HashMap<String, usize>,
}

impl Checker {
    fn tm(&mut self) -> &mut TypedModel {
        self.tm.as_mut().expect("initialised")
    }

    fn claim(&mut self, name: &str, kind: &'static str) -> Result<(), ModelError> {
        if self.names.insert(name.to_string(), kind).is_some() {
            return Err(ModelError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    fn run(mut self, src: &ModelSource) -> Result<TypedModel, ModelError> {
        self.tm = Some(TypedModel {
            enums: Vec::new(),
            sorts: Vec::new(),
            actions: vec![ActionDecl { name: SKIP_ACTION.into(), params: vec![] }],
            globals: Vec::new(),
            consts: Vec::new(),
            procs: Vec::new(),
            terms: Vec::new(),
            live: Vec::new(),
            init_proc: 0,
            init_args: Vec::new(),
            ctor_sort: HashMap::new(),
        });
        self.claim(SKIP_ACTION, "action")?;

        // Sorts first, so every later declaration can refer to any of them.
        let mut sort_names = HashMap::new();
        for d in &src.decls {
            if let Decl::Sort { name, def } = d {
                if sort_names.insert(name.clone(), ()).is_some() || is_builtin_sort(name) {
                    return Err(ModelError::DuplicateName(name.clone()));
                }
                match def {
                    SortDef::Struct(ctors) => {
                        let def = Arc::new(EnumDef { name: name.clone(), ctors: ctors.clone() });
                        for c in ctors {
                            self.claim(c, "constructor")?;
                            self.tm().ctor_sort.insert(c.clone(), name.clone());
                        }
                        self.tm().enums.push(def.clone());
                        self.aliases.insert(name.clone(), Sort::Enum(def));
                    }
                    SortDef::Alias(s) => {
                        self.aliases.insert(name.clone(), s.clone());
                    }
                }
            }
        }
        for d in &src.decls {
            if let Decl::Sort { name, .. } = d {
                let s = self.resolve_sort(&Sort::Named(name.clone()), name)?;
                self.tm().sorts.push((name.clone(), s));
            }
        }

        // Names of actions and processes are needed before bodies are checked.
        for d in &src.decls {
            match d {
                Decl::Act { names, params } => {
                    let params = params
                        .iter()
                        .map(|s| self.resolve_sort(s, &names[0]))
                        .collect::<Result<Vec<_>, _>>()?;
                    for n in names {
                        self.claim(n, "action")?;
                        self.tm().actions.push(ActionDecl { name: n.clone(), params: params.clone() });
                    }
                }
                Decl::Proc { name, params, .. } => {
                    self.claim(name, "process")?;
                    let params = params
                        .iter()
                        .map(|(n, s)| Ok((n.clone(), self.resolve_sort(s, name)?)))
                        .collect::<Result<Vec<_>, ModelError>>()?;
                    let idx = self.tm().procs.len();
                    self.proc_index.insert(name.clone(), idx);
                    self.tm().procs.push(Proc { name: name.clone(), slots: params.clone(), params, body: 0 });
                }
                _ => {}
            }
        }

        // Constants and globals, in declaration order.
        for d in &src.decls {
            match d {
                Decl::Const { name, sort, value } | Decl::Glob { name, sort, init: value } => {
                    let is_const = matches!(d, Decl::Const { .. });
                    let site = format!("declaration of `{name}`");
                    let sort = self.resolve_sort(sort, name)?;
                    let v = self.closed_value(value, &sort, &site)?;
                    self.claim(name, if is_const { "constant" } else { "global" })?;
                    if is_const {
                        self.tm().consts.push((name.clone(), sort, v));
                    } else {
                        self.tm().globals.push(Global { name: name.clone(), sort, init: v });
                    }
                }
                _ => {}
            }
        }

        for d in &src.decls {
            if let Decl::Proc { name, body, .. } = d {
                let idx = self.proc_index[name];
                let mut b = BodyBuilder { proc: idx, slots: self.tm().procs[idx].slots.clone(), scope: Vec::new() };
                b.scope = (0..b.slots.len()).collect();
                let root = self.term(&mut b, body)?;
                if b.slots.len() > MAX_SLOTS {
                    return Err(ModelError::Invalid {
                        site: format!("process `{name}`"),
                        message: format!("more than {MAX_SLOTS} local variables"),
                    });
                }
                let p = &mut self.tm().procs[idx];
                p.slots = b.slots;
                p.body = root;
            }
        }

        let mut init = None;
        for d in &src.decls {
            if let Decl::Init { name, args } = d {
                init = Some((name, args));
            }
        }
        let (name, args) = init.ok_or_else(|| ModelError::Invalid { site: "model".into(), message: "missing init".into() })?;
        let site = "init".to_string();
        let idx = *self
            .proc_index
            .get(name)
            .ok_or_else(|| ModelError::UnknownName { site: site.clone(), name: name.clone() })?;
        let params = self.tm().procs[idx].params.clone();
        if params.len() != args.len() {
            return Err(arity_error(&site, name, params.len(), args.len()));
        }
        let mut values = Vec::new();
        for ((_, s), a) in params.iter().zip(args) {
            values.push(self.closed_value(a, s, &site)?);
        }
        self.tm().init_proc = idx;
        self.tm().init_args = values;

        let tm = self.tm.take().expect("initialised");
        check_recursion(&tm)?;
        Ok(tm)
    }

    fn resolve_sort(&mut self, s: &Sort, site: &str) -> Result<Sort, ModelError> {
        Ok(match s {
            Sort::Named(n) => {
                if self.resolving.contains(n) {
                    return Err(ModelError::Invalid { site: format!("sort `{site}`"), message: format!("sort `{n}` is defined in terms of itself") });
                }
                let def = self
                    .aliases
                    .get(n)
                    .cloned()
                    .ok_or_else(|| ModelError::UnknownName { site: format!("declaration of `{site}`"), name: n.clone() })?;
                self.resolving.push(n.clone());
                let r = self.resolve_sort(&def, site);
                self.resolving.pop();
                r?
            }
            Sort::List { elem, len } => Sort::List { elem: Box::new(self.resolve_sort(elem, site)?), len: *len },
            other => other.clone(),
        })
    }

    /// Replaces constructors and constants by literals, leaving locals and
    /// globals as variables.
    fn resolve_expr(&mut self, e: &Expr, locals: &[String], site: &str) -> Result<Expr, ModelError> {
        check_model_expr(e, site)?;
        let tm = self.tm();
        Ok(e.substitute(&|n: &str| {
            if locals.iter().any(|l| l == n) || tm.global_index(n).is_some() {
                None
            } else if tm.ctor_sort.contains_key(n) {
                Some(Expr::Lit(Value::ctor(n)))
            } else {
                tm.const_value(n).map(|v| Expr::Lit(v.clone()))
            }
        }))
    }

    fn closed_value(&mut self, e: &Expr, sort: &Sort, site: &str) -> Result<Value, ModelError> {
        let e = self.resolve_expr(e, &[], site)?;
        let tm = self.tm.as_ref().expect("initialised");
        let scope = Scope { ctor_sort: &tm.ctor_sort, globals: &[], locals: &[] };
        expect_type(&e, &sort.ty(), &scope).map_err(|source| type_error(site, source))?;
        let v = eval_expr(&e, &Env::new()).map_err(|source| ModelError::Eval { site: site.to_string(), source })?;
        let v = coerce(v, sort);
        if !sort.contains(&v) {
            return Err(ModelError::Eval { site: site.to_string(), source: EvalError::OutOfSort { value: v.to_string(), sort: sort.to_string() } });
        }
        Ok(v)
    }

    fn push(&mut self, t: Term, live: u64) -> TermId {
        let tm = self.tm();
        tm.terms.push(t);
        tm.live.push(live);
        (tm.terms.len() - 1) as TermId
    }

    /// Resolves and types an expression in the current body scope, returning
    /// it with the mask of slots it reads.
    fn body_expr(&mut self, b: &BodyBuilder, e: &Expr, want: Option<&Type>) -> Result<(Expr, u64), ModelError> {
        let site = b.site(self);
        let locals: Vec<String> = b.scope.iter().map(|&s| b.slots[s].0.clone()).collect();
        let e = self.resolve_expr(e, &locals, &site)?;
        let local_types: Vec<(String, Type)> = b.scope.iter().map(|&s| (b.slots[s].0.clone(), b.slots[s].1.ty())).collect();
        let tm = self.tm.as_ref().expect("initialised");
        let scope = Scope { ctor_sort: &tm.ctor_sort, globals: &tm.globals, locals: &local_types };
        match want {
            Some(t) => expect_type(&e, t, &scope),
            None => infer(&e, &scope).map(|_| ()),
        }
        .map_err(|source| match source {
            TypeError::UnknownName(name) => ModelError::UnknownName { site: site.clone(), name },
            source => type_error(&site, source),
        })?;
        let mut mask = 0u64;
        for v in e.free_vars() {
            if let Some(&slot) = b.scope.iter().rev().find(|&&s| b.slots[s].0 == v) {
                mask |= 1 << slot;
            }
        }
        Ok((e, mask))
    }

    fn term(&mut self, b: &mut BodyBuilder, t: &ProcessTerm) -> Result<TermId, ModelError> {
        Ok(match t {
            ProcessTerm::Skip => self.push(Term::Action { action: 0, args: vec![] }, 0),
            ProcessTerm::Done => self.push(Term::Done, 0),
            ProcessTerm::Action { name, args } => {
                let action = self.tm().action_index(name).expect("classified by the parser");
                let params = self.tm().actions[action].params.clone();
                if params.len() != args.len() {
                    return Err(arity_error(&b.site(self), name, params.len(), args.len()));
                }
                let (args, live) = self.args(b, args, &params)?;
                self.push(Term::Action { action, args }, live)
            }
            ProcessTerm::Call { name, args } => {
                let proc = *self
                    .proc_index
                    .get(name)
                    .ok_or_else(|| ModelError::UnknownName { site: b.site(self), name: name.clone() })?;
                let params: Vec<Sort> = self.tm().procs[proc].params.iter().map(|p| p.1.clone()).collect();
                if params.len() != args.len() {
                    return Err(arity_error(&b.site(self), name, params.len(), args.len()));
                }
                let (args, live) = self.args(b, args, &params)?;
                self.push(Term::Call { proc, args }, live)
            }
            ProcessTerm::Seq(l, r) => {
                let l = self.term(b, l)?;
                let r = self.term(b, r)?;
                let live = self.tm().live[l as usize] | self.tm().live[r as usize];
                self.push(Term::Seq(l, r), live)
            }
            ProcessTerm::Choice(l, r) => {
                let l = self.term(b, l)?;
                let r = self.term(b, r)?;
                let live = self.tm().live[l as usize] | self.tm().live[r as usize];
                self.push(Term::Choice(l, r), live)
            }
            ProcessTerm::Cond { guard, then, otherwise } => {
                let (guard, mut live) = self.body_expr(b, guard, Some(&Type::Bool))?;
                let then = self.term(b, then)?;
                live |= self.tm().live[then as usize];
                let otherwise = match otherwise {
                    Some(e) => {
                        let e = self.term(b, e)?;
                        live |= self.tm().live[e as usize];
                        Some(e)
                    }
                    None => None,
                };
                self.push(Term::Cond { guard, then, otherwise }, live)
            }
            ProcessTerm::Sum { var, sort, body } => {
                let site = b.site(self);
                if b.scope.iter().any(|&s| &b.slots[s].0 == var) || self.names.contains_key(var) {
                    return Err(ModelError::Invalid { site, message: format!("`{var}` shadows another name") });
                }
                let sort = self.resolve_sort(sort, &site)?;
                let values = enumerate_sort(&sort).map_err(|source| ModelError::Eval { site: site.clone(), source })?;
                let slot = b.slots.len();
                b.slots.push((var.clone(), sort));
                b.scope.push(slot);
                let body = self.term(b, body);
                b.scope.pop();
                let body = body?;
                let live = self.tm().live[body as usize] & !(1u64.checked_shl(slot as u32).unwrap_or(0));
                self.push(Term::Sum { slot, values, body }, live)
            }
            ProcessTerm::Assign { var, value } => {
                let site = b.site(self);
                let global = self
                    .tm()
                    .global_index(var)
                    .ok_or_else(|| ModelError::UnknownName { site: site.clone(), name: var.clone() })?;
                let ty = self.tm().globals[global].sort.ty();
                let (value, live) = self.body_expr(b, value, Some(&ty))?;
                self.push(Term::Assign { global, value }, live)
            }
        })
    }

    fn args(&mut self, b: &BodyBuilder, args: &[Expr], params: &[Sort]) -> Result<(Vec<Expr>, u64), ModelError> {
        let mut out = Vec::new();
        let mut live = 0;
        for (a, s) in args.iter().zip(params) {
            let (e, m) = self.body_expr(b, a, Some(&s.ty()))?;
            out.push(e);
            live |= m;
        }
        Ok((out, live))
    }
}

struct BodyBuilder {
    proc: usize,
    slots: Vec<(String, Sort)>,
    /// Slots in scope, innermost last.
    scope: Vec<usize>,
}

impl BodyBuilder {
    fn site(&self, c: &Checker) -> String {
        format!("process `{}`", c.tm.as_ref().expect("initialised").procs[self.proc].name)
    }
}

fn is_builtin_sort(name: &str) -> bool {
    matches!(name, "Bool" | "Nat" | "Rat" | "List")
}

fn type_error(site: &str, source: TypeError) -> ModelError {
    ModelError::Type { site: site.to_string(), source }
}

fn arity_error(site: &str, name: &str, want: usize, got: usize) -> ModelError {
    ModelError::Invalid { site: site.to_string(), message: format!("`{name}` expects {want} argument(s), found {got}") }
}

/// Naturals are accepted where rationals are declared.
pub(crate) fn coerce(v: Value, sort: &Sort) -> Value {
    match (v, sort) {
        (Value::Nat(n), Sort::Rat { .. }) => Value::Rat(n as i64 * crate::data::RAT_DENOMINATOR),
        (Value::List(xs), Sort::List { elem, .. }) => Value::list(xs.iter().map(|x| coerce(x.clone(), elem)).collect()),
        (v, _) => v,
    }
}

fn check_model_expr(e: &Expr, site: &str) -> Result<(), ModelError> {
    let bad = |message: String| Err(ModelError::Invalid { site: site.to_string(), message });
    match e {
        Expr::Quant(..) => bad(format!("quantifiers are not allowed in models: `{e}`")),
        Expr::Apply(f, _) => bad(format!("unknown function `{f}`")),
        Expr::Lit(_) | Expr::Var(_) => Ok(()),
        Expr::Unary(_, a) => check_model_expr(a, site),
        Expr::Binary(_, a, b) | Expr::Index(a, b) => {
            check_model_expr(a, site)?;
            check_model_expr(b, site)
        }
        Expr::ListLit(xs) => xs.iter().try_for_each(|x| check_model_expr(x, site)),
        Expr::If(c, a, b) => {
            check_model_expr(c, site)?;
            check_model_expr(a, site)?;
            check_model_expr(b, site)
        }
    }
}

// ---------------------------------------------------------------------------
// Static checks on the call structure

/// Least fixpoint of a per-process boolean property.
fn fixpoint(tm: &TypedModel, f: impl Fn(&TypedModel, TermId, &[bool]) -> bool) -> Vec<bool> {
    let mut val = vec![false; tm.procs.len()];
    loop {
        let next: Vec<bool> = tm.procs.iter().map(|p| f(tm, p.body, &val)).collect();
        if next == val {
            return val;
        }
        val = next;
    }
}

/// Whether a term can terminate successfully.
fn can_end(tm: &TypedModel, t: TermId, procs: &[bool]) -> bool {
    match tm.term(t) {
        Term::Action { .. } | Term::Assign { .. } | Term::Done => true,
        Term::Call { proc, .. } => procs[*proc],
        Term::Seq(a, b) => can_end(tm, *a, procs) && can_end(tm, *b, procs),
        Term::Choice(a, b) => can_end(tm, *a, procs) || can_end(tm, *b, procs),
        Term::Cond { then, otherwise, .. } => can_end(tm, *then, procs) || otherwise.is_some_and(|e| can_end(tm, e, procs)),
        Term::Sum { values, body, .. } => !values.is_empty() && can_end(tm, *body, procs),
    }
}

/// Whether a term can terminate without performing an action.
fn silent_end(tm: &TypedModel, t: TermId, procs: &[bool]) -> bool {
    match tm.term(t) {
        Term::Action { .. } => false,
        Term::Assign { .. } | Term::Done => true,
        Term::Call { proc, .. } => procs[*proc],
        Term::Seq(a, b) => silent_end(tm, *a, procs) && silent_end(tm, *b, procs),
        Term::Choice(a, b) => silent_end(tm, *a, procs) || silent_end(tm, *b, procs),
        Term::Cond { then, otherwise, .. } => {
            silent_end(tm, *then, procs) || otherwise.is_some_and(|e| silent_end(tm, e, procs))
        }
        Term::Sum { values, body, .. } => !values.is_empty() && silent_end(tm, *body, procs),
    }
}

/// Calls reachable from `t` before any action, with a flag marking calls
/// made from the left operand of a sequential composition.
fn unguarded_calls(tm: &TypedModel, t: TermId, silent: &[bool], nested: bool, out: &mut Vec<(usize, bool)>) {
    match tm.term(t) {
        Term::Action { .. } | Term::Assign { .. } | Term::Done => {}
        Term::Call { proc, .. } => out.push((*proc, nested)),
        Term::Seq(a, b) => {
            unguarded_calls(tm, *a, silent, true, out);
            if silent_end(tm, *a, silent) {
                unguarded_calls(tm, *b, silent, nested, out);
            }
        }
        Term::Choice(a, b) => {
            unguarded_calls(tm, *a, silent, nested, out);
            unguarded_calls(tm, *b, silent, nested, out);
        }
        Term::Cond { then, otherwise, .. } => {
            unguarded_calls(tm, *then, silent, nested, out);
            if let Some(e) = otherwise {
                unguarded_calls(tm, *e, silent, nested, out);
            }
        }
        Term::Sum { body, .. } => unguarded_calls(tm, *body, silent, nested, out),
    }
}

/// Every call in `t`, flagged when it sits in the left operand of a `.`.
fn all_calls(tm: &TypedModel, t: TermId, nested: bool, out: &mut Vec<(usize, bool)>) {
    match tm.term(t) {
        Term::Action { .. } | Term::Assign { .. } | Term::Done => {}
        Term::Call { proc, .. } => out.push((*proc, nested)),
        Term::Seq(a, b) => {
            all_calls(tm, *a, true, out);
            all_calls(tm, *b, nested, out);
        }
        Term::Choice(a, b) => {
            all_calls(tm, *a, nested, out);
            all_calls(tm, *b, nested, out);
        }
        Term::Cond { then, otherwise, .. } => {
            all_calls(tm, *then, nested, out);
            if let Some(e) = otherwise {
                all_calls(tm, *e, nested, out);
            }
        }
        Term::Sum { body, .. } => all_calls(tm, *body, nested, out),
    }
}

fn check_seq_left(tm: &TypedModel, t: TermId, ends: &[bool], site: &str) -> Result<(), ModelError> {
    match tm.term(t) {
        Term::Seq(a, b) => {
            if !can_end(tm, *a, ends) {
                return Err(ModelError::Invalid {
                    site: site.to_string(),
                    message: "the left operand of `.` can never terminate".into(),
                });
            }
            check_seq_left(tm, *a, ends, site)?;
            check_seq_left(tm, *b, ends, site)
        }
        Term::Choice(a, b) => {
            check_seq_left(tm, *a, ends, site)?;
            check_seq_left(tm, *b, ends, site)
        }
        Term::Cond { then, otherwise, .. } => {
            check_seq_left(tm, *then, ends, site)?;
            otherwise.map_or(Ok(()), |e| check_seq_left(tm, e, ends, site))
        }
        Term::Sum { body, .. } => check_seq_left(tm, *body, ends, site),
        _ => Ok(()),
    }
}

/// Transitive closure of a relation given as adjacency lists.
fn reach(n: usize, edges: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for s in 0..n {
        let mut stack = edges[s].clone();
        while let Some(v) = stack.pop() {
            if !r[s][v] {
                r[s][v] = true;
                stack.extend(edges[v].iter().copied());
            }
        }
    }
    r
}

fn check_recursion(tm: &TypedModel) -> Result<(), ModelError> {
    let n = tm.procs.len();
    let ends = fixpoint(tm, can_end);
    for p in &tm.procs {
        check_seq_left(tm, p.body, &ends, &format!("process `{}`", p.name))?;
    }

    let silent = fixpoint(tm, silent_end);
    let mut unguarded = vec![Vec::new(); n];
    let mut calls = vec![Vec::new(); n];
    let mut nested_calls = vec![Vec::new(); n];
    for (i, p) in tm.procs.iter().enumerate() {
        let mut out = Vec::new();
        unguarded_calls(tm, p.body, &silent, false, &mut out);
        unguarded[i] = out.iter().map(|c| c.0).collect();
        let mut out = Vec::new();
        all_calls(tm, p.body, false, &mut out);
        calls[i] = out.iter().map(|c| c.0).collect();
        nested_calls[i] = out.iter().filter(|c| c.1).map(|c| c.0).collect();
    }
    let ug = reach(n, &unguarded);
    for (i, p) in tm.procs.iter().enumerate() {
        if ug[i][i] {
            return Err(ModelError::Invalid {
                site: format!("process `{}`", p.name),
                message: "unguarded recursion".into(),
            });
        }
    }
    let all = reach(n, &calls);
    for (i, p) in tm.procs.iter().enumerate() {
        for &q in &nested_calls[i] {
            if q == i || all[q][i] {
                return Err(ModelError::Invalid {
                    site: format!("process `{}`", p.name),
                    message: format!("recursion through the left operand of `.` (call to `{}`) has an unbounded stack", tm.procs[q].name),
                });
            }
        }
    }
    Ok(())
}
