use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::data::{collect_conjuncts, enumerate_sort_capped, eval, refine_sort, Env, Expr, Lookup, Sort, Value};
use crate::lts::Label;
use crate::model::coerce;

use super::ast::{ActionPattern, Formula, NamedPattern, Regular};
use super::resolve::Signature;
use super::MuError;

// ---------------------------------------------------------------------------
// Regular formulas

/// Rewrites every modality over a regular formula into single-step
/// modalities and fixpoints:
/// `[R1.R2]f = [R1][R2]f`, `[R1+R2]f = [R1]f && [R2]f`,
/// `[R*]f = nu X. (f && [R]X)`, and dually for diamonds with `||` and `mu`.
pub fn expand_regular(f: &Formula) -> Formula {
    let mut used = Vec::new();
    f.fixpoint_names(&mut used);
    let mut fresh = Fresh { used, next: 1 };
    regular_free(f, &mut fresh)
}

struct Fresh {
    used: Vec<String>,
    next: usize,
}

impl Fresh {
    fn name(&mut self) -> String {
        loop {
            let n = format!("X{}", self.next);
            self.next += 1;
            if !self.used.contains(&n) {
                self.used.push(n.clone());
                return n;
            }
        }
    }
}

fn regular_free(f: &Formula, fresh: &mut Fresh) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Val(_) | Formula::Var(_) => f.clone(),
        Formula::And(a, b) => Formula::and(regular_free(a, fresh), regular_free(b, fresh)),
        Formula::Or(a, b) => Formula::or(regular_free(a, fresh), regular_free(b, fresh)),
        Formula::Implies(a, b) => Formula::Implies(Box::new(regular_free(a, fresh)), Box::new(regular_free(b, fresh))),
        Formula::Not(a) => Formula::Not(Box::new(regular_free(a, fresh))),
        Formula::Forall(vs, a) => Formula::Forall(vs.clone(), Box::new(regular_free(a, fresh))),
        Formula::Exists(vs, a) => Formula::Exists(vs.clone(), Box::new(regular_free(a, fresh))),
        Formula::Mu(x, a) => Formula::Mu(x.clone(), Box::new(regular_free(a, fresh))),
        Formula::Nu(x, a) => Formula::Nu(x.clone(), Box::new(regular_free(a, fresh))),
        Formula::Box(r, a) => modal(r, regular_free(a, fresh), true, fresh),
        Formula::Diamond(r, a) => modal(r, regular_free(a, fresh), false, fresh),
    }
}

fn modal(r: &Regular, body: Formula, is_box: bool, fresh: &mut Fresh) -> Formula {
    match r {
        Regular::Atom(_) => {
            if is_box {
                Formula::boxed(r.clone(), body)
            } else {
                Formula::diamond(r.clone(), body)
            }
        }
        Regular::Concat(a, b) => {
            let inner = modal(b, body, is_box, fresh);
            modal(a, inner, is_box, fresh)
        }
        Regular::Union(a, b) => {
            let l = modal(a, body.clone(), is_box, fresh);
            let r = modal(b, body, is_box, fresh);
            if is_box {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        Regular::Star(a) => {
            let x = fresh.name();
            let step = modal(a, Formula::Var(x.clone()), is_box, fresh);
            if is_box {
                Formula::Nu(x, Box::new(Formula::and(body, step)))
            } else {
                Formula::Mu(x, Box::new(Formula::or(body, step)))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Ground patterns

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundArg {
    Any,
    Is(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundNamed {
    pub name: Arc<str>,
    pub args: Option<Vec<GroundArg>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundPattern {
    Any,
    Named(GroundNamed),
    Not(Vec<GroundNamed>),
    Union(Vec<GroundPattern>),
}

/// Numeric values compare by magnitude so that `3` matches `300/100`.
fn value_matches(p: &Value, v: &Value) -> bool {
    match (p, v) {
        (Value::Nat(n), Value::Rat(r)) | (Value::Rat(r), Value::Nat(n)) => *r == *n as i64 * crate::data::RAT_DENOMINATOR,
        (Value::List(a), Value::List(b)) => a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| value_matches(x, y)),
        _ => p == v,
    }
}

fn named_matches(p: &GroundNamed, l: &Label) -> bool {
    if *p.name != *l.action {
        return false;
    }
    match &p.args {
        None => true,
        Some(args) => {
            args.len() == l.args.len()
                && args.iter().zip(&l.args).all(|(a, v)| match a {
                    GroundArg::Any => true,
                    GroundArg::Is(x) => value_matches(x, v),
                })
        }
    }
}

pub fn match_label(p: &GroundPattern, l: &Label) -> bool {
    match p {
        GroundPattern::Any => true,
        GroundPattern::Named(n) => named_matches(n, l),
        GroundPattern::Not(ns) => !ns.iter().any(|n| named_matches(n, l)),
        GroundPattern::Union(ps) => ps.iter().any(|p| match_label(p, l)),
    }
}

impl fmt::Display for GroundNamed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if let Some(args) = &self.args {
            f.write_str("(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                match a {
                    GroundArg::Any => f.write_str("_")?,
                    GroundArg::Is(v) => write!(f, "{v}")?,
                }
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for GroundPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundPattern::Any => f.write_str("true"),
            GroundPattern::Named(n) => write!(f, "{n}"),
            GroundPattern::Not(ns) => {
                f.write_str("!(")?;
                for (i, n) in ns.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_str(")")
            }
            GroundPattern::Union(ps) => {
                f.write_str("(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Core formulas

pub type NodeId = u32;
pub type VarId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Mu,
    Nu,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoreNode {
    True,
    False,
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    /// Pattern index and body.
    Box(u32, NodeId),
    Diamond(u32, NodeId),
    Fix(Sign, VarId, NodeId),
    Var(VarId),
}

/// Closed, quantifier-free, regular-free formula stored as a DAG. Children
/// always have smaller ids than their parents. Every fixpoint binds its own
/// variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreFormula {
    pub nodes: Vec<CoreNode>,
    pub root: NodeId,
    pub patterns: Vec<GroundPattern>,
    pub var_names: Vec<String>,
    pub var_signs: Vec<Sign>,
}

impl CoreFormula {
    pub fn node(&self, id: NodeId) -> &CoreNode {
        &self.nodes[id as usize]
    }

    /// Syntactic alternation depth: the longest chain of nested fixpoints
    /// of alternating sign in which each inner fixpoint mentions the
    /// variable of the one enclosing it.
    pub fn alternation_depth(&self) -> u32 {
        let n = self.nodes.len();
        // For every node and each variable free in it: the largest value
        // ad(m) + [sign(m) differs from the variable's sign] over fixpoints
        // m below the node in which the variable is free.
        let mut h: Vec<Vec<(VarId, u32)>> = Vec::with_capacity(n);
        let mut best = 0;
        for node in &self.nodes {
            let merged = |children: &[NodeId], h: &Vec<Vec<(VarId, u32)>>| {
                let mut out: Vec<(VarId, u32)> = Vec::new();
                for &c in children {
                    for &(v, d) in &h[c as usize] {
                        match out.iter_mut().find(|e| e.0 == v) {
                            Some(e) => e.1 = e.1.max(d),
                            None => out.push((v, d)),
                        }
                    }
                }
                out
            };
            let entry = match node {
                CoreNode::True | CoreNode::False => Vec::new(),
                CoreNode::Var(v) => vec![(*v, 0)],
                CoreNode::And(cs) | CoreNode::Or(cs) => merged(cs, &h),
                CoreNode::Box(_, c) | CoreNode::Diamond(_, c) => h[*c as usize].clone(),
                CoreNode::Fix(sign, x, body) => {
                    let inner = &h[*body as usize];
                    let ad = inner.iter().find(|e| e.0 == *x).map_or(1, |e| e.1.max(1));
                    best = best.max(ad);
                    inner
                        .iter()
                        .filter(|e| e.0 != *x)
                        .map(|&(v, d)| (v, d.max(ad + u32::from(self.var_signs[v as usize] != *sign))))
                        .collect()
                }
            };
            h.push(entry);
        }
        best
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, id: NodeId) -> fmt::Result {
        match self.node(id) {
            CoreNode::True => f.write_str("true"),
            CoreNode::False => f.write_str("false"),
            CoreNode::Var(v) => f.write_str(&self.var_names[*v as usize]),
            CoreNode::And(cs) | CoreNode::Or(cs) => {
                let op = if matches!(self.node(id), CoreNode::And(_)) { " && " } else { " || " };
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    self.write(f, *c)?;
                }
                f.write_str(")")
            }
            CoreNode::Box(p, c) => {
                write!(f, "[{}]", self.patterns[*p as usize])?;
                self.write(f, *c)
            }
            CoreNode::Diamond(p, c) => {
                write!(f, "<{}>", self.patterns[*p as usize])?;
                self.write(f, *c)
            }
            CoreNode::Fix(s, v, c) => {
                let kw = if *s == Sign::Mu { "mu" } else { "nu" };
                write!(f, "({kw} {}. ", self.var_names[*v as usize])?;
                self.write(f, *c)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for CoreFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.root)
    }
}

struct FormulaEnv<'a> {
    env: &'a Env,
    sig: &'a Signature,
}

impl Lookup for FormulaEnv<'_> {
    fn lookup(&self, name: &str) -> Option<Value> {
        if let Some(v) = self.env.get(name) {
            return Some(v.clone());
        }
        if let Some(v) = self.sig.const_value(name) {
            return Some(v.clone());
        }
        self.sig.ctors.contains_key(name).then(|| Value::ctor(name))
    }
}

struct Builder<'a> {
    sig: &'a Signature,
    cap: usize,
    node_cap: usize,
    nodes: Vec<CoreNode>,
    shared: HashMap<CoreNode, NodeId>,
    patterns: Vec<GroundPattern>,
    pattern_ids: HashMap<GroundPattern, u32>,
    var_names: Vec<String>,
    var_signs: Vec<Sign>,
}

/// Upper bound on the number of core formula nodes.
pub const DEFAULT_NODE_CAP: usize = 20_000_000;

/// Expands data quantifiers over their (guard-refined) finite domains,
/// evaluates every `val` and grounds every action pattern. The input must be
/// regular-free and resolved against `sig`.
pub fn expand_quantifiers(f: &Formula, sig: &Signature, cap: usize) -> Result<CoreFormula, MuError> {
    let mut b = Builder {
        sig,
        cap,
        node_cap: DEFAULT_NODE_CAP,
        nodes: Vec::new(),
        shared: HashMap::new(),
        patterns: Vec::new(),
        pattern_ids: HashMap::new(),
        var_names: Vec::new(),
        var_signs: Vec::new(),
    };
    let mut env = Env::new();
    let mut fix = Vec::new();
    let root = b.expand(f, &mut env, &mut fix)?;
    Ok(CoreFormula { nodes: b.nodes, root, patterns: b.patterns, var_names: b.var_names, var_signs: b.var_signs })
}

impl Builder<'_> {
    fn add(&mut self, n: CoreNode) -> Result<NodeId, MuError> {
        if let Some(&id) = self.shared.get(&n) {
            return Ok(id);
        }
        if self.nodes.len() >= self.node_cap {
            return Err(MuError::TooLarge(self.node_cap));
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n.clone());
        if !matches!(n, CoreNode::Fix(..)) {
            self.shared.insert(n, id);
        }
        Ok(id)
    }

    fn constant(&mut self, b: bool) -> Result<NodeId, MuError> {
        self.add(if b { CoreNode::True } else { CoreNode::False })
    }

    fn as_constant(&self, id: NodeId) -> Option<bool> {
        match self.nodes[id as usize] {
            CoreNode::True => Some(true),
            CoreNode::False => Some(false),
            _ => None,
        }
    }

    /// Conjunction (`and = true`) or disjunction with constant folding,
    /// flattening and duplicate removal.
    fn junction(&mut self, and: bool, parts: Vec<NodeId>) -> Result<NodeId, MuError> {
        let mut out: Vec<NodeId> = Vec::new();
        for p in parts {
            match (&self.nodes[p as usize], and) {
                (CoreNode::True, true) | (CoreNode::False, false) => {}
                (CoreNode::True, false) | (CoreNode::False, true) => return self.constant(!and),
                (CoreNode::And(cs), true) | (CoreNode::Or(cs), false) => {
                    for c in cs.clone() {
                        if !out.contains(&c) {
                            out.push(c);
                        }
                    }
                }
                _ => {
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        match out.len() {
            0 => self.constant(and),
            1 => Ok(out[0]),
            _ => self.add(if and { CoreNode::And(out) } else { CoreNode::Or(out) }),
        }
    }

    fn eval_bool(&self, e: &Expr, env: &Env) -> Result<bool, MuError> {
        match eval(e, &FormulaEnv { env, sig: self.sig })? {
            Value::Bool(b) => Ok(b),
            other => Err(MuError::Invalid(format!("`{e}` evaluates to {other}, not a boolean"))),
        }
    }

    fn ground_named(&self, n: &NamedPattern, env: &Env) -> Result<GroundNamed, MuError> {
        let params = self.sig.actions.get(&n.name).cloned().flatten();
        let args = match &n.args {
            None => None,
            Some(args) => {
                let mut out = Vec::new();
                for (i, a) in args.iter().enumerate() {
                    if matches!(a, Expr::Var(v) if v == "_") {
                        out.push(GroundArg::Any);
                        continue;
                    }
                    let v = eval(a, &FormulaEnv { env, sig: self.sig })?;
                    let v = match params.as_ref().and_then(|ps| ps.get(i)) {
                        Some(s) => coerce(v, s),
                        None => v,
                    };
                    out.push(GroundArg::Is(v));
                }
                Some(out)
            }
        };
        Ok(GroundNamed { name: Arc::from(n.name.as_str()), args })
    }

    fn ground(&self, p: &ActionPattern, env: &Env) -> Result<GroundPattern, MuError> {
        Ok(match p {
            ActionPattern::Any => GroundPattern::Any,
            ActionPattern::Named(n) => GroundPattern::Named(self.ground_named(n, env)?),
            ActionPattern::Not(ns) => GroundPattern::Not(ns.iter().map(|n| self.ground_named(n, env)).collect::<Result<_, _>>()?),
            ActionPattern::Union(ps) => GroundPattern::Union(ps.iter().map(|p| self.ground(p, env)).collect::<Result<_, _>>()?),
        })
    }

    fn pattern_id(&mut self, p: GroundPattern) -> u32 {
        if let Some(&id) = self.pattern_ids.get(&p) {
            return id;
        }
        let id = self.patterns.len() as u32;
        self.patterns.push(p.clone());
        self.pattern_ids.insert(p, id);
        id
    }

    fn expand(&mut self, f: &Formula, env: &mut Env, fix: &mut Vec<(String, VarId)>) -> Result<NodeId, MuError> {
        match f {
            Formula::True => self.constant(true),
            Formula::False => self.constant(false),
            Formula::Val(e) => {
                let b = self.eval_bool(e, env)?;
                self.constant(b)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let and = matches!(f, Formula::And(..));
                let x = self.expand(a, env, fix)?;
                if self.as_constant(x) == Some(!and) {
                    return Ok(x);
                }
                let y = self.expand(b, env, fix)?;
                self.junction(and, vec![x, y])
            }
            Formula::Implies(a, b) => {
                let x = self.expand(a, env, fix)?;
                match self.as_constant(x) {
                    Some(false) => self.constant(true),
                    Some(true) => self.expand(b, env, fix),
                    None => Err(MuError::Invalid(format!("antecedent `{a}` is not constant"))),
                }
            }
            Formula::Not(a) => {
                let x = self.expand(a, env, fix)?;
                match self.as_constant(x) {
                    Some(v) => self.constant(!v),
                    None => Err(MuError::Invalid(format!("negated formula `{a}` is not constant"))),
                }
            }
            Formula::Box(r, a) | Formula::Diamond(r, a) => {
                let is_box = matches!(f, Formula::Box(..));
                let Regular::Atom(p) = r else {
                    return Err(MuError::Invalid("regular formulas must be expanded first".into()));
                };
                let body = self.expand(a, env, fix)?;
                if self.as_constant(body) == Some(is_box) {
                    return Ok(body);
                }
                let p = self.ground(p, env)?;
                let p = self.pattern_id(p);
                self.add(if is_box { CoreNode::Box(p, body) } else { CoreNode::Diamond(p, body) })
            }
            Formula::Forall(vs, a) | Formula::Exists(vs, a) => {
                let forall = matches!(f, Formula::Forall(..));
                let guard = guard_of(forall, a);
                self.quantify(forall, vs, &guard, a, env, fix)
            }
            Formula::Mu(x, a) | Formula::Nu(x, a) => {
                let sign = if matches!(f, Formula::Mu(..)) { Sign::Mu } else { Sign::Nu };
                let v = self.var_names.len() as VarId;
                self.var_names.push(format!("{x}_{v}"));
                self.var_signs.push(sign);
                fix.push((x.clone(), v));
                let body = self.expand(a, env, fix);
                fix.pop();
                let body = body?;
                self.add(CoreNode::Fix(sign, v, body))
            }
            Formula::Var(x) => {
                let v = fix
                    .iter()
                    .rev()
                    .find(|(n, _)| n == x)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| MuError::UnknownName(x.clone()))?;
                self.add(CoreNode::Var(v))
            }
        }
    }

    fn quantify(
        &mut self,
        forall: bool,
        vs: &[(String, Sort)],
        guard: &[&Expr],
        body: &Formula,
        env: &mut Env,
        fix: &mut Vec<(String, VarId)>,
    ) -> Result<NodeId, MuError> {
        let Some(((name, sort), rest)) = vs.split_first() else {
            return self.expand(body, env, fix);
        };
        let refined = refine_sort(name, sort, guard, &FormulaEnv { env, sig: self.sig })?;
        let domain = enumerate_sort_capped(&refined, self.cap)?;
        let mut parts = Vec::new();
        for v in domain {
            env.bind(name.clone(), v);
            let r = self.quantify(forall, rest, guard, body, env, fix);
            env.pop();
            let r = r?;
            if self.as_constant(r) == Some(!forall) {
                return Ok(r);
            }
            parts.push(r);
        }
        self.junction(forall, parts)
    }
}

/// Conjuncts of the `val` guard that bounds a quantifier: the antecedent of
/// `forall x. val(g) => f` or the first conjunct of `exists x. val(g) && f`.
fn guard_of(forall: bool, body: &Formula) -> Vec<&Expr> {
    let g = match (forall, body) {
        (true, Formula::Implies(a, _)) => a.as_ref(),
        (false, Formula::And(a, _)) => a.as_ref(),
        (false, g @ Formula::Val(_)) => g,
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    if let Formula::Val(e) = g {
        collect_conjuncts(e, &mut out);
    }
    out
}
