//! Test oracles shared by the integration tests: random instance
//! generators, fixpoint unfolding and a reference evaluator that decides
//! regular modalities by automaton product instead of expansion.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::Rng;

use sbmc_core::data::{collect_conjuncts, enumerate_sort_capped, eval, refine_sort, Expr, Lookup, Value};
use sbmc_core::lts::{Label, Lts, Transition};
use sbmc_core::mucalc::{
    ActionPattern, CoreFormula, CoreNode, Formula, NamedPattern, NodeId, Regular, Signature, VarId,
};

pub const ACTIONS: [&str; 3] = ["a", "b", "c"];

pub fn signature() -> Signature {
    let mut sig = Signature::default();
    for a in ACTIONS {
        sig.actions.insert(a.to_string(), None);
    }
    sig
}

pub fn lts_from_edges(n: u32, edges: &[(u32, &str, u32)]) -> Lts {
    let mut labels: Vec<Label> = Vec::new();
    let mut transitions = Vec::new();
    for (src, a, dst) in edges {
        let idx = labels.iter().position(|l| &*l.action == *a).unwrap_or_else(|| {
            labels.push(Label::new(a, vec![]));
            labels.len() - 1
        });
        transitions.push(Transition { src: *src, label: idx as u32, dst: *dst });
    }
    Lts { initial: 0, num_states: n, labels, transitions }
}

/// Up to `max_states` states over actions a, b, c; some states may be
/// deadlocked or unreachable.
pub fn random_lts(rng: &mut StdRng, max_states: u32) -> Lts {
    let n = rng.gen_range(1..=max_states);
    let mut edges = Vec::new();
    for s in 0..n {
        for _ in 0..rng.gen_range(0..=3) {
            edges.push((s, ACTIONS[rng.gen_range(0..3)], rng.gen_range(0..n)));
        }
    }
    edges.sort();
    edges.dedup();
    lts_from_edges(n, &edges)
}

fn random_pattern(rng: &mut StdRng) -> ActionPattern {
    let named = |a: &str| NamedPattern { name: a.to_string(), args: None };
    match rng.gen_range(0..6) {
        0 => ActionPattern::Any,
        1 => ActionPattern::Not(vec![named(ACTIONS[rng.gen_range(0..3)])]),
        2 => ActionPattern::Union(vec![
            ActionPattern::Named(named(ACTIONS[rng.gen_range(0..3)])),
            ActionPattern::Named(named(ACTIONS[rng.gen_range(0..3)])),
        ]),
        _ => ActionPattern::Named(named(ACTIONS[rng.gen_range(0..3)])),
    }
}

/// A closed, monotone fixpoint formula of at most the given depth with
/// single-step modalities.
pub fn random_fixpoint_formula(rng: &mut StdRng, depth: u32) -> Formula {
    fn go(rng: &mut StdRng, depth: u32, bound: &mut Vec<String>, next: &mut u32) -> Formula {
        if depth <= 1 || rng.gen_bool(0.05) {
            if !bound.is_empty() && rng.gen_bool(0.85) {
                return Formula::Var(bound[rng.gen_range(0..bound.len())].clone());
            }
            return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
        }
        match rng.gen_range(0..9) {
            0 => Formula::and(go(rng, depth - 1, bound, next), go(rng, depth - 1, bound, next)),
            1 => Formula::or(go(rng, depth - 1, bound, next), go(rng, depth - 1, bound, next)),
            2 | 3 => Formula::boxed(Regular::Atom(random_pattern(rng)), go(rng, depth - 1, bound, next)),
            4 | 5 => Formula::diamond(Regular::Atom(random_pattern(rng)), go(rng, depth - 1, bound, next)),
            _ => {
                let x = format!("Z{next}");
                *next += 1;
                bound.push(x.clone());
                let body = Box::new(go(rng, depth - 1, bound, next));
                bound.pop();
                if rng.gen_bool(0.5) {
                    Formula::Mu(x, body)
                } else {
                    Formula::Nu(x, body)
                }
            }
        }
    }
    go(rng, depth, &mut Vec::new(), &mut 0)
}

pub fn random_regular(rng: &mut StdRng, depth: u32) -> Regular {
    if depth <= 1 || rng.gen_bool(0.3) {
        return Regular::Atom(random_pattern(rng));
    }
    match rng.gen_range(0..3) {
        0 => Regular::Concat(Box::new(random_regular(rng, depth - 1)), Box::new(random_regular(rng, depth - 1))),
        1 => Regular::Union(Box::new(random_regular(rng, depth - 1)), Box::new(random_regular(rng, depth - 1))),
        _ => Regular::Star(Box::new(random_regular(rng, depth - 1))),
    }
}

/// A fixpoint-free formula whose modalities carry regular formulas, with
/// at least one star.
pub fn random_star_formula(rng: &mut StdRng) -> Formula {
    fn go(rng: &mut StdRng, depth: u32) -> Formula {
        if depth == 0 || rng.gen_bool(0.2) {
            return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
        }
        match rng.gen_range(0..6) {
            0 => Formula::and(go(rng, depth - 1), go(rng, depth - 1)),
            1 => Formula::or(go(rng, depth - 1), go(rng, depth - 1)),
            2 | 3 => Formula::boxed(random_regular(rng, 4), go(rng, depth - 1)),
            _ => Formula::diamond(random_regular(rng, 4), go(rng, depth - 1)),
        }
    }
    let star = Regular::Star(Box::new(random_regular(rng, 3)));
    let body = go(rng, 2);
    if rng.gen_bool(0.5) {
        Formula::boxed(star, body)
    } else {
        Formula::diamond(star, body)
    }
}

/// The closed formula denoted by node `n` of `f`: each variable free in
/// `n` is replaced by a copy of the fixpoint binding it.
pub fn unfold(f: &CoreFormula, n: NodeId) -> CoreFormula {
    struct Copier<'a> {
        f: &'a CoreFormula,
        binder: Vec<NodeId>,
        out: CoreFormula,
    }
    impl Copier<'_> {
        fn copy(&mut self, n: NodeId, map: &mut HashMap<VarId, VarId>) -> NodeId {
            let node = match self.f.node(n).clone() {
                CoreNode::Var(x) => match map.get(&x) {
                    Some(y) => CoreNode::Var(*y),
                    None => return self.copy(self.binder[x as usize], map),
                },
                CoreNode::And(cs) => CoreNode::And(cs.iter().map(|c| self.copy(*c, map)).collect()),
                CoreNode::Or(cs) => CoreNode::Or(cs.iter().map(|c| self.copy(*c, map)).collect()),
                CoreNode::Box(p, c) => CoreNode::Box(p, self.copy(c, map)),
                CoreNode::Diamond(p, c) => CoreNode::Diamond(p, self.copy(c, map)),
                CoreNode::Fix(sign, x, body) => {
                    let y = self.out.var_names.len() as VarId;
                    self.out.var_names.push(format!("U{y}"));
                    self.out.var_signs.push(sign);
                    let saved = map.insert(x, y);
                    let b = self.copy(body, map);
                    match saved {
                        Some(s) => map.insert(x, s),
                        None => map.remove(&x),
                    };
                    CoreNode::Fix(sign, y, b)
                }
                other => other,
            };
            self.out.nodes.push(node);
            (self.out.nodes.len() - 1) as NodeId
        }
    }
    let mut binder = vec![0; f.var_names.len()];
    for (i, node) in f.nodes.iter().enumerate() {
        if let CoreNode::Fix(_, x, _) = node {
            binder[*x as usize] = i as NodeId;
        }
    }
    let empty = CoreFormula {
        nodes: Vec::new(),
        root: 0,
        patterns: f.patterns.clone(),
        var_names: Vec::new(),
        var_signs: Vec::new(),
    };
    let mut c = Copier { f, binder, out: empty };
    let root = c.copy(n, &mut HashMap::new());
    c.out.root = root;
    c.out
}

// ---------------------------------------------------------------------------
// Reference evaluation

struct Scope<'a> {
    sig: &'a Signature,
    data: &'a [(String, Value)],
}

impl Lookup for Scope<'_> {
    fn lookup(&self, name: &str) -> Option<Value> {
        if let Some((_, v)) = self.data.iter().rev().find(|(n, _)| n == name) {
            return Some(v.clone());
        }
        if let Some(v) = self.sig.const_value(name) {
            return Some(v.clone());
        }
        self.sig.ctors.contains_key(name).then(|| Value::ctor(name))
    }
}

fn same_value(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Nat(n), Value::Rat(r)) | (Value::Rat(r), Value::Nat(n)) => *r == *n as i64 * 100,
        (Value::List(xs), Value::List(ys)) => xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| same_value(x, y)),
        _ => a == b,
    }
}

fn named_matches(p: &NamedPattern, l: &Label, scope: &Scope) -> bool {
    if *l.action != p.name {
        return false;
    }
    let Some(args) = &p.args else { return true };
    args.len() == l.args.len()
        && args.iter().zip(&l.args).all(|(e, v)| {
            matches!(e, Expr::Var(n) if n == "_") || same_value(&eval(e, scope).expect("pattern argument"), v)
        })
}

fn pattern_matches(p: &ActionPattern, l: &Label, scope: &Scope) -> bool {
    match p {
        ActionPattern::Any => true,
        ActionPattern::Named(n) => named_matches(n, l, scope),
        ActionPattern::Not(ns) => !ns.iter().any(|n| named_matches(n, l, scope)),
        ActionPattern::Union(ps) => ps.iter().any(|p| pattern_matches(p, l, scope)),
    }
}

/// Thompson automaton with epsilon moves; state 0 is initial.
struct Nfa<'a> {
    eps: Vec<Vec<usize>>,
    steps: Vec<Vec<(&'a ActionPattern, usize)>>,
    accept: usize,
}

impl<'a> Nfa<'a> {
    fn new(r: &'a Regular) -> Nfa<'a> {
        let mut nfa = Nfa { eps: Vec::new(), steps: Vec::new(), accept: 0 };
        let start = nfa.state();
        let end = nfa.build(r, start);
        nfa.accept = end;
        nfa
    }

    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.steps.push(Vec::new());
        self.eps.len() - 1
    }

    /// Adds `r` starting at `from`; returns its accepting state.
    fn build(&mut self, r: &'a Regular, from: usize) -> usize {
        match r {
            Regular::Atom(p) => {
                let to = self.state();
                self.steps[from].push((p, to));
                to
            }
            Regular::Concat(a, b) => {
                let mid = self.build(a, from);
                self.build(b, mid)
            }
            Regular::Union(a, b) => {
                let (sa, sb, end) = (self.state(), self.state(), self.state());
                self.eps[from].extend([sa, sb]);
                let ea = self.build(a, sa);
                let eb = self.build(b, sb);
                self.eps[ea].push(end);
                self.eps[eb].push(end);
                end
            }
            Regular::Star(a) => {
                let hub = self.state();
                self.eps[from].push(hub);
                let inner = self.state();
                self.eps[hub].push(inner);
                let e = self.build(a, inner);
                self.eps[e].push(hub);
                hub
            }
        }
    }
}

type Env = HashMap<String, Vec<bool>>;

/// States of `l` satisfying the resolved formula `f`, computed directly on
/// the syntax: regular modalities by backward search over the product of
/// the LTS with an automaton for the regular formula, data quantifiers by
/// enumeration, fixpoints by Knaster–Tarski iteration.
pub fn reference_eval(l: &Lts, f: &Formula, sig: &Signature) -> Vec<bool> {
    let mut data = Vec::new();
    let mut env = Env::new();
    eval_formula(l, f, sig, &mut data, &mut env)
}

fn eval_formula(l: &Lts, f: &Formula, sig: &Signature, data: &mut Vec<(String, Value)>, env: &mut Env) -> Vec<bool> {
    let n = l.num_states as usize;
    let constant = |b: bool| vec![b; n];
    match f {
        Formula::True => constant(true),
        Formula::False => constant(false),
        Formula::Val(e) => {
            let v = eval(e, &Scope { sig, data }).expect("val evaluates");
            constant(v.as_bool().expect("boolean val"))
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let x = eval_formula(l, a, sig, data, env);
            let y = eval_formula(l, b, sig, data, env);
            x.iter()
                .zip(&y)
                .map(|(p, q)| match f {
                    Formula::And(..) => *p && *q,
                    Formula::Or(..) => *p || *q,
                    _ => !*p || *q,
                })
                .collect()
        }
        Formula::Not(a) => eval_formula(l, a, sig, data, env).into_iter().map(|b| !b).collect(),
        Formula::Box(r, a) | Formula::Diamond(r, a) => {
            let target = eval_formula(l, a, sig, data, env);
            let is_box = matches!(f, Formula::Box(..));
            modality(l, r, &target, is_box, &Scope { sig, data })
        }
        Formula::Forall(vars, body) | Formula::Exists(vars, body) => {
            let forall = matches!(f, Formula::Forall(..));
            let guard = match (forall, body.as_ref()) {
                (true, Formula::Implies(g, _)) => Some(g.as_ref()),
                (false, Formula::And(g, _)) => Some(g.as_ref()),
                (false, g @ Formula::Val(_)) => Some(g),
                _ => None,
            };
            let mut conj = Vec::new();
            if let Some(Formula::Val(g)) = guard {
                collect_conjuncts(g, &mut conj);
            }
            quantify(l, forall, vars, body, &conj, sig, data, env)
        }
        Formula::Mu(x, body) | Formula::Nu(x, body) => {
            let mut cur = constant(matches!(f, Formula::Nu(..)));
            loop {
                let saved = env.insert(x.clone(), cur.clone());
                let next = eval_formula(l, body, sig, data, env);
                match saved {
                    Some(s) => env.insert(x.clone(), s),
                    None => env.remove(x),
                };
                if next == cur {
                    return cur;
                }
                cur = next;
            }
        }
        Formula::Var(x) => env[x].clone(),
    }
}

#[allow(clippy::too_many_arguments)]
fn quantify(
    l: &Lts,
    forall: bool,
    vars: &[(String, sbmc_core::data::Sort)],
    body: &Formula,
    guard: &[&Expr],
    sig: &Signature,
    data: &mut Vec<(String, Value)>,
    env: &mut Env,
) -> Vec<bool> {
    let Some(((name, sort), rest)) = vars.split_first() else {
        return eval_formula(l, body, sig, data, env);
    };
    let refined = refine_sort(name, sort, guard, &Scope { sig, data }).expect("bounded quantifier");
    let domain = enumerate_sort_capped(&refined, 1 << 20).expect("enumerable domain");
    let mut acc = vec![forall; l.num_states as usize];
    for v in domain {
        data.push((name.clone(), v));
        let r = quantify(l, forall, rest, body, guard, sig, data, env);
        data.pop();
        for (a, b) in acc.iter_mut().zip(r) {
            *a = if forall { *a && b } else { *a || b };
        }
    }
    acc
}

/// `[r]` / `<r>` of `target`: backward reachability, in the product of the
/// LTS with the automaton, of an accepting pair whose state is outside
/// (box) or inside (diamond) the target.
fn modality(l: &Lts, r: &Regular, target: &[bool], is_box: bool, scope: &Scope) -> Vec<bool> {
    let nfa = Nfa::new(r);
    let q = nfa.eps.len();
    let n = l.num_states as usize;
    let mut rev_eps = vec![Vec::new(); q];
    for (a, bs) in nfa.eps.iter().enumerate() {
        for b in bs {
            rev_eps[*b].push(a);
        }
    }
    let mut rev_steps: Vec<Vec<(&ActionPattern, usize)>> = vec![Vec::new(); q];
    for (a, steps) in nfa.steps.iter().enumerate() {
        for (p, b) in steps {
            rev_steps[*b].push((*p, a));
        }
    }
    let mut rev_lts = vec![Vec::new(); n];
    for t in &l.transitions {
        rev_lts[t.dst as usize].push((t.src as usize, l.label(t)));
    }
    let mut seen = vec![false; q * n];
    let mut stack = Vec::new();
    for (s, &in_target) in target.iter().enumerate() {
        if in_target != is_box {
            seen[nfa.accept * n + s] = true;
            stack.push((nfa.accept, s));
        }
    }
    while let Some((qs, s)) = stack.pop() {
        let mut visit = |qq: usize, ss: usize, stack: &mut Vec<(usize, usize)>| {
            if !seen[qq * n + ss] {
                seen[qq * n + ss] = true;
                stack.push((qq, ss));
            }
        };
        for &pq in &rev_eps[qs] {
            visit(pq, s, &mut stack);
        }
        for &(p, pq) in &rev_steps[qs] {
            for &(ps, lab) in &rev_lts[s] {
                if pattern_matches(p, lab, scope) {
                    visit(pq, ps, &mut stack);
                }
            }
        }
    }
    (0..n).map(|s| seen[s] != is_box).collect()
}

// ---------------------------------------------------------------------------
// Randomised instances

use sbmc_core::checker::{check_core, check_naive, generate_bes, solve_bes, CheckOptions, DEFAULT_MAX_EQUATIONS};
use sbmc_core::mucalc::compile;

/// One random (LTS of at most 50 states, fixpoint formula of depth at most
/// 6 and alternation depth at most 2) instance. Every generated equation
/// variable is compared with the reference evaluation of its unfolded
/// subformula.
pub fn oracle_instance(rng: &mut StdRng) -> Result<(), String> {
    let sig = signature();
    let l = random_lts(rng, 50);
    let core = loop {
        let f = random_fixpoint_formula(rng, 6);
        let core = compile(&f, &sig).map_err(|e| e.to_string())?;
        if core.alternation_depth() <= 2 {
            break core;
        }
    };
    let roots: Vec<u32> = (0..l.num_states).collect();
    let bes = generate_bes(&l, &core, &roots, DEFAULT_MAX_EQUATIONS).map_err(|e| e.to_string())?;
    let sol = solve_bes(&bes);
    let mut cache: HashMap<NodeId, fixedbitset::FixedBitSet> = HashMap::new();
    for (v, (n, s)) in bes.origin.iter().enumerate() {
        let set = cache.entry(*n).or_insert_with(|| check_naive(&l, &unfold(&core, *n)));
        if set.contains(*s as usize) != sol.values[v] {
            return Err(format!("variable {v} for node {n} in state {s} of {core}"));
        }
    }
    let naive = check_naive(&l, &core);
    for (s, r) in bes.roots.iter().enumerate() {
        if sol.value(*r) != naive.contains(s) {
            return Err(format!("state {s} of {core}"));
        }
    }
    Ok(())
}

/// One random star formula on an LTS of at most 20 states: the verdict in
/// every state after expansion equals the automaton-based reference.
pub fn regular_instance(rng: &mut StdRng) -> Result<(), String> {
    let sig = signature();
    let l = random_lts(rng, 20);
    let f = random_star_formula(rng);
    regular_agrees(&l, &f, &sig).map_err(|e| format!("{e} for {f}"))
}

/// Compares expansion-based checking of `f` in every state with
/// `reference_eval`.
pub fn regular_agrees(l: &Lts, f: &Formula, sig: &Signature) -> Result<(), String> {
    let core = compile(f, sig).map_err(|e| e.to_string())?;
    let opts = CheckOptions { per_state: true, ..CheckOptions::default() };
    let got = check_core(l, &core, opts).map_err(|e| e.to_string())?.satisfying.expect("per-state result");
    let expect: Vec<u32> = reference_eval(l, f, sig).iter().enumerate().filter(|(_, b)| **b).map(|(s, _)| s as u32).collect();
    if got != expect {
        return Err(format!("expanded {got:?}, reference {expect:?}"));
    }
    Ok(())
}
