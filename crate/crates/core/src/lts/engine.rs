use std::sync::Arc;

use thiserror::Error;

use crate::data::{eval, EvalError, Lookup, Sort, Value};
use crate::model::{coerce, Proc, Term, TermId, TypedModel};

use super::Label;

/// Bound on consecutive silent steps. Unguarded recursion is rejected
/// statically, so only pathological nesting reaches it.
const MAX_SILENT_STEPS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("in process `{process}`: {source}")]
    Eval { process: String, source: EvalError },
    #[error("more than {MAX_SILENT_STEPS} silent steps in a row")]
    SilentDivergence,
}

/// Pending work of one process instance: a term and the values of the local
/// slots it can still read. Slots the term cannot read are `None`, so equal
/// futures give equal frames.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    pub proc: u32,
    pub term: TermId,
    pub env: Arc<[Option<Value>]>,
}

/// Global store plus a stack of frames; the top frame runs first. The empty
/// stack is successful termination.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    pub store: Arc<[Value]>,
    pub stack: Vec<Frame>,
}

pub struct Engine<'m> {
    model: &'m TypedModel,
}

struct Ctx<'a> {
    proc: &'a Proc,
    env: &'a [Option<Value>],
    model: &'a TypedModel,
    store: &'a [Value],
}

impl Lookup for Ctx<'_> {
    fn lookup(&self, name: &str) -> Option<Value> {
        for (i, (n, _)) in self.proc.slots.iter().enumerate().rev() {
            if n == name {
                if let Some(v) = &self.env[i] {
                    return Some(v.clone());
                }
            }
        }
        self.model.global_index(name).map(|g| self.store[g].clone())
    }
}

impl<'m> Engine<'m> {
    pub fn new(model: &'m TypedModel) -> Self {
        Engine { model }
    }

    pub fn model(&self) -> &'m TypedModel {
        self.model
    }

    pub fn initial_state(&self) -> Result<State, EngineError> {
        let m = self.model;
        let p = &m.procs[m.init_proc];
        let mut env = vec![None; p.slots.len()];
        for (i, v) in m.init_args.iter().enumerate() {
            env[i] = Some(v.clone());
        }
        let store: Vec<Value> = m.globals.iter().map(|g| g.init.clone()).collect();
        self.normalize(vec![self.frame(m.init_proc, p.body, &env)], store.into())
    }

    /// Applies deterministic silent steps (calls, sequencing, termination,
    /// decided guards and assignments) to the top of the stack until it is an
    /// action, a branching term or a blocked guard. Reachable states are kept
    /// in this form, so a process that silently returns to its start is the
    /// same state.
    pub fn normalize(&self, mut stack: Vec<Frame>, mut store: Arc<[Value]>) -> Result<State, EngineError> {
        let m = self.model;
        for _ in 0..MAX_SILENT_STEPS {
            let Some(top) = stack.last() else { return Ok(State { store, stack }) };
            match m.term(top.term) {
                Term::Action { .. } | Term::Choice(..) | Term::Sum { .. } => return Ok(State { store, stack }),
                Term::Done => {
                    stack.pop();
                }
                Term::Seq(a, b) => {
                    let top = stack.pop().expect("non-empty");
                    stack.push(self.frame(top.proc as usize, *b, &top.env));
                    stack.push(self.frame(top.proc as usize, *a, &top.env));
                }
                Term::Cond { guard, then, otherwise } => {
                    let next = if self.eval_in(top, &store, guard)? == Value::Bool(true) { Some(*then) } else { *otherwise };
                    let Some(t) = next else { return Ok(State { store, stack }) };
                    let top = stack.pop().expect("non-empty");
                    stack.push(self.frame(top.proc as usize, t, &top.env));
                }
                Term::Call { proc, args } => {
                    let env = self.call_env(top, &store, *proc, args)?;
                    stack.pop();
                    stack.push(self.frame(*proc, m.procs[*proc].body, &env));
                }
                Term::Assign { global, value } => {
                    let v = self.eval_in(top, &store, value)?;
                    let v = self.checked(top, v, &m.globals[*global].sort)?;
                    let mut next = store.to_vec();
                    next[*global] = v;
                    store = next.into();
                    stack.pop();
                }
            }
        }
        Err(EngineError::SilentDivergence)
    }

    fn call_env(&self, top: &Frame, store: &[Value], proc: usize, args: &[crate::data::Expr]) -> Result<Vec<Option<Value>>, EngineError> {
        let callee = &self.model.procs[proc];
        let mut env = vec![None; callee.slots.len()];
        for (i, (a, (_, sort))) in args.iter().zip(&callee.params).enumerate() {
            let v = self.eval_in(top, store, a)?;
            env[i] = Some(self.checked(top, v, sort)?);
        }
        Ok(env)
    }

    fn frame(&self, proc: usize, term: TermId, env: &[Option<Value>]) -> Frame {
        let live = self.model.live[term as usize];
        let env: Vec<Option<Value>> = env
            .iter()
            .enumerate()
            .map(|(i, v)| if live & (1 << i) != 0 { v.clone() } else { None })
            .collect();
        Frame { proc: proc as u32, term, env: env.into() }
    }

    fn eval_in(&self, frame: &Frame, store: &[Value], e: &crate::data::Expr) -> Result<Value, EngineError> {
        let proc = &self.model.procs[frame.proc as usize];
        let ctx = Ctx { proc, env: &frame.env, model: self.model, store };
        eval(e, &ctx).map_err(|source| EngineError::Eval { process: proc.name.clone(), source })
    }

    fn checked(&self, frame: &Frame, v: Value, sort: &Sort) -> Result<Value, EngineError> {
        let v = coerce(v, sort);
        if sort.contains(&v) {
            Ok(v)
        } else {
            Err(EngineError::Eval {
                process: self.model.procs[frame.proc as usize].name.clone(),
                source: EvalError::OutOfSort { value: v.to_string(), sort: sort.to_string() },
            })
        }
    }

    /// Outgoing transitions in left-to-right syntactic order. Guards,
    /// assignments and calls are resolved silently within the step.
    pub fn successors(&self, s: &State) -> Result<Vec<(Label, State)>, EngineError> {
        let mut out = Vec::new();
        let mut budget = MAX_SILENT_STEPS;
        self.step(s.stack.clone(), s.store.clone(), &mut out, &mut budget)?;
        Ok(out)
    }

    fn step(
        &self,
        mut stack: Vec<Frame>,
        mut store: Arc<[Value]>,
        out: &mut Vec<(Label, State)>,
        budget: &mut usize,
    ) -> Result<(), EngineError> {
        loop {
            if *budget == 0 {
                return Err(EngineError::SilentDivergence);
            }
            *budget -= 1;
            let Some(top) = stack.pop() else { return Ok(()) };
            let m = self.model;
            match m.term(top.term) {
                Term::Action { action, args } => {
                    let decl = &m.actions[*action];
                    let mut values = Vec::with_capacity(args.len());
                    for (a, sort) in args.iter().zip(&decl.params) {
                        let v = self.eval_in(&top, &store, a)?;
                        values.push(self.checked(&top, v, sort)?);
                    }
                    out.push((Label::new(&decl.name, values), self.normalize(stack, store)?));
                    return Ok(());
                }
                Term::Done => {}
                Term::Seq(a, b) => {
                    stack.push(self.frame(top.proc as usize, *b, &top.env));
                    stack.push(self.frame(top.proc as usize, *a, &top.env));
                }
                Term::Choice(a, b) => {
                    let mut left = stack.clone();
                    left.push(self.frame(top.proc as usize, *a, &top.env));
                    self.step(left, store.clone(), out, budget)?;
                    stack.push(self.frame(top.proc as usize, *b, &top.env));
                }
                Term::Cond { guard, then, otherwise } => {
                    let g = self.eval_in(&top, &store, guard)?;
                    let next = if g == Value::Bool(true) { Some(*then) } else { *otherwise };
                    match next {
                        Some(t) => stack.push(self.frame(top.proc as usize, t, &top.env)),
                        None => return Ok(()),
                    }
                }
                Term::Call { proc, args } => {
                    let env = self.call_env(&top, &store, *proc, args)?;
                    stack.push(self.frame(*proc, m.procs[*proc].body, &env));
                }
                Term::Sum { slot, values, body } => {
                    let Some((last, rest)) = values.split_last() else { return Ok(()) };
                    for v in rest {
                        let mut env = top.env.to_vec();
                        env[*slot] = Some(v.clone());
                        let mut branch = stack.clone();
                        branch.push(self.frame(top.proc as usize, *body, &env));
                        self.step(branch, store.clone(), out, budget)?;
                    }
                    let mut env = top.env.to_vec();
                    env[*slot] = Some(last.clone());
                    stack.push(self.frame(top.proc as usize, *body, &env));
                }
                Term::Assign { global, value } => {
                    let v = self.eval_in(&top, &store, value)?;
                    let v = self.checked(&top, v, &m.globals[*global].sort)?;
                    let mut next = store.to_vec();
                    next[*global] = v;
                    store = next.into();
                }
            }
        }
    }
}
