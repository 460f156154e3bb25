use rustc_hash::FxHashMap;

use crate::lts::{Adjacency, Lts};
use crate::mucalc::{CoreFormula, CoreNode, NodeId, Sign};

use super::{binders, free_vars, pattern_table, CheckError};

/// Default cap on the number of generated equations.
pub const DEFAULT_MAX_EQUATIONS: usize = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    And,
    Or,
}

/// `X = op(args)`. A conjunction without arguments is true, a disjunction
/// without arguments is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub op: Op,
    pub args: Vec<u32>,
}

impl Equation {
    pub fn constant(b: bool) -> Equation {
        Equation { op: if b { Op::And } else { Op::Or }, args: Vec::new() }
    }
}

/// A formula instance that resolved either to a constant or to a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ref {
    Const(bool),
    Var(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub sign: Sign,
    pub vars: Vec<u32>,
}

/// Boolean equation system. Blocks are ordered outermost first; each
/// variable lives in exactly one block.
#[derive(Debug, Clone)]
pub struct Bes {
    pub equations: Vec<Equation>,
    pub blocks: Vec<Block>,
    /// Block index of each variable.
    pub block_of: Vec<u32>,
    /// The (formula node, state) each variable stands for. Systems built by
    /// hand use `NodeId::MAX`.
    pub origin: Vec<(NodeId, u32)>,
    pub roots: Vec<Ref>,
    index: FxHashMap<(NodeId, u32), u32>,
}

impl Bes {
    /// Builds a system from blocks of equations, outermost first. Variables
    /// are numbered consecutively across blocks.
    pub fn from_blocks(blocks: Vec<(Sign, Vec<Equation>)>, roots: Vec<Ref>) -> Bes {
        let mut bes = Bes {
            equations: Vec::new(),
            blocks: Vec::new(),
            block_of: Vec::new(),
            origin: Vec::new(),
            roots,
            index: FxHashMap::default(),
        };
        for (b, (sign, eqs)) in blocks.into_iter().enumerate() {
            let first = bes.equations.len() as u32;
            let vars = (first..first + eqs.len() as u32).collect();
            for e in eqs {
                bes.equations.push(e);
                bes.block_of.push(b as u32);
                bes.origin.push((NodeId::MAX, 0));
            }
            bes.blocks.push(Block { sign, vars });
        }
        for e in &bes.equations {
            assert!(e.args.iter().all(|a| (*a as usize) < bes.block_of.len()), "undefined variable in equation");
        }
        bes
    }

    /// The variable standing for `node` in state `s`, if generated.
    pub fn var(&self, node: NodeId, s: u32) -> Option<u32> {
        self.index.get(&(node, s)).copied()
    }

    /// What `node` in state `s` resolved to during generation of this
    /// system from `f`; `None` if that instance was never needed.
    pub fn resolve(&self, f: &CoreFormula, binder: &[NodeId], mut n: NodeId, s: u32) -> Option<Ref> {
        loop {
            match f.node(n) {
                CoreNode::True => return Some(Ref::Const(true)),
                CoreNode::False => return Some(Ref::Const(false)),
                CoreNode::Var(x) => n = binder[*x as usize],
                CoreNode::Fix(_, _, body) if !is_copy(f, n) => n = *body,
                _ => return self.var(n, s).map(Ref::Var),
            }
        }
    }
}

fn is_copy(f: &CoreFormula, n: NodeId) -> bool {
    matches!(f.node(n), CoreNode::Fix(_, _, b) if matches!(f.node(*b), CoreNode::Var(_) | CoreNode::Fix(..)))
}

struct Gen<'a> {
    f: &'a CoreFormula,
    adj: &'a Adjacency,
    matches: Vec<Vec<bool>>,
    binder: Vec<NodeId>,
    /// Fixpoints whose body is itself a variable or fixpoint get an
    /// equation of their own; all others share the equation of their body.
    copy: Vec<bool>,
}

struct Store {
    index: FxHashMap<(NodeId, u32), u32>,
    origin: Vec<(NodeId, u32)>,
    queue: Vec<u32>,
    cap: usize,
}

impl Store {
    fn alloc(&mut self, n: NodeId, s: u32) -> Result<Ref, CheckError> {
        if let Some(v) = self.index.get(&(n, s)) {
            return Ok(Ref::Var(*v));
        }
        let v = self.origin.len() as u32;
        if self.origin.len() >= self.cap {
            return Err(CheckError::CapacityExceeded { cap: self.cap });
        }
        self.index.insert((n, s), v);
        self.origin.push((n, s));
        self.queue.push(v);
        Ok(Ref::Var(v))
    }
}

impl Gen<'_> {
    fn resolve(&self, st: &mut Store, mut n: NodeId, s: u32) -> Result<Ref, CheckError> {
        loop {
            match self.f.node(n) {
                CoreNode::True => return Ok(Ref::Const(true)),
                CoreNode::False => return Ok(Ref::Const(false)),
                CoreNode::Var(x) => n = self.binder[*x as usize],
                CoreNode::Fix(_, _, body) if !self.copy[n as usize] => n = *body,
                _ => return st.alloc(n, s),
            }
        }
    }

    fn equation(&self, st: &mut Store, n: NodeId, s: u32) -> Result<Equation, CheckError> {
        let mut refs = Vec::new();
        let op = match self.f.node(n) {
            CoreNode::And(cs) | CoreNode::Or(cs) => {
                for c in cs {
                    refs.push(self.resolve(st, *c, s)?);
                }
                if matches!(self.f.node(n), CoreNode::And(_)) {
                    Op::And
                } else {
                    Op::Or
                }
            }
            CoreNode::Box(p, c) | CoreNode::Diamond(p, c) => {
                let m = &self.matches[*p as usize];
                for &(lab, t) in self.adj.out(s) {
                    if m[lab as usize] {
                        refs.push(self.resolve(st, *c, t)?);
                    }
                }
                if matches!(self.f.node(n), CoreNode::Box(..)) {
                    Op::And
                } else {
                    Op::Or
                }
            }
            CoreNode::Fix(_, _, body) => {
                refs.push(self.resolve(st, *body, s)?);
                Op::And
            }
            CoreNode::True | CoreNode::False | CoreNode::Var(_) => unreachable!("never allocated"),
        };
        let absorbing = op == Op::Or;
        let mut args = Vec::with_capacity(refs.len());
        for r in refs {
            match r {
                Ref::Const(b) if b == absorbing => return Ok(Equation::constant(absorbing)),
                Ref::Const(_) => {}
                Ref::Var(v) => args.push(v),
            }
        }
        args.sort_unstable();
        args.dedup();
        Ok(Equation { op, args })
    }
}

/// Builds the equations for `f` in the given root states, generating only
/// the (node, state) pairs these depend on.
pub fn generate_bes(l: &Lts, f: &CoreFormula, roots: &[u32], cap: usize) -> Result<Bes, CheckError> {
    let adj = l.adjacency();
    let copy = (0..f.nodes.len() as NodeId).map(|n| is_copy(f, n)).collect();
    let gen = Gen { f, adj: &adj, matches: pattern_table(l, f), binder: binders(f), copy };
    let mut st = Store { index: FxHashMap::default(), origin: Vec::new(), queue: Vec::new(), cap };
    let mut root_refs = Vec::with_capacity(roots.len());
    for &s in roots {
        root_refs.push(gen.resolve(&mut st, f.root, s)?);
    }
    let mut equations: Vec<Option<Equation>> = Vec::new();
    while let Some(v) = st.queue.pop() {
        let (n, s) = st.origin[v as usize];
        let eq = gen.equation(&mut st, n, s)?;
        if equations.len() < st.origin.len() {
            equations.resize(st.origin.len(), None);
        }
        equations[v as usize] = Some(eq);
    }
    let equations: Vec<Equation> = equations.into_iter().map(|e| e.expect("every variable defined")).collect();

    // Each fixpoint opens a block; outer fixpoints have larger node ids.
    // An equation belongs to the innermost fixpoint whose variable is free
    // in its node (the fixpoint itself for copy equations); closed nodes lie
    // on no cycle and go to a final block.
    let free = free_vars(f);
    let mut fix_ids: Vec<NodeId> = (0..f.nodes.len() as NodeId).filter(|n| matches!(f.node(*n), CoreNode::Fix(..))).collect();
    fix_ids.reverse();
    let mut rank = vec![u32::MAX; f.nodes.len()];
    for (i, n) in fix_ids.iter().enumerate() {
        rank[*n as usize] = i as u32;
    }
    let closed = fix_ids.len() as u32;
    let node_block = |n: NodeId| -> u32 {
        if matches!(f.node(n), CoreNode::Fix(..)) {
            return rank[n as usize];
        }
        free[n as usize].iter().map(|x| rank[gen.binder[*x as usize] as usize]).max().unwrap_or(closed)
    };
    let mut raw_block: Vec<u32> = st.origin.iter().map(|(n, _)| node_block(*n)).collect();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); fix_ids.len() + 1];
    for (v, b) in raw_block.iter().enumerate() {
        members[*b as usize].push(v as u32);
    }
    let mut renumber = vec![u32::MAX; members.len()];
    let mut blocks = Vec::new();
    for (b, vars) in members.into_iter().enumerate() {
        if vars.is_empty() {
            continue;
        }
        let sign = match fix_ids.get(b).map(|n| f.node(*n)) {
            Some(CoreNode::Fix(sign, _, _)) => *sign,
            _ => Sign::Nu,
        };
        renumber[b] = blocks.len() as u32;
        blocks.push(Block { sign, vars });
    }
    for b in &mut raw_block {
        *b = renumber[*b as usize];
    }
    Ok(Bes { equations, blocks, block_of: raw_block, origin: st.origin, roots: root_refs, index: st.index })
}
