use fixedbitset::FixedBitSet;

use crate::lts::{Adjacency, Lts};
use crate::mucalc::{CoreFormula, CoreNode, NodeId, Sign, VarId};

use super::{free_vars, pattern_table};

/// The set of states satisfying `f`, by direct Knaster–Tarski iteration:
/// least fixpoints start from the empty set, greatest ones from the full
/// set, and every fixpoint is recomputed from scratch whenever a variable
/// free in it changes.
pub fn check_naive(l: &Lts, f: &CoreFormula) -> FixedBitSet {
    let mut parents = vec![0u32; f.nodes.len()];
    for n in &f.nodes {
        match n {
            CoreNode::And(cs) | CoreNode::Or(cs) => cs.iter().for_each(|c| parents[*c as usize] += 1),
            CoreNode::Box(_, c) | CoreNode::Diamond(_, c) | CoreNode::Fix(_, _, c) => parents[*c as usize] += 1,
            _ => {}
        }
    }
    let mut ev = Naive {
        f,
        adj: l.adjacency(),
        states: l.num_states as usize,
        matches: pattern_table(l, f),
        free: free_vars(f),
        shared: parents.iter().map(|p| *p > 1).collect(),
        env: vec![FixedBitSet::with_capacity(l.num_states as usize); f.var_names.len()],
        changed_at: vec![0; f.var_names.len()],
        clock: 0,
        cache: vec![None; f.nodes.len()],
    };
    ev.eval(f.root)
}

struct Naive<'a> {
    f: &'a CoreFormula,
    adj: Adjacency,
    states: usize,
    matches: Vec<Vec<bool>>,
    free: Vec<Vec<VarId>>,
    shared: Vec<bool>,
    env: Vec<FixedBitSet>,
    changed_at: Vec<u64>,
    clock: u64,
    /// Results of shared nodes, stamped with the clock when computed.
    cache: Vec<Option<(u64, FixedBitSet)>>,
}

impl Naive<'_> {
    fn full(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.states);
        s.insert_range(..);
        s
    }

    fn assign(&mut self, x: VarId, set: FixedBitSet) {
        self.clock += 1;
        self.changed_at[x as usize] = self.clock;
        self.env[x as usize] = set;
    }

    fn eval(&mut self, n: NodeId) -> FixedBitSet {
        if let Some((stamp, set)) = &self.cache[n as usize] {
            if self.free[n as usize].iter().all(|x| self.changed_at[*x as usize] <= *stamp) {
                return set.clone();
            }
        }
        let f = self.f;
        let result = match f.node(n) {
            CoreNode::True => self.full(),
            CoreNode::False => FixedBitSet::with_capacity(self.states),
            CoreNode::Var(x) => self.env[*x as usize].clone(),
            CoreNode::And(cs) => {
                let mut acc = self.full();
                for c in cs {
                    acc.intersect_with(&self.eval(*c));
                }
                acc
            }
            CoreNode::Or(cs) => {
                let mut acc = FixedBitSet::with_capacity(self.states);
                for c in cs {
                    acc.union_with(&self.eval(*c));
                }
                acc
            }
            CoreNode::Box(p, c) | CoreNode::Diamond(p, c) => {
                let inner = self.eval(*c);
                let is_box = matches!(f.node(n), CoreNode::Box(..));
                let m = &self.matches[*p as usize];
                let mut out = FixedBitSet::with_capacity(self.states);
                for s in 0..self.states {
                    let mut succ = self.adj.out(s as u32).iter().filter(|(lab, _)| m[*lab as usize]);
                    let ok = if is_box {
                        succ.all(|(_, t)| inner.contains(*t as usize))
                    } else {
                        succ.any(|(_, t)| inner.contains(*t as usize))
                    };
                    out.set(s, ok);
                }
                out
            }
            CoreNode::Fix(sign, x, body) => {
                let start = if *sign == Sign::Nu { self.full() } else { FixedBitSet::with_capacity(self.states) };
                self.assign(*x, start);
                loop {
                    let next = self.eval(*body);
                    if next == self.env[*x as usize] {
                        break next;
                    }
                    self.assign(*x, next);
                }
            }
        };
        if self.shared[n as usize] {
            self.cache[n as usize] = Some((self.clock, result.clone()));
        }
        result
    }
}
