use std::collections::VecDeque;

use crate::mucalc::Sign;

use super::bes::{Bes, Equation, Op, Ref};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<bool>,
    /// Number of equation evaluations.
    pub iterations: u64,
}

impl Solution {
    pub fn value(&self, r: Ref) -> bool {
        match r {
            Ref::Const(b) => b,
            Ref::Var(v) => self.values[v as usize],
        }
    }
}

/// Solves the system strongly connected component by component, in
/// dependency order. Components within one block are solved with a
/// worklist; components spanning blocks of both signs by nested iteration
/// that restarts inner blocks whenever an outer block changes.
pub fn solve_bes(b: &Bes) -> Solution {
    let mut s = Solver {
        b,
        values: vec![false; b.equations.len()],
        iterations: 0,
        comp: vec![u32::MAX; b.equations.len()],
        pos: vec![0; b.equations.len()],
    };
    for (i, scc) in sccs(&b.equations).into_iter().enumerate() {
        s.solve_component(i as u32, &scc);
    }
    Solution { values: s.values, iterations: s.iterations }
}

struct Solver<'a> {
    b: &'a Bes,
    values: Vec<bool>,
    iterations: u64,
    comp: Vec<u32>,
    /// Position of each variable within its component.
    pos: Vec<u32>,
}

fn initial(sign: Sign) -> bool {
    sign == Sign::Nu
}

impl Solver<'_> {
    fn eval(&mut self, v: u32) -> bool {
        self.iterations += 1;
        let e: &Equation = &self.b.equations[v as usize];
        match e.op {
            Op::And => e.args.iter().all(|a| self.values[*a as usize]),
            Op::Or => e.args.iter().any(|a| self.values[*a as usize]),
        }
    }

    fn sign_of(&self, v: u32) -> Sign {
        self.b.blocks[self.b.block_of[v as usize] as usize].sign
    }

    fn solve_component(&mut self, id: u32, scc: &[u32]) {
        for v in scc {
            self.comp[*v as usize] = id;
        }
        if let [v] = scc {
            if !self.b.equations[*v as usize].args.contains(v) {
                self.values[*v as usize] = self.eval(*v);
                return;
            }
        }
        let mut levels: Vec<u32> = scc.iter().map(|v| self.b.block_of[*v as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        if levels.iter().all(|l| self.b.blocks[*l as usize].sign == self.b.blocks[levels[0] as usize].sign) {
            self.worklist(id, scc);
        } else {
            let mut by_level: Vec<Vec<u32>> = vec![Vec::new(); levels.len()];
            for v in scc {
                let l = levels.binary_search(&self.b.block_of[*v as usize]).expect("level present");
                by_level[l].push(*v);
            }
            let signs: Vec<Sign> = levels.iter().map(|l| self.b.blocks[*l as usize].sign).collect();
            self.nested(&by_level, &signs, 0);
        }
    }

    fn worklist(&mut self, id: u32, scc: &[u32]) {
        let sign = self.sign_of(scc[0]);
        let start = initial(sign);
        for (i, v) in scc.iter().enumerate() {
            self.values[*v as usize] = start;
            self.pos[*v as usize] = i as u32;
        }
        let mut dependents: Vec<Vec<u32>> = vec![Vec::new(); scc.len()];
        for v in scc {
            for a in &self.b.equations[*v as usize].args {
                if self.comp[*a as usize] == id {
                    dependents[self.pos[*a as usize] as usize].push(*v);
                }
            }
        }
        let mut queued = vec![true; scc.len()];
        let mut queue: VecDeque<u32> = scc.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            let i = self.pos[v as usize] as usize;
            queued[i] = false;
            let new = self.eval(v);
            if new != self.values[v as usize] {
                debug_assert_eq!(new, !start, "iteration must move away from the initial value");
                self.values[v as usize] = new;
                for d in &dependents[i] {
                    let j = self.pos[*d as usize] as usize;
                    if !queued[j] {
                        queued[j] = true;
                        queue.push_back(*d);
                    }
                }
            }
        }
    }

    fn nested(&mut self, levels: &[Vec<u32>], signs: &[Sign], i: usize) {
        if i == levels.len() {
            return;
        }
        let start = initial(signs[i]);
        for v in &levels[i] {
            self.values[*v as usize] = start;
        }
        loop {
            self.nested(levels, signs, i + 1);
            let mut changed = false;
            for v in &levels[i] {
                let new = self.eval(*v);
                if new != self.values[*v as usize] {
                    debug_assert_eq!(new, !start, "iteration must move away from the initial value");
                    self.values[*v as usize] = new;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// Strongly connected components of the dependency graph, each listed
/// after every component it depends on.
fn sccs(eqs: &[Equation]) -> Vec<Vec<u32>> {
    let n = eqs.len();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut out = Vec::new();
    let mut next = 0u32;
    // Explicit call stack of (variable, position in its argument list).
    let mut calls: Vec<(u32, usize)> = Vec::new();
    for root in 0..n as u32 {
        if index[root as usize] != u32::MAX {
            continue;
        }
        calls.push((root, 0));
        index[root as usize] = next;
        low[root as usize] = next;
        next += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            let args = &eqs[v as usize].args;
            if *pos < args.len() {
                let w = args[*pos];
                *pos += 1;
                if index[w as usize] == u32::MAX {
                    index[w as usize] = next;
                    low[w as usize] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    calls.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("component on stack");
                    on_stack[w as usize] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}
