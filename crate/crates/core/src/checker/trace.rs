use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustc_hash::FxHashMap;

use crate::lts::{Label, Lts};
use crate::mucalc::{CoreFormula, CoreNode, NodeId, Sign};

use super::bes::{Bes, Ref};
use super::solve::Solution;
use super::{binders, live_nodes, CheckError};

/// A path from the initial state: `states[i]` --`labels[i]`--> `states[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub labels: Vec<Label>,
    pub states: Vec<u32>,
}

/// Whether the formula uses only conjunction, box and greatest fixpoints.
pub fn in_safety_fragment(f: &CoreFormula) -> bool {
    let live = live_nodes(f);
    f.nodes.iter().zip(live).filter(|(_, l)| *l).all(|(n, _)| match n {
        CoreNode::Or(_) | CoreNode::Diamond(..) | CoreNode::Fix(Sign::Mu, ..) => false,
        CoreNode::True | CoreNode::False | CoreNode::And(_) | CoreNode::Box(..) | CoreNode::Fix(..) | CoreNode::Var(_) => {
            true
        }
    })
}

/// A transition `(label, target)`, or `None` for a step into a subformula.
type Step = Option<(u32, u32)>;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Point {
    Var(u32),
    Violation,
}

/// The lexicographically smallest among the shortest paths to a state where the formula's obligations fail. Only
/// defined for the safety fragment, where every false variable has a false
/// argument and the chain of false arguments ends in `false`.
pub fn extract_counterexample(
    l: &Lts,
    f: &CoreFormula,
    bes: &Bes,
    sol: &Solution,
) -> Result<Counterexample, CheckError> {
    if !in_safety_fragment(f) {
        return Err(CheckError::NotSafetyFragment);
    }
    let binder = binders(f);
    let adj = l.adjacency();
    let start = match bes.resolve(f, &binder, f.root, l.initial).expect("root generated") {
        Ref::Const(true) => panic!("formula holds in the initial state"),
        Ref::Const(false) => return Ok(Counterexample { labels: Vec::new(), states: vec![l.initial] }),
        Ref::Var(v) => v,
    };
    assert!(!sol.values[start as usize], "formula holds in the initial state");

    // Every point reachable from the start through false arguments, with
    // its outgoing edges. Following a transition costs one step,
    // descending into a subformula in the same state costs nothing.
    let mut edges: BTreeMap<Point, Vec<(Point, Step)>> = BTreeMap::new();
    let mut stack = vec![Point::Var(start)];
    edges.insert(Point::Var(start), Vec::new());
    while let Some(p) = stack.pop() {
        let Point::Var(v) = p else { continue };
        let (n, s) = bes.origin[v as usize];
        let mut args: Vec<(NodeId, u32, Step)> = Vec::new();
        match f.node(n) {
            CoreNode::And(cs) => args.extend(cs.iter().map(|c| (*c, s, None))),
            CoreNode::Fix(_, _, body) => args.push((*body, s, None)),
            CoreNode::Box(pat, c) => {
                let pat = &f.patterns[*pat as usize];
                for &(lab, t) in adj.out(s) {
                    if crate::mucalc::match_label(pat, &l.labels[lab as usize]) {
                        args.push((*c, t, Some((lab, t))));
                    }
                }
            }
            other => unreachable!("outside the safety fragment: {other:?}"),
        }
        let mut out = Vec::new();
        for (c, t, step) in args {
            let next = match bes.resolve(f, &binder, c, t).expect("argument generated") {
                Ref::Const(true) => continue,
                Ref::Const(false) => Point::Violation,
                Ref::Var(w) if sol.values[w as usize] => continue,
                Ref::Var(w) => Point::Var(w),
            };
            out.push((next, step));
            if let Entry::Vacant(e) = edges.entry(next) {
                e.insert(Vec::new());
                stack.push(next);
            }
        }
        edges.insert(p, out);
    }

    // Steps still needed to reach the violation, by backward 0-1 search.
    let mut reverse: FxHashMap<Point, Vec<(Point, u32)>> = FxHashMap::default();
    for (p, out) in &edges {
        for (q, step) in out {
            reverse.entry(*q).or_default().push((*p, u32::from(step.is_some())));
        }
    }
    let mut remaining: FxHashMap<Point, u32> = FxHashMap::default();
    let mut deque = VecDeque::from([Point::Violation]);
    remaining.insert(Point::Violation, 0);
    while let Some(q) = deque.pop_front() {
        let d = remaining[&q];
        for &(p, w) in reverse.get(&q).map(Vec::as_slice).unwrap_or_default() {
            let nd = d + w;
            if remaining.get(&p).is_some_and(|old| *old <= nd) {
                continue;
            }
            remaining.insert(p, nd);
            if w == 0 {
                deque.push_front(p);
            } else {
                deque.push_back(p);
            }
        }
    }
    let total = *remaining.get(&Point::Var(start)).expect("false variable without a refuting path");

    // Walk forward along shortest paths, taking the smallest label at
    // every step, so the trace does not depend on exploration order.
    let mut parent: FxHashMap<Point, (Point, Step)> = FxHashMap::default();
    let mut layer: BTreeSet<Point> = BTreeSet::from([Point::Var(start)]);
    for k in 0..=total {
        let need = total - k;
        let mut todo: Vec<Point> = layer.iter().copied().collect();
        while let Some(p) = todo.pop() {
            for &(q, step) in &edges[&p] {
                if step.is_none() && remaining.get(&q) == Some(&need) && layer.insert(q) {
                    parent.insert(q, (p, None));
                    todo.push(q);
                }
            }
        }
        if layer.contains(&Point::Violation) {
            break;
        }
        let mut moves = Vec::new();
        for p in &layer {
            for &(q, step) in &edges[p] {
                if let Some((lab, t)) = step {
                    if remaining.get(&q) == Some(&(need - 1)) {
                        moves.push((p, q, lab, t));
                    }
                }
            }
        }
        let best = moves.iter().map(|(_, _, lab, _)| &l.labels[*lab as usize]).min().expect("shortest path continues");
        let mut next = BTreeSet::new();
        for (p, q, lab, t) in moves {
            if &l.labels[lab as usize] == best && next.insert(q) {
                parent.insert(q, (*p, Some((lab, t))));
            }
        }
        layer = next;
    }
    let mut steps = Vec::new();
    let mut at = Point::Violation;
    while let Some((prev, step)) = parent.get(&at) {
        if let Some(s) = step {
            steps.push(*s);
        }
        at = *prev;
    }
    steps.reverse();
    let mut states = vec![l.initial];
    states.extend(steps.iter().map(|(_, t)| *t));
    Ok(Counterexample { labels: steps.iter().map(|(lab, _)| l.labels[*lab as usize].clone()).collect(), states })
}
