//! Model checking of core formulas on explicit LTSs through boolean
//! equation systems, with a direct fixpoint evaluator as reference.

mod bes;
mod naive;
mod solve;
mod trace;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::lts::Lts;
use crate::mucalc::{compile, CoreFormula, CoreNode, Formula, MuError, NodeId, Signature, VarId};

pub use bes::{generate_bes, Bes, Block, Equation, Op, Ref, DEFAULT_MAX_EQUATIONS};
pub use naive::check_naive;
pub use solve::{solve_bes, Solution};
pub use trace::{extract_counterexample, in_safety_fragment, Counterexample};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Formula(#[from] MuError),
    #[error("boolean equation system exceeds {cap} equations; use a smaller scenario")]
    CapacityExceeded { cap: usize },
    #[error("counterexamples are only produced for formulas built from nu, box and conjunction")]
    NotSafetyFragment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub max_equations: usize,
    /// Also decide the formula in every state, not only the initial one.
    pub per_state: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { max_equations: DEFAULT_MAX_EQUATIONS, per_state: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub equations: usize,
    pub blocks: usize,
    pub iterations: u64,
    pub wall: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationResult {
    pub holds: bool,
    /// States satisfying the formula, ascending; present with `per_state`.
    pub satisfying: Option<Vec<u32>>,
    /// Present when the formula fails and lies in the safety fragment.
    pub counterexample: Option<Counterexample>,
    pub safety_fragment: bool,
    pub stats: Stats,
}

/// Expands `f` against `sig` and checks it in the initial state of `l`.
pub fn check(l: &Lts, f: &Formula, sig: &Signature, opts: CheckOptions) -> Result<VerificationResult, CheckError> {
    let start = Instant::now();
    let core = compile(f, sig)?;
    let mut result = check_core(l, &core, opts)?;
    result.stats.wall = start.elapsed();
    Ok(result)
}

pub fn check_core(l: &Lts, f: &CoreFormula, opts: CheckOptions) -> Result<VerificationResult, CheckError> {
    let start = Instant::now();
    let roots: Vec<u32> = if opts.per_state { (0..l.num_states).collect() } else { vec![l.initial] };
    let bes = generate_bes(l, f, &roots, opts.max_equations)?;
    let solution = solve_bes(&bes);
    let initial = roots.iter().position(|&s| s == l.initial).expect("initial state is a root");
    let holds = solution.value(bes.roots[initial]);
    let satisfying = opts.per_state.then(|| {
        roots.iter().zip(&bes.roots).filter(|(_, r)| solution.value(**r)).map(|(s, _)| *s).collect()
    });
    let safety_fragment = in_safety_fragment(f);
    let counterexample = if !holds && safety_fragment {
        Some(extract_counterexample(l, f, &bes, &solution)?)
    } else {
        None
    };
    Ok(VerificationResult {
        holds,
        satisfying,
        counterexample,
        safety_fragment,
        stats: Stats {
            equations: bes.equations.len(),
            blocks: bes.blocks.len(),
            iterations: solution.iterations,
            wall: start.elapsed(),
        },
    })
}

/// For each fixpoint variable, the node binding it.
pub(crate) fn binders(f: &CoreFormula) -> Vec<NodeId> {
    let mut out = vec![NodeId::MAX; f.var_names.len()];
    for (id, n) in f.nodes.iter().enumerate() {
        if let CoreNode::Fix(_, x, _) = n {
            out[*x as usize] = id as NodeId;
        }
    }
    out
}

/// Free fixpoint variables of every node, sorted.
pub(crate) fn free_vars(f: &CoreFormula) -> Vec<Vec<VarId>> {
    let mut out: Vec<Vec<VarId>> = Vec::with_capacity(f.nodes.len());
    for n in &f.nodes {
        let mut vs = match n {
            CoreNode::True | CoreNode::False => Vec::new(),
            CoreNode::Var(x) => vec![*x],
            CoreNode::And(cs) | CoreNode::Or(cs) => cs.iter().flat_map(|c| out[*c as usize].iter().copied()).collect(),
            CoreNode::Box(_, c) | CoreNode::Diamond(_, c) => out[*c as usize].clone(),
            CoreNode::Fix(_, x, c) => out[*c as usize].iter().copied().filter(|v| v != x).collect(),
        };
        vs.sort_unstable();
        vs.dedup();
        out.push(vs);
    }
    out
}

/// `matches[p][l]`: whether pattern `p` accepts label `l`.
pub(crate) fn pattern_table(l: &Lts, f: &CoreFormula) -> Vec<Vec<bool>> {
    f.patterns
        .iter()
        .map(|p| l.labels.iter().map(|lab| crate::mucalc::match_label(p, lab)).collect())
        .collect()
}

/// Nodes reachable from the root.
pub(crate) fn live_nodes(f: &CoreFormula) -> Vec<bool> {
    let mut live = vec![false; f.nodes.len()];
    live[f.root as usize] = true;
    for id in (0..f.nodes.len()).rev() {
        if !live[id] {
            continue;
        }
        match &f.nodes[id] {
            CoreNode::And(cs) | CoreNode::Or(cs) => cs.iter().for_each(|c| live[*c as usize] = true),
            CoreNode::Box(_, c) | CoreNode::Diamond(_, c) | CoreNode::Fix(_, _, c) => live[*c as usize] = true,
            CoreNode::True | CoreNode::False | CoreNode::Var(_) => {}
        }
    }
    live
}

#[cfg(test)]
mod tests;
