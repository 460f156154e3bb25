//! Labelled transition systems: state-space generation from typed models and
//! a plain-text exchange format.

mod engine;
mod explore;
mod format;

use std::fmt;
use std::sync::Arc;

use crate::data::Value;

pub use engine::{Engine, EngineError, Frame, State};
pub use explore::{explore, ExploreError, ExploreLimits};
pub use format::{parse_label, read_lts, write_lts, FormatError};

/// Visible action of a transition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub action: Arc<str>,
    pub args: Vec<Value>,
}

impl Label {
    pub fn new(action: &str, args: Vec<Value>) -> Label {
        Label { action: Arc::from(action), args }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.action)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: u32,
    pub label: u32,
    pub dst: u32,
}

/// Explicit LTS. States are numbered `0..num_states` in breadth-first
/// discovery order; labels are interned in order of first use.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lts {
    pub initial: u32,
    pub num_states: u32,
    pub labels: Vec<Label>,
    pub transitions: Vec<Transition>,
}

/// Outgoing transitions grouped by source state.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    edges: Vec<(u32, u32)>,
}

impl Adjacency {
    /// `(label, target)` pairs leaving `s`.
    pub fn out(&self, s: u32) -> &[(u32, u32)] {
        &self.edges[self.offsets[s as usize]..self.offsets[s as usize + 1]]
    }
}

impl Lts {
    pub fn label(&self, t: &Transition) -> &Label {
        &self.labels[t.label as usize]
    }

    pub fn adjacency(&self) -> Adjacency {
        let n = self.num_states as usize;
        let mut offsets = vec![0usize; n + 1];
        for t in &self.transitions {
            offsets[t.src as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut edges = vec![(0, 0); self.transitions.len()];
        for t in &self.transitions {
            edges[fill[t.src as usize]] = (t.label, t.dst);
            fill[t.src as usize] += 1;
        }
        Adjacency { offsets, edges }
    }

    /// States without outgoing transitions, ascending.
    pub fn deadlocks(&self) -> Vec<u32> {
        let mut has_out = vec![false; self.num_states as usize];
        for t in &self.transitions {
            has_out[t.src as usize] = true;
        }
        (0..self.num_states).filter(|&s| !has_out[s as usize]).collect()
    }
}

#[cfg(test)]
mod tests;
