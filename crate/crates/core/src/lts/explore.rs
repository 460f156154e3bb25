use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::model::TypedModel;

use super::{Engine, EngineError, Label, Lts, State, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreLimits {
    pub max_states: usize,
    pub max_transitions: usize,
    /// Maximum breadth-first depth to expand; unlimited when `None`.
    pub max_depth: Option<usize>,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits { max_states: 10_000_000, max_transitions: 100_000_000, max_depth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("{0}")]
    Engine(#[from] EngineError),
    /// The explored prefix is returned: every state in it below the
    /// interrupted level is fully expanded.
    #[error("exploration stopped: {limit} exceeded after {} states", .partial.num_states)]
    LimitExceeded { limit: &'static str, partial: Box<Lts> },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Breadth-first exploration. Successors of one level are computed by
/// `workers` threads; states are numbered sequentially in frontier order, so
/// the result does not depend on the worker count.
pub fn explore(model: &TypedModel, limits: ExploreLimits, workers: usize) -> Result<Lts, ExploreError> {
    let engine = Engine::new(model);
    let workers = workers.max(1);
    if workers == 1 {
        return run(&engine, limits, |frontier: &[State]| {
            frontier.iter().map(|s| engine.successors(s)).collect()
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExploreError::Pool(e.to_string()))?;
    pool.install(|| {
        run(&engine, limits, |frontier: &[State]| {
            frontier.par_iter().map(|s| engine.successors(s)).collect()
        })
    })
}

type Expansion = Vec<Result<Vec<(Label, State)>, EngineError>>;

fn run(engine: &Engine<'_>, limits: ExploreLimits, expand: impl Fn(&[State]) -> Expansion) -> Result<Lts, ExploreError> {
    let mut ids: FxHashMap<State, u32> = FxHashMap::default();
    let mut label_ids: FxHashMap<Label, u32> = FxHashMap::default();
    let mut lts = Lts::default();
    let init = engine.initial_state()?;
    ids.insert(init.clone(), 0);
    lts.num_states = 1;
    let mut frontier = vec![init];
    let mut depth = 0usize;
    while !frontier.is_empty() {
        if limits.max_depth.is_some_and(|d| depth >= d) {
            break;
        }
        let first_id = lts.num_states - frontier.len() as u32;
        let expanded = expand(&frontier);
        let mut next = Vec::new();
        for (offset, succs) in expanded.into_iter().enumerate() {
            let src = first_id + offset as u32;
            let mut seen: Vec<(u32, u32)> = Vec::new();
            for (label, state) in succs? {
                let label_id = match label_ids.get(&label) {
                    Some(&l) => l,
                    None => {
                        let l = lts.labels.len() as u32;
                        label_ids.insert(label.clone(), l);
                        lts.labels.push(label);
                        l
                    }
                };
                let dst = match ids.get(&state) {
                    Some(&d) => d,
                    None => {
                        if lts.num_states as usize >= limits.max_states {
                            return Err(ExploreError::LimitExceeded { limit: "state limit", partial: Box::new(lts) });
                        }
                        let d = lts.num_states;
                        lts.num_states += 1;
                        ids.insert(state.clone(), d);
                        next.push(state);
                        d
                    }
                };
                if seen.contains(&(label_id, dst)) {
                    continue;
                }
                seen.push((label_id, dst));
                if lts.transitions.len() >= limits.max_transitions {
                    return Err(ExploreError::LimitExceeded { limit: "transition limit", partial: Box::new(lts) });
                }
                lts.transitions.push(Transition { src, label: label_id, dst });
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(lts)
}
