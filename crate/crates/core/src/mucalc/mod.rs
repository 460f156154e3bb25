//! Property language: modal mu-calculus with regular action formulas, data
//! quantifiers and `val` predicates, plus its expansion to core fixpoint
//! formulas over concrete action patterns.

mod ast;
mod expand;
mod parser;
mod resolve;

use thiserror::Error;

use crate::data::{EvalError, DEFAULT_EXPANSION_CAP};
use crate::lexer::SyntaxError;
use crate::types::TypeError;

pub use ast::{ActionPattern, Formula, NamedPattern, PredDef, PropertyFile, Regular};
pub use expand::{
    expand_quantifiers, expand_regular, match_label, CoreFormula, CoreNode, GroundArg, GroundNamed, GroundPattern,
    NodeId, Sign, VarId, DEFAULT_NODE_CAP,
};
pub use parser::{parse_formula_text, parse_property};
pub use resolve::{inline_macros, resolve, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MuError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("fixpoint variable `{0}` occurs negatively")]
    NonMonotone(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("{0}")]
    Type(TypeError),
    #[error("quantified variable `{0}` has no bounding guard")]
    UnboundedQuantifier(String),
    #[error("sort {sort} has {size} values, more than the cap of {cap}")]
    SortTooLarge { sort: String, size: String, cap: usize },
    #[error("{0}")]
    Eval(EvalError),
    #[error("expanded formula exceeds {0} nodes")]
    TooLarge(usize),
    #[error("{0}")]
    Invalid(String),
}

impl From<TypeError> for MuError {
    fn from(e: TypeError) -> Self {
        match e {
            TypeError::UnknownName(n) => MuError::UnknownName(n),
            other => MuError::Type(other),
        }
    }
}

impl From<EvalError> for MuError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::UnboundedQuantifier { var } => MuError::UnboundedQuantifier(var),
            EvalError::SortTooLarge { sort, size, cap } => MuError::SortTooLarge { sort, size, cap },
            other => MuError::Eval(other),
        }
    }
}

/// Parses a property file and checks it against `sig`, returning the
/// source form (for printing) and the resolved formula.
pub fn parse_formula(src: &str, sig: &Signature) -> Result<(PropertyFile, Formula), MuError> {
    let p = parse_property(src)?;
    let f = resolve(&p, sig)?;
    Ok((p, f))
}

/// Full expansion of a resolved formula to core form with the default
/// per-sort expansion cap.
pub fn compile(f: &Formula, sig: &Signature) -> Result<CoreFormula, MuError> {
    expand_quantifiers(&expand_regular(f), sig, DEFAULT_EXPANSION_CAP)
}

#[cfg(test)]
mod tests;
