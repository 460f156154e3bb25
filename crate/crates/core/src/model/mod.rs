//! The process specification language: declarations, process terms, parsing,
//! pretty printing and static checking.

mod parser;
mod printer;
mod typecheck;

use crate::data::{Expr, Sort};

pub use parser::parse_model;
pub(crate) use typecheck::coerce;
pub use typecheck::{typecheck, ActionDecl, Global, ModelError, Proc, Term, TermId, TypedModel, SKIP_ACTION};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSource {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SortDef {
    /// `struct a | b | c`
    Struct(Vec<String>),
    Alias(Sort),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Sort { name: String, def: SortDef },
    /// `act a, b: S # T;` declares every name with the same parameter sorts.
    Act { names: Vec<String>, params: Vec<Sort> },
    Glob { name: String, sort: Sort, init: Expr },
    Const { name: String, sort: Sort, value: Expr },
    Proc { name: String, params: Vec<(String, Sort)>, body: ProcessTerm },
    Init { name: String, args: Vec<Expr> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProcessTerm {
    Action { name: String, args: Vec<Expr> },
    Call { name: String, args: Vec<Expr> },
    Seq(Box<ProcessTerm>, Box<ProcessTerm>),
    Choice(Box<ProcessTerm>, Box<ProcessTerm>),
    Cond { guard: Expr, then: Box<ProcessTerm>, otherwise: Option<Box<ProcessTerm>> },
    /// Finite nondeterministic sum over the values of a sort.
    Sum { var: String, sort: Sort, body: Box<ProcessTerm> },
    /// Silent write to a global variable.
    Assign { var: String, value: Expr },
    Skip,
    /// Successful termination without a step.
    Done,
}

impl ProcessTerm {
    pub fn seq(a: ProcessTerm, b: ProcessTerm) -> ProcessTerm {
        ProcessTerm::Seq(Box::new(a), Box::new(b))
    }

    pub fn choice(a: ProcessTerm, b: ProcessTerm) -> ProcessTerm {
        ProcessTerm::Choice(Box::new(a), Box::new(b))
    }
}
