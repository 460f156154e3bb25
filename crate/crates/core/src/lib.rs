pub mod besw;
pub mod checker;
pub mod data;
pub mod lexer;
pub mod lts;
pub mod model;
pub mod mucalc;
mod parse;
pub mod types;

pub use parse::parse_expr;
