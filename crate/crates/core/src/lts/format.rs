//! Plain-text LTS format:
//!
//! ```text
//! lts <initial> <transitions> <states>
//! <src> "<label>" <dst>
//! ```
//!
//! Labels are written as `name` or `name(v1, v2)` using value syntax, with
//! constructors as bare identifiers.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::data::{Expr, UnOp, Value};
use crate::parse_expr;

use super::{Label, Lts, Transition};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_lts(lts: &Lts, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "lts {} {} {}", lts.initial, lts.transitions.len(), lts.num_states)?;
    for t in &lts.transitions {
        writeln!(out, "{} \"{}\" {}", t.src, lts.labels[t.label as usize], t.dst)?;
    }
    Ok(())
}

fn literal(e: &Expr) -> Option<Value> {
    Some(match e {
        Expr::Lit(v) => v.clone(),
        Expr::Var(c) => Value::ctor(c),
        Expr::ListLit(xs) => Value::list(xs.iter().map(literal).collect::<Option<Vec<_>>>()?),
        Expr::Unary(UnOp::Neg, a) => match literal(a)? {
            Value::Rat(r) => Value::Rat(-r),
            Value::Nat(n) => Value::Rat(-(n as i64) * crate::data::RAT_DENOMINATOR),
            _ => return None,
        },
        _ => return None,
    })
}

pub fn parse_label(text: &str) -> Result<Label, String> {
    let e = parse_expr(text).map_err(|e| e.to_string())?;
    match e {
        Expr::Var(name) => Ok(Label::new(&name, vec![])),
        Expr::Apply(name, args) => {
            let args = args
                .iter()
                .map(|a| literal(a).ok_or_else(|| format!("`{a}` is not a value")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Label::new(&name, args))
        }
        other => Err(format!("`{other}` is not an action label")),
    }
}

pub fn read_lts(input: &mut dyn BufRead) -> Result<Lts, FormatError> {
    let mut lines = input.lines().enumerate();
    let err = |line: usize, message: String| FormatError::Syntax { line: line + 1, message };
    let (hl, header) = loop {
        match lines.next() {
            Some((i, l)) => {
                let l = l?;
                if !l.trim().is_empty() {
                    break (i, l);
                }
            }
            None => return Err(err(0, "empty input".into())),
        }
    };
    let parts: Vec<&str> = header.split_whitespace().collect();
    let nums: Vec<u64> = parts.iter().skip(1).filter_map(|p| p.parse().ok()).collect();
    if parts.first() != Some(&"lts") || parts.len() != 4 || nums.len() != 3 {
        return Err(err(hl, "expected `lts <initial> <transitions> <states>`".into()));
    }
    let (initial, count, states) = (nums[0], nums[1], nums[2]);
    if states == 0 || initial >= states || states > u32::MAX as u64 {
        return Err(err(hl, "initial state out of range".into()));
    }
    let mut lts = Lts { initial: initial as u32, num_states: states as u32, ..Lts::default() };
    let mut label_ids = rustc_hash::FxHashMap::default();
    for (i, l) in lines {
        let l = l?;
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        let (Some(q1), Some(q2)) = (l.find('"'), l.rfind('"')) else {
            return Err(err(i, "expected `<src> \"<label>\" <dst>`".into()));
        };
        if q1 == q2 {
            return Err(err(i, "unterminated label".into()));
        }
        let state = |s: &str| -> Result<u32, FormatError> {
            let n: u64 = s.trim().parse().map_err(|_| err(i, format!("`{}` is not a state number", s.trim())))?;
            if n >= states {
                return Err(err(i, format!("state {n} out of range")));
            }
            Ok(n as u32)
        };
        let src = state(&l[..q1])?;
        let dst = state(&l[q2 + 1..])?;
        let label = parse_label(&l[q1 + 1..q2]).map_err(|m| err(i, m))?;
        let id = *label_ids.entry(label.clone()).or_insert_with(|| {
            lts.labels.push(label);
            lts.labels.len() as u32 - 1
        });
        lts.transitions.push(Transition { src, label: id, dst });
    }
    if lts.transitions.len() as u64 != count {
        return Err(err(hl, format!("header announces {count} transitions, found {}", lts.transitions.len())));
    }
    Ok(lts)
}
