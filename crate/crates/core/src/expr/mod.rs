//! A small expression language for time-dependent scalar inputs.
//!
//! Coefficients, deviating arguments and initial functions are written as
//! expressions in the single variable `t`, e.g. `"t - 3"`, `"0.5 + 0.1*sin(t)"`
//! or `"floor(t)"`. Supported: decimal literals (`1`, `2.5`, `1e-3`), the
//! constants `pi` and `e`, unary minus, `+ - * /`, parentheses and the
//! functions `sin`, `cos`, `exp`, `abs`, `floor`.
//!
//! Unary minus binds to a single factor, so `-t*t` is `(-t)*t`. There is no
//! implicit multiplication and no power operator.

mod ast;
mod parser;

pub use ast::{BinOp, Constant, Expr, Func};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected end of expression at offset {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("unexpected character {ch:?} at offset {offset}")]
    UnexpectedChar { offset: usize, ch: char },
    #[error("malformed number {text:?} at offset {offset}")]
    BadNumber { offset: usize, text: String },
    #[error("expected {what} at offset {offset}")]
    Expected { offset: usize, what: &'static str },
    #[error("unknown function {name:?} at offset {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("unknown identifier {name:?} at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("trailing input at offset {offset}")]
    Trailing { offset: usize },
}

impl ParseError {
    /// Byte offset into the source, when the error has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::UnexpectedEnd { offset }
            | ParseError::UnexpectedChar { offset, .. }
            | ParseError::BadNumber { offset, .. }
            | ParseError::Expected { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Trailing { offset } => Some(*offset),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at t = {t}")]
    DivisionByZero { t: f64 },
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parser::parse(src)
}

pub fn eval_expr(ast: &Expr, t: f64) -> Result<f64, EvalError> {
    ast.eval(t)
}
