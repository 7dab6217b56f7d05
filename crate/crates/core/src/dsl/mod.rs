//! A small text language for operators and polynomials.
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = [ "-" ] factor { "*" factor } ;
//! factor = "-" factor | power ;
//! power  = atom [ "^" natural ] ;
//! atom   = number | ident | ident "(" expr ")" | "(" expr ")" ;
//! number = digits [ "/" digits ] ;
//! ```
//!
//! Atoms: `x`, `d`, `A`, `B`, `Dq`, `xq`, `S`, `Mq`, `U` (these need `q`),
//! `Ddelta`, `xdelta`, `Adelta`, `Bdelta` (these need `δ`). Functions:
//! `qb(E)` is `[[E]]`, `qn(E)` is `{E}`, `gammaq(E)` is `{E}!/E!`, `inv(E)`,
//! `exp(E)`. The first three and `inv` take a diagonal argument. A whole
//! input of the form `poly(...)` is a polynomial in `x`.
//!
//! `*` is noncommutative and left-associative; `^` binds tighter than `*`,
//! which binds tighter than `+` and `-`.

mod bind;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::opcore::OpExpr;
use crate::poly::Poly;
use crate::rational::Rational;

pub use parser::{parse_source, SourceExpr};
pub use printer::{print_op, print_poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}:{}: {message}", pos.line, pos.col)]
pub struct DslError {
    pub pos: Pos,
    pub message: String,
}

impl DslError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>) -> Self {
        DslError { pos, message: message.into() }
    }
}

/// Values bound to `q` and `δ` while parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    pub q: Option<Rational>,
    pub delta: Option<Rational>,
}

impl Params {
    pub fn new(q: Option<Rational>, delta: Option<Rational>) -> Self {
        Params { q, delta }
    }

    pub fn with_q(q: Rational) -> Self {
        Params { q: Some(q), delta: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Op(OpExpr),
    Poly(Poly),
}

impl fmt::Display for Parsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parsed::Op(e) => f.write_str(&print_op(e)),
            Parsed::Poly(p) => f.write_str(&print_poly(p)),
        }
    }
}

pub fn parse(text: &str, params: &Params) -> Result<Parsed, DslError> {
    bind::bind(&parse_source(text)?, params)
}

pub fn parse_op(text: &str, params: &Params) -> Result<OpExpr, DslError> {
    match parse(text, params)? {
        Parsed::Op(e) => Ok(e),
        Parsed::Poly(_) => Err(DslError::new(Pos { line: 1, col: 1 }, "expected an operator, found a polynomial")),
    }
}

/// Accepts `poly(...)` or a bare polynomial expression in `x`.
pub fn parse_poly(text: &str) -> Result<Poly, DslError> {
    let src = parse_source(text)?;
    match &src {
        SourceExpr::Call(name, arg, _) if name == "poly" => bind::bind_poly(arg),
        other => bind::bind_poly(other),
    }
}
