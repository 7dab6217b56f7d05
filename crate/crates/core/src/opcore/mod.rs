//! Operator expressions, their exact action on polynomials, and commutators.
//!
//! Operators are evaluated by action on `x^n` (vacuum ordering: every
//! derivative is moved right until it annihilates the constant), never by
//! symbolic rewriting.

mod apply;
mod expr;
mod linop;
mod spectral;

pub use apply::{apply, apply_with, expand_in_kets, ApplyOptions};
pub use expr::{DiagFn, Eigenbasis, Generator, KetSource, OpExpr, Substitution};
pub use linop::LinOp;
pub use spectral::{Spectral, SpectralError};

use crate::poly::{PolyError, Truncation};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("operators act on monomial-basis polynomials")]
    NotMonomial,
    #[error("degree {degree} exceeds the truncation D = {max}")]
    Overflow { degree: usize, max: usize },
    #[error("exponential series does not terminate")]
    Nontermination,
    #[error("singular diagonal operator: zero eigenvalue at degree {degree}")]
    Singular { degree: usize },
    #[error("spectral function at degree {degree}: {source}")]
    Spectral { degree: usize, source: SpectralError },
    #[error("not a diagonal operator: {0}")]
    NotDiagonal(String),
    #[error("adapted basis element {n} does not have degree {n}")]
    DegenerateKet { n: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no degree window free of overflow")]
    EmptyWindow,
}

/// `[e1, e2] = e1 e2 - e2 e1`, realized at truncation `d`. Columns whose
/// computation leaves the window are marked as overflow.
pub fn commutator(e1: &OpExpr, e2: &OpExpr, d: Truncation) -> Result<LinOp, OpError> {
    q_commutator(e1, e2, &Rational::one(), d)
}

/// `e1 e2 - q e2 e1`, realized at truncation `d`.
pub fn q_commutator(e1: &OpExpr, e2: &OpExpr, q: &Rational, d: Truncation) -> Result<LinOp, OpError> {
    let expr = OpExpr::Sum(vec![
        OpExpr::Product(vec![e1.clone(), e2.clone()]),
        OpExpr::ScalarMul(-q, Box::new(OpExpr::Product(vec![e2.clone(), e1.clone()]))),
    ]);
    let op = LinOp::realize(&expr, d)?;
    if op.safe_window() == 0 {
        return Err(OpError::EmptyWindow);
    }
    Ok(op)
}
