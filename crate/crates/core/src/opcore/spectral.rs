//! Spectral functions `n -> g(n)` attached to diagonal operator nodes.
//!
//! A diagonal node acts on the `n`-th element of its eigenbasis with the
//! eigenvalue `g(n)`. Keeping `g` symbolic (rather than as a closure) lets the
//! expression printer and the DSL round-trip it.

use crate::qnum::{double_bracket, q_number};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Spectral {
    /// The eigenvalue of `A` itself: `n`.
    Index,
    Const(Rational),
    Add(Vec<Spectral>),
    Mul(Vec<Spectral>),
    Pow(Box<Spectral>, u32),
    Recip(Box<Spectral>),
    /// `{m}` of an integer-valued argument.
    QNum {
        q: Rational,
        arg: Box<Spectral>,
    },
    /// `[[m]]` of an integer-valued argument.
    DBracket {
        q: Rational,
        arg: Box<Spectral>,
    },
    /// `{m}!/m!` of a non-negative integer argument.
    GammaRatio {
        q: Rational,
        arg: Box<Spectral>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("division by zero")]
    ZeroDivision,
    #[error("q-function applied to non-integer value {0}")]
    NonInteger(Rational),
    #[error("q-function undefined at {0}")]
    Undefined(Rational),
}

impl Spectral {
    /// `n + k`, the spectrum of `A + k`.
    pub fn shifted(k: i64) -> Spectral {
        if k == 0 {
            Spectral::Index
        } else {
            Spectral::Add(vec![Spectral::Index, Spectral::Const(Rational::from(k))])
        }
    }

    pub fn qnum(q: Rational, arg: Spectral) -> Spectral {
        Spectral::QNum { q, arg: Box::new(arg) }
    }

    pub fn dbracket(q: Rational, arg: Spectral) -> Spectral {
        Spectral::DBracket { q, arg: Box::new(arg) }
    }

    pub fn gamma_ratio(q: Rational, arg: Spectral) -> Spectral {
        Spectral::GammaRatio { q, arg: Box::new(arg) }
    }

    pub fn recip(self) -> Spectral {
        Spectral::Recip(Box::new(self))
    }

    pub fn eval(&self, n: usize) -> Result<Rational, SpectralError> {
        Ok(match self {
            Spectral::Index => Rational::from(n),
            Spectral::Const(c) => c.clone(),
            Spectral::Add(terms) => {
                let mut acc = Rational::zero();
                for t in terms {
                    acc += t.eval(n)?;
                }
                acc
            }
            Spectral::Mul(factors) => {
                let mut acc = Rational::one();
                for f in factors {
                    acc *= &f.eval(n)?;
                }
                acc
            }
            Spectral::Pow(base, k) => base.eval(n)?.pow(i64::from(*k)).ok_or(SpectralError::ZeroDivision)?,
            Spectral::Recip(inner) => inner.eval(n)?.recip().ok_or(SpectralError::ZeroDivision)?,
            Spectral::QNum { q, arg } => {
                let m = integer_arg(arg, n)?;
                q_number(q, m).ok_or_else(|| SpectralError::Undefined(Rational::from(m)))?
            }
            Spectral::DBracket { q, arg } => {
                let m = integer_arg(arg, n)?;
                double_bracket(q, m).ok_or_else(|| SpectralError::Undefined(Rational::from(m)))?
            }
            Spectral::GammaRatio { q, arg } => {
                let m = integer_arg(arg, n)?;
                if m < 0 {
                    return Err(SpectralError::Undefined(Rational::from(m)));
                }
                let mut acc = Rational::one();
                for j in 1..=m {
                    let qj = q_number(q, j).ok_or_else(|| SpectralError::Undefined(Rational::from(j)))?;
                    acc = acc * qj / Rational::from(j);
                }
                acc
            }
        })
    }

    /// True when the function does not depend on `n`.
    pub fn is_constant(&self) -> bool {
        match self {
            Spectral::Index => false,
            Spectral::Const(_) => true,
            Spectral::Add(v) | Spectral::Mul(v) => v.iter().all(Spectral::is_constant),
            Spectral::Pow(b, _) | Spectral::Recip(b) => b.is_constant(),
            Spectral::QNum { arg, .. } | Spectral::DBracket { arg, .. } | Spectral::GammaRatio { arg, .. } => {
                arg.is_constant()
            }
        }
    }
}

fn integer_arg(arg: &Spectral, n: usize) -> Result<i64, SpectralError> {
    let v = arg.eval(n)?;
    v.to_i64().ok_or(SpectralError::NonInteger(v))
}
