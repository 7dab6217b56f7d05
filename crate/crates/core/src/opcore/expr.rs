//! Operator expressions over the coordinate `x`, the derivative `d`, and
//! diagonal functions of the degree operator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::spectral::Spectral;
use super::OpError;
use crate::poly::Poly;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Multiplication by the coordinate (the raising generator `b`).
    X,
    /// Differentiation (the lowering generator `a`).
    D,
}

/// A family of polynomials `|0>, |1>, ...` with `deg |n> = n`, used as the
/// eigenbasis of a diagonal node.
pub trait KetSource: Send + Sync {
    fn ket(&self, n: usize) -> Result<Poly, OpError>;
    /// `|0> .. |n>`.
    fn kets(&self, n: usize) -> Result<Vec<Poly>, OpError> {
        (0..=n).map(|k| self.ket(k)).collect()
    }
    fn label(&self) -> String;
    fn as_any(&self) -> &dyn std::any::Any;
}

/// The basis in which a [`DiagFn`] is diagonal.
#[derive(Clone)]
pub enum Eigenbasis {
    /// `x^n`: the node is a function of `A = x d`.
    Monomial,
    /// `x_δ^(n)`: the node is a function of `A_δ = b_δ a_δ`.
    Falling(Rational),
    /// The adapted basis of a deformation map.
    Adapted(Arc<dyn KetSource>),
}

impl Eigenbasis {
    /// Collapses `Falling(0)` to `Monomial`.
    pub fn normalized(self) -> Eigenbasis {
        match self {
            Eigenbasis::Falling(d) if d.is_zero() => Eigenbasis::Monomial,
            other => other,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Eigenbasis::Monomial => "monomial".to_string(),
            Eigenbasis::Falling(d) => format!("falling({d})"),
            Eigenbasis::Adapted(src) => src.label(),
        }
    }
}

impl PartialEq for Eigenbasis {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Eigenbasis::Monomial, Eigenbasis::Monomial) => true,
            (Eigenbasis::Falling(a), Eigenbasis::Falling(b)) => a == b,
            (Eigenbasis::Adapted(a), Eigenbasis::Adapted(b)) => a.label() == b.label(),
            _ => false,
        }
    }
}

impl fmt::Debug for Eigenbasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Acts on the `n`-th eigenbasis element with eigenvalue `spectral(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagFn {
    pub spectral: Spectral,
    pub basis: Eigenbasis,
}

impl DiagFn {
    pub fn monomial(spectral: Spectral) -> Self {
        DiagFn { spectral, basis: Eigenbasis::Monomial }
    }
}

/// Operator AST. `Product` is ordered: the leftmost factor acts last.
#[derive(Debug, Clone, PartialEq)]
pub enum OpExpr {
    Gen(Generator),
    /// Multiplication by a constant.
    Scalar(Rational),
    ScalarMul(Rational, Box<OpExpr>),
    Sum(Vec<OpExpr>),
    Product(Vec<OpExpr>),
    Pow(Box<OpExpr>, u32),
    Diag(DiagFn),
    /// Operator exponential, evaluated as a terminating power series.
    Exp(Box<OpExpr>),
    /// Inverse of a diagonal operator.
    Inv(Box<OpExpr>),
    /// A named alias; acts as its body.
    Named(String, Box<OpExpr>),
}

/// Generator images used by [`OpExpr::substitute`].
pub trait Substitution {
    fn image_x(&self) -> &OpExpr;
    fn image_d(&self) -> &OpExpr;
    /// Eigenbasis of `φ(g(A_β))` given the eigenbasis of `g(A_β)`.
    fn image_basis(&self, basis: &Eigenbasis) -> Result<Eigenbasis, OpError>;
}

impl OpExpr {
    pub fn x() -> OpExpr {
        OpExpr::Gen(Generator::X)
    }

    pub fn d() -> OpExpr {
        OpExpr::Gen(Generator::D)
    }

    pub fn identity() -> OpExpr {
        OpExpr::Scalar(Rational::one())
    }

    pub fn scalar(c: Rational) -> OpExpr {
        OpExpr::Scalar(c)
    }

    pub fn diag(spectral: Spectral) -> OpExpr {
        OpExpr::Diag(DiagFn::monomial(spectral))
    }

    pub fn diag_in(spectral: Spectral, basis: Eigenbasis) -> OpExpr {
        OpExpr::Diag(DiagFn { spectral, basis: basis.normalized() })
    }

    /// `A = x d`, as a diagonal node.
    pub fn degree_op() -> OpExpr {
        OpExpr::diag(Spectral::Index)
    }

    /// `B = 1 + A`.
    pub fn b_op() -> OpExpr {
        OpExpr::diag(Spectral::shifted(1))
    }

    pub fn named(name: impl Into<String>, body: OpExpr) -> OpExpr {
        OpExpr::Named(name.into(), Box::new(body))
    }

    pub fn product(factors: Vec<OpExpr>) -> OpExpr {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f {
                OpExpr::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => OpExpr::identity(),
            1 => flat.pop().unwrap(),
            _ => OpExpr::Product(flat),
        }
    }

    pub fn sum(terms: Vec<OpExpr>) -> OpExpr {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t {
                OpExpr::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => OpExpr::Scalar(Rational::zero()),
            1 => flat.pop().unwrap(),
            _ => OpExpr::Sum(flat),
        }
    }

    /// `c * e`, folding nested scalar factors.
    pub fn scaled(c: Rational, e: OpExpr) -> OpExpr {
        match e {
            OpExpr::Scalar(s) => OpExpr::Scalar(c * s),
            OpExpr::ScalarMul(s, inner) => OpExpr::scaled_raw(c * s, *inner),
            other => OpExpr::scaled_raw(c, other),
        }
    }

    fn scaled_raw(c: Rational, e: OpExpr) -> OpExpr {
        if c.is_one() {
            e
        } else {
            OpExpr::ScalarMul(c, Box::new(e))
        }
    }

    pub fn pow(self, k: u32) -> OpExpr {
        OpExpr::Pow(Box::new(self), k)
    }

    pub fn exp(self) -> OpExpr {
        OpExpr::Exp(Box::new(self))
    }

    /// Inverse of a diagonal operator; anything else is rejected.
    pub fn inv(self) -> Result<OpExpr, OpError> {
        if self.as_diag().is_none() {
            return Err(OpError::NotDiagonal(format!("{self}")));
        }
        Ok(OpExpr::Inv(Box::new(self)))
    }

    /// The Jackson derivative `d_q = [[B]]^{-1} d`.
    pub fn jackson_d(q: &Rational) -> OpExpr {
        let bb = OpExpr::diag(Spectral::dbracket(q.clone(), Spectral::shifted(1)));
        OpExpr::named("Dq", OpExpr::Product(vec![OpExpr::Inv(Box::new(bb)), OpExpr::d()]))
    }

    /// Its canonical conjugate `x_q = x [[B]]`.
    pub fn jackson_x(q: &Rational) -> OpExpr {
        let bb = OpExpr::diag(Spectral::dbracket(q.clone(), Spectral::shifted(1)));
        OpExpr::named("xq", OpExpr::Product(vec![OpExpr::x(), bb]))
    }

    /// Jackson integral `S = {A}^{-1} x`.
    pub fn jackson_s(q: &Rational) -> OpExpr {
        let braces = OpExpr::diag(Spectral::qnum(q.clone(), Spectral::Index));
        OpExpr::named("S", OpExpr::Product(vec![OpExpr::Inv(Box::new(braces)), OpExpr::x()]))
    }

    /// Quantum averaging `M_q = x^{-1} S`, acting as `x^n -> x^n/{n+1}`.
    pub fn quantum_average(q: &Rational) -> OpExpr {
        let braces = OpExpr::diag(Spectral::qnum(q.clone(), Spectral::shifted(1)));
        OpExpr::named("Mq", OpExpr::Inv(Box::new(braces)))
    }

    /// `U(A) = Γ_q(A+1)/Γ(A+1)`.
    pub fn similarity_u(q: &Rational) -> OpExpr {
        OpExpr::named("U", OpExpr::diag(Spectral::gamma_ratio(q.clone(), Spectral::Index)))
    }

    /// Forward difference `a_δ = δ^{-1}(e^{δd} - 1)`; the derivative at `δ = 0`.
    pub fn delta_d(delta: &Rational) -> OpExpr {
        let body = match delta.recip() {
            None => OpExpr::d(),
            Some(inv) => OpExpr::ScalarMul(
                inv,
                Box::new(OpExpr::Sum(vec![
                    OpExpr::scaled(delta.clone(), OpExpr::d()).exp(),
                    OpExpr::Scalar(Rational::from(-1)),
                ])),
            ),
        };
        OpExpr::named("Ddelta", body)
    }

    /// `b_δ = x e^{-δd}`.
    pub fn delta_x(delta: &Rational) -> OpExpr {
        let body = if delta.is_zero() {
            OpExpr::x()
        } else {
            OpExpr::Product(vec![OpExpr::x(), OpExpr::scaled(-delta, OpExpr::d()).exp()])
        };
        OpExpr::named("xdelta", body)
    }

    /// Strips aliases.
    pub fn unnamed(&self) -> &OpExpr {
        match self {
            OpExpr::Named(_, body) => body.unnamed(),
            other => other,
        }
    }

    /// If the expression is a diagonal operator in a single eigenbasis,
    /// returns it as one [`DiagFn`].
    pub fn as_diag(&self) -> Option<DiagFn> {
        let (spectral, basis) = self.diag_parts()?;
        Some(DiagFn { spectral, basis: basis.unwrap_or(Eigenbasis::Monomial) })
    }

    fn diag_parts(&self) -> Option<(Spectral, Option<Eigenbasis>)> {
        fn merge(a: Option<Eigenbasis>, b: Option<Eigenbasis>) -> Option<Option<Eigenbasis>> {
            match (a, b) {
                (None, x) | (x, None) => Some(x),
                (Some(a), Some(b)) if a == b => Some(Some(a)),
                _ => None,
            }
        }
        match self {
            OpExpr::Scalar(c) => Some((Spectral::Const(c.clone()), None)),
            OpExpr::Diag(d) => Some((d.spectral.clone(), Some(d.basis.clone()))),
            OpExpr::Named(_, body) => body.diag_parts(),
            OpExpr::ScalarMul(c, e) => {
                let (s, b) = e.diag_parts()?;
                Some((Spectral::Mul(vec![Spectral::Const(c.clone()), s]), b))
            }
            OpExpr::Inv(e) => {
                let (s, b) = e.diag_parts()?;
                Some((s.recip(), b))
            }
            OpExpr::Pow(e, k) => {
                let (s, b) = e.diag_parts()?;
                Some((Spectral::Pow(Box::new(s), *k), b))
            }
            OpExpr::Sum(items) | OpExpr::Product(items) => {
                let mut parts = Vec::with_capacity(items.len());
                let mut basis = None;
                for it in items {
                    let (s, b) = it.diag_parts()?;
                    basis = merge(basis, b)?;
                    parts.push(s);
                }
                let s = if matches!(self, OpExpr::Sum(_)) { Spectral::Add(parts) } else { Spectral::Mul(parts) };
                Some((s, basis))
            }
            OpExpr::Gen(_) | OpExpr::Exp(_) => None,
        }
    }

    /// The `*`-involution: swaps `x` and `d` and reverses every product.
    /// Scalars are fixed (all parameters are real).
    pub fn star(&self) -> Result<OpExpr, OpError> {
        Ok(match self {
            OpExpr::Gen(Generator::X) => OpExpr::d(),
            OpExpr::Gen(Generator::D) => OpExpr::x(),
            OpExpr::Scalar(c) => OpExpr::Scalar(c.clone()),
            OpExpr::ScalarMul(c, e) => OpExpr::ScalarMul(c.clone(), Box::new(e.star()?)),
            OpExpr::Sum(terms) => OpExpr::Sum(terms.iter().map(OpExpr::star).collect::<Result<_, _>>()?),
            OpExpr::Product(factors) => {
                OpExpr::Product(factors.iter().rev().map(OpExpr::star).collect::<Result<_, _>>()?)
            }
            OpExpr::Pow(e, k) => OpExpr::Pow(Box::new(e.star()?), *k),
            OpExpr::Exp(e) => OpExpr::Exp(Box::new(e.star()?)),
            OpExpr::Named(_, body) => body.star()?,
            OpExpr::Diag(_) | OpExpr::Inv(_) => {
                return Err(OpError::Unsupported(format!("no *-image defined for diagonal node {self}")))
            }
        })
    }

    /// Replaces the generators by their images under a deformation map.
    pub fn substitute(&self, s: &dyn Substitution) -> Result<OpExpr, OpError> {
        Ok(match self {
            OpExpr::Gen(Generator::X) => s.image_x().clone(),
            OpExpr::Gen(Generator::D) => s.image_d().clone(),
            OpExpr::Scalar(c) => OpExpr::Scalar(c.clone()),
            OpExpr::ScalarMul(c, e) => OpExpr::ScalarMul(c.clone(), Box::new(e.substitute(s)?)),
            OpExpr::Sum(terms) => OpExpr::Sum(terms.iter().map(|t| t.substitute(s)).collect::<Result<_, _>>()?),
            OpExpr::Product(factors) => {
                OpExpr::Product(factors.iter().map(|t| t.substitute(s)).collect::<Result<_, _>>()?)
            }
            OpExpr::Pow(e, k) => OpExpr::Pow(Box::new(e.substitute(s)?), *k),
            OpExpr::Exp(e) => OpExpr::Exp(Box::new(e.substitute(s)?)),
            OpExpr::Inv(e) => OpExpr::Inv(Box::new(e.substitute(s)?)),
            OpExpr::Diag(d) => {
                OpExpr::Diag(DiagFn { spectral: d.spectral.clone(), basis: s.image_basis(&d.basis)?.normalized() })
            }
            OpExpr::Named(_, body) => body.substitute(s)?,
        })
    }
}

impl Mul for OpExpr {
    type Output = OpExpr;
    fn mul(self, rhs: OpExpr) -> OpExpr {
        OpExpr::product(vec![self, rhs])
    }
}

impl Add for OpExpr {
    type Output = OpExpr;
    fn add(self, rhs: OpExpr) -> OpExpr {
        OpExpr::sum(vec![self, rhs])
    }
}

impl Neg for OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        OpExpr::scaled(Rational::from(-1), self)
    }
}

impl Sub for OpExpr {
    type Output = OpExpr;
    fn sub(self, rhs: OpExpr) -> OpExpr {
        self + (-rhs)
    }
}

impl Mul<OpExpr> for Rational {
    type Output = OpExpr;
    fn mul(self, rhs: OpExpr) -> OpExpr {
        OpExpr::scaled(self, rhs)
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::print_op(self))
    }
}
