//! Left action of operator expressions on truncated polynomial spaces.

use super::expr::{DiagFn, Eigenbasis, Generator, OpExpr};
use super::spectral::{Spectral, SpectralError};
use super::OpError;
use crate::poly::{Poly, Truncation};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApplyOptions {
    pub truncation: Truncation,
    /// Drop degrees above the truncation instead of failing.
    pub allow_truncation: bool,
}

impl ApplyOptions {
    pub fn strict(truncation: Truncation) -> Self {
        ApplyOptions { truncation, allow_truncation: false }
    }

    pub fn truncating(truncation: Truncation) -> Self {
        ApplyOptions { truncation, allow_truncation: true }
    }
}

/// `e ▷ p` with overflow treated as an error.
pub fn apply(e: &OpExpr, p: &Poly, d: Truncation) -> Result<Poly, OpError> {
    apply_with(e, p, ApplyOptions::strict(d))
}

pub fn apply_with(e: &OpExpr, p: &Poly, opts: ApplyOptions) -> Result<Poly, OpError> {
    if !p.is_monomial_basis() {
        return Err(OpError::NotMonomial);
    }
    let eval = Evaluator { opts };
    let p = eval.bound(p.clone())?;
    eval.act(e, &p)
}

struct Evaluator {
    opts: ApplyOptions,
}

impl Evaluator {
    fn max_degree(&self) -> usize {
        self.opts.truncation.max_degree()
    }

    fn bound(&self, p: Poly) -> Result<Poly, OpError> {
        match p.degree() {
            Some(deg) if deg > self.max_degree() => {
                if self.opts.allow_truncation {
                    Ok(p.truncate(self.opts.truncation))
                } else {
                    Err(OpError::Overflow { degree: deg, max: self.max_degree() })
                }
            }
            _ => Ok(p),
        }
    }

    fn act(&self, e: &OpExpr, p: &Poly) -> Result<Poly, OpError> {
        if p.is_zero() {
            return Ok(Poly::zero());
        }
        match e {
            OpExpr::Gen(Generator::X) => self.bound(p.mul_x()?),
            OpExpr::Gen(Generator::D) => Ok(p.derivative()?),
            OpExpr::Scalar(c) => Ok(p.scale(c)),
            OpExpr::ScalarMul(c, inner) => Ok(self.act(inner, p)?.scale(c)),
            OpExpr::Sum(terms) => {
                let mut acc = Poly::zero();
                for t in terms {
                    acc = acc.try_add(&self.act(t, p)?)?;
                }
                Ok(acc)
            }
            OpExpr::Product(factors) => {
                let mut cur = p.clone();
                for f in factors.iter().rev() {
                    cur = self.act(f, &cur)?;
                    if cur.is_zero() {
                        break;
                    }
                }
                Ok(cur)
            }
            OpExpr::Pow(inner, k) => {
                let mut cur = p.clone();
                for _ in 0..*k {
                    cur = self.act(inner, &cur)?;
                    if cur.is_zero() {
                        break;
                    }
                }
                Ok(cur)
            }
            OpExpr::Diag(d) => self.diag(d, p),
            OpExpr::Inv(inner) => {
                let d = inner.as_diag().ok_or_else(|| OpError::NotDiagonal(inner.to_string()))?;
                let inverse = DiagFn { spectral: d.spectral.recip(), basis: d.basis };
                self.diag(&inverse, p)
            }
            OpExpr::Exp(inner) => self.exp(inner, p),
            OpExpr::Named(_, body) => self.act(body, p),
        }
    }

    fn exp(&self, e0: &OpExpr, p: &Poly) -> Result<Poly, OpError> {
        let mut sum = p.clone();
        let mut term = p.clone();
        // A strictly degree-lowering generator empties the series after at
        // most deg(p) + 1 <= D + 1 steps; so does a raising one under truncation.
        for k in 1..=self.max_degree() + 2 {
            term = match self.act(e0, &term) {
                Ok(t) => t.scale(&Rational::new(1, k as i64)),
                Err(OpError::Overflow { .. }) => return Err(OpError::Nontermination),
                Err(other) => return Err(other),
            };
            if term.is_zero() {
                return Ok(sum);
            }
            sum = sum.try_add(&term)?;
        }
        Err(OpError::Nontermination)
    }

    fn diag(&self, d: &DiagFn, p: &Poly) -> Result<Poly, OpError> {
        match &d.basis {
            Eigenbasis::Monomial => scale_by_spectrum(p, &d.spectral),
            Eigenbasis::Falling(delta) if delta.is_zero() => scale_by_spectrum(p, &d.spectral),
            Eigenbasis::Falling(delta) => {
                let falling = p.to_falling(delta)?;
                Ok(scale_by_spectrum(&falling, &d.spectral)?.to_monomial())
            }
            Eigenbasis::Adapted(src) => {
                let deg = p.degree().unwrap_or(0);
                let kets = src.kets(deg)?;
                let coords = expand_in_kets(p, &kets)?;
                let mut acc = Poly::zero();
                for (n, (c, ket)) in coords.iter().zip(&kets).enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let g = eigenvalue(&d.spectral, n)?;
                    acc = acc.try_add(&ket.scale(&(c * g)))?;
                }
                Ok(acc)
            }
        }
    }
}

fn eigenvalue(s: &Spectral, n: usize) -> Result<Rational, OpError> {
    s.eval(n).map_err(|e| match e {
        SpectralError::ZeroDivision => OpError::Singular { degree: n },
        other => OpError::Spectral { degree: n, source: other },
    })
}

/// Multiplies the `n`-th coefficient (in whatever basis `p` carries) by `g(n)`.
fn scale_by_spectrum(p: &Poly, g: &Spectral) -> Result<Poly, OpError> {
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| if c.is_zero() { Ok(Rational::zero()) } else { Ok(c * eigenvalue(g, n)?) })
        .collect::<Result<Vec<_>, OpError>>()?;
    Ok(Poly::from_coeffs(p.basis().clone(), coeffs))
}

/// Coordinates of `p` in a triangular family with `deg kets[n] = n`.
pub fn expand_in_kets(p: &Poly, kets: &[Poly]) -> Result<Vec<Rational>, OpError> {
    let mut rest = p.clone();
    let mut coords = vec![Rational::zero(); kets.len()];
    while let Some(deg) = rest.degree() {
        let ket = kets.get(deg).ok_or(OpError::Overflow { degree: deg, max: kets.len().saturating_sub(1) })?;
        if ket.degree() != Some(deg) {
            return Err(OpError::DegenerateKet { n: deg });
        }
        let c = rest.coeff(deg) / ket.leading().expect("nonzero ket");
        rest = rest.try_sub(&ket.scale(&c))?;
        coords[deg] = c;
    }
    Ok(coords)
}
