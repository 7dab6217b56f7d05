//! Dense univariate polynomials over [`Rational`] in either the monomial
//! basis `x^n` or the falling δ-factorial basis
//! `x_δ^(n) = x(x-δ)...(x-(n-1)δ)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qnum::{stirling_first_row, stirling_second_row};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Falling { delta: Rational },
}

impl Basis {
    pub fn falling(delta: Rational) -> Self {
        Basis::Falling { delta }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: Box<Basis>, right: Box<Basis> },
    #[error("{0} is only defined in the monomial basis")]
    MonomialOnly(&'static str),
}

/// Maximum retained degree of a truncated polynomial space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Truncation(usize);

impl Truncation {
    pub const fn new(max_degree: usize) -> Self {
        Truncation(max_degree)
    }

    pub const fn max_degree(self) -> usize {
        self.0
    }
}

impl From<usize> for Truncation {
    fn from(d: usize) -> Self {
        Truncation(d)
    }
}

/// Coefficients are indexed by basis element; trailing zeros are always
/// trimmed, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawPoly")]
pub struct Poly {
    basis: Basis,
    coeffs: Vec<Rational>,
}

#[derive(Deserialize)]
struct RawPoly {
    basis: Basis,
    coeffs: Vec<Rational>,
}

impl From<RawPoly> for Poly {
    fn from(raw: RawPoly) -> Self {
        Poly::from_coeffs(raw.basis, raw.coeffs)
    }
}

impl Poly {
    pub fn from_coeffs(basis: Basis, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly { basis, coeffs }
    }

    pub fn monomial_coeffs(coeffs: Vec<Rational>) -> Self {
        Poly::from_coeffs(Basis::Monomial, coeffs)
    }

    /// Builds a monomial-basis polynomial from small integer coefficients.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::monomial_coeffs(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly::from_coeffs(Basis::Monomial, Vec::new())
    }

    pub fn zero_in(basis: Basis) -> Self {
        Poly::from_coeffs(basis, Vec::new())
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::monomial_coeffs(vec![c])
    }

    /// `c * x^n` in the monomial basis.
    pub fn term(c: Rational, n: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = c;
        Poly::monomial_coeffs(coeffs)
    }

    pub fn x_pow(n: usize) -> Self {
        Poly::term(Rational::one(), n)
    }

    /// The single basis element `x_δ^(n)`, stored in the falling basis.
    pub fn falling_element(n: usize, delta: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        Poly::from_coeffs(Basis::falling(delta), coeffs)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of basis element `n` (zero beyond the degree).
    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monomial_basis(&self) -> bool {
        self.basis == Basis::Monomial
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    fn same_basis(&self, other: &Poly) -> Result<(), PolyError> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(PolyError::BasisMismatch { left: Box::new(self.basis.clone()), right: Box::new(other.basis.clone()) })
        }
    }

    fn monomial_only(&self, what: &'static str) -> Result<(), PolyError> {
        if self.is_monomial_basis() {
            Ok(())
        } else {
            Err(PolyError::MonomialOnly(what))
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_basis(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Ok(Poly::from_coeffs(self.basis.clone(), coeffs))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Rational::from(-1))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::from_coeffs(self.basis.clone(), self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_basis(other)?;
        self.monomial_only("multiplication")?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero());
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Ok(Poly::monomial_coeffs(coeffs))
    }

    /// Multiplication by the coordinate `x` (monomial basis only).
    pub fn mul_x(&self) -> Result<Poly, PolyError> {
        self.monomial_only("multiplication by x")?;
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Ok(Poly::monomial_coeffs(coeffs))
    }

    /// Classical derivative (monomial basis only).
    pub fn derivative(&self) -> Result<Poly, PolyError> {
        self.monomial_only("differentiation")?;
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(n, c)| c * Rational::from(n)).collect();
        Ok(Poly::monomial_coeffs(coeffs))
    }

    /// `p(x) -> p(x + h)` by binomial expansion.
    pub fn shift(&self, h: &Rational) -> Result<Poly, PolyError> {
        self.monomial_only("shift")?;
        // Horner in the shifted variable: p(x+h) = (...(c_n (x+h) + c_{n-1})(x+h) + ...)
        let linear = Poly::monomial_coeffs(vec![h.clone(), Rational::one()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(&linear)?.try_add(&Poly::constant(c.clone()))?;
        }
        Ok(acc)
    }

    /// `p(x) -> p(qx)`.
    pub fn qscale(&self, q: &Rational) -> Result<Poly, PolyError> {
        self.monomial_only("q-scaling")?;
        let mut power = Rational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c * &power);
            power *= q;
        }
        Ok(Poly::monomial_coeffs(coeffs))
    }

    /// Rewrites a monomial-basis polynomial in the falling δ-factorial basis
    /// using `x^n = Σ_k S(n,k) δ^(n-k) x_δ^(k)`.
    pub fn to_falling(&self, delta: &Rational) -> Result<Poly, PolyError> {
        self.monomial_only("conversion to the falling basis")?;
        let deltas = powers(delta, self.coeffs.len());
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, s) in stirling_second_row(n).into_iter().enumerate() {
                if s == num_bigint::BigInt::default() {
                    continue;
                }
                out[k] += c * Rational::from_integer(s) * &deltas[n - k];
            }
        }
        Ok(Poly::from_coeffs(Basis::falling(delta.clone()), out))
    }

    /// Expands into monomials via `x_δ^(n) = Σ_k s(n,k) δ^(n-k) x^k`.
    /// Monomial-basis input is returned unchanged.
    pub fn to_monomial(&self) -> Poly {
        let delta = match &self.basis {
            Basis::Monomial => return self.clone(),
            Basis::Falling { delta } => delta,
        };
        let deltas = powers(delta, self.coeffs.len());
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, s) in stirling_first_row(n).into_iter().enumerate() {
                if s == num_bigint::BigInt::default() {
                    continue;
                }
                out[k] += c * Rational::from_integer(s) * &deltas[n - k];
            }
        }
        Poly::monomial_coeffs(out)
    }

    pub fn eval(&self, x0: &Rational) -> Rational {
        match &self.basis {
            Basis::Monomial => self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x0 + c),
            Basis::Falling { delta } => {
                let mut sum = Rational::zero();
                let mut element = Rational::one();
                for (n, c) in self.coeffs.iter().enumerate() {
                    sum += c * &element;
                    element *= &(x0 - Rational::from(n) * delta);
                }
                sum
            }
        }
    }

    /// Drops every coefficient above degree `d`.
    pub fn truncate(&self, d: Truncation) -> Poly {
        let keep = self.coeffs.len().min(d.max_degree() + 1);
        Poly::from_coeffs(self.basis.clone(), self.coeffs[..keep].to_vec())
    }
}

fn powers(base: &Rational, n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n);
    let mut acc = Rational::one();
    for _ in 0..n {
        out.push(acc.clone());
        acc *= base;
    }
    out
}

impl fmt::Display for Poly {
    /// Descending-degree text such as `7/4*x^2 - x + 1`. Falling-basis
    /// elements print as `x^(n)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let falling = !self.is_monomial_basis();
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let var = match (n, falling) {
                (0, _) => String::new(),
                (1, false) => "x".to_string(),
                (_, false) => format!("x^{n}"),
                (_, true) => format!("x^({n})"),
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}
