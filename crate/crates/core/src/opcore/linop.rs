//! Finite matrix realization of an operator on the space of polynomials of
//! degree `<= D`.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::apply::apply;
use super::expr::OpExpr;
use super::OpError;
use crate::poly::{Poly, Truncation};
use crate::rational::Rational;

/// `columns[n]` is the image of `x^n`, or `None` when computing it would
/// leave the degree window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinOp {
    #[serde(rename = "D")]
    max_degree: usize,
    columns: Vec<Option<Poly>>,
    /// Smallest and largest degree shift over all computed columns.
    band: (i64, i64),
}

impl LinOp {
    pub fn from_columns(d: Truncation, columns: Vec<Option<Poly>>) -> Self {
        assert_eq!(columns.len(), d.max_degree() + 1, "one column per degree");
        let band = band_of(&columns);
        LinOp { max_degree: d.max_degree(), columns, band }
    }

    /// Columns are computed in parallel; the result is identical to a
    /// sequential realization.
    pub fn realize(e: &OpExpr, d: Truncation) -> Result<LinOp, OpError> {
        let results: Vec<Result<Poly, OpError>> =
            (0..=d.max_degree()).into_par_iter().map(|n| apply(e, &Poly::x_pow(n), d)).collect();
        let mut columns = Vec::with_capacity(results.len());
        for r in results {
            match r {
                Ok(p) => columns.push(Some(p)),
                Err(OpError::Overflow { .. }) => columns.push(None),
                Err(other) => return Err(other),
            }
        }
        Ok(LinOp::from_columns(d, columns))
    }

    pub fn identity(d: Truncation) -> LinOp {
        LinOp::from_columns(d, (0..=d.max_degree()).map(|n| Some(Poly::x_pow(n))).collect())
    }

    pub fn diagonal(entries: Vec<Rational>) -> LinOp {
        let d = Truncation::new(entries.len().saturating_sub(1));
        LinOp::from_columns(d, entries.into_iter().enumerate().map(|(n, c)| Some(Poly::term(c, n))).collect())
    }

    /// Keeps the columns of degrees `<= d`. Only meaningful for operators
    /// that do not raise the degree.
    pub fn restrict(&self, d: Truncation) -> LinOp {
        assert!(d.max_degree() <= self.max_degree, "cannot widen a realization");
        let columns = self.columns[..=d.max_degree()]
            .iter()
            .map(|c| c.as_ref().and_then(|p| p.degree().is_none_or(|deg| deg <= d.max_degree()).then(|| p.clone())))
            .collect();
        LinOp::from_columns(d, columns)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::new(self.max_degree)
    }

    pub fn columns(&self) -> &[Option<Poly>] {
        &self.columns
    }

    pub fn column(&self, n: usize) -> Option<&Poly> {
        self.columns.get(n).and_then(Option::as_ref)
    }

    pub fn band(&self) -> (i64, i64) {
        self.band
    }

    /// Coefficient of `x^row` in the image of `x^col`.
    pub fn entry(&self, row: usize, col: usize) -> Option<Rational> {
        self.column(col).map(|p| p.coeff(row))
    }

    /// Number of leading columns that were computed without overflow.
    pub fn safe_window(&self) -> usize {
        self.columns.iter().take_while(|c| c.is_some()).count()
    }

    pub fn diagonal_entries(&self) -> Vec<Option<Rational>> {
        (0..=self.max_degree).map(|n| self.entry(n, n)).collect()
    }

    /// Every computed column maps `x^n` into degrees `<= n`.
    pub fn is_degree_nonincreasing(&self) -> bool {
        self.columns.iter().enumerate().all(|(n, c)| c.as_ref().is_none_or(|p| p.degree().is_none_or(|deg| deg <= n)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinOp) -> LinOp {
        assert_eq!(self.max_degree, other.max_degree, "truncation mismatch");
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let col = col.as_ref()?;
                let mut acc = Poly::zero();
                for (j, c) in col.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let image = self.column(j)?;
                    acc = acc.try_add(&image.scale(c)).ok()?;
                }
                Some(acc)
            })
            .collect();
        LinOp::from_columns(self.truncation(), columns)
    }

    fn zip_with(&self, other: &LinOp, f: impl Fn(&Poly, &Poly) -> Poly) -> LinOp {
        assert_eq!(self.max_degree, other.max_degree, "truncation mismatch");
        let columns = self.columns.iter().zip(&other.columns).map(|(a, b)| Some(f(a.as_ref()?, b.as_ref()?))).collect();
        LinOp::from_columns(self.truncation(), columns)
    }

    pub fn add(&self, other: &LinOp) -> LinOp {
        self.zip_with(other, |a, b| a.try_add(b).expect("monomial columns"))
    }

    pub fn sub(&self, other: &LinOp) -> LinOp {
        self.zip_with(other, |a, b| a.try_sub(b).expect("monomial columns"))
    }

    pub fn scale(&self, c: &Rational) -> LinOp {
        let columns = self.columns.iter().map(|col| col.as_ref().map(|p| p.scale(c))).collect();
        LinOp::from_columns(self.truncation(), columns)
    }

    /// Exact agreement on the given input degrees; overflowed columns never agree.
    pub fn agrees_on(&self, other: &LinOp, degrees: Range<usize>) -> bool {
        degrees.into_iter().all(|n| match (self.column(n), other.column(n)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        })
    }

    /// The operator is the identity on `x^0 .. x^(window-1)`.
    pub fn is_identity_on(&self, window: usize) -> bool {
        (0..window).all(|n| self.column(n).is_some_and(|p| *p == Poly::x_pow(n)))
    }

    /// Identity on the whole safe window, which must be nonempty.
    pub fn is_identity_on_window(&self) -> bool {
        let w = self.safe_window();
        w > 0 && self.is_identity_on(w)
    }
}

fn band_of(columns: &[Option<Poly>]) -> (i64, i64) {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for (n, col) in columns.iter().enumerate() {
        let Some(p) = col else { continue };
        let n = n as i64;
        for (k, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                lo = lo.min(k as i64 - n);
                hi = hi.max(k as i64 - n);
            }
        }
    }
    if lo > hi {
        (0, 0)
    } else {
        (lo, hi)
    }
}
