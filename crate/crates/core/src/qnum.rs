//! q-numbers, double brackets, their factorials, Stirling numbers and the
//! q-gamma ratio `{n}!/n!`.
//!
//! `{n} = (1 - q^n)/(1 - q)` and `[[n]] = n/{n}` with `[[0]] = 1`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QnumError {
    #[error("q = 1 is not a deformation")]
    QEqualsOne,
    #[error("q-number {{{n}}} vanishes for q = {q}")]
    VanishingQNumber { q: Rational, n: usize },
    #[error("index {n} exceeds the context bound {max}")]
    IndexOutOfRange { n: usize, max: usize },
    #[error("Stirling number s({n},{k}) requested with k > n")]
    StirlingDomain { n: usize, k: usize },
}

/// `{m}` for any integer `m`. `None` only when `q = 0` and `m < 0`.
///
/// At `q = 1` this is the classical limit `m`.
pub fn q_number(q: &Rational, m: i64) -> Option<Rational> {
    if q.is_one() {
        return Some(Rational::from(m));
    }
    let qm = q.pow(m)?;
    let one = Rational::one();
    Some((&one - qm) / (one - q))
}

/// `[[m]] = m/{m}` with `[[0]] = 1`. `None` when `{m}` vanishes for `m != 0`.
pub fn double_bracket(q: &Rational, m: i64) -> Option<Rational> {
    if m == 0 {
        return Some(Rational::one());
    }
    let qn = q_number(q, m)?;
    Rational::from(m).checked_div(&qn)
}

/// Validated q together with memoized tables up to `max_index`.
#[derive(Debug, Clone)]
pub struct QContext {
    q: Rational,
    max_index: usize,
    qnumbers: Vec<Rational>,
    dbrackets: Vec<Rational>,
    qfactorials: Vec<Rational>,
    dfactorials: Vec<Rational>,
}

impl QContext {
    pub fn new(q: Rational, max_index: usize) -> Result<Self, QnumError> {
        if q.is_one() {
            return Err(QnumError::QEqualsOne);
        }
        let mut qnumbers = Vec::with_capacity(max_index + 1);
        // {0} = 0, {n+1} = 1 + q{n}
        let mut current = Rational::zero();
        qnumbers.push(current.clone());
        for n in 1..=max_index {
            current = Rational::one() + &q * &current;
            if current.is_zero() {
                return Err(QnumError::VanishingQNumber { q, n });
            }
            qnumbers.push(current.clone());
        }
        let dbrackets: Vec<Rational> = qnumbers
            .iter()
            .enumerate()
            .map(|(n, qn)| if n == 0 { Rational::one() } else { Rational::from(n) / qn })
            .collect();
        let qfactorials = running_products(&qnumbers[1..]);
        let dfactorials = running_products(&dbrackets[1..]);
        Ok(QContext { q, max_index, qnumbers, dbrackets, qfactorials, dfactorials })
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// True when q lies outside the open interval (-1, 1), where the
    /// q-numbers may still be nonzero but the usual convergence statements
    /// no longer apply.
    pub fn outside_convergent_range(&self) -> bool {
        self.q.abs() >= Rational::one()
    }

    pub fn warning(&self) -> Option<String> {
        self.outside_convergent_range().then(|| format!("q = {} lies outside (-1, 1)", self.q))
    }

    fn check(&self, n: usize) -> Result<(), QnumError> {
        if n > self.max_index {
            Err(QnumError::IndexOutOfRange { n, max: self.max_index })
        } else {
            Ok(())
        }
    }

    pub fn qnumber(&self, n: usize) -> Result<Rational, QnumError> {
        self.check(n)?;
        Ok(self.qnumbers[n].clone())
    }

    pub fn dbracket(&self, n: usize) -> Result<Rational, QnumError> {
        self.check(n)?;
        Ok(self.dbrackets[n].clone())
    }

    /// `{n}! = {1}{2}...{n}`, `{0}! = 1`.
    pub fn qfactorial(&self, n: usize) -> Result<Rational, QnumError> {
        self.check(n)?;
        Ok(self.qfactorials[n].clone())
    }

    /// `[[n]]! = [[1]][[2]]...[[n]]`, `[[0]]! = 1`.
    pub fn dbracket_factorial(&self, n: usize) -> Result<Rational, QnumError> {
        self.check(n)?;
        Ok(self.dfactorials[n].clone())
    }

    /// `u(n) = Γ_q(n+1)/Γ(n+1) = {n}!/n!`.
    pub fn gamma_ratio(&self, n: usize) -> Result<Rational, QnumError> {
        self.check(n)?;
        Ok(&self.qfactorials[n] / Rational::from_integer(factorial(n)))
    }

    pub fn stirling_first(&self, n: usize, k: usize) -> Result<BigInt, QnumError> {
        self.check(n)?;
        stirling_first(n, k)
    }
}

fn running_products(factors: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(factors.len() + 1);
    let mut acc = Rational::one();
    out.push(acc.clone());
    for f in factors {
        acc *= f;
        out.push(acc.clone());
    }
    out
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Product form of `[[n]]!` for any q, used where no context is at hand.
pub fn dbracket_factorial(q: &Rational, n: usize) -> Option<Rational> {
    (1..=n as i64).map(|m| double_bracket(q, m)).product()
}

/// Product form of `{n}!`.
pub fn qfactorial(q: &Rational, n: usize) -> Option<Rational> {
    (1..=n as i64).map(|m| q_number(q, m)).product()
}

#[derive(Default)]
struct StirlingCache {
    first: Vec<Vec<BigInt>>,
    second: Vec<Vec<BigInt>>,
}

impl StirlingCache {
    fn extend_to(&mut self, n: usize) {
        if self.first.is_empty() {
            self.first.push(vec![BigInt::one()]);
            self.second.push(vec![BigInt::one()]);
        }
        while self.first.len() <= n {
            let m = self.first.len() - 1;
            let prev1 = &self.first[m];
            let prev2 = &self.second[m];
            let mut row1 = vec![BigInt::zero(); m + 2];
            let mut row2 = vec![BigInt::zero(); m + 2];
            for k in 1..=m + 1 {
                let below = |row: &Vec<BigInt>, j: usize| row.get(j).cloned().unwrap_or_default();
                // s(m+1,k) = s(m,k-1) - m s(m,k)
                row1[k] = below(prev1, k - 1) - BigInt::from(m) * below(prev1, k);
                // S(m+1,k) = S(m,k-1) + k S(m,k)
                row2[k] = below(prev2, k - 1) + BigInt::from(k) * below(prev2, k);
            }
            self.first.push(row1);
            self.second.push(row2);
        }
    }
}

fn stirling_cache() -> &'static RwLock<StirlingCache> {
    static CACHE: OnceLock<RwLock<StirlingCache>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(StirlingCache::default()))
}

fn with_rows<T>(n: usize, f: impl FnOnce(&StirlingCache) -> T) -> T {
    {
        let guard = stirling_cache().read().expect("stirling cache poisoned");
        if guard.first.len() > n {
            return f(&guard);
        }
    }
    let mut guard = stirling_cache().write().expect("stirling cache poisoned");
    guard.extend_to(n);
    f(&guard)
}

/// Signed Stirling number of the first kind `s(n, k)`:
/// `x(x-1)...(x-n+1) = Σ_k s(n,k) x^k`.
pub fn stirling_first(n: usize, k: usize) -> Result<BigInt, QnumError> {
    if k > n {
        return Err(QnumError::StirlingDomain { n, k });
    }
    Ok(with_rows(n, |c| c.first[n][k].clone()))
}

/// Stirling number of the second kind `S(n, k)`:
/// `x^n = Σ_k S(n,k) x(x-1)...(x-k+1)`.
pub fn stirling_second(n: usize, k: usize) -> Result<BigInt, QnumError> {
    if k > n {
        return Err(QnumError::StirlingDomain { n, k });
    }
    Ok(with_rows(n, |c| c.second[n][k].clone()))
}

/// Row `s(n, 0..=n)`.
pub fn stirling_first_row(n: usize) -> Vec<BigInt> {
    with_rows(n, |c| c.first[n].clone())
}

/// Row `S(n, 0..=n)`.
pub fn stirling_second_row(n: usize) -> Vec<BigInt> {
    with_rows(n, |c| c.second[n].clone())
}
