//! The Hahn operator in five realizations and its polynomial eigenfunctions.
//!
//! Every variant is degree non-increasing, so its monomial matrix is upper
//! triangular with the eigenvalues on the diagonal. Eigenpolynomials are
//! obtained by back-substitution, normalized to be monic in the leading
//! basis element.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::opcore::{apply, LinOp, OpError, OpExpr};
use crate::poly::{Basis, Poly, Truncation};
use crate::qnum::{QContext, QnumError};
use crate::rational::Rational;

/// Extra room for the intermediate degree raise of the three-point stencil.
const STENCIL_HEADROOM: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HahnError {
    #[error("delta must be nonzero")]
    ZeroDelta,
    #[error("variant {0} needs a value for q")]
    MissingQ(Variant),
    #[error("degenerate eigenvalues: lambda_{j} = lambda_{k}")]
    Degenerate { j: usize, k: usize },
    #[error("kmax = {kmax} exceeds the truncation D = {max}")]
    KmaxTooLarge { kmax: usize, max: usize },
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Qnum(#[from] QnumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `H_δ` as an explicit three-point stencil.
    ThreePoint,
    /// `H_δ` as a word in `a_δ, b_δ`.
    Abstract,
    /// `H`, the image under `(a_δ, b_δ) -> (d, x)`.
    Continuous,
    /// `H_q`, the image of `H` under `(d, x) -> (d_q, x_q)`.
    QDeformed,
    /// `H̃_q`, the image of `H` under `(d, x) -> (d_q, x)`.
    QSpectrum,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::ThreePoint, Variant::Abstract, Variant::Continuous, Variant::QDeformed, Variant::QSpectrum];

    pub fn name(self) -> &'static str {
        match self {
            Variant::ThreePoint => "three_point",
            Variant::Abstract => "abstract",
            Variant::Continuous => "continuous",
            Variant::QDeformed => "q_deformed",
            Variant::QSpectrum => "q_spectrum",
        }
    }

    pub fn needs_q(self) -> bool {
        matches!(self, Variant::QDeformed | Variant::QSpectrum)
    }

    /// The basis in which the eigenpolynomials are naturally written.
    pub fn natural_basis(self, params: &HahnParams) -> Basis {
        match self {
            Variant::ThreePoint | Variant::Abstract => Basis::falling(params.delta.clone()),
            _ => Basis::Monomial,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.replace('-', "_").to_ascii_lowercase();
        Variant::ALL.into_iter().find(|v| v.name() == norm).ok_or_else(|| format!("unknown Hahn variant `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HahnParams {
    pub alpha: Rational,
    pub beta: Rational,
    #[serde(rename = "N")]
    pub n: Rational,
    pub delta: Rational,
    pub c1: Rational,
}

impl HahnParams {
    /// Parameters with `δ = 1`, `c1 = -1`.
    pub fn new(alpha: Rational, beta: Rational, n: Rational) -> Self {
        HahnParams { alpha, beta, n, delta: Rational::one(), c1: Rational::from(-1) }
    }

    pub fn with_delta(mut self, delta: Rational) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_c1(mut self, c1: Rational) -> Self {
        self.c1 = c1;
        self
    }

    pub fn c2(&self) -> Rational {
        &self.n - Rational::from(2) - &self.beta
    }

    pub fn c3(&self) -> Rational {
        -&self.alpha - &self.beta - Rational::one()
    }

    pub fn c4(&self) -> Rational {
        (&self.beta + Rational::one()) * (&self.n - Rational::one())
    }

    fn delta_inv(&self) -> Result<Rational, HahnError> {
        self.delta.recip().ok_or(HahnError::ZeroDelta)
    }
}

fn need_q(variant: Variant, q: Option<&Rational>) -> Result<Option<&Rational>, HahnError> {
    if variant.needs_q() && q.is_none() {
        return Err(HahnError::MissingQ(variant));
    }
    Ok(q)
}

fn xs(k: usize) -> OpExpr {
    OpExpr::product(vec![OpExpr::x(); k])
}

fn term(c: Rational, factors: Vec<OpExpr>) -> OpExpr {
    OpExpr::scaled(c, OpExpr::product(factors))
}

/// `c1 x² D³ + (c1+c2+c1δ⁻¹x) x D² + (c4 + (c1δ⁻¹+c3) x) D` for a lowering operator `D`.
fn continuous_form(p: &HahnParams, dd: OpExpr) -> Result<OpExpr, HahnError> {
    let di = p.delta_inv()?;
    let c1d = &p.c1 * &di;
    Ok(OpExpr::sum(vec![
        term(p.c1.clone(), vec![xs(2), dd.clone().pow(3)]),
        term(&p.c1 + p.c2(), vec![OpExpr::x(), dd.clone().pow(2)]),
        term(c1d.clone(), vec![xs(2), dd.clone().pow(2)]),
        term(p.c4(), vec![dd.clone()]),
        term(c1d + p.c3(), vec![OpExpr::x(), dd]),
    ]))
}

/// The operator expression of a variant.
pub fn build(variant: Variant, params: &HahnParams, q: Option<&Rational>) -> Result<OpExpr, HahnError> {
    let q = need_q(variant, q)?;
    let p = params;
    let di = p.delta_inv()?;
    let delta = &p.delta;
    Ok(match variant {
        Variant::ThreePoint => {
            let (c1, c2, c3, c4) = (p.c1.clone(), p.c2(), p.c3(), p.c4());
            let di3 = di.pow(3).expect("nonzero");
            let d2 = delta * delta;
            let plus = OpExpr::scaled(delta.clone(), OpExpr::d()).exp();
            let minus = OpExpr::scaled(-delta, OpExpr::d()).exp();
            let two = Rational::from(2);
            // δ^{-3} [(c4δ² + c2δx + c1x²) E+ - (c4δ² - δ(c1 - 2c2 + c3δ)x + 2c1x²) - (δ(c1 - c2 + c3δ)x - c1x²) E-]
            let stencil = OpExpr::sum(vec![
                term(&c4 * &d2, vec![plus.clone()]),
                term(&c2 * delta, vec![OpExpr::x(), plus.clone()]),
                term(c1.clone(), vec![xs(2), plus]),
                OpExpr::Scalar(-(&c4 * &d2)),
                term(delta * (&c1 - &two * &c2 + &c3 * delta), vec![OpExpr::x()]),
                term(-(&two * &c1), vec![xs(2)]),
                term(-(delta * (&c1 - &c2 + &c3 * delta)), vec![OpExpr::x(), minus.clone()]),
                term(c1, vec![xs(2), minus]),
            ]);
            OpExpr::scaled(di3, stencil)
        }
        Variant::Abstract => {
            let a = OpExpr::delta_d(delta);
            let b = OpExpr::delta_x(delta);
            let ba = OpExpr::product(vec![b.clone(), a.clone()]);
            OpExpr::sum(vec![
                term(p.c1.clone(), vec![ba.clone().pow(2), a.clone() + OpExpr::Scalar(di)]),
                term(p.c2(), vec![b.clone(), a.clone().pow(2)]),
                term(p.c3(), vec![ba]),
                term(p.c4(), vec![a]),
            ])
        }
        Variant::Continuous => continuous_form(p, OpExpr::d())?,
        Variant::QDeformed => {
            let dq = OpExpr::jackson_d(q.expect("checked"));
            let a = OpExpr::degree_op();
            OpExpr::sum(vec![
                term(p.c1.clone(), vec![a.clone().pow(2), dq.clone() + OpExpr::Scalar(di)]),
                term(p.c2(), vec![a.clone(), dq.clone()]),
                term(p.c3(), vec![a]),
                term(p.c4(), vec![dq]),
            ])
        }
        Variant::QSpectrum => continuous_form(p, OpExpr::jackson_d(q.expect("checked")))?,
    })
}

/// `λ_k = δ⁻¹c1k² + c3k`, or `λ̃_k = c1δ⁻¹{k}({k-1}+1) + c3{k}` for the q-spectrum variant.
pub fn spectrum(variant: Variant, params: &HahnParams, q: Option<&Rational>, k: usize) -> Result<Rational, HahnError> {
    let q = need_q(variant, q)?;
    let di = params.delta_inv()?;
    if variant == Variant::QSpectrum {
        if k == 0 {
            return Ok(Rational::zero());
        }
        let ctx = QContext::new(q.expect("checked").clone(), k)?;
        let qk = ctx.qnumber(k)?;
        let qk1 = ctx.qnumber(k - 1)?;
        return Ok(&params.c1 * &di * &qk * (qk1 + Rational::one()) + params.c3() * qk);
    }
    let k = Rational::from(k);
    Ok(&di * &params.c1 * &k * &k + params.c3() * k)
}

/// Monomial matrix of a variant at truncation `D`.
pub fn realize(variant: Variant, params: &HahnParams, q: Option<&Rational>, d: Truncation) -> Result<LinOp, HahnError> {
    if let Some(q) = q.filter(|_| variant.needs_q()) {
        QContext::new(q.clone(), d.max_degree() + 1)?;
    }
    let e = build(variant, params, q)?;
    let wide = Truncation::new(d.max_degree() + STENCIL_HEADROOM);
    Ok(LinOp::realize(&e, wide)?.restrict(d))
}

/// `(H - λ) ▷ p`.
pub fn residual(
    variant: Variant,
    params: &HahnParams,
    q: Option<&Rational>,
    p: &Poly,
    lambda: &Rational,
    d: Truncation,
) -> Result<Poly, HahnError> {
    let e = build(variant, params, q)?;
    let wide = Truncation::new(d.max_degree() + STENCIL_HEADROOM);
    Ok(apply(&e, p, wide)?.try_sub(&p.scale(lambda)).map_err(OpError::from)?)
}

/// Coefficients `γ_0..γ_k` of the monic solution of `(M - M[k][k]) γ = 0`
/// for an upper triangular matrix `M`.
fn back_substitute(m: &LinOp, k: usize) -> Result<Vec<Rational>, HahnError> {
    let entry = |row: usize, col: usize| {
        m.entry(row, col).ok_or(OpError::Overflow { degree: col, max: m.truncation().max_degree() })
    };
    let lambda = entry(k, k)?;
    let mut gamma = vec![Rational::zero(); k + 1];
    gamma[k] = Rational::one();
    for i in (0..k).rev() {
        let gap = entry(i, i)? - &lambda;
        if gap.is_zero() {
            return Err(HahnError::Degenerate { j: i, k });
        }
        let mut s = Rational::zero();
        for (j, g) in gamma.iter().enumerate().skip(i + 1) {
            if !g.is_zero() {
                s += entry(i, j)? * g;
            }
        }
        gamma[i] = -s / gap;
    }
    Ok(gamma)
}

fn check_distinct(lambdas: &[Rational]) -> Result<(), HahnError> {
    for k in 0..lambdas.len() {
        for j in 0..k {
            if lambdas[j] == lambdas[k] {
                return Err(HahnError::Degenerate { j, k });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub k: usize,
    pub eigenvalue: Rational,
    /// `γ_0..γ_k`, the coefficients in the natural basis of the variant
    /// before any `[[i]]!` reweighting.
    pub gamma: Vec<Rational>,
    /// The eigenpolynomial in its natural basis.
    pub natural: Poly,
    /// The eigenpolynomial in monomials.
    pub monomial: Poly,
}

/// Eigenpolynomials `h_0..h_kmax`.
///
/// The continuous solve supplies `γ_i`; the three-point and abstract forms
/// use `Σ γ_i x_δ^(i)`, the q-deformed form uses `Σ γ_i [[i]]! x^i`, and the
/// q-spectrum form is solved on its own matrix.
pub fn eigenpolynomials(
    variant: Variant,
    params: &HahnParams,
    q: Option<&Rational>,
    kmax: usize,
    d: Truncation,
) -> Result<Vec<Eigenpair>, HahnError> {
    let q = need_q(variant, q)?;
    if kmax > d.max_degree() {
        return Err(HahnError::KmaxTooLarge { kmax, max: d.max_degree() });
    }
    let solve_on = if variant == Variant::QSpectrum { Variant::QSpectrum } else { Variant::Continuous };
    let matrix = realize(solve_on, params, q, d)?;
    let lambdas: Vec<Rational> = (0..=kmax)
        .map(|k| matrix.entry(k, k).ok_or(OpError::Overflow { degree: k, max: d.max_degree() }))
        .collect::<Result<_, _>>()?;
    check_distinct(&lambdas)?;
    let ctx = match (variant, q) {
        (Variant::QDeformed, Some(q)) => Some(QContext::new(q.clone(), kmax)?),
        _ => None,
    };
    (0..=kmax)
        .into_par_iter()
        .map(|k| {
            let gamma = back_substitute(&matrix, k)?;
            let natural = match variant {
                Variant::ThreePoint | Variant::Abstract => {
                    Poly::from_coeffs(Basis::falling(params.delta.clone()), gamma.clone())
                }
                Variant::Continuous | Variant::QSpectrum => Poly::monomial_coeffs(gamma.clone()),
                Variant::QDeformed => {
                    let ctx = ctx.as_ref().expect("context for q");
                    let coeffs = gamma
                        .iter()
                        .enumerate()
                        .map(|(i, g)| Ok(g * ctx.dbracket_factorial(i)?))
                        .collect::<Result<Vec<_>, QnumError>>()?;
                    Poly::monomial_coeffs(coeffs)
                }
            };
            let monomial = natural.to_monomial();
            Ok(Eigenpair { k, eigenvalue: lambdas[k].clone(), gamma, natural, monomial })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HahnRow {
    pub variant: Variant,
    pub k: usize,
    pub eigenvalue: Rational,
    pub closed_form: Rational,
    pub basis: Basis,
    pub coeffs: Vec<Rational>,
    pub monomial: Vec<Rational>,
    /// `(H - λ_k) h_k`, exactly zero for a correct eigenpolynomial.
    pub residual: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HahnTable {
    pub variant: Variant,
    pub params: HahnParams,
    pub c2: Rational,
    pub c3: Rational,
    pub c4: Rational,
    pub q: Option<Rational>,
    #[serde(rename = "D")]
    pub max_degree: usize,
    pub rows: Vec<HahnRow>,
}

/// Eigenvalues, eigenpolynomials and exact residual checks for `k <= kmax`.
pub fn table(
    variant: Variant,
    params: &HahnParams,
    q: Option<&Rational>,
    kmax: usize,
    d: Truncation,
) -> Result<HahnTable, HahnError> {
    let pairs = eigenpolynomials(variant, params, q, kmax, d)?;
    let rows = pairs
        .into_par_iter()
        .map(|pair| {
            let res = residual(variant, params, q, &pair.monomial, &pair.eigenvalue, d)?;
            Ok(HahnRow {
                variant,
                k: pair.k,
                closed_form: spectrum(variant, params, q, pair.k)?,
                eigenvalue: pair.eigenvalue,
                basis: pair.natural.basis().clone(),
                coeffs: pair.natural.coeffs().to_vec(),
                monomial: pair.monomial.coeffs().to_vec(),
                residual: res,
            })
        })
        .collect::<Result<Vec<_>, HahnError>>()?;
    Ok(HahnTable {
        variant,
        c2: params.c2(),
        c3: params.c3(),
        c4: params.c4(),
        params: params.clone(),
        q: q.filter(|_| variant.needs_q()).cloned(),
        max_degree: d.max_degree(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub variant: Variant,
    pub params: HahnParams,
    pub q: Option<Rational>,
    pub k: usize,
    pub expected: Rational,
    pub found: Option<Rational>,
}

impl SpectrumEntry {
    pub fn ok(&self) -> bool {
        self.found.as_ref() == Some(&self.expected)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsospectralReport {
    pub entries: Vec<SpectrumEntry>,
}

impl IsospectralReport {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(SpectrumEntry::ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(|e| !e.ok())
    }
}

/// Compares the diagonal of every realized variant with its closed-form
/// spectrum. Variants without `q` are checked once per parameter set.
pub fn isospectral_check(
    paramsets: &[HahnParams],
    qs: &[Rational],
    kmax: usize,
    d: Truncation,
) -> Result<IsospectralReport, HahnError> {
    let mut jobs: Vec<(Variant, &HahnParams, Option<&Rational>)> = Vec::new();
    for p in paramsets {
        for v in Variant::ALL {
            if v.needs_q() {
                jobs.extend(qs.iter().map(|q| (v, p, Some(q))));
            } else {
                jobs.push((v, p, None));
            }
        }
    }
    let per_job = jobs
        .into_par_iter()
        .map(|(v, p, q)| {
            let m = realize(v, p, q, d)?;
            (0..=kmax.min(d.max_degree()))
                .map(|k| {
                    Ok(SpectrumEntry {
                        variant: v,
                        params: p.clone(),
                        q: q.cloned(),
                        k,
                        expected: spectrum(v, p, q, k)?,
                        found: m.entry(k, k),
                    })
                })
                .collect::<Result<Vec<_>, HahnError>>()
        })
        .collect::<Result<Vec<_>, HahnError>>()?;
    Ok(IsospectralReport { entries: per_job.into_iter().flatten().collect() })
}
