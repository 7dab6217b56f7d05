//! CCR-preserving deformation maps, their compositions, adapted bases and
//! b-projections, plus the Jackson integral, quantum averaging and the
//! similarity transform `U(A)`.
//!
//! A map is given by the images of the two generators, `a = d` and `b = x`.
//! Composition substitutes the outer images into the inner ones. A diagonal
//! function `g(A_β)` is carried to `g(A_{α∘β})`, which is diagonal on the
//! adapted basis of `α∘β`; that is how `[[B]]` survives the δ-map.

use std::any::Any;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::opcore::{
    apply, commutator, q_commutator, Eigenbasis, KetSource, LinOp, OpError, OpExpr, Spectral, Substitution,
};
use crate::poly::{Poly, Truncation};
use crate::qnum::{q_number, QContext, QnumError};
use crate::rational::Rational;

pub const DEFAULT_CHECK_WINDOW: Truncation = Truncation::new(16);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Qnum(#[from] QnumError),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("unsupported composition: {0}")]
    UnsupportedComposition(String),
}

impl From<crate::poly::PolyError> for MapError {
    fn from(e: crate::poly::PolyError) -> Self {
        MapError::Op(e.into())
    }
}

/// Serializable description of a map: `{"map":"phi_q","q":"1/2"}` etc.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    PhiQ {
        q: Rational,
    },
    PhiDelta {
        delta: Rational,
    },
    /// Leaves `a` fixed and sends `b` to `b [[B]]^{-1}`; the image pair obeys
    /// the q-deformed relation `a b - q b a = 1`.
    PhiQPrime {
        q: Rational,
    },
    Compose {
        outer: Box<MapSpec>,
        inner: Box<MapSpec>,
    },
}

impl MapSpec {
    pub fn phi_q(q: Rational) -> Self {
        MapSpec::PhiQ { q }
    }

    pub fn phi_delta(delta: Rational) -> Self {
        MapSpec::PhiDelta { delta }
    }

    pub fn phi_q_prime(q: Rational) -> Self {
        MapSpec::PhiQPrime { q }
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: MapSpec, inner: MapSpec) -> Self {
        MapSpec::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Identity => write!(f, "identity"),
            MapSpec::PhiQ { q } => write!(f, "phi_q({q})"),
            MapSpec::PhiDelta { delta } => write!(f, "phi_delta({delta})"),
            MapSpec::PhiQPrime { q } => write!(f, "phi_q_prime({q})"),
            MapSpec::Compose { outer, inner } => write!(f, "{outer}.{inner}"),
        }
    }
}

/// The relation satisfied by the image pair `(a_α, b_α)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    /// `a b - b a = 1`
    Canonical,
    /// `a b - q b a = 1`
    QDeformed(Rational),
}

impl Relation {
    /// Eigenvalue of `a_α` lowering `|n>` to `|n-1>`.
    fn lowering_factor(&self, n: usize) -> Rational {
        match self {
            Relation::Canonical => Rational::from(n),
            Relation::QDeformed(q) => q_number(q, n as i64).expect("q-number of a natural"),
        }
    }

    fn bracket(&self, a: &OpExpr, b: &OpExpr, d: Truncation) -> Result<LinOp, OpError> {
        match self {
            Relation::Canonical => commutator(a, b, d),
            Relation::QDeformed(q) => q_commutator(a, b, q, d),
        }
    }
}

pub struct DeformMap {
    spec: MapSpec,
    image_a: OpExpr,
    image_b: OpExpr,
    relation: Relation,
    parts: Option<(Arc<DeformMap>, Arc<DeformMap>)>,
    kets: Mutex<Vec<Poly>>,
}

impl fmt::Debug for DeformMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeformMap")
            .field("spec", &self.spec)
            .field("image_a", &self.image_a)
            .field("image_b", &self.image_b)
            .finish()
    }
}

impl Clone for DeformMap {
    fn clone(&self) -> Self {
        DeformMap {
            spec: self.spec.clone(),
            image_a: self.image_a.clone(),
            image_b: self.image_b.clone(),
            relation: self.relation.clone(),
            parts: self.parts.clone(),
            kets: Mutex::new(self.kets.lock().expect("ket cache poisoned").clone()),
        }
    }
}

impl DeformMap {
    /// Builds the map and checks its relation and counit preservation on the
    /// default window `D = 16`.
    pub fn new(spec: MapSpec) -> Result<Self, MapError> {
        DeformMap::with_check_window(spec, DEFAULT_CHECK_WINDOW)
    }

    pub fn with_check_window(spec: MapSpec, window: Truncation) -> Result<Self, MapError> {
        let map = DeformMap::build(spec, window)?;
        map.check(window)?;
        Ok(map)
    }

    pub fn identity() -> Self {
        DeformMap::new(MapSpec::Identity).expect("identity map")
    }

    fn build(spec: MapSpec, window: Truncation) -> Result<Self, MapError> {
        let (image_a, image_b, relation, parts) = match &spec {
            MapSpec::Identity => (OpExpr::d(), OpExpr::x(), Relation::Canonical, None),
            MapSpec::PhiQ { q } => {
                QContext::new(q.clone(), window.max_degree() + 2)?;
                (OpExpr::jackson_d(q), OpExpr::jackson_x(q), Relation::Canonical, None)
            }
            MapSpec::PhiDelta { delta } => (OpExpr::delta_d(delta), OpExpr::delta_x(delta), Relation::Canonical, None),
            MapSpec::PhiQPrime { q } => {
                QContext::new(q.clone(), window.max_degree() + 2)?;
                let bb = OpExpr::diag(Spectral::dbracket(q.clone(), Spectral::shifted(1)));
                let b = OpExpr::Product(vec![OpExpr::x(), OpExpr::Inv(Box::new(bb))]);
                (OpExpr::d(), b, Relation::QDeformed(q.clone()), None)
            }
            MapSpec::Compose { outer, inner } => {
                let outer_map = Arc::new(DeformMap::with_check_window((**outer).clone(), window)?);
                let inner_map = Arc::new(DeformMap::with_check_window((**inner).clone(), window)?);
                let relation = match (&outer_map.relation, &inner_map.relation) {
                    (Relation::Canonical, r) => r.clone(),
                    (r, _) if **inner == MapSpec::Identity => r.clone(),
                    _ => {
                        return Err(MapError::UnsupportedComposition(format!(
                            "{outer} does not preserve the canonical relation, so it cannot be applied to {inner}"
                        )))
                    }
                };
                let image_a = inner_map.image_a.substitute(outer_map.as_ref())?;
                let image_b = inner_map.image_b.substitute(outer_map.as_ref())?;
                (image_a, image_b, relation, Some((outer_map, inner_map)))
            }
        };
        Ok(DeformMap { spec, image_a, image_b, relation, parts, kets: Mutex::new(vec![Poly::one()]) })
    }

    fn check(&self, window: Truncation) -> Result<(), MapError> {
        let counit = apply(&self.image_a, &Poly::one(), window)?;
        if !counit.is_zero() {
            return Err(MapError::InvariantViolation(format!(
                "{}: image of a does not annihilate 1 (gives {counit})",
                self.spec
            )));
        }
        let bracket = self.relation.bracket(&self.image_a, &self.image_b, window)?;
        if !bracket.is_identity_on_window() {
            return Err(MapError::InvariantViolation(format!(
                "{}: relation {:?} fails on the window D = {}",
                self.spec,
                self.relation,
                window.max_degree()
            )));
        }
        Ok(())
    }

    pub fn spec(&self) -> &MapSpec {
        &self.spec
    }

    pub fn image_a(&self) -> &OpExpr {
        &self.image_a
    }

    pub fn image_b(&self) -> &OpExpr {
        &self.image_b
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    /// `φ(e)`: the expression with every generator replaced by its image.
    pub fn image_of(&self, e: &OpExpr) -> Result<OpExpr, MapError> {
        Ok(e.substitute(self)?)
    }

    /// `|0>_α .. |n>_α` with `|n>_α = b_α^n ▷ 1`, cached.
    fn raw_kets(&self, n: usize) -> Result<Vec<Poly>, OpError> {
        let mut known = {
            let cache = self.kets.lock().expect("ket cache poisoned");
            if cache.len() > n {
                return Ok(cache[..=n].to_vec());
            }
            cache.clone()
        };
        while known.len() <= n {
            let next_degree = known.len();
            let prev = known.last().expect("ket 0 is always present");
            let next = apply(&self.image_b, prev, Truncation::new(next_degree))?;
            known.push(next);
        }
        let mut cache = self.kets.lock().expect("ket cache poisoned");
        if cache.len() < known.len() {
            *cache = known.clone();
        }
        Ok(known)
    }

    fn raw_ket(&self, n: usize) -> Result<Poly, OpError> {
        {
            let cache = self.kets.lock().expect("ket cache poisoned");
            if let Some(k) = cache.get(n) {
                return Ok(k.clone());
            }
        }
        Ok(self.raw_kets(n)?.swap_remove(n))
    }

    /// The adapted basis element `|n>_α`, with the lowering law
    /// `a_α |n> = n |n-1>` (or `{n} |n-1>` for a q-deformed pair) checked.
    pub fn adapted_basis(&self, n: usize, d: Truncation) -> Result<Poly, MapError> {
        if n > d.max_degree() {
            return Err(OpError::Overflow { degree: n, max: d.max_degree() }.into());
        }
        let ket = self.raw_ket(n)?;
        let lowered = apply(&self.image_a, &ket, d)?;
        let expected =
            if n == 0 { Poly::zero() } else { self.raw_ket(n - 1)?.scale(&self.relation.lowering_factor(n)) };
        if lowered != expected {
            return Err(MapError::InvariantViolation(format!("{}: lowering law fails at n = {n}", self.spec)));
        }
        Ok(ket)
    }

    /// `f̂ = f(b_α) ▷ 1 = Σ f_n |n>_α` for `f` given in monomials up to degree `D`.
    pub fn b_projection(&self, f: &Poly, d: Truncation) -> Result<Series, MapError> {
        if !f.is_monomial_basis() {
            return Err(OpError::NotMonomial.into());
        }
        if let Some(deg) = f.degree().filter(|&deg| deg > d.max_degree()) {
            return Err(OpError::Overflow { degree: deg, max: d.max_degree() }.into());
        }
        let mut acc = Poly::zero();
        for (n, c) in f.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc = acc.try_add(&self.raw_ket(n)?.scale(c))?;
            }
        }
        Ok(Series { poly: acc, truncation: d })
    }

    /// `G_α ▷ f̂ = (G ▷ f)^`, compared exactly.
    pub fn intertwine_check(&self, g: &OpExpr, f: &Poly, d: Truncation) -> Result<bool, MapError> {
        let deformed = self.image_of(g)?;
        let lhs = apply(&deformed, &self.b_projection(f, d)?.poly, d)?;
        let rhs = self.b_projection(&apply(g, f, d)?, d)?.poly;
        Ok(lhs == rhs)
    }

    fn compose_with(&self, inner: &MapSpec) -> Result<Eigenbasis, OpError> {
        let spec = MapSpec::compose(self.spec.clone(), inner.clone());
        let map = DeformMap::with_check_window(spec, DEFAULT_CHECK_WINDOW)
            .map_err(|e| OpError::Unsupported(e.to_string()))?;
        Ok(Eigenbasis::Adapted(Arc::new(map)))
    }
}

impl Substitution for DeformMap {
    fn image_x(&self) -> &OpExpr {
        &self.image_b
    }

    fn image_d(&self) -> &OpExpr {
        &self.image_a
    }

    fn image_basis(&self, basis: &Eigenbasis) -> Result<Eigenbasis, OpError> {
        let inner_spec = match basis {
            Eigenbasis::Monomial => None,
            Eigenbasis::Falling(delta) => Some(MapSpec::phi_delta(delta.clone())),
            Eigenbasis::Adapted(src) => {
                let any: &dyn Any = src.as_any();
                let map = any.downcast_ref::<DeformMap>().ok_or_else(|| {
                    OpError::Unsupported(format!("eigenbasis {} is not an adapted basis", src.label()))
                })?;
                Some(map.spec.clone())
            }
        };
        match (&self.spec, inner_spec) {
            (MapSpec::Identity, _) => Ok(basis.clone()),
            // A_q = x_q d_q = A
            (MapSpec::PhiQ { .. }, None) => Ok(Eigenbasis::Monomial),
            (MapSpec::PhiDelta { delta }, None) => Ok(Eigenbasis::Falling(delta.clone()).normalized()),
            (MapSpec::PhiQPrime { .. }, _) => {
                Err(OpError::Unsupported("diagonal functions have no image under phi_q_prime".to_string()))
            }
            (MapSpec::Compose { .. }, _) => {
                let (outer, inner) = self.parts.as_ref().expect("composite map keeps its parts");
                outer.image_basis(&inner.image_basis(basis)?)
            }
            (_, Some(inner)) => self.compose_with(&inner),
        }
    }
}

impl KetSource for DeformMap {
    fn ket(&self, n: usize) -> Result<Poly, OpError> {
        self.raw_ket(n)
    }

    fn kets(&self, n: usize) -> Result<Vec<Poly>, OpError> {
        self.raw_kets(n)
    }

    fn label(&self) -> String {
        self.spec.to_string()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

impl Serialize for DeformMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.spec.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DeformMap {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let spec = MapSpec::deserialize(deserializer)?;
        DeformMap::new(spec).map_err(serde::de::Error::custom)
    }
}

/// A polynomial standing for a formal series cut off at `truncation`.
/// Coefficients above the truncation degree are unknown, not zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Series {
    pub poly: Poly,
    pub truncation: Truncation,
}

/// `e^{λx} = Σ λ^n x^n / n!` up to degree `D`.
pub fn exp_series(lambda: &Rational, d: Truncation) -> Series {
    let mut coeffs = Vec::with_capacity(d.max_degree() + 1);
    let mut c = Rational::one();
    for n in 0..=d.max_degree() {
        if n > 0 {
            c = c * lambda / Rational::from(n);
        }
        coeffs.push(c.clone());
    }
    Series { poly: Poly::monomial_coeffs(coeffs), truncation: d }
}

/// `e_q(λx) = Σ (λx)^n / {n}!`, obtained as the φ_q-projection of `e^{λx}`.
pub fn q_exponential(lambda: &Rational, q: &Rational, d: Truncation) -> Result<Series, MapError> {
    DeformMap::new(MapSpec::phi_q(q.clone()))?.b_projection(&exp_series(lambda, d).poly, d)
}

/// `Σ f(n)!/n! x^n` with `f(n)! = f(1)...f(n)`: eigenfunction of `f(B)^{-1} d`
/// with eigenvalue 1.
pub fn eigen_series(f: &Spectral, d: Truncation) -> Result<Series, MapError> {
    let mut coeffs = Vec::with_capacity(d.max_degree() + 1);
    let mut c = Rational::one();
    coeffs.push(c.clone());
    for n in 1..=d.max_degree() {
        let fv = f.eval(n).map_err(|source| OpError::Spectral { degree: n, source })?;
        c = c * fv / Rational::from(n);
        coeffs.push(c.clone());
    }
    Ok(Series { poly: Poly::monomial_coeffs(coeffs), truncation: d })
}

fn monomial_map(
    p: &Poly,
    what: &'static str,
    mut image: impl FnMut(usize, &Rational) -> Result<Poly, MapError>,
) -> Result<Poly, MapError> {
    if !p.is_monomial_basis() {
        return Err(crate::poly::PolyError::MonomialOnly(what).into());
    }
    let mut acc = Poly::zero();
    for (n, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            acc = acc.try_add(&image(n, c)?)?;
        }
    }
    Ok(acc)
}

fn braces(q: &Rational, n: usize) -> Result<Rational, MapError> {
    let v = q_number(q, n as i64).expect("q-number of a natural");
    if v.is_zero() {
        Err(OpError::Singular { degree: n }.into())
    } else {
        Ok(v)
    }
}

/// Jackson integral `S ▷ p`: `x^n -> x^(n+1)/{n+1}`.
pub fn jackson_integral(p: &Poly, q: &Rational) -> Result<Poly, MapError> {
    monomial_map(p, "the Jackson integral", |n, c| Ok(Poly::term(c / braces(q, n + 1)?, n + 1)))
}

/// Quantum averaging `M_q ▷ p = x^{-1} S ▷ p`: `x^n -> x^n/{n+1}`.
pub fn quantum_average(p: &Poly, q: &Rational) -> Result<Poly, MapError> {
    monomial_map(p, "quantum averaging", |n, c| Ok(Poly::term(c / braces(q, n + 1)?, n)))
}

/// `x_q ▷ f = x (<f>_q + <x f'>_q)`.
pub fn rolle_check(f: &Poly, q: &Rational, d: Truncation) -> Result<bool, MapError> {
    let lhs = apply(&OpExpr::jackson_x(q), f, d)?;
    let xf_prime = f.derivative()?.mul_x()?;
    let averaged = quantum_average(f, q)?.try_add(&quantum_average(&xf_prime, q)?)?;
    Ok(lhs == averaged.mul_x()?)
}

/// `U(A)` realized as a diagonal matrix `u(n) = {n}!/n!`.
pub fn similarity_u(q: &Rational, d: Truncation) -> Result<LinOp, MapError> {
    QContext::new(q.clone(), d.max_degree())?;
    Ok(LinOp::realize(&OpExpr::similarity_u(q), d)?)
}

/// `U^{-1} d U = d_q` and `U^{-1} x U = x_q` on the overflow-free window.
pub fn similarity_check(q: &Rational, d: Truncation) -> Result<bool, MapError> {
    QContext::new(q.clone(), d.max_degree() + 1)?;
    let u = OpExpr::similarity_u(q);
    let u_inv = u.clone().inv()?;
    let conj = |g: OpExpr| OpExpr::Product(vec![u_inv.clone(), g, u.clone()]);
    let lhs_d = LinOp::realize(&conj(OpExpr::d()), d)?;
    let rhs_d = LinOp::realize(&OpExpr::jackson_d(q), d)?;
    let lhs_x = LinOp::realize(&conj(OpExpr::x()), d)?;
    let rhs_x = LinOp::realize(&OpExpr::jackson_x(q), d)?;
    let wx = lhs_x.safe_window();
    Ok(wx > 0 && lhs_d.agrees_on(&rhs_d, 0..lhs_d.safe_window().max(1)) && lhs_x.agrees_on(&rhs_x, 0..wx))
}

/// `φ_δ(b [[B]]^{-1}) = b_δ [[B_δ]]^{-1}`, with `[[B_δ]]^{-1}` acting on
/// `|n>_δ` as `[[n+1]]^{-1}`.
pub fn delta_qcc(q: &Rational, delta: &Rational) -> OpExpr {
    let bb = OpExpr::diag_in(Spectral::dbracket(q.clone(), Spectral::shifted(1)), Eigenbasis::Falling(delta.clone()));
    OpExpr::Product(vec![OpExpr::delta_x(delta), OpExpr::Inv(Box::new(bb))])
}

/// `a_δ φ_δ(b[[B]]^{-1}) - q φ_δ(b[[B]]^{-1}) a_δ = 1` on degrees `<= D`.
pub fn qcc_delta_check(q: &Rational, delta: &Rational, d: Truncation) -> Result<bool, MapError> {
    QContext::new(q.clone(), d.max_degree() + 2)?;
    let bracket = q_commutator(&OpExpr::delta_d(delta), &delta_qcc(q, delta), q, d)?;
    Ok(bracket.is_identity_on_window())
}
