#![allow(dead_code)]

use ccrmap::opcore::{Eigenbasis, Spectral};
use ccrmap::{OpExpr, Poly, Rational};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn q_grid() -> Vec<Rational> {
    vec![r(1, 2), r(-1, 2), r(1, 3), r(9, 10)]
}

pub fn delta_grid() -> Vec<Rational> {
    vec![r(1, 1), r(1, 2)]
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d))
}

/// Rationals `p/r` with `|p| < r`, so `{n}` never vanishes.
pub fn q_value() -> impl Strategy<Value = Rational> {
    (2i64..=12).prop_flat_map(|den| (-(den - 1)..den).prop_map(move |num| Rational::new(num, den)))
}

pub fn nonzero_delta() -> impl Strategy<Value = Rational> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=4).prop_map(|(n, d)| Rational::new(n, d))
}

pub fn poly_up_to(max_degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rational(), 0..=max_degree + 1).prop_map(Poly::monomial_coeffs)
}

/// `count` values drawn from `strategy` with a fixed seed.
pub fn sample<S: Strategy>(strategy: S, count: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..count).map(|_| strategy.new_tree(&mut runner).expect("strategy never rejects").current()).collect()
}

/// Operator ASTs over every printable atom, with `q = 1/2` and `δ = 1`.
pub fn op_expr() -> impl Strategy<Value = OpExpr> {
    let q = r(1, 2);
    let delta = Rational::one();
    let leaf = prop_oneof![
        Just(OpExpr::x()),
        Just(OpExpr::d()),
        Just(OpExpr::degree_op()),
        Just(OpExpr::b_op()),
        Just(OpExpr::jackson_d(&q)),
        Just(OpExpr::jackson_x(&q)),
        Just(OpExpr::jackson_s(&q)),
        Just(OpExpr::quantum_average(&q)),
        Just(OpExpr::similarity_u(&q)),
        Just(OpExpr::delta_d(&delta)),
        Just(OpExpr::delta_x(&delta)),
        Just(OpExpr::diag_in(Spectral::Index, Eigenbasis::Falling(delta.clone()))),
        Just(OpExpr::diag(Spectral::dbracket(q.clone(), Spectral::shifted(1)))),
        Just(OpExpr::diag(Spectral::qnum(q.clone(), Spectral::Index))),
        Just(OpExpr::diag(Spectral::gamma_ratio(q.clone(), Spectral::shifted(1)))),
        small_rational().prop_map(OpExpr::Scalar),
    ];
    leaf.prop_recursive(6, 48, 4, move |inner| {
        let q = q.clone();
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(OpExpr::sum),
            prop::collection::vec(inner.clone(), 2..4).prop_map(OpExpr::product),
            (small_rational(), inner.clone()).prop_map(|(c, e)| OpExpr::scaled(c, e)),
            (inner.clone(), 0u32..4).prop_map(|(e, k)| e.pow(k)),
            (1i64..=3).prop_map(|k| OpExpr::scaled(Rational::from(-k), OpExpr::d()).exp()),
            (1i64..=4).prop_map(move |k| {
                OpExpr::diag(Spectral::dbracket(q.clone(), Spectral::shifted(k))).inv().expect("diagonal")
            }),
        ]
    })
}

/// Inputs that must produce an error or a value, never a panic.
pub const FUZZ_CORPUS: &[&str] = &[
    "",
    " ",
    "(",
    ")",
    "((((",
    "))))",
    "x +",
    "+ x",
    "* x",
    "x * * d",
    "x ^",
    "x ^ -1",
    "x^2^3",
    "x^99999999999999999999999",
    "x^1025",
    "1/0",
    "0/0*x",
    "1/",
    "/2",
    "qb()",
    "qb(",
    "qb(x",
    "inv(inv(inv(A)))",
    "inv(0)",
    "inv(A)",
    "qn(qn(qn(B)))",
    "exp(x)",
    "exp(d)^3",
    "exp(exp(d))",
    "poly(",
    "poly(x*d)",
    "poly(poly(x))",
    "x*poly(1)",
    "Dq Dq",
    "x\n*\nd\n+",
    "\t\r\n",
    "∂",
    "x ∂",
    "é",
    "#",
    "x @ d",
    "1.5*x",
    "--x",
    "-(-(-(x)))",
    "99999999999999999999999999999999/7*x",
    "A^0",
    "(x)^0",
    "gammaq(A)",
    "qb(A*A)",
    "qb(A+1)",
    "qb(1)",
    "qb(x*d)",
    "Bdelta*Adelta",
    "sin(x)",
    "x(d)",
    "d(x)",
];

/// A string nested `depth` levels deep in parentheses.
pub fn deep_parens(depth: usize) -> String {
    format!("{}x{}", "(".repeat(depth), ")".repeat(depth))
}
