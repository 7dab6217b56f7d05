//! Cross-checks against constructions that share no code path with the
//! library's own evaluation.

mod common;

use ccrmap::maps::{self, DeformMap, MapSpec};
use ccrmap::opcore::apply;
use ccrmap::{LinOp, OpExpr, Poly, Rational, Truncation};
use common::*;
use proptest::prelude::*;

/// `g(M)` for a triangular matrix with distinct eigenvalues `λ_0..λ_D`,
/// by Lagrange interpolation on the spectrum.
fn sylvester(m: &LinOp, g: impl Fn(&Rational) -> Rational) -> LinOp {
    let d = m.truncation();
    let lambdas: Vec<Rational> = m.diagonal_entries().into_iter().map(|e| e.expect("full matrix")).collect();
    let id = LinOp::identity(d);
    let mut acc = id.scale(&Rational::zero());
    for (i, li) in lambdas.iter().enumerate() {
        let mut term = id.clone();
        for (j, lj) in lambdas.iter().enumerate() {
            if i != j {
                let factor = m.sub(&id.scale(lj)).scale(&(li - lj).recip().expect("distinct"));
                term = factor.compose(&term);
            }
        }
        acc = acc.add(&term.scale(&g(li)));
    }
    acc
}

fn dbracket(q: &Rational, m: &Rational) -> Rational {
    let m = m.to_i64().expect("integer eigenvalue");
    let braces = (Rational::one() - q.pow(m).unwrap()) / (Rational::one() - q);
    Rational::from(m) / braces
}

fn matrix(e: &OpExpr, d: Truncation) -> LinOp {
    LinOp::realize(e, d).unwrap()
}

#[test]
fn delta_qcc_matches_interpolated_matrix_function() {
    let top = 12;
    let d = Truncation::new(top);
    for q in q_grid() {
        for delta in delta_grid() {
            let b_delta = matrix(&(OpExpr::delta_x(&delta) * OpExpr::delta_d(&delta) + OpExpr::identity()), d);
            assert_eq!(b_delta.diagonal_entries(), (1..=top + 1).map(|n| Some(Rational::from(n))).collect::<Vec<_>>());
            let inv_bracket = sylvester(&b_delta, |l| dbracket(&q, l).recip().unwrap());
            let y = matrix(&OpExpr::delta_x(&delta), d).compose(&inv_bracket);
            let library = matrix(&maps::delta_qcc(&q, &delta), d);
            assert!(y.agrees_on(&library, 0..top), "q = {q}, delta = {delta}");

            let a = matrix(&OpExpr::delta_d(&delta), d);
            let bracket = a.compose(&y).sub(&y.compose(&a).scale(&q));
            assert!(bracket.is_identity_on(top), "q = {q}, delta = {delta}");
        }
    }
}

#[test]
fn similarity_by_explicit_gamma_ratios() {
    let top = 16;
    let d = Truncation::new(top);
    for q in q_grid() {
        let mut u = vec![Rational::one()];
        for n in 1..=top {
            let braces = (Rational::one() - q.pow(n as i64).unwrap()) / (Rational::one() - &q);
            let next = &u[n - 1] * braces / Rational::from(n);
            u.push(next);
        }
        let uu = LinOp::diagonal(u.clone());
        let uinv = LinOp::diagonal(u.iter().map(|c| c.recip().unwrap()).collect());
        let conj_d = uinv.compose(&matrix(&OpExpr::d(), d)).compose(&uu);
        assert_eq!(conj_d, matrix(&OpExpr::jackson_d(&q), d), "q = {q}");
        assert_eq!(maps::similarity_u(&q, d).unwrap(), uu);
    }
}

#[test]
fn worked_kets_by_repeated_raising() {
    let d = Truncation::new(2);
    for q in q_grid() {
        for delta in delta_grid() {
            // b_qδ = x_q e^{-δ ∂_q}, b_δq = b_δ [[B_δ]]
            let two = Rational::from(2) / (Rational::one() + &q);
            let qd =
                DeformMap::new(MapSpec::compose(MapSpec::phi_q(q.clone()), MapSpec::phi_delta(delta.clone()))).unwrap();
            let b = OpExpr::jackson_x(&q) * OpExpr::scaled(-&delta, OpExpr::jackson_d(&q)).exp();
            let direct = apply(&b, &apply(&b, &Poly::one(), d).unwrap(), d).unwrap();
            assert_eq!(qd.adapted_basis(2, d).unwrap(), direct);
            assert_eq!(direct, Poly::monomial_coeffs(vec![Rational::zero(), -&delta, two.clone()]));

            let dq =
                DeformMap::new(MapSpec::compose(MapSpec::phi_delta(delta.clone()), MapSpec::phi_q(q.clone()))).unwrap();
            let falling = Poly::monomial_coeffs(vec![Rational::zero(), -&delta, Rational::one()]);
            assert_eq!(dq.adapted_basis(2, d).unwrap(), falling.scale(&two));
        }
    }
}

#[test]
fn documented_scalars() {
    let q = r(1, 2);
    assert_eq!(ccrmap::qnum::q_number(&q, 3), Some(r(7, 4)));
    assert_eq!(ccrmap::qnum::double_bracket(&q, 0), Some(Rational::one()));
    assert_eq!(ccrmap::qnum::double_bracket(&q, 2), Some(r(4, 3)));
    assert_eq!(maps::quantum_average(&Poly::x_pow(2), &q).unwrap(), Poly::term(r(4, 7), 2));
    assert_eq!(maps::jackson_integral(&Poly::x_pow(2), &q).unwrap(), Poly::term(r(4, 7), 3));
}

/// `<f> = x^{-1} ∫_0^x f`.
fn classical_average(f: &Poly) -> Poly {
    let coeffs = f.coeffs().iter().enumerate().map(|(n, c)| c / Rational::from(n + 1)).collect();
    Poly::monomial_coeffs(coeffs)
}

proptest! {
    #[test]
    fn classical_averaging_identity(f in poly_up_to(12)) {
        let xf = f.derivative().unwrap().mul_x().unwrap();
        prop_assert_eq!(classical_average(&f).try_add(&classical_average(&xf)).unwrap(), f);
    }

    #[test]
    fn quantum_averaging_tends_to_classical(f in poly_up_to(8), k in 1i64..4) {
        // q = 1 - 1/10^k; coefficients converge as 1/{n+1} -> 1/(n+1)
        let q = Rational::one() - Rational::new(1, 10i64.pow(k as u32));
        let quantum = maps::quantum_average(&f, &q).unwrap();
        let classical = classical_average(&f);
        let bound = Rational::new(9 * 8, 10i64.pow(k as u32));
        for n in 0..f.coeffs().len() {
            let gap = (quantum.coeff(n) - classical.coeff(n)).abs();
            prop_assert!(gap <= bound.clone() * f.coeff(n).abs(), "n = {}", n);
        }
    }
}
