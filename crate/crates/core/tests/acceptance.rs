//! Acceptance criteria 1-12. Prints one PASS/FAIL line per criterion and
//! exits nonzero unless every failure is a listed known failure.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use ccrmap::dsl::{self, parse_op, print_op, Params};
use ccrmap::hahn::{self, HahnParams, Variant};
use ccrmap::maps::{self, DeformMap, MapSpec};
use ccrmap::opcore::{apply, commutator, q_commutator, LinOp};
use ccrmap::qnum::dbracket_factorial;
use ccrmap::{OpExpr, Poly, Rational, Truncation};
use common::*;

/// Criteria with a clause that cannot hold, and the clause.
const KNOWN_FAILURES: &[(u32, &str)] = &[(4, "Mq*B = 1")];

#[derive(Default)]
struct Clauses {
    failed: Vec<String>,
    notes: Vec<String>,
    checked: usize,
}

impl Clauses {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checked += 1;
        if !ok {
            let name = name.into();
            if !self.failed.contains(&name) {
                self.failed.push(name);
            }
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn t(d: usize) -> Truncation {
    Truncation::new(d)
}

/// The operator is the identity on `x^0 .. x^(D-1)`, computed without overflow.
fn identity_below_top(op: &LinOp) -> bool {
    let top = op.truncation().max_degree();
    op.safe_window() >= top && op.is_identity_on(top)
}

fn c1_ccr(c: &mut Clauses) {
    let d = t(32);
    for q in q_grid() {
        let op = commutator(&OpExpr::jackson_d(&q), &OpExpr::jackson_x(&q), d).unwrap();
        c.check(format!("[Dq, xq] = 1 (q = {q})"), identity_below_top(&op));
        for delta in delta_grid() {
            if q == q_grid()[0] {
                let op = commutator(&OpExpr::delta_d(&delta), &OpExpr::delta_x(&delta), d).unwrap();
                c.check(format!("[Ddelta, xdelta] = 1 (delta = {delta})"), identity_below_top(&op));
            }
            let (pq, pd) = (MapSpec::phi_q(q.clone()), MapSpec::phi_delta(delta.clone()));
            for spec in [MapSpec::compose(pq.clone(), pd.clone()), MapSpec::compose(pd, pq)] {
                let name = format!("[{spec}(a), {spec}(b)] = 1");
                let ok = DeformMap::new(spec)
                    .map(|m| identity_below_top(&commutator(m.image_a(), m.image_b(), d).unwrap()))
                    .unwrap_or(false);
                c.check(name, ok);
            }
        }
    }
}

fn c2_qccr(c: &mut Clauses) {
    for q in q_grid() {
        let op = q_commutator(&OpExpr::jackson_d(&q), &OpExpr::x(), &q, t(32)).unwrap();
        c.check(format!("Dq x - q x Dq = 1 (q = {q})"), identity_below_top(&op));
    }
}

fn c3_invariance(c: &mut Clauses) {
    let diag = LinOp::diagonal((0..=32usize).map(Rational::from).collect());
    for q in q_grid() {
        let op = LinOp::realize(&(OpExpr::jackson_x(&q) * OpExpr::jackson_d(&q)), t(32)).unwrap();
        c.check(format!("xq Dq = diag(0..32) (q = {q})"), op == diag);
    }
}

fn c4_jackson(c: &mut Clauses) {
    let d = t(32);
    for q in q_grid() {
        let ds = LinOp::realize(&(OpExpr::jackson_d(&q) * OpExpr::jackson_s(&q)), d).unwrap();
        c.check("Dq*S = 1", identity_below_top(&ds));

        let sd = LinOp::realize(&(OpExpr::jackson_s(&q) * OpExpr::jackson_d(&q)), d).unwrap();
        let mut columns: Vec<Option<Poly>> = (0..=32).map(|n| Some(Poly::x_pow(n))).collect();
        columns[0] = Some(Poly::zero());
        c.check("S*Dq = 1 - P0", sd == LinOp::from_columns(d, columns));

        let mb = LinOp::realize(&(OpExpr::quantum_average(&q) * OpExpr::b_op()), d).unwrap();
        let holds = mb == LinOp::identity(d);
        c.check("Mq*B = 1", holds);
        if !holds && q == q_grid()[0] {
            let n = (0..=32).find(|&n| mb.column(n) != Some(&Poly::x_pow(n))).expect("a differing column");
            c.note(format!("q = {q}: Mq*B x^{n} = {}", mb.column(n).expect("computed")));
        }

        let braces_b = OpExpr::diag(ccrmap::Spectral::qnum(q.clone(), ccrmap::Spectral::shifted(1)));
        let mqb = LinOp::realize(&(OpExpr::quantum_average(&q) * braces_b), d).unwrap();
        c.check("Mq*qn(B) = 1", mqb == LinOp::identity(d));
    }
    c.note("Mq*qn(B) = 1 holds on the whole grid");
}

fn c5_rolle(c: &mut Clauses) {
    let polys = sample(poly_up_to(12), 100);
    for q in q_grid() {
        let ok = polys.iter().all(|f| maps::rolle_check(f, &q, t(13)).unwrap());
        c.check(format!("quantum Rolle, 100 polynomials (q = {q})"), ok);
    }
}

fn c6_adapted(c: &mut Clauses) {
    let d = t(12);
    for q in q_grid() {
        let phi_q = DeformMap::new(MapSpec::phi_q(q.clone())).unwrap();
        let ok = (0..=12)
            .all(|n| phi_q.adapted_basis(n, d).unwrap() == Poly::x_pow(n).scale(&dbracket_factorial(&q, n).unwrap()));
        c.check(format!("|n>_q = [[n]]! x^n (q = {q})"), ok);
        for delta in delta_grid() {
            let falling = |n: usize| -> Poly {
                (0..n).fold(Poly::one(), |acc, j| {
                    let factor = Poly::monomial_coeffs(vec![-(Rational::from(j) * &delta), Rational::one()]);
                    acc.try_mul(&factor).unwrap()
                })
            };
            if q == q_grid()[0] {
                let phi_d = DeformMap::new(MapSpec::phi_delta(delta.clone())).unwrap();
                let ok = (0..=12).all(|n| phi_d.adapted_basis(n, d).unwrap() == falling(n));
                c.check(format!("|n>_delta = prod (x - j delta) (delta = {delta})"), ok);
            }
            let pq = MapSpec::phi_q(q.clone());
            let pd = MapSpec::phi_delta(delta.clone());
            let dq = DeformMap::new(MapSpec::compose(pd.clone(), pq.clone())).unwrap();
            let ok = (0..=12)
                .all(|n| dq.adapted_basis(n, d).unwrap() == falling(n).scale(&dbracket_factorial(&q, n).unwrap()));
            c.check(format!("|n>_dq = [[n]]! x^(n)_delta (q = {q}, delta = {delta})"), ok);

            let two = Rational::from(2) / (Rational::one() + &q);
            let qd = DeformMap::new(MapSpec::compose(pq, pd)).unwrap();
            let expected_qd = Poly::monomial_coeffs(vec![Rational::zero(), -&delta, two.clone()]);
            let expected_dq = Poly::monomial_coeffs(vec![Rational::zero(), -&two * &delta, two]);
            c.check(format!("|2>_qd (q = {q}, delta = {delta})"), qd.adapted_basis(2, d).unwrap() == expected_qd);
            c.check(format!("|2>_dq (q = {q}, delta = {delta})"), dq.adapted_basis(2, d).unwrap() == expected_dq);
        }
    }
}

fn c7_intertwining(c: &mut Clauses) {
    let d = t(12);
    let fs = sample(poly_up_to(10), 50);
    let words =
        [("d", OpExpr::d()), ("x", OpExpr::x()), ("x*d", OpExpr::x() * OpExpr::d()), ("d^2", OpExpr::d().pow(2))];
    for q in q_grid() {
        for delta in delta_grid() {
            let (pq, pd) = (MapSpec::phi_q(q.clone()), MapSpec::phi_delta(delta.clone()));
            let specs = [pq.clone(), pd.clone(), MapSpec::compose(pq.clone(), pd.clone()), MapSpec::compose(pd, pq)];
            for spec in specs {
                let m = DeformMap::new(spec).unwrap();
                for (gname, g) in &words {
                    let ok = fs.iter().all(|f| m.intertwine_check(g, f, d).unwrap());
                    c.check(format!("{}: G = {gname}", m.spec()), ok);
                }
            }
        }
    }
}

fn c8_q_exponential(c: &mut Clauses) {
    let d = t(24);
    for q in q_grid() {
        for lambda in [r(1, 1), r(2, 1), r(-1, 2)] {
            let e = maps::q_exponential(&lambda, &q, d).unwrap().poly;
            let lhs = apply(&OpExpr::jackson_d(&q), &e, d).unwrap();
            let ok = e.degree() == Some(24) && lhs == e.scale(&lambda).truncate(t(23));
            c.check(format!("Dq e_q(lambda x) = lambda e_q(lambda x) (q = {q}, lambda = {lambda})"), ok);
        }
    }
}

fn c9_similarity(c: &mut Clauses) {
    for q in q_grid() {
        c.check(format!("U^-1 d U = Dq, U^-1 x U = xq (q = {q})"), maps::similarity_check(&q, t(24)).unwrap());
    }
}

fn c10_qcc(c: &mut Clauses) {
    for q in q_grid() {
        for delta in delta_grid() {
            let ok = maps::qcc_delta_check(&q, &delta, t(12)).unwrap();
            c.check(format!("QCC (q = {q}, delta = {delta})"), ok);
        }
    }
}

fn c11_hahn(c: &mut Clauses) {
    let (kmax, top) = (12, 20);
    let d = t(top);
    let paramsets: Vec<HahnParams> = [(r(0, 1), r(0, 1), 5), (r(1, 2), r(1, 3), 7), (r(1, 1), r(2, 1), 10)]
        .into_iter()
        .map(|(a, b, n)| HahnParams::new(a, b, Rational::from(n)))
        .collect();
    let polys = sample(poly_up_to(top), 30);
    for p in &paramsets {
        let label = format!("alpha = {}, beta = {}, N = {}, delta = {}", p.alpha, p.beta, p.n, p.delta);
        let three = hahn::build(Variant::ThreePoint, p, None).unwrap();
        let abs = hahn::build(Variant::Abstract, p, None).unwrap();
        let wide = t(top + 2);
        let ok = polys.iter().all(|f| apply(&three, f, wide).unwrap() == apply(&abs, f, wide).unwrap());
        c.check(format!("(a) ThreePoint = Abstract ({label})"), ok);

        let continuous = hahn::eigenpolynomials(Variant::Continuous, p, None, kmax, d).unwrap();
        for q in q_grid() {
            let deformed = hahn::eigenpolynomials(Variant::QDeformed, p, Some(&q), kmax, d).unwrap();
            let ok = continuous.iter().zip(&deformed).all(|(cp, dp)| {
                let coeffs = cp.gamma.iter().enumerate().map(|(i, g)| g * dbracket_factorial(&q, i).unwrap()).collect();
                dp.monomial == Poly::monomial_coeffs(coeffs)
            });
            c.check(format!("(e) QDeformed = sum gamma_i [[i]]! x^i ({label}, q = {q})"), ok);
        }

        for v in Variant::ALL {
            let qs: Vec<Option<Rational>> =
                if v.needs_q() { q_grid().into_iter().map(Some).collect() } else { vec![None] };
            for q in qs {
                let name = format!("(d) zero residuals, {v} ({label}, q = {q:?})");
                match hahn::table(v, p, q.as_ref(), kmax, d) {
                    Ok(tab) => {
                        c.check(name, tab.rows.len() == kmax + 1 && tab.rows.iter().all(|r| r.residual.is_zero()))
                    }
                    Err(e) => {
                        c.note(format!("{name}: {e}"));
                        c.check(name, false);
                    }
                }
            }
        }
    }
    let report = hahn::isospectral_check(&paramsets, &q_grid(), kmax, d).unwrap();
    for e in &report.entries {
        let clause = match e.variant {
            Variant::QSpectrum => "(c) QSpectrum diagonal = c1 {k}({k-1}+1)/delta + c3 {k}",
            _ => "(b) diagonal = c1 k^2/delta + c3 k",
        };
        c.check(format!("{clause}, {}", e.variant), e.ok());
    }
    c.note(format!("{} diagonal entries compared", report.entries.len()));
}

fn c12_parser(c: &mut Clauses) {
    let p = Params::new(Some(r(1, 2)), Some(r(1, 1)));
    let d = t(6);
    let exprs = sample(op_expr(), 100);
    let ok = exprs.iter().all(|e| {
        let text = print_op(e);
        match parse_op(&text, &p) {
            Ok(back) => {
                print_op(&back) == text
                    && LinOp::realize(&back, d).map_err(|x| x.to_string())
                        == LinOp::realize(e, d).map_err(|x| x.to_string())
            }
            Err(_) => false,
        }
    });
    c.check("round trip on 100 generated ASTs", ok);

    let big = t(16);
    let heis = parse_op("Dq*x - 1/2*x*Dq", &p).map(|e| LinOp::realize(&e, big).unwrap().is_identity_on_window());
    c.check("Dq*x - 1/2*x*Dq = 1", heis == Ok(true));
    let dq = parse_op("inv(qb(B))*d", &p)
        .map(|e| LinOp::realize(&e, big).unwrap() == LinOp::realize(&OpExpr::jackson_d(&r(1, 2)), big).unwrap());
    c.check("inv(qb(B))*d = Dq", dq == Ok(true));
    let a = parse_op("x*d", &p)
        .map(|e| LinOp::realize(&e, big).unwrap() == LinOp::diagonal((0..=16usize).map(Rational::from).collect()));
    c.check("x*d = A", a == Ok(true));

    let mut inputs: Vec<String> = FUZZ_CORPUS.iter().map(|s| s.to_string()).collect();
    inputs.push(deep_parens(100_000));
    inputs.extend(sample("[ -~\\n]{0,40}", 500));
    let crashed = inputs
        .iter()
        .filter(|text| {
            panic::catch_unwind(|| {
                let _ = dsl::parse(text, &p);
                let _ = dsl::parse_poly(text);
            })
            .is_err()
        })
        .count();
    c.note(format!("{} fuzz inputs", inputs.len()));
    c.check("fuzz corpus: no crashes", crashed == 0);
}

type Criterion = (u32, &'static str, fn(&mut Clauses));

const CRITERIA: &[Criterion] = &[
    (1, "CCR preservation", c1_ccr),
    (2, "q-CCR", c2_qccr),
    (3, "invariance of A", c3_invariance),
    (4, "Jackson calculus", c4_jackson),
    (5, "quantum Rolle identity", c5_rolle),
    (6, "adapted bases", c6_adapted),
    (7, "intertwining", c7_intertwining),
    (8, "q-exponential eigenfunction", c8_q_exponential),
    (9, "similarity transform", c9_similarity),
    (10, "quantum canonical conjugate", c10_qcc),
    (11, "Hahn suite", c11_hahn),
    (12, "parser", c12_parser),
];

struct Outcome {
    clauses: Clauses,
    panic: Option<String>,
    seconds: f64,
}

fn run(f: fn(&mut Clauses)) -> Outcome {
    let start = Instant::now();
    let mut clauses = Clauses::default();
    let result = panic::catch_unwind(AssertUnwindSafe(|| f(&mut clauses)));
    let panic = result.err().map(|e| {
        e.downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())
    });
    Outcome { clauses, panic, seconds: start.elapsed().as_secs_f64() }
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    panic::set_hook(Box::new(|_| {}));
    let selected: Vec<&Criterion> = CRITERIA
        .iter()
        .filter(|(id, name, _)| {
            filter.is_empty() || filter.iter().any(|f| *f == id.to_string() || name.contains(f.as_str()))
        })
        .collect();
    let outcomes: Vec<Outcome> = selected.iter().map(|(_, _, f)| run(*f)).collect();
    let _ = panic::take_hook();

    println!();
    println!("acceptance criteria");
    let mut unexpected = 0;
    for ((id, name, _), out) in selected.iter().zip(&outcomes) {
        let c = &out.clauses;
        let pass = out.panic.is_none() && c.failed.is_empty();
        let status = if pass { "PASS" } else { "FAIL" };
        println!("{status}  {id:>2}  {name}  ({} clauses, {:.1}s)", c.checked, out.seconds);
        if let Some(p) = &out.panic {
            println!("        panicked: {p}");
        }
        for f in &c.failed {
            println!("        failed: {f}");
        }
        for n in &c.notes {
            println!("        note: {n}");
        }
        let known: Vec<&str> = KNOWN_FAILURES.iter().filter(|(k, _)| k == id).map(|(_, clause)| *clause).collect();
        if out.panic.is_some() || c.failed.iter().any(|f| !known.contains(&f.as_str())) {
            unexpected += 1;
        } else if !known.is_empty() && pass {
            println!("        known failure no longer fails: {}", known.join(", "));
            unexpected += 1;
        } else if !known.is_empty() {
            println!("        known failure, see README");
        }
    }
    let passed =
        selected.iter().zip(&outcomes).filter(|(_, o)| o.panic.is_none() && o.clauses.failed.is_empty()).count();
    println!("{passed}/{} criteria passed, {unexpected} unexpected", selected.len());
    println!();
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
