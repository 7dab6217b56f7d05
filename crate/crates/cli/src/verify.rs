use ccrmap::maps::{self, DeformMap, MapError, MapSpec};
use ccrmap::opcore::{apply, commutator, q_commutator, LinOp, OpExpr};
use ccrmap::qnum::dbracket_factorial;
use ccrmap::{Poly, Rational, Truncation};
use clap::ValueEnum;
use serde::Serialize;

use crate::{CliError, Global};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Ccr,
    Qccr,
    Rolle,
    Intertwine,
    Similarity,
    QccDelta,
    Composition,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Ccr => "ccr",
            Suite::Qccr => "qccr",
            Suite::Rolle => "rolle",
            Suite::Intertwine => "intertwine",
            Suite::Similarity => "similarity",
            Suite::QccDelta => "qcc-delta",
            Suite::Composition => "composition",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: String,
    #[serde(rename = "D")]
    pub degree: usize,
    pub window: String,
    pub pass: bool,
    pub detail: Option<String>,
}

struct Ctx {
    q: Rational,
    delta: Rational,
    d: Truncation,
    out: Vec<Check>,
    suite: &'static str,
}

impl Ctx {
    fn record(&mut self, check: impl Into<String>, window: impl Into<String>, result: Result<bool, MapError>) {
        let (pass, detail) = match result {
            Ok(pass) => (pass, None),
            Err(e) => (false, Some(e.to_string())),
        };
        self.out.push(Check {
            suite: self.suite,
            check: check.into(),
            degree: self.d.max_degree(),
            window: window.into(),
            pass,
            detail,
        });
    }

    fn all_degrees(&self) -> String {
        format!("0..={}", self.d.max_degree())
    }

    fn identity_check(&mut self, check: &str, op: Result<LinOp, ccrmap::OpError>) {
        match op {
            Ok(op) => {
                let w = op.safe_window();
                let window = format!("0..={}", w.saturating_sub(1));
                self.record(check, window, Ok(op.is_identity_on_window()));
            }
            Err(e) => self.record(check, "-", Err(e.into())),
        }
    }

    fn map(&self, spec: MapSpec) -> Result<DeformMap, MapError> {
        DeformMap::new(spec)
    }

    fn phi_q(&self) -> MapSpec {
        MapSpec::phi_q(self.q.clone())
    }

    fn phi_delta(&self) -> MapSpec {
        MapSpec::phi_delta(self.delta.clone())
    }

    fn maps(&self) -> Vec<(String, MapSpec)> {
        let (q, dl) = (self.phi_q(), self.phi_delta());
        vec![
            ("phi_q".into(), q.clone()),
            ("phi_delta".into(), dl.clone()),
            ("phi_q.phi_delta".into(), MapSpec::compose(q.clone(), dl.clone())),
            ("phi_delta.phi_q".into(), MapSpec::compose(dl, q)),
        ]
    }
}

pub fn run(suite: Suite, g: &Global) -> Result<Vec<Check>, CliError> {
    let q = g.q(&format!("verify {}", suite.name()))?.clone();
    let mut ctx = Ctx { q, delta: g.delta_or_one(), d: g.truncation(), out: Vec::new(), suite: suite.name() };
    let suites = if suite == Suite::All {
        vec![
            Suite::Ccr,
            Suite::Qccr,
            Suite::Rolle,
            Suite::Intertwine,
            Suite::Similarity,
            Suite::QccDelta,
            Suite::Composition,
        ]
    } else {
        vec![suite]
    };
    for s in suites {
        ctx.suite = s.name();
        match s {
            Suite::Ccr => ccr(&mut ctx),
            Suite::Qccr => qccr(&mut ctx),
            Suite::Rolle => rolle(&mut ctx),
            Suite::Intertwine => intertwine(&mut ctx),
            Suite::Similarity => similarity(&mut ctx),
            Suite::QccDelta => qcc_delta(&mut ctx),
            Suite::Composition => composition(&mut ctx),
            Suite::All => unreachable!(),
        }
    }
    Ok(ctx.out)
}

fn ccr(c: &mut Ctx) {
    for (name, spec) in c.maps() {
        match c.map(spec) {
            Ok(m) => {
                let op = commutator(m.image_a(), m.image_b(), c.d);
                c.identity_check(&format!("[{name}(a), {name}(b)] = 1"), op);
                let counit = apply(m.image_a(), &Poly::one(), c.d).map(|p| p.is_zero());
                c.record(format!("{name}(a) 1 = 0"), "0", counit.map_err(Into::into));
            }
            Err(e) => c.record(format!("[{name}(a), {name}(b)] = 1"), "-", Err(e)),
        }
    }
}

fn qccr(c: &mut Ctx) {
    let q = c.q.clone();
    let dq = OpExpr::jackson_d(&q);
    c.identity_check("Dq*x - q*x*Dq = 1", q_commutator(&dq, &OpExpr::x(), &q, c.d));
    let bb_inv =
        OpExpr::diag(ccrmap::Spectral::dbracket(q.clone(), ccrmap::Spectral::shifted(1))).inv().expect("diagonal");
    let conj = OpExpr::x() * bb_inv;
    c.identity_check("d*(x*inv(qb(B))) - q*(x*inv(qb(B)))*d = 1", q_commutator(&OpExpr::d(), &conj, &q, c.d));
    let invariance = LinOp::realize(&(OpExpr::jackson_x(&q) * dq), c.d)
        .and_then(|lhs| Ok(lhs == LinOp::realize(&OpExpr::degree_op(), c.d)?));
    let window = c.all_degrees();
    c.record("xq*Dq = A", window, invariance.map_err(Into::into));
}

fn rolle(c: &mut Ctx) {
    let q = c.q.clone();
    let top = c.d.max_degree();
    let window = format!("deg f < {top}");
    let monomials = (0..top).try_fold(true, |ok, n| Ok(ok && maps::rolle_check(&Poly::x_pow(n), &q, c.d)?));
    c.record("xq f = x(<f>_q + <x f'>_q), f = x^n", window.clone(), monomials);
    let shifted = (0..top).try_fold(true, |ok, n| {
        let f = Poly::x_pow(n).shift(&Rational::from(-1))?;
        Ok(ok && maps::rolle_check(&f, &q, c.d)?)
    });
    c.record("xq f = x(<f>_q + <x f'>_q), f = (x-1)^n", window, shifted);
}

fn intertwine(c: &mut Ctx) {
    let words =
        [("d", OpExpr::d()), ("x", OpExpr::x()), ("x*d", OpExpr::x() * OpExpr::d()), ("d^2", OpExpr::d().pow(2))];
    let top = c.d.max_degree().saturating_sub(1);
    for (name, spec) in c.maps() {
        let m = c.map(spec);
        for (gname, g) in &words {
            let check = format!("{name}: G_alpha f^ = (G f)^, G = {gname}, f = x^n");
            let result = m
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|m| (0..=top).try_fold(true, |ok, n| Ok(ok && m.intertwine_check(g, &Poly::x_pow(n), c.d)?)));
            c.record(check, format!("n <= {top}"), result);
        }
    }
}

fn similarity(c: &mut Ctx) {
    let q = c.q.clone();
    let u = maps::similarity_u(&q, c.d)
        .map(|u| u.entry(0, 0) == Some(Rational::one()) && u.entry(1, 1) == Some(Rational::one()));
    c.record("u(0) = u(1) = 1", "0..=1", u);
    let window = c.all_degrees();
    c.record("U^-1 d U = Dq and U^-1 x U = xq", window, maps::similarity_check(&q, c.d));
}

fn qcc_delta(c: &mut Ctx) {
    let (q, delta) = (c.q.clone(), c.delta.clone());
    let window = c.all_degrees();
    c.record(
        format!("a_delta b_qd - q b_qd a_delta = 1 (delta = {delta})"),
        window.clone(),
        maps::qcc_delta_check(&q, &delta, c.d),
    );
    c.record("a b_q - q b_q a = 1 (delta = 0)", window, maps::qcc_delta_check(&q, &Rational::zero(), c.d));
}

fn composition(c: &mut Ctx) {
    let (q, delta) = (c.q.clone(), c.delta.clone());
    let (pq, pd) = (c.phi_q(), c.phi_delta());
    let two_over = Rational::from(2) / (Rational::one() + &q);
    let qd = c.map(MapSpec::compose(pq.clone(), pd.clone()));
    let dq = c.map(MapSpec::compose(pd.clone(), pq.clone()));

    let ket2 = |m: &Result<DeformMap, MapError>| m.as_ref().map_err(Clone::clone).and_then(|m| m.adapted_basis(2, c.d));
    let expected_qd = Poly::monomial_coeffs(vec![Rational::zero(), -&delta, two_over.clone()]);
    let expected_dq = Poly::monomial_coeffs(vec![Rational::zero(), -&two_over * &delta, two_over.clone()]);
    let (k_qd, k_dq) = (ket2(&qd), ket2(&dq));
    c.record(format!("|2>_qd = {expected_qd}"), "2", k_qd.clone().map(|k| k == expected_qd));
    c.record(format!("|2>_dq = {expected_dq}"), "2", k_dq.clone().map(|k| k == expected_dq));
    let differ = k_qd.and_then(|a| Ok(a != k_dq?));
    c.record("|2>_qd != |2>_dq", "2", differ);

    let top = c.d.max_degree();
    let bdelta = dq.as_ref().map_err(Clone::clone).and_then(|m| {
        (0..=top).try_fold(true, |ok, n| {
            let weight = dbracket_factorial(&q, n).expect("validated q");
            let expected = Poly::falling_element(n, delta.clone()).to_monomial().scale(&weight);
            Ok(ok && m.adapted_basis(n, c.d)? == expected)
        })
    });
    c.record("|n>_dq = [[n]]! x^(n)_delta", format!("n <= {top}"), bdelta);

    let outer_maps = [(pq.clone(), pd.clone(), "phi_q.phi_delta"), (pd, pq, "phi_delta.phi_q")];
    let nmax = top.min(8);
    for (outer, inner, name) in outer_maps {
        let result = (|| {
            let composite = c.map(MapSpec::compose(outer.clone(), inner.clone()))?;
            let o = c.map(outer)?;
            let i = c.map(inner)?;
            (0..=nmax).try_fold(true, |ok, n| {
                let direct = composite.adapted_basis(n, c.d)?;
                let induced = o.b_projection(&i.adapted_basis(n, c.d)?, c.d)?.poly;
                Ok(ok && direct == induced)
            })
        })();
        c.record(format!("{name}: |n> = outer^(|n>_inner)"), format!("n <= {nmax}"), result);
    }
}
