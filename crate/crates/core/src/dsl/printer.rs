use crate::opcore::{Eigenbasis, Generator, OpExpr, Spectral};
use crate::poly::Poly;
use crate::rational::Rational;

const NAMED_ATOMS: [&str; 7] = ["Dq", "xq", "S", "Mq", "U", "Ddelta", "xdelta"];

/// Layout tree shared by operators and spectral functions.
#[derive(Debug, Clone)]
enum Doc {
    Atom(String),
    Num(Rational),
    Call(&'static str, Box<Doc>),
    Sum(Vec<Doc>),
    Prod(Vec<Doc>),
    Scaled(Rational, Box<Doc>),
    Pow(Box<Doc>, u32),
}

const SUM: u8 = 0;
const TERM: u8 = 1;
const FACTOR: u8 = 2;
const ATOM: u8 = 3;

fn scaled(c: Rational, d: Doc) -> Doc {
    match d {
        _ if c.is_one() => d,
        Doc::Num(s) => Doc::Num(c * s),
        Doc::Scaled(s, inner) => scaled(c * s, *inner),
        other => Doc::Scaled(c, Box::new(other)),
    }
}

fn sum(items: Vec<Doc>) -> Doc {
    let mut flat = Vec::new();
    for it in items {
        match it {
            Doc::Sum(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    match flat.len() {
        0 => Doc::Num(Rational::zero()),
        1 => flat.pop().unwrap(),
        _ => Doc::Sum(flat),
    }
}

fn prod(items: Vec<Doc>) -> Doc {
    let mut flat = Vec::new();
    for it in items {
        match it {
            Doc::Prod(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    match flat.len() {
        0 => Doc::Num(Rational::one()),
        1 => flat.pop().unwrap(),
        _ => match flat[0].clone() {
            // a leading literal reads back as a scalar multiple
            Doc::Num(c) if !c.is_negative() => scaled(c, prod(flat.split_off(1))),
            _ => Doc::Prod(flat),
        },
    }
}

fn of_op(e: &OpExpr) -> Doc {
    match e {
        OpExpr::Gen(Generator::X) => Doc::Atom("x".into()),
        OpExpr::Gen(Generator::D) => Doc::Atom("d".into()),
        OpExpr::Scalar(c) => Doc::Num(c.clone()),
        OpExpr::ScalarMul(c, inner) => scaled(c.clone(), of_op(inner)),
        OpExpr::Sum(terms) => sum(terms.iter().map(of_op).collect()),
        OpExpr::Product(factors) => prod(factors.iter().map(of_op).collect()),
        OpExpr::Pow(base, k) => Doc::Pow(Box::new(of_op(base)), *k),
        OpExpr::Diag(d) => {
            let (a, b) = match &d.basis {
                Eigenbasis::Falling(_) => ("Adelta", "Bdelta"),
                _ => ("A", "B"),
            };
            let body = of_spectral(&d.spectral, a, b);
            match &d.basis {
                Eigenbasis::Adapted(src) => Doc::Atom(format!("[{}]@{}", render(&body, SUM), src.label())),
                _ => body,
            }
        }
        OpExpr::Exp(inner) => Doc::Call("exp", Box::new(of_op(inner))),
        OpExpr::Inv(inner) => Doc::Call("inv", Box::new(of_op(inner))),
        OpExpr::Named(name, body) => {
            if NAMED_ATOMS.contains(&name.as_str()) {
                Doc::Atom(name.clone())
            } else {
                of_op(body)
            }
        }
    }
}

fn of_spectral(s: &Spectral, a: &str, b: &str) -> Doc {
    let rec = |s: &Spectral| of_spectral(s, a, b);
    match s {
        Spectral::Index => Doc::Atom(a.into()),
        Spectral::Add(parts)
            if parts.len() == 2 && parts[0] == Spectral::Index && parts[1] == Spectral::Const(Rational::one()) =>
        {
            Doc::Atom(b.into())
        }
        Spectral::Const(c) => Doc::Num(c.clone()),
        Spectral::Add(parts) => sum(parts.iter().map(rec).collect()),
        Spectral::Mul(parts) => prod(parts.iter().map(rec).collect()),
        Spectral::Pow(base, k) => Doc::Pow(Box::new(rec(base)), *k),
        Spectral::Recip(inner) => Doc::Call("inv", Box::new(rec(inner))),
        Spectral::QNum { arg, .. } => Doc::Call("qn", Box::new(rec(arg))),
        Spectral::DBracket { arg, .. } => Doc::Call("qb", Box::new(rec(arg))),
        Spectral::GammaRatio { arg, .. } => Doc::Call("gammaq", Box::new(rec(arg))),
    }
}

fn paren(s: String, needed: bool) -> String {
    if needed {
        format!("({s})")
    } else {
        s
    }
}

fn render(d: &Doc, ctx: u8) -> String {
    match d {
        Doc::Atom(s) => s.clone(),
        Doc::Num(c) => paren(c.to_string(), c.is_negative() && ctx >= FACTOR),
        Doc::Call(name, arg) => format!("{name}({})", render(arg, SUM)),
        Doc::Sum(terms) => {
            let mut out = render(&terms[0], TERM);
            for t in &terms[1..] {
                match t {
                    Doc::Num(c) if c.is_negative() => out += &format!(" - {}", -c),
                    Doc::Scaled(c, inner) if c.is_negative() => {
                        out += &format!(" - {}", render(&scaled(-c, (**inner).clone()), TERM))
                    }
                    _ => out += &format!(" + {}", render(t, TERM)),
                }
            }
            paren(out, ctx > SUM)
        }
        Doc::Scaled(c, inner) => {
            let body = match **inner {
                Doc::Prod(_) => render(inner, TERM),
                _ => render(inner, FACTOR),
            };
            let s = if *c == Rational::from(-1) { format!("-{body}") } else { format!("{c}*{body}") };
            paren(s, ctx > TERM)
        }
        Doc::Prod(factors) => {
            let s = factors.iter().map(|f| render(f, FACTOR)).collect::<Vec<_>>().join("*");
            paren(s, ctx > TERM)
        }
        Doc::Pow(base, k) => paren(format!("{}^{k}", render(base, ATOM)), ctx >= ATOM),
    }
}

/// Canonical text of an operator. `q` and `δ` are not part of the text.
pub fn print_op(e: &OpExpr) -> String {
    render(&of_op(e), SUM)
}

/// `poly(...)` in monomials.
pub fn print_poly(p: &Poly) -> String {
    format!("poly({})", p.to_monomial())
}
