use super::parser::SourceExpr;
use super::{DslError, Params, Parsed, Pos};
use crate::opcore::{Eigenbasis, OpExpr, Spectral};
use crate::poly::Poly;
use crate::rational::Rational;

pub(crate) fn bind(src: &SourceExpr, params: &Params) -> Result<Parsed, DslError> {
    match src {
        SourceExpr::Call(name, arg, _) if name == "poly" => Ok(Parsed::Poly(bind_poly(arg)?)),
        other => Ok(Parsed::Op(Binder { params }.op(other)?)),
    }
}

pub(crate) fn bind_poly(src: &SourceExpr) -> Result<Poly, DslError> {
    Ok(match src {
        SourceExpr::Num(c, _) => Poly::constant(c.clone()),
        SourceExpr::Ident(name, _) if name == "x" => Poly::x_pow(1),
        SourceExpr::Ident(name, pos) | SourceExpr::Call(name, _, pos) => {
            return Err(DslError::new(*pos, format!("only `x` and numbers may appear in a polynomial, found `{name}`")))
        }
        SourceExpr::Neg(inner, _) => bind_poly(inner)?.neg(),
        SourceExpr::Sum(terms) => {
            let mut acc = Poly::zero();
            for (sign, t) in terms {
                let p = bind_poly(t)?;
                acc = if *sign { acc.try_add(&p) } else { acc.try_sub(&p) }.expect("monomial basis");
            }
            acc
        }
        SourceExpr::Product(factors) => {
            let mut acc = Poly::one();
            for f in factors {
                acc = acc.try_mul(&bind_poly(f)?).expect("monomial basis");
            }
            acc
        }
        SourceExpr::Pow(base, k, _) => {
            let b = bind_poly(base)?;
            let mut acc = Poly::one();
            for _ in 0..*k {
                acc = acc.try_mul(&b).expect("monomial basis");
            }
            acc
        }
    })
}

struct Binder<'a> {
    params: &'a Params,
}

impl Binder<'_> {
    fn q(&self, name: &str, pos: Pos) -> Result<&Rational, DslError> {
        self.params.q.as_ref().ok_or_else(|| DslError::new(pos, format!("`{name}` needs a value for q")))
    }

    fn delta(&self, name: &str, pos: Pos) -> Result<&Rational, DslError> {
        self.params.delta.as_ref().ok_or_else(|| DslError::new(pos, format!("`{name}` needs a value for delta")))
    }

    fn op(&self, src: &SourceExpr) -> Result<OpExpr, DslError> {
        Ok(match src {
            SourceExpr::Num(c, _) => OpExpr::Scalar(c.clone()),
            SourceExpr::Ident(name, pos) => self.atom(name, *pos)?,
            SourceExpr::Call(name, arg, pos) => self.call(name, arg, *pos)?,
            SourceExpr::Neg(inner, _) => OpExpr::scaled(Rational::from(-1), self.op(inner)?),
            SourceExpr::Sum(terms) => OpExpr::sum(
                terms
                    .iter()
                    .map(|(sign, t)| {
                        let e = self.op(t)?;
                        Ok(if *sign { e } else { OpExpr::scaled(Rational::from(-1), e) })
                    })
                    .collect::<Result<_, DslError>>()?,
            ),
            SourceExpr::Product(factors) => {
                let bound = factors.iter().map(|f| self.op(f)).collect::<Result<Vec<_>, _>>()?;
                match (&factors[0], bound.split_first()) {
                    (SourceExpr::Num(c, _), Some((_, rest))) => {
                        OpExpr::scaled(c.clone(), OpExpr::product(rest.to_vec()))
                    }
                    _ => OpExpr::product(bound),
                }
            }
            SourceExpr::Pow(base, k, _) => self.op(base)?.pow(*k),
        })
    }

    fn atom(&self, name: &str, pos: Pos) -> Result<OpExpr, DslError> {
        Ok(match name {
            "x" => OpExpr::x(),
            "d" => OpExpr::d(),
            "A" => OpExpr::degree_op(),
            "B" => OpExpr::b_op(),
            "Dq" => OpExpr::jackson_d(self.q(name, pos)?),
            "xq" => OpExpr::jackson_x(self.q(name, pos)?),
            "S" => OpExpr::jackson_s(self.q(name, pos)?),
            "Mq" => OpExpr::quantum_average(self.q(name, pos)?),
            "U" => OpExpr::similarity_u(self.q(name, pos)?),
            "Ddelta" => OpExpr::delta_d(self.delta(name, pos)?),
            "xdelta" => OpExpr::delta_x(self.delta(name, pos)?),
            "Adelta" => OpExpr::diag_in(Spectral::Index, Eigenbasis::Falling(self.delta(name, pos)?.clone())),
            "Bdelta" => OpExpr::diag_in(Spectral::shifted(1), Eigenbasis::Falling(self.delta(name, pos)?.clone())),
            _ => return Err(DslError::new(pos, format!("unknown identifier `{name}`"))),
        })
    }

    fn call(&self, name: &str, arg: &SourceExpr, pos: Pos) -> Result<OpExpr, DslError> {
        let diag_fn = |wrap: fn(Rational, Spectral) -> Spectral| -> Result<OpExpr, DslError> {
            let q = self.q(name, pos)?.clone();
            let inner = self.op(arg)?;
            let d = inner.as_diag().ok_or_else(|| {
                DslError::new(arg.pos(), format!("`{name}` needs a diagonal argument (a function of A)"))
            })?;
            Ok(OpExpr::diag_in(wrap(q, d.spectral), d.basis))
        };
        match name {
            "qb" => diag_fn(Spectral::dbracket),
            "qn" => diag_fn(Spectral::qnum),
            "gammaq" => diag_fn(Spectral::gamma_ratio),
            "inv" => self
                .op(arg)?
                .inv()
                .map_err(|_| DslError::new(arg.pos(), "`inv` needs a diagonal argument (a function of A)")),
            "exp" => Ok(self.op(arg)?.exp()),
            "poly" => Err(DslError::new(pos, "`poly(...)` must be the whole expression")),
            _ => Err(DslError::new(pos, format!("unknown function `{name}`"))),
        }
    }
}
