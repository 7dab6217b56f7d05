use super::lexer::{tokenize, Tok};
use super::{DslError, Pos};
use crate::rational::Rational;

const MAX_DEPTH: usize = 200;
pub(crate) const MAX_EXPONENT: u32 = 1024;

/// Parse tree, before identifiers and parameters are bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceExpr {
    Num(Rational, Pos),
    Ident(String, Pos),
    Call(String, Box<SourceExpr>, Pos),
    Neg(Box<SourceExpr>, Pos),
    /// Terms with their signs; `false` marks a subtracted term.
    Sum(Vec<(bool, SourceExpr)>),
    /// Noncommutative product; the leftmost factor acts last.
    Product(Vec<SourceExpr>),
    Pow(Box<SourceExpr>, u32, Pos),
}

impl SourceExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SourceExpr::Num(_, p)
            | SourceExpr::Ident(_, p)
            | SourceExpr::Call(_, _, p)
            | SourceExpr::Neg(_, p)
            | SourceExpr::Pow(_, _, p) => *p,
            SourceExpr::Sum(terms) => terms[0].1.pos(),
            SourceExpr::Product(factors) => factors[0].pos(),
        }
    }
}

/// ```text
/// expr   = term { ("+" | "-") term } ;
/// term   = [ "-" ] factor { "*" factor } ;
/// factor = "-" factor | power ;
/// power  = atom [ "^" natural ] ;
/// atom   = number | ident | ident "(" expr ")" | "(" expr ")" ;
/// number = digits [ "/" digits ] ;
/// ```
pub fn parse_source(src: &str) -> Result<SourceExpr, DslError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, i: 0, depth: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        other => Err(DslError::new(p.pos(), format!("unexpected {}", other.describe()))),
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn enter(&mut self) -> Result<(), DslError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(DslError::new(self.pos(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<SourceExpr, DslError> {
        self.enter()?;
        let mut terms = vec![(true, self.term()?)];
        loop {
            let sign = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            self.bump();
            terms.push((sign, self.term()?));
        }
        self.depth -= 1;
        Ok(if terms.len() == 1 && terms[0].0 { terms.pop().unwrap().1 } else { SourceExpr::Sum(terms) })
    }

    fn term(&mut self) -> Result<SourceExpr, DslError> {
        if *self.peek() == Tok::Minus {
            let (_, pos) = self.bump();
            let inner = self.product()?;
            return Ok(SourceExpr::Neg(Box::new(inner), pos));
        }
        self.product()
    }

    fn product(&mut self) -> Result<SourceExpr, DslError> {
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { SourceExpr::Product(factors) })
    }

    fn factor(&mut self) -> Result<SourceExpr, DslError> {
        if *self.peek() == Tok::Minus {
            self.enter()?;
            let (_, pos) = self.bump();
            let inner = self.factor()?;
            self.depth -= 1;
            return Ok(SourceExpr::Neg(Box::new(inner), pos));
        }
        self.power()
    }

    fn power(&mut self) -> Result<SourceExpr, DslError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let (_, caret) = self.bump();
        let (tok, pos) = self.bump();
        let k = match tok {
            Tok::Num(r) if r.is_integer() && !r.is_negative() => r
                .to_i64()
                .and_then(|k| u32::try_from(k).ok())
                .filter(|&k| k <= MAX_EXPONENT)
                .ok_or_else(|| DslError::new(pos, format!("exponent larger than {MAX_EXPONENT}")))?,
            other => {
                return Err(DslError::new(
                    pos,
                    format!("expected a natural-number exponent, found {}", other.describe()),
                ))
            }
        };
        if *self.peek() == Tok::Caret {
            return Err(DslError::new(self.pos(), "chained `^` is ambiguous; use parentheses"));
        }
        Ok(SourceExpr::Pow(Box::new(base), k, caret))
    }

    fn atom(&mut self) -> Result<SourceExpr, DslError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(r) => Ok(SourceExpr::Num(r, pos)),
            Tok::Ident(name) => {
                if *self.peek() != Tok::LParen {
                    return Ok(SourceExpr::Ident(name, pos));
                }
                self.bump();
                let arg = self.expr()?;
                self.expect_close(pos)?;
                Ok(SourceExpr::Call(name, Box::new(arg), pos))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_close(pos)?;
                Ok(e)
            }
            other => Err(DslError::new(pos, format!("expected an operand, found {}", other.describe()))),
        }
    }

    fn expect_close(&mut self, open: Pos) -> Result<(), DslError> {
        match self.bump() {
            (Tok::RParen, _) => Ok(()),
            (other, pos) => Err(DslError::new(
                pos,
                format!("expected `)` to close `(` at {}:{}, found {}", open.line, open.col, other.describe()),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(line: usize, col: usize) -> Pos {
        Pos { line, col }
    }

    #[test]
    fn precedence() {
        // x + d*x^2 groups as x + (d*(x^2))
        let e = parse_source("x + d*x^2").unwrap();
        let SourceExpr::Sum(terms) = e else { panic!() };
        assert_eq!(terms.len(), 2);
        let SourceExpr::Product(f) = &terms[1].1 else { panic!() };
        assert!(matches!(f[1], SourceExpr::Pow(_, 2, _)));
    }

    #[test]
    fn subtraction_is_left_associative() {
        let e = parse_source("x - d - x").unwrap();
        let SourceExpr::Sum(terms) = e else { panic!() };
        let signs: Vec<bool> = terms.iter().map(|t| t.0).collect();
        assert_eq!(signs, vec![true, false, false]);
    }

    #[test]
    fn leading_minus_covers_the_product() {
        let e = parse_source("-x*d").unwrap();
        assert!(matches!(e, SourceExpr::Neg(ref inner, _) if matches!(**inner, SourceExpr::Product(_))));
    }

    #[test]
    fn errors_are_located() {
        assert_eq!(parse_source("x +").unwrap_err().to_string(), "1:4: expected an operand, found end of input");
        assert_eq!(
            parse_source("qb(B").unwrap_err().to_string(),
            "1:5: expected `)` to close `(` at 1:1, found end of input"
        );
        assert_eq!(parse_source("x d").unwrap_err().to_string(), "1:3: unexpected identifier `d`");
        assert_eq!(parse_source("x^y").unwrap_err().pos, p(1, 3));
        assert!(parse_source("x^2^3").is_err());
        assert!(parse_source("x^100000").is_err());
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!("{}x{}", "(".repeat(10_000), ")".repeat(10_000));
        assert!(parse_source(&src).unwrap_err().message.contains("nested"));
        let src = "-".repeat(10_000) + "x";
        assert!(parse_source(&src).is_err());
    }
}
