use num_bigint::BigInt;

use super::{DslError, Pos};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Num(r) => format!("number `{r}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1, 1);
    let digits = |i: &mut usize, col: &mut usize| {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
            *col += 1;
        }
        chars[start..*i].iter().collect::<String>()
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let numer: BigInt = digits(&mut i, &mut col).parse().expect("ascii digits");
            let mut value = Rational::from(numer);
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                col += 1;
                let denom_pos = Pos { line, col };
                let denom: BigInt = digits(&mut i, &mut col).parse().expect("ascii digits");
                value = value
                    .checked_div(&Rational::from(denom))
                    .ok_or_else(|| DslError::new(denom_pos, "zero denominator in rational literal"))?;
            }
            out.push((Tok::Num(value), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
                col += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        return Err(DslError::new(pos, format!("unexpected character `{c}`")));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals_and_positions() {
        let toks = tokenize("1/2*x\n  - Dq").unwrap();
        assert_eq!(toks[0], (Tok::Num(Rational::new(1, 2)), Pos { line: 1, col: 1 }));
        assert_eq!(toks[1].0, Tok::Star);
        assert_eq!(toks[3], (Tok::Minus, Pos { line: 2, col: 3 }));
        assert_eq!(toks[4], (Tok::Ident("Dq".into()), Pos { line: 2, col: 5 }));
    }

    #[test]
    fn slash_without_digits_is_an_error() {
        let err = tokenize("x/y").unwrap_err();
        assert_eq!(err.to_string(), "1:2: unexpected character `/`");
        assert_eq!(tokenize("3/0").unwrap_err().to_string(), "1:3: zero denominator in rational literal");
    }
}
