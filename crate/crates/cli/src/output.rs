use std::fmt::Write as _;

use ccrmap::hahn::{HahnTable, SpectrumEntry};
use ccrmap::{LinOp, Poly, Rational};
use clap::ValueEnum;
use serde::Serialize;

use crate::verify::Check;
use crate::CliError;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| CliError::Output(e.to_string()))
}

fn csv_rows<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Output(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

fn join(coeffs: &[Rational]) -> String {
    coeffs.iter().map(Rational::to_string).collect::<Vec<_>>().join(" ")
}

pub fn poly(p: &Poly, f: Format) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row {
        degree: usize,
        coeff: Rational,
    }
    match f {
        Format::Text => Ok(format!("{p}\n")),
        Format::Json => json(p),
        Format::Csv => csv_rows(p.coeffs().iter().enumerate().map(|(degree, c)| Row { degree, coeff: c.clone() })),
    }
}

pub fn linop(op: &LinOp, f: Format) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row {
        column: usize,
        row: Option<usize>,
        value: String,
    }
    match f {
        Format::Text => {
            let (lo, hi) = op.band();
            let mut s = format!("D = {}, band = [{lo}, {hi}]\n", op.truncation().max_degree());
            for (n, col) in op.columns().iter().enumerate() {
                match col {
                    Some(p) => writeln!(s, "x^{n} -> {p}"),
                    None => writeln!(s, "x^{n} -> overflow"),
                }
                .expect("write to string");
            }
            Ok(s)
        }
        Format::Json => json(op),
        Format::Csv => {
            let mut rows = Vec::new();
            for (n, col) in op.columns().iter().enumerate() {
                match col {
                    Some(p) => {
                        rows.extend(p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(r, c)| Row {
                            column: n,
                            row: Some(r),
                            value: c.to_string(),
                        }))
                    }
                    None => rows.push(Row { column: n, row: None, value: "overflow".into() }),
                }
            }
            csv_rows(rows)
        }
    }
}

pub fn kets(kets: &[Poly], f: Format) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        coeffs: String,
        poly: String,
    }
    match f {
        Format::Text => Ok(kets.iter().enumerate().map(|(n, p)| format!("|{n}> = {p}\n")).collect()),
        Format::Json => json(kets),
        Format::Csv => {
            csv_rows(kets.iter().enumerate().map(|(n, p)| Row { n, coeffs: join(p.coeffs()), poly: p.to_string() }))
        }
    }
}

pub fn report(checks: &[Check], f: Format) -> Result<String, CliError> {
    match f {
        Format::Text => {
            let mut s = String::new();
            for c in checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                write!(s, "{status}  {}: {}  (D = {}, {})", c.suite, c.check, c.degree, c.window).expect("write");
                if let Some(d) = &c.detail {
                    write!(s, "  [{d}]").expect("write");
                }
                s.push('\n');
            }
            let passed = checks.iter().filter(|c| c.pass).count();
            writeln!(s, "{passed}/{} checks passed", checks.len()).expect("write");
            Ok(s)
        }
        Format::Json => json(checks),
        Format::Csv => csv_rows(checks),
    }
}

pub fn hahn_table(t: &HahnTable, f: Format) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row<'a> {
        variant: &'a str,
        k: usize,
        eigenvalue: &'a Rational,
        closed_form: &'a Rational,
        residual: String,
        basis: String,
        coeffs: String,
        monomial: String,
    }
    let basis_name = |b: &ccrmap::Basis| match b {
        ccrmap::Basis::Monomial => "monomial".to_string(),
        ccrmap::Basis::Falling { delta } => format!("falling({delta})"),
    };
    match f {
        Format::Text => {
            let p = &t.params;
            let mut s = format!(
                "variant {}: alpha = {}, beta = {}, N = {}, delta = {}, c1 = {}, c2 = {}, c3 = {}, c4 = {}",
                t.variant, p.alpha, p.beta, p.n, p.delta, p.c1, t.c2, t.c3, t.c4
            );
            if let Some(q) = &t.q {
                write!(s, ", q = {q}").expect("write");
            }
            writeln!(s, ", D = {}", t.max_degree).expect("write");
            writeln!(s, "k\teigenvalue\tclosed form\tresidual\teigenpolynomial").expect("write");
            for r in &t.rows {
                let natural = Poly::from_coeffs(r.basis.clone(), r.coeffs.clone());
                writeln!(s, "{}\t{}\t{}\t{}\t{}", r.k, r.eigenvalue, r.closed_form, r.residual, natural)
                    .expect("write");
            }
            Ok(s)
        }
        Format::Json => json(t),
        Format::Csv => csv_rows(t.rows.iter().map(|r| Row {
            variant: r.variant.name(),
            k: r.k,
            eigenvalue: &r.eigenvalue,
            closed_form: &r.closed_form,
            residual: r.residual.to_string(),
            basis: basis_name(&r.basis),
            coeffs: join(&r.coeffs),
            monomial: join(&r.monomial),
        })),
    }
}

pub fn spectrum(entries: &[SpectrumEntry], f: Format) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Row<'a> {
        variant: &'a str,
        k: usize,
        closed_form: &'a Rational,
        diagonal: Option<&'a Rational>,
        ok: bool,
    }
    match f {
        Format::Text => {
            let mut s = String::from("k\tclosed form\tdiagonal\tok\n");
            for e in entries {
                let found = e.found.as_ref().map_or("overflow".to_string(), Rational::to_string);
                writeln!(s, "{}\t{}\t{}\t{}", e.k, e.expected, found, if e.ok() { "yes" } else { "no" })
                    .expect("write");
            }
            Ok(s)
        }
        Format::Json => json(entries),
        Format::Csv => csv_rows(entries.iter().map(|e| Row {
            variant: e.variant.name(),
            k: e.k,
            closed_form: &e.expected,
            diagonal: e.found.as_ref(),
            ok: e.ok(),
        })),
    }
}
