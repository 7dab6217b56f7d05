mod output;
mod verify;

use std::process::ExitCode;

use ccrmap::dsl::{self, DslError, Params};
use ccrmap::hahn::{self, HahnError, HahnParams, Variant};
use ccrmap::maps::{DeformMap, MapError, MapSpec};
use ccrmap::opcore::{apply, LinOp, OpError};
use ccrmap::{Rational, Truncation};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "ccrmap", version, about = "Exact calculus of CCR-preserving deformation maps")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Deformation parameter q, as an integer or p/q
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<Rational>,
    /// Lattice spacing delta, as an integer or p/q [verify and hahn use 1 when absent]
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<Rational>,
    /// Truncation degree D
    #[arg(long, global = true, default_value_t = 16)]
    degree: usize,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply an operator expression to a polynomial
    Apply {
        /// Operator, e.g. "Dq*x - 1/2*x*Dq"
        expr: String,
        /// Polynomial, e.g. "poly(x^3)"
        poly: String,
    },
    /// Matrix of an operator on polynomials of degree <= D
    Realize { expr: String },
    /// Run a suite of exact identity checks
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
    },
    /// Adapted basis |0>, ..., |n> of a map
    Basis {
        /// Map name; compose with dots, e.g. phi_q.phi_delta
        map: String,
        /// Largest index n [default: D]
        #[arg(long)]
        n: Option<usize>,
    },
    /// b-projection of a polynomial under a map
    Project { map: String, poly: String },
    /// Eigenvalue and eigenpolynomial table of a Hahn operator
    Hahn {
        #[arg(value_enum)]
        variant: VariantArg,
        #[command(flatten)]
        params: HahnArgs,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
    },
    /// Closed-form spectrum of a Hahn operator against its realized diagonal
    Spectrum {
        #[arg(value_enum)]
        variant: VariantArg,
        #[command(flatten)]
        params: HahnArgs,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct HahnArgs {
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    alpha: Rational,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    beta: Rational,
    #[arg(long = "N", default_value = "5", allow_hyphen_values = true)]
    n: Rational,
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    c1: Rational,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum VariantArg {
    ThreePoint,
    Abstract,
    Continuous,
    QDeformed,
    QSpectrum,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::ThreePoint => Variant::ThreePoint,
            VariantArg::Abstract => Variant::Abstract,
            VariantArg::Continuous => Variant::Continuous,
            VariantArg::QDeformed => Variant::QDeformed,
            VariantArg::QSpectrum => Variant::QSpectrum,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error at {0}")]
    Parse(#[from] DslError),
    #[error("{0}")]
    Math(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Math(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl From<OpError> for CliError {
    fn from(e: OpError) -> Self {
        CliError::Math(e.to_string())
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Qnum(q) => CliError::Usage(q.to_string()),
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<HahnError> for CliError {
    fn from(e: HahnError) -> Self {
        match e {
            HahnError::MissingQ(_) | HahnError::ZeroDelta | HahnError::KmaxTooLarge { .. } | HahnError::Qnum(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Math(other.to_string()),
        }
    }
}

impl Global {
    fn truncation(&self) -> Truncation {
        Truncation::new(self.degree)
    }

    fn params(&self) -> Params {
        Params::new(self.q.clone(), self.delta.clone())
    }

    fn q(&self, what: &str) -> Result<&Rational, CliError> {
        self.q.as_ref().ok_or_else(|| CliError::Usage(format!("{what} needs --q")))
    }

    fn delta_or_one(&self) -> Rational {
        self.delta.clone().unwrap_or_else(Rational::one)
    }
}

/// `phi_q.phi_delta` is `phi_q ∘ phi_delta`.
fn parse_map(name: &str, g: &Global) -> Result<MapSpec, CliError> {
    let parts = name
        .split('.')
        .map(|part| {
            Ok(match part.trim() {
                "identity" => MapSpec::Identity,
                "phi_q" => MapSpec::phi_q(g.q("phi_q")?.clone()),
                "phi_q_prime" => MapSpec::phi_q_prime(g.q("phi_q_prime")?.clone()),
                "phi_delta" => MapSpec::phi_delta(g.delta_or_one()),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown map `{other}` (expected identity, phi_q, phi_delta or phi_q_prime)"
                    )))
                }
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut iter = parts.into_iter().rev();
    let first = iter.next().expect("split yields at least one part");
    Ok(iter.fold(first, |inner, outer| MapSpec::compose(outer, inner)))
}

fn run(cli: Cli) -> Result<String, CliError> {
    let g = &cli.global;
    let d = g.truncation();
    match cli.command {
        Command::Apply { expr, poly } => {
            let e = dsl::parse_op(&expr, &g.params())?;
            let p = dsl::parse_poly(&poly)?;
            let out = apply(&e, &p, d)?;
            output::poly(&out, g.format)
        }
        Command::Realize { expr } => {
            let e = dsl::parse_op(&expr, &g.params())?;
            let op = LinOp::realize(&e, d)?;
            output::linop(&op, g.format)
        }
        Command::Verify { suite } => {
            let report = verify::run(suite, g)?;
            let text = output::report(&report, g.format)?;
            if report.iter().all(|c| c.pass) {
                Ok(text)
            } else {
                print!("{text}");
                Err(CliError::Math(format!(
                    "{} of {} checks failed",
                    report.iter().filter(|c| !c.pass).count(),
                    report.len()
                )))
            }
        }
        Command::Basis { map, n } => {
            let m = DeformMap::new(parse_map(&map, g)?)?;
            let n = n.unwrap_or(g.degree);
            let kets = (0..=n).map(|k| m.adapted_basis(k, d)).collect::<Result<Vec<_>, _>>()?;
            output::kets(&kets, g.format)
        }
        Command::Project { map, poly } => {
            let m = DeformMap::new(parse_map(&map, g)?)?;
            let p = dsl::parse_poly(&poly)?;
            output::poly(&m.b_projection(&p, d)?.poly, g.format)
        }
        Command::Hahn { variant, params, kmax } => {
            let variant = Variant::from(variant);
            let hp = hahn_params(&params, g);
            let table = hahn::table(variant, &hp, g.q.as_ref(), kmax, d)?;
            let text = output::hahn_table(&table, g.format)?;
            if table.rows.iter().all(|r| r.residual.is_zero()) {
                Ok(text)
            } else {
                print!("{text}");
                Err(CliError::Math("nonzero residual".into()))
            }
        }
        Command::Spectrum { variant, params, kmax } => {
            let variant = Variant::from(variant);
            let hp = hahn_params(&params, g);
            let report = hahn::isospectral_check(std::slice::from_ref(&hp), g.q.as_slice(), kmax, d)?;
            let entries: Vec<_> = report.entries.into_iter().filter(|e| e.variant == variant).collect();
            if entries.is_empty() {
                return Err(CliError::Usage(format!("variant {variant} needs --q")));
            }
            let text = output::spectrum(&entries, g.format)?;
            if entries.iter().all(|e| e.ok()) {
                Ok(text)
            } else {
                print!("{text}");
                Err(CliError::Math("realized diagonal differs from the closed form".into()))
            }
        }
    }
}

fn hahn_params(a: &HahnArgs, g: &Global) -> HahnParams {
    HahnParams::new(a.alpha.clone(), a.beta.clone(), a.n.clone()).with_delta(g.delta_or_one()).with_c1(a.c1.clone())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(q) = &cli.global.q {
        match ccrmap::QContext::new(q.clone(), cli.global.degree + 2) {
            Ok(ctx) => {
                if let Some(w) = ctx.warning() {
                    eprintln!("warning: {w}");
                }
            }
            Err(e) => {
                eprintln!("error: invalid --q: {e}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
