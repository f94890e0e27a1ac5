//! Command-line surface of the `qmzv` binary.
//!
//! [`dispatch`] turns a parsed [`Cli`] into rendered output plus an overall
//! pass flag; `main` only maps the result onto an exit status and sink.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::generators::{named_qmzv, numeric_nested_sum_with, Family, Precision};
use crate::identities::{
    classical_limit_check, run_table, verify_identity, IdentityId, LimitTolerances, ParamKind,
};
use crate::qseries::Rational;
use crate::report::{IdentityReport, LimitReport, Params};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qmzv", version, about = "Exact q-analogs of multiple zeta values")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value = "plain", global = true)]
    pub format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients c_0..c_N of a named q-MZV.
    Series {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<u32>,
        #[arg(long)]
        order: usize,
    },
    /// Check one identity instance coefficient by coefficient.
    Verify {
        #[arg(long, value_parser = parse_identity)]
        identity: IdentityId,
        #[arg(long)]
        a: Option<u32>,
        #[arg(long)]
        b: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<u32>>,
        #[arg(long, default_value_t = 50)]
        order: usize,
    },
    /// Run every identity over 2 <= a <= b <= max and all small compositions.
    Table {
        #[arg(long = "max-weight", alias = "max", default_value_t = 7)]
        max_weight: u32,
        #[arg(long, default_value_t = 50)]
        order: usize,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Partial sum over m_1 <= cutoff at a rational q, as an exact fraction.
    Eval {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<u32>,
        #[arg(long, value_parser = parse_rational)]
        q: Rational,
        #[arg(long)]
        cutoff: usize,
        /// Round every partial sum to a multiple of 2^-bits.
        #[arg(long)]
        bits: Option<u32>,
    },
    /// Numeric q -> 1 comparison of z̄(a)z̄(b) with the classical Euler decomposition.
    LimitCheck {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long, value_parser = parse_rational, default_value = "99/100")]
        q: Rational,
        #[arg(long, default_value_t = 5000)]
        cutoff: usize,
        #[arg(long = "q-tolerance", value_parser = parse_rational, default_value = "1/100")]
        q_tolerance: Rational,
        #[arg(long = "classical-tolerance", value_parser = parse_rational, default_value = "1/100000")]
        classical_tolerance: Rational,
    },
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn parse_identity(s: &str) -> std::result::Result<IdentityId, String> {
    s.parse::<IdentityId>().map_err(|e| e.to_string())
}

/// Fraction strings only: `"99/100"` or `"3"`; decimals are rejected.
fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| format!("expected a fraction like 99/100, got `{s}`"))
}

/// Rendered output and whether every report in it passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub all_passed: bool,
}

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    let fmt = cli.format;
    match &cli.command {
        Command::Series { family, indices, order } => {
            let s = named_qmzv(*family, indices, *order)?;
            Ok(Outcome {
                output: render_series(fmt, *family, indices, *order, s.coeffs()),
                all_passed: true,
            })
        }
        Command::Verify { identity, a, b, n, indices, order } => {
            let params = verify_params(*identity, *a, *b, *n, indices.as_deref())?;
            let report = verify_identity(*identity, &params, *order)?;
            let all_passed = report.passed();
            Ok(Outcome {
                output: render_reports(fmt, std::slice::from_ref(&report), false),
                all_passed,
            })
        }
        Command::Table { max_weight, order, jobs } => {
            if *max_weight < 2 {
                return Err(Error::domain(format!("--max-weight must be at least 2, got {max_weight}")));
            }
            let jobs = jobs.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, std::num::NonZeroUsize::get)
            });
            let reports = run_table(*max_weight, *order, jobs)?;
            let all_passed = reports.iter().all(IdentityReport::passed);
            Ok(Outcome {
                output: render_reports(fmt, &reports, true),
                all_passed,
            })
        }
        Command::Eval { family, indices, q, cutoff, bits } => {
            let precision = bits.map_or(Precision::Exact, Precision::Dyadic);
            let value = numeric_nested_sum_with(*family, indices, q, *cutoff, precision)?;
            Ok(Outcome {
                output: render_eval(fmt, *family, indices, q, *cutoff, &value),
                all_passed: true,
            })
        }
        Command::LimitCheck { a, b, q, cutoff, q_tolerance, classical_tolerance } => {
            let tolerances = LimitTolerances {
                q_side: q_tolerance.clone(),
                classical: classical_tolerance.clone(),
            };
            let report = classical_limit_check(*a, *b, q, *cutoff, &tolerances)?;
            Ok(Outcome {
                all_passed: report.passed(),
                output: render_limit(fmt, &report),
            })
        }
    }
}

fn verify_params(
    id: IdentityId,
    a: Option<u32>,
    b: Option<u32>,
    n: Option<u32>,
    indices: Option<&[u32]>,
) -> Result<Params> {
    match id.param_kind() {
        ParamKind::Pair => match (a, b) {
            (Some(a), Some(b)) => Ok(Params::Pair { a, b }),
            _ => Err(Error::usage(format!("identity {id} needs --a and --b"))),
        },
        ParamKind::Single => n
            .or(a)
            .map(|n| Params::Single { n })
            .ok_or_else(|| Error::usage(format!("identity {id} needs --n"))),
        ParamKind::Composition => indices
            .map(|i| Params::Composition { indices: i.to_vec() })
            .ok_or_else(|| Error::usage(format!("identity {id} needs --indices"))),
        ParamKind::Fixed => Ok(Params::Fixed {}),
    }
}

fn join(xs: &[u32], sep: &str) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

fn render_series(fmt: Format, family: Family, indices: &[u32], order: usize, coeffs: &[Rational]) -> String {
    match fmt {
        Format::Plain => {
            let mut out = format!("{}({}) to order {order}\n", family.as_str(), join(indices, ","));
            for (n, c) in coeffs.iter().enumerate() {
                let _ = writeln!(out, "{n}\t{c}");
            }
            out
        }
        Format::Json => {
            let coeffs: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
            let v = json!({
                "family": family.as_str(),
                "indices": indices,
                "order": order,
                "coeffs": coeffs,
            });
            format!("{v}\n")
        }
        Format::Csv => {
            let mut out = String::from("n,coeff\n");
            for (n, c) in coeffs.iter().enumerate() {
                let _ = writeln!(out, "{n},{c}");
            }
            out
        }
    }
}

fn csv_params(p: &Params) -> String {
    match p {
        Params::Pair { a, b } => format!("a={a};b={b}"),
        Params::Single { n } => format!("n={n}"),
        Params::Composition { indices } => format!("indices={}", join(indices, ";")),
        Params::Fixed {} => String::new(),
    }
}

/// Tables render as a JSON array with one report per line; a single report
/// renders as one bare object.
fn render_reports(fmt: Format, reports: &[IdentityReport], as_table: bool) -> String {
    match fmt {
        Format::Plain => reports.iter().map(|r| format!("{r}\n")).collect(),
        Format::Json if !as_table => reports
            .iter()
            .map(|r| format!("{}\n", serde_json::to_string(r).expect("report serialises")))
            .collect(),
        Format::Json => {
            let rows: Vec<String> = reports
                .iter()
                .map(|r| serde_json::to_string(r).expect("report serialises"))
                .collect();
            if rows.is_empty() {
                "[]\n".to_string()
            } else {
                format!("[\n{}\n]\n", rows.join(",\n"))
            }
        }
        Format::Csv => {
            let mut out = String::from("identity,params,order,status,degree,lhs,rhs\n");
            for r in reports {
                let (d, l, rr) = match &r.first_mismatch {
                    Some(m) => (m.degree.to_string(), m.lhs.to_string(), m.rhs.to_string()),
                    None => Default::default(),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{d},{l},{rr}",
                    r.identity,
                    csv_params(&r.params),
                    r.order,
                    r.status
                );
            }
            out
        }
    }
}

fn render_eval(
    fmt: Format,
    family: Family,
    indices: &[u32],
    q: &Rational,
    cutoff: usize,
    value: &Rational,
) -> String {
    match fmt {
        Format::Plain => format!("{value}\n"),
        Format::Json => {
            let v = json!({
                "family": family.as_str(),
                "indices": indices,
                "q": q.to_string(),
                "cutoff": cutoff,
                "value": value.to_string(),
            });
            format!("{v}\n")
        }
        Format::Csv => format!(
            "family,indices,q,cutoff,value\n{},{},{q},{cutoff},{value}\n",
            family.as_str(),
            join(indices, ";")
        ),
    }
}

fn render_limit(fmt: Format, r: &LimitReport) -> String {
    use crate::report::approx;
    match fmt {
        Format::Plain => format!("{r}\n"),
        Format::Json => format!("{}\n", serde_json::to_string(r).expect("report serialises")),
        Format::Csv => format!(
            "identity,a,b,q,cutoff,q_gap,q_tolerance,q_status,classical_gap,classical_tolerance,classical_status,status\n\
             {},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.identity,
            r.a,
            r.b,
            r.q,
            r.cutoff,
            approx(&r.q_gap),
            r.q_tolerance,
            r.q_status,
            approx(&r.classical_gap),
            r.classical_tolerance,
            r.classical_status,
            r.status
        ),
    }
}
