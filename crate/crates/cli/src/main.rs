use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bellmoment::bell::{addition_check, aczel_form, bell_via_gf, complete_bell, mv_bell, rank1_to_indexed, BellPoly};
use bellmoment::moment::{
    collapse_rank2, collapse_tables, construct, normalize, normalize_tables, project_seq, project_tables,
    reconstruct, verify_multivariable, verify_rank, MomentSpec, Status, TabulatedSequence, VerifyConfig,
};
use bellmoment::{Error, MultiIndex};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bellmoment", version, about = "Exact Bell polynomials and moment sequences on Z^d")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Subcommand)]
enum Command {
    /// Complete Bell polynomial B_n.
    Bell { n: u32 },
    /// Multivariate Bell polynomial B_α, e.g. `mbell 1,1`.
    Mbell {
        #[arg(value_delimiter = ',', required = true)]
        alpha: Vec<u32>,
        /// Compare against the generating-function route.
        #[arg(long)]
        check_gf: bool,
        /// Compare against the partition form (rank 1 only).
        #[arg(long)]
        check_aczel: bool,
        /// Check the addition formula symbolically.
        #[arg(long)]
        check_addition: bool,
    },
    /// Build the moment sequence of a spec file.
    Construct {
        spec: PathBuf,
        /// Tabulate every member on the box of this radius.
        #[arg(long)]
        tabulate: Option<i64>,
        /// Where to write the tabulation (stdout otherwise).
        #[arg(long, requires = "tabulate")]
        out: Option<PathBuf>,
    },
    /// Check the functional equations on a tables file.
    Verify {
        tables: PathBuf,
        /// Check the l-variable equation instead (rank 1 only).
        #[arg(long)]
        l: Option<usize>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Recover the exponential and additive functions from a tables file.
    Reconstruct { tables: PathBuf },
    /// Collapse a rank-2 sequence to rank 1.
    Collapse {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Keep only the listed coordinates (1-based) of each index.
    Project {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Divide every member by the generating exponential.
    Normalize {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct Sampling {
    /// Pairs or tuples drawn when the box is too large to check exhaustively.
    #[arg(long, env = "BELLMOMENT_BUDGET", default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    /// Exit 1: the input is not a moment sequence.
    Rejected(String),
    /// Exit 2: bad input file or arguments.
    Usage(String),
    /// Exit 3: a bug.
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Internal(e.to_string()),
            Error::NotMomentSequence { .. } => Failure::Rejected(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

enum Input {
    Spec(MomentSpec),
    Tables(TabulatedSequence),
}

fn read_input(path: &Path) -> Result<Input, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let located = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let value: Value = serde_json::from_str(&text).map_err(located)?;
    // reparse from text so errors carry line and column
    if value.get("members").is_some() {
        Ok(Input::Tables(serde_json::from_str(&text).map_err(located)?))
    } else {
        Ok(Input::Spec(serde_json::from_str(&text).map_err(located)?))
    }
}

fn read_tables(path: &Path) -> Result<TabulatedSequence, Failure> {
    match read_input(path)? {
        Input::Tables(t) => Ok(t),
        Input::Spec(_) => Err(Failure::Usage(format!(
            "{}: expected a tables file, found a spec",
            path.display()
        ))),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Internal(e.to_string()))
}

fn print_bell(b: &BellPoly, format: Format) {
    match format {
        Format::Text => println!("{}", b.value),
        Format::Latex => println!("{}", b.to_latex_row()),
        Format::Json => println!(
            "{}",
            json!({
                "alpha": b.index.entries(),
                "polynomial": b.value.to_string(),
                "latex": b.to_latex_row(),
            })
        ),
    }
}

fn check_line(format: Format, name: &str, ok: bool) {
    let verdict = if ok { "agree" } else { "DISAGREE" };
    match format {
        Format::Json => println!("{}", json!({ "check": name, "ok": ok })),
        _ => println!("{name}: {verdict}"),
    }
}

fn run(cli: Cli) -> Outcome {
    let format = cli.format;
    match cli.command {
        Command::Bell { n } => {
            print_bell(&complete_bell(n), format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Mbell {
            alpha,
            check_gf,
            check_aczel,
            check_addition,
        } => {
            let alpha = MultiIndex::new(alpha);
            let b = mv_bell(&alpha);
            print_bell(&b, format);
            let mut all = true;
            if check_gf {
                let gf = bell_via_gf(&alpha)?.value;
                let ok = rank1_to_indexed(&b.value) == gf;
                check_line(format, "generating function", ok);
                all &= ok;
            }
            if check_aczel {
                if alpha.rank() != 1 || alpha.height() == 0 {
                    return Err(Failure::Usage("--check-aczel needs a single positive index".into()));
                }
                let ac = aczel_form(alpha.height())?.value;
                let ok = rank1_to_indexed(&b.value) == ac;
                check_line(format, "partition form", ok);
                all &= ok;
            }
            if check_addition {
                let ok = addition_check(&alpha)?;
                check_line(format, "addition formula", ok);
                all &= ok;
            }
            if all {
                Ok(ExitCode::SUCCESS)
            } else {
                Err(Failure::Internal("Bell polynomial routes disagree".into()))
            }
        }
        Command::Construct { spec, tabulate, out } => {
            let spec = match read_input(&spec)? {
                Input::Spec(s) => s,
                Input::Tables(_) => return Err(Failure::Usage("construct expects a spec file".into())),
            };
            let seq = construct(&spec)?;
            if let Some(radius) = tabulate {
                let tables = seq.tabulate(radius)?;
                emit(out.as_deref(), &to_json(&tables)?)?;
                if out.is_none() {
                    return Ok(ExitCode::SUCCESS);
                }
            }
            match format {
                Format::Text => println!("{seq}"),
                Format::Latex => {
                    for (alpha, f) in seq.family().members() {
                        let subscript: Vec<String> = alpha.entries().iter().map(u32::to_string).collect();
                        println!("f_{{{}}}(x)=\\left({}\\right)m(x)", subscript.join(","), f.coeff_poly().to_latex());
                    }
                }
                Format::Json => {
                    let members: Vec<Value> = seq
                        .family()
                        .members()
                        .iter()
                        .map(|(alpha, f)| json!({ "alpha": alpha, "coefficient": f.coeff_poly().to_string() }))
                        .collect();
                    println!("{}", to_json(&json!({ "spec": spec, "members": members }))?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { tables, l, sampling } => {
            let tables = read_tables(&tables)?;
            let cfg = VerifyConfig {
                budget: sampling.budget as usize,
                seed: sampling.seed,
                ..VerifyConfig::default()
            };
            let report = match l {
                Some(l) => verify_multivariable(&tables, l, &cfg)?,
                None => verify_rank(&tables, &cfg)?,
            };
            match format {
                Format::Json => println!("{}", to_json(&report)?),
                _ => println!("{report}"),
            }
            Ok(match report.status {
                Status::Pass | Status::Zero => ExitCode::SUCCESS,
                Status::Fail => ExitCode::from(1),
            })
        }
        Command::Reconstruct { tables } => {
            let tables = read_tables(&tables)?;
            match reconstruct(&tables) {
                Ok(spec) => {
                    match format {
                        Format::Json => println!("{}", to_json(&spec)?),
                        _ => println!("{spec}"),
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::NotMomentSequence { alpha, reason, witness }) => {
                    match format {
                        Format::Json => println!(
                            "{}",
                            to_json(&json!({
                                "status": "not_moment_sequence",
                                "alpha": alpha,
                                "reason": reason,
                                "witness": witness,
                            }))?
                        ),
                        _ => {
                            let pts: Vec<String> = witness.iter().map(ToString::to_string).collect();
                            println!("not a moment sequence at {alpha}: {reason}");
                            if !pts.is_empty() {
                                println!("witness: {}", pts.join(" "));
                            }
                        }
                    }
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Collapse { input, out } => {
            let text = match read_input(&input)? {
                Input::Spec(s) => to_json(collapse_rank2(&construct(&s)?)?.spec())?,
                Input::Tables(t) => to_json(&collapse_tables(&t)?)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Project { input, keep, out } => {
            if keep.contains(&0) {
                return Err(Failure::Usage("--keep coordinates are 1-based".into()));
            }
            let mut keep: Vec<usize> = keep.iter().map(|k| k - 1).collect();
            keep.sort_unstable();
            keep.dedup();
            let text = match read_input(&input)? {
                Input::Spec(s) => to_json(project_seq(&construct(&s)?, &keep)?.spec())?,
                Input::Tables(t) => to_json(&project_tables(&t, &keep)?)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalize { input, out } => {
            let text = match read_input(&input)? {
                Input::Spec(s) => to_json(normalize(&construct(&s)?)?.spec())?,
                Input::Tables(t) => to_json(&normalize_tables(&t)?)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Rejected(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
