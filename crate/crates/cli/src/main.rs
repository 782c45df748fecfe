use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use twisted_toeplitz::bundles::connection_report;
use twisted_toeplitz::json::{element_to_value, projector_to_value, tensor_to_value, theta_from_str, tuple_from_str};
use twisted_toeplitz::quotient::{cocycle_check, glue};
use twisted_toeplitz::{chern_galois_projector, class_invariant, relation_residual, strong_connection, Error, ThetaMatrix};

/// Residual above which `residual` reports a verification failure.
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "ncg", version, about = "Verification suites for twisted Toeplitz algebras and quantum sphere line bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON result to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaArgs {
    /// Sphere dimension parameter; the algebra has N+1 generators.
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    n_big: u32,

    /// `zero`, `random-rational`, a path to a theta JSON file, or inline JSON.
    #[arg(long, default_value = "zero")]
    theta: String,

    /// Seed for `--theta random-rational`.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Denominator for `--theta random-rational`.
    #[arg(long, default_value_t = 12)]
    den: i64,
}

#[derive(Args)]
struct Winding {
    #[command(flatten)]
    theta: ThetaArgs,

    /// Winding number of the line bundle.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the strong connection for winding n.
    Connection(Winding),
    /// Print the Chern-Galois projector for winding n.
    Projector(Winding),
    /// Print the numerical class invariant of the winding-n projector.
    Invariant {
        #[command(flatten)]
        args: Winding,
        #[arg(long, value_delimiter = ',', default_value = "8,16,24")]
        truncations: Vec<u32>,
    },
    /// Check that the winding-n connection is strong.
    Verify(Winding),
    /// Glue a compatible tuple of quotient elements.
    Glue {
        /// Path to a tuple JSON file, or inline JSON.
        #[arg(long)]
        tuple: String,
    },
    /// Check the cocycle condition on words up to the given degree.
    Cocycle {
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Print the relation residual of the truncated Fock representation.
    Residual {
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long = "M")]
        m: u32,
    },
}

enum Outcome {
    Ok(Value),
    Failed(Value),
}

fn read_source(arg: &str) -> anyhow::Result<String> {
    let path = Path::new(arg);
    if !arg.trim_start().starts_with('{') && path.exists() {
        return std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()));
    }
    Ok(arg.to_string())
}

impl ThetaArgs {
    fn size(&self) -> usize {
        self.n_big as usize + 1
    }

    fn load(&self) -> anyhow::Result<ThetaMatrix> {
        let theta = match self.theta.as_str() {
            "zero" => ThetaMatrix::zero(self.size()),
            "random-rational" => ThetaMatrix::random_rational(self.size(), self.seed, self.den)?,
            other => theta_from_str(&read_source(other)?)?,
        };
        if theta.size() != self.size() {
            bail!("theta has size {}, expected N+1 = {}", theta.size(), self.size());
        }
        Ok(theta)
    }
}

fn run(command: &Command) -> anyhow::Result<Outcome> {
    Ok(match command {
        Command::Connection(w) => {
            let l = strong_connection(w.n, w.theta.n_big as usize, &w.theta.load()?)?;
            Outcome::Ok(tensor_to_value(&l))
        }
        Command::Projector(w) => {
            let e = chern_galois_projector(w.n, w.theta.n_big as usize, &w.theta.load()?)?;
            Outcome::Ok(projector_to_value(&e))
        }
        Command::Invariant { args, truncations } => {
            if truncations.windows(2).any(|p| p[0] >= p[1]) {
                bail!("truncations must be strictly ascending, got {truncations:?}");
            }
            let e = chern_galois_projector(args.n, args.theta.n_big as usize, &args.theta.load()?)?;
            match class_invariant(&e, truncations) {
                Ok(inv) => Outcome::Ok(serde_json::to_value(inv)?),
                Err(Error::UnstableInvariant { values }) => Outcome::Failed(json!({
                    "error": "unstable invariant",
                    "truncations_used": truncations,
                    "values": values,
                })),
                Err(e) => return Err(e.into()),
            }
        }
        Command::Verify(w) => {
            let l = strong_connection(w.n, w.theta.n_big as usize, &w.theta.load()?)?;
            let (m, bidegree) = connection_report(&l, w.n);
            let ok = m.is_one() && bidegree;
            let mut report = json!({ "m_circ_l": m.to_string(), "bidegree": bidegree });
            if ok {
                Outcome::Ok(report)
            } else {
                report["connection"] = tensor_to_value(&l);
                Outcome::Failed(report)
            }
        }
        Command::Glue { tuple } => {
            let t = tuple_from_str(&read_source(tuple)?)?;
            match glue(&t) {
                Ok(a) => Outcome::Ok(element_to_value(&a)),
                Err(Error::IncompatibleTuple { i, j }) => Outcome::Failed(json!({
                    "error": "incompatible tuple",
                    "i": i,
                    "j": j,
                })),
                Err(e @ (Error::Unsolvable { .. } | Error::SupportOverflow { .. })) => {
                    Outcome::Failed(json!({ "error": e.to_string() }))
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Cocycle { theta, degree } => {
            let report = cocycle_check(&theta.load()?, *degree);
            let passed = report.passed;
            let v = serde_json::to_value(report)?;
            if passed {
                Outcome::Ok(v)
            } else {
                Outcome::Failed(v)
            }
        }
        Command::Residual { theta, m } => {
            let r = relation_residual(theta.n_big as usize, &theta.load()?, *m)?;
            let v = json!({ "N": theta.n_big, "truncations_used": [m], "residual": r, "tolerance": RESIDUAL_TOL });
            if r <= RESIDUAL_TOL {
                Outcome::Ok(v)
            } else {
                Outcome::Failed(v)
            }
        }
    })
}

fn emit(v: &Value, output: Option<&Path>) -> anyhow::Result<()> {
    let s = serde_json::to_string(v)?;
    match output {
        Some(p) => std::fs::write(p, s + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{s}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (v, code) = match run(&cli.command) {
        Ok(Outcome::Ok(v)) => (v, 0),
        Ok(Outcome::Failed(v)) => (v, 1),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&v, cli.output.as_deref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
