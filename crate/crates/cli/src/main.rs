//! `tnorm`: command-line access to the operator catalog and checks.
//!
//! Every subcommand prints JSON lines to stdout. Exit status is 0 when the
//! run completed (whatever the verdicts), 1 for usage errors, 2 for
//! numerical failures.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use tnorm_core::properties::check_axioms;
use tnorm_core::rearrangement::{sorted_uniforms, transport_witness};
use tnorm_core::table3::{write_table, OutputFormat};
use tnorm_core::{
    check_archimedean, check_copula, check_property, check_zero_divisors, pair_condition,
    parse_operator_spec, reproduce_table3, search_counterexample, verify_circular_extremes,
    verify_rearrangement, Direction, Error, GridSpec, Operator, OrderProperty, RunConfig,
    UnitValue,
};

#[derive(Parser)]
#[command(
    name = "tnorm",
    version,
    about = "T-norm/T-conorm property checks and rearrangement inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropArg {
    #[value(name = "A")]
    A,
    #[value(name = "A'", alias = "A_prime")]
    APrime,
    #[value(name = "B")]
    B,
    #[value(name = "B'", alias = "B_prime")]
    BPrime,
}

impl From<PropArg> for OrderProperty {
    fn from(p: PropArg) -> Self {
        match p {
            PropArg::A => OrderProperty::A,
            PropArg::APrime => OrderProperty::APrime,
            PropArg::B => OrderProperty::B,
            PropArg::BPrime => OrderProperty::BPrime,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Primal,
    Dual,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Primal => Direction::Primal,
            DirectionArg::Dual => Direction::Dual,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(clap::Args)]
struct Sampling {
    /// Random points checked after the grid.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an operator at one point.
    Eval {
        #[arg(long)]
        op: String,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
    },
    /// Commutativity, associativity, monotonicity and neutrality.
    Axioms {
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 33)]
        grid: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// One of the order properties A, A', B, B'.
    Property {
        #[arg(long)]
        op: String,
        #[arg(long, value_enum)]
        prop: PropArg,
        /// Defaults to 17 for A/A' and 33 for B/B'.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Neutrality of 1, monotonicity and property B.
    Copula {
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 33)]
        grid: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Search for zero divisors.
    Zerodiv {
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 33)]
        grid: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Archimedean check by repeated squaring.
    Archimedean {
        #[arg(long)]
        op: String,
        /// Number of squarings.
        #[arg(long, default_value_t = 64)]
        nmax: usize,
        #[arg(long, default_value_t = 33)]
        grid: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Two-element rearrangement condition: search, or a single point with --at.
    Pair {
        #[arg(long)]
        otimes: String,
        #[arg(long)]
        oplus: String,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 17)]
        grid: usize,
        /// Evaluate only at `x1,x2,y1,y2`.
        #[arg(long, value_delimiter = ',')]
        at: Option<Vec<f64>>,
    },
    /// Brute-force the permutation chain on random sorted sequences.
    Verify {
        #[arg(long)]
        otimes: String,
        #[arg(long)]
        oplus: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Both directions when omitted.
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
    },
    /// Check that the two circular arrangements attain the extremes.
    Circular {
        #[arg(long)]
        otimes: String,
        #[arg(long)]
        oplus: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
    },
    /// Reproduce the operator-pair table.
    Table3 {
        #[arg(long, default_value_t = 17)]
        grid: usize,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        workers: Option<usize>,
        /// Skip the negative-parameter Clayton cells.
        #[arg(long)]
        no_footnote: bool,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } | Error::Io(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn op(spec: &str) -> Result<Operator, Failure> {
    parse_operator_spec(spec).map_err(|e| Failure::Usage(format!("--op `{spec}`: {e}")))
}

fn grid(resolution: usize, sampling: &Sampling) -> Result<GridSpec, Failure> {
    Ok(GridSpec::new(resolution, sampling.samples, sampling.seed)?)
}

fn directions(d: Option<DirectionArg>) -> Vec<Direction> {
    match d {
        Some(d) => vec![d.into()],
        None => vec![Direction::Primal, Direction::Dual],
    }
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Eval { op: spec, x, y } => {
            let f = op(&spec)?;
            let (ux, uy) = (UnitValue::new(x)?, UnitValue::new(y)?);
            let value = f
                .try_eval(ux, uy)
                .map_err(|e| Failure::Numerical(e.to_string()))?;
            writeln!(
                out,
                "{}",
                json!({"operator": f.to_string(), "x": x, "y": y, "value": value.get()})
            )?;
        }
        Command::Axioms {
            op: spec,
            grid: r,
            sampling,
        } => {
            let f = op(&spec)?;
            for v in check_axioms(&f, &grid(r, &sampling)?) {
                writeln!(out, "{}", v.to_json())?;
            }
        }
        Command::Property {
            op: spec,
            prop,
            grid: r,
            sampling,
        } => {
            let f = op(&spec)?;
            let prop = OrderProperty::from(prop);
            let default = match prop {
                OrderProperty::A | OrderProperty::APrime => 17,
                OrderProperty::B | OrderProperty::BPrime => 33,
            };
            let v = check_property(&f, prop, &grid(r.unwrap_or(default), &sampling)?);
            writeln!(out, "{}", v.to_json())?;
        }
        Command::Copula {
            op: spec,
            grid: r,
            sampling,
        } => {
            let f = op(&spec)?;
            writeln!(out, "{}", check_copula(&f, &grid(r, &sampling)?).to_json())?;
        }
        Command::Zerodiv {
            op: spec,
            grid: r,
            sampling,
        } => {
            let f = op(&spec)?;
            writeln!(
                out,
                "{}",
                check_zero_divisors(&f, &grid(r, &sampling)?).to_json()
            )?;
        }
        Command::Archimedean {
            op: spec,
            nmax,
            grid: r,
            sampling,
        } => {
            let f = op(&spec)?;
            writeln!(
                out,
                "{}",
                check_archimedean(&f, &grid(r, &sampling)?, nmax).to_json()
            )?;
        }
        Command::Pair {
            otimes,
            oplus,
            direction,
            budget,
            seed,
            grid: r,
            at,
        } => {
            let (t, s) = (op(&otimes)?, op(&oplus)?);
            let direction = Direction::from(direction);
            let result = match at.as_deref() {
                Some(&[x1, x2, y1, y2]) => pair_condition(&t, &s, x1, x2, y1, y2, direction)?,
                Some(_) => return Err(Failure::Usage("--at takes exactly four values".into())),
                None => search_counterexample(&t, &s, direction, budget, seed, r)?,
            };
            let mut line = result.to_json();
            if result.is_violated() {
                let transported = transport_witness(&t, &s, &result);
                line["transported_violates"] = json!(transported.map(|r| r.is_violated()));
            }
            writeln!(out, "{line}")?;
        }
        Command::Verify {
            otimes,
            oplus,
            n,
            trials,
            seed,
            direction,
        } => {
            let (t, s) = (op(&otimes)?, op(&oplus)?);
            for d in directions(direction) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut held = 0;
                let mut first = None;
                for _ in 0..trials {
                    let xs = sorted_uniforms(&mut rng, n);
                    let ys = sorted_uniforms(&mut rng, n);
                    let outcome = verify_rearrangement(&t, &s, &xs, &ys, d)?;
                    if outcome.holds {
                        held += 1;
                    } else if first.is_none() {
                        first = outcome.witness;
                    }
                }
                let line = json!({
                    "otimes": t.to_string(),
                    "oplus": s.to_string(),
                    "direction": d,
                    "n": n,
                    "trials": trials,
                    "holds": held,
                    "verdict": if held == trials { "holds_on_samples" } else { "violated" },
                    "witness": first,
                    "seed": seed,
                });
                writeln!(out, "{line}")?;
            }
        }
        Command::Circular {
            otimes,
            oplus,
            n,
            trials,
            seed,
            direction,
        } => {
            let (t, s) = (op(&otimes)?, op(&oplus)?);
            for d in directions(direction) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for trial in 0..trials {
                    let a = sorted_uniforms(&mut rng, n);
                    let outcome = verify_circular_extremes(&t, &s, &a, d)?;
                    let line = json!({
                        "otimes": t.to_string(),
                        "oplus": s.to_string(),
                        "direction": d,
                        "trial": trial,
                        "a": a,
                        "outcome": outcome,
                        "seed": seed,
                    });
                    writeln!(out, "{line}")?;
                }
            }
        }
        Command::Table3 {
            grid: r,
            budget,
            seed,
            out: path,
            format,
            workers,
            no_footnote,
        } => {
            let format = match format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Jsonl => OutputFormat::Jsonl,
            };
            let config = RunConfig {
                resolution: r,
                budget,
                seed,
                workers,
                clayton_footnote: !no_footnote,
                format,
                ..RunConfig::default()
            };
            let cells = reproduce_table3(&config)?;
            let file = File::create(&path)
                .map_err(|e| Failure::Numerical(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_table(&cells, format, &mut w)?;
            w.flush()?;
            let unbacked: Vec<String> = cells
                .iter()
                .filter(|c| !c.unbacked().is_empty())
                .map(|c| format!("({}, {})", c.row.symbol(), c.column.symbol()))
                .collect();
            let line = json!({
                "cells": cells.len(),
                "out": path.display().to_string(),
                "format": config.format,
                "unbacked_marks": unbacked,
            });
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
