use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use maxsym::dimacs::serialize_with_comments;
use maxsym::instances::{pigeonhole, random_formula, RandomParams};
use maxsym::perm::{group_order, GroupOrder};
use maxsym::pipeline::{break_symmetries, run_bench, to_csv, to_table, BenchConfig, SbpOptions};
use maxsym::solver::{brute_force, solve_bnb_with, Budget, OptResult, Status};
use maxsym::{detect_symmetries, encode, parse_dimacs, serialize, EncodeMode, Formula};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "maxsym", version, about = "Symmetry breaking for MaxSAT instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    /// Binary clauses as literal edges (plain MaxSAT only)
    Edge,
    /// One vertex per clause, colored by weight class
    Clause,
}

impl From<Mode> for EncodeMode {
    fn from(m: Mode) -> EncodeMode {
        match m {
            Mode::Edge => EncodeMode::EdgeOptimized,
            Mode::Clause => EncodeMode::ClauseVertex,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(clap::Args)]
struct SbpArgs {
    /// Graph encoding used for symmetry detection
    #[arg(long, value_enum, default_value_t = Mode::Clause)]
    mode: Mode,
    /// Break only the first N generators
    #[arg(long)]
    max_generators: Option<usize>,
}

impl SbpArgs {
    fn options(&self) -> SbpOptions {
        SbpOptions {
            mode: self.mode.into(),
            max_generators: self.max_generators,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the colored graph of an instance
    Graph {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Clause)]
        mode: Mode,
    },
    /// List symmetry generators in cycle notation
    Syms {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Clause)]
        mode: Mode,
        /// Also print the order of the generated group
        #[arg(long)]
        order: bool,
        /// Stop enumerating the group beyond this many elements
        #[arg(long, default_value_t = 100_000)]
        order_limit: usize,
    },
    /// Write the instance with symmetry-breaking predicates added
    Sbp {
        input: PathBuf,
        /// Output file (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        sbp: SbpArgs,
    },
    /// Solve an instance
    Solve {
        input: PathBuf,
        /// Break symmetries before solving
        #[arg(long)]
        sbp: bool,
        /// Use exhaustive enumeration instead of branch and bound
        #[arg(long)]
        brute: bool,
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Time limit in seconds
        #[arg(long, env = "MAXSYM_TIMEOUT", default_value_t = 1000.0)]
        timeout: f64,
        #[command(flatten)]
        sbp_args: SbpArgs,
    },
    /// Generate an instance
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Compare solving with and without symmetry breaking
    Bench {
        inputs: Vec<PathBuf>,
        /// Add the pigeonhole instance with N holes (repeatable)
        #[arg(long = "hole")]
        holes: Vec<u32>,
        /// Per-solve time limit in seconds
        #[arg(long, env = "MAXSYM_TIMEOUT", default_value_t = 1000.0)]
        timeout: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        sbp: SbpArgs,
    },
}

#[derive(Subcommand)]
enum Family {
    /// n + 1 pigeons in n holes
    Hole { n: u32 },
    /// Seeded random formula
    Rand {
        #[arg(long, default_value_t = 10)]
        vars: u32,
        #[arg(long, default_value_t = 20)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 1)]
        max_weight: u64,
        #[arg(long, default_value_t = 0.0)]
        hard_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Parse(anyhow::Error),
    Budget,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    }
}

fn load(path: &Path) -> Result<Formula, Failure> {
    let text = read_text(path)?;
    parse_dimacs(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(Failure::Parse)
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn seconds(t: f64) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(t).map_err(|_| anyhow::anyhow!("invalid time limit {t}"))
}

fn print_solution(r: &OptResult, num_vars: u32) {
    match r.status {
        Status::Optimum => println!("s OPTIMUM FOUND"),
        Status::HardUnsat => println!("s UNSATISFIABLE"),
        Status::Incomplete if r.witness.is_some() => println!("s SATISFIABLE"),
        Status::Incomplete => println!("s UNKNOWN"),
    }
    if let Some(w) = &r.witness {
        println!("v {}", w.truncated(num_vars).to_dimacs());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Graph { input, mode } => {
            let f = load(&input)?;
            let g = encode(&f, mode.into()).map_err(|e| Failure::Usage(e.into()))?;
            print!("{}", g.to_dimacs());
        }
        Command::Syms {
            input,
            mode,
            order,
            order_limit,
        } => {
            let f = load(&input)?;
            let gs = detect_symmetries(&f, mode.into()).map_err(|e| Failure::Usage(e.into()))?;
            if gs.is_empty() {
                println!("c no nontrivial symmetries");
            }
            for p in &gs.generators {
                println!("{p}");
            }
            if order {
                match group_order(&gs.generators, f.num_vars(), order_limit) {
                    GroupOrder::Exact(n) => println!("c group order: {n}"),
                    GroupOrder::Exceeds(n) => println!("c group order: >{n}"),
                }
            }
        }
        Command::Sbp { input, output, sbp } => {
            let f = load(&input)?;
            let (_, aug) = break_symmetries(&f, &sbp.options()).map_err(|e| Failure::Usage(e.into()))?;
            let text = serialize_with_comments(&aug.formula, &[aug.summary()]);
            write_out(output.as_deref(), &text)?;
            let line = format!("#ClsSbp {}", aug.cls_sbp());
            if output.is_some() {
                println!("{line}");
            } else {
                eprintln!("{line}");
            }
        }
        Command::Solve {
            input,
            sbp,
            brute,
            max_nodes,
            timeout,
            sbp_args,
        } => {
            let original = load(&input)?;
            let start = Instant::now();
            let f = if sbp {
                let (_, aug) = break_symmetries(&original, &sbp_args.options())
                    .map_err(|e| Failure::Usage(e.into()))?;
                println!("c {}", aug.summary());
                aug.formula
            } else {
                original.clone()
            };
            let r = if brute {
                let r = brute_force(&f).map_err(|e| Failure::Usage(e.into()))?;
                for c in &r.incumbents {
                    println!("o {c}");
                }
                r
            } else {
                let budget = Budget {
                    max_nodes,
                    time_limit: Some(seconds(timeout)?),
                };
                let mut report = |c: u64| println!("o {c}");
                solve_bnb_with(&f, budget, Some(&mut report))
            };
            print_solution(&r, original.num_vars());
            println!(
                "c nodes={} time={:.6}",
                r.nodes,
                start.elapsed().as_secs_f64()
            );
            if r.status == Status::Incomplete {
                return Err(Failure::Budget);
            }
        }
        Command::Gen { family, output } => {
            let f = match family {
                Family::Hole { n } => pigeonhole(n),
                Family::Rand {
                    vars,
                    clauses,
                    max_len,
                    max_weight,
                    hard_fraction,
                    seed,
                } => random_formula(&RandomParams {
                    num_vars: vars,
                    num_clauses: clauses,
                    max_len,
                    max_weight,
                    hard_fraction,
                    seed,
                }),
            }
            .map_err(|e| Failure::Usage(e.into()))?;
            write_out(output.as_deref(), &serialize(&f))?;
        }
        Command::Bench {
            inputs,
            holes,
            timeout,
            format,
            workers,
            sbp,
        } => {
            let mut items: Vec<(String, Result<Formula, String>)> = Vec::new();
            for n in holes {
                items.push((
                    format!("hole{n}"),
                    pigeonhole(n).map_err(|e| e.to_string()),
                ));
            }
            for path in inputs {
                let loaded = read_text(&path)
                    .map_err(|e| format!("{e:#}"))
                    .and_then(|t| parse_dimacs(&t).map_err(|e| e.to_string()));
                items.push((path.display().to_string(), loaded));
            }
            let cfg = BenchConfig {
                time_limit: seconds(timeout)?,
                sbp: sbp.options(),
                workers,
            };
            let mut records = Vec::new();
            for row in run_bench(&items, &cfg) {
                match row {
                    Ok(r) => records.push(r),
                    Err((name, e)) => eprintln!("c error: {name}: {e}"),
                }
            }
            match format {
                Format::Csv => print!("{}", to_csv(&records)),
                Format::Table => print!("{}", to_table(&records)),
            }
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
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Parse(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(Failure::Budget) => {
            eprintln!("c budget exhausted");
            ExitCode::from(EXIT_BUDGET)
        }
    }
}
