//! `rmfc`: solve, check, compress and benchmark fire containment and
//! non-uniform k-center instances.
//!
//! Exit codes: 0 ok, 1 infeasible or failed check, 2 malformed input,
//! 3 resource cap.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rmfc::cli::{
    bench, exit_code, generate_metric, generate_tree, parse_instance, parse_solution, run, serialize_metric, serialize_solution,
    serialize_tree, BenchParams, Command, Family, MetricKind, Problem, SearchLimits, TreeFile,
};
use rmfc::pipeline_tree::RmfcMode;
use rmfc::ratio::parse_q;
use rmfc::{Error, Q};

#[derive(Parser)]
#[command(name = "rmfc", version, about = "Fire containment on trees and non-uniform k-center")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance and report a certified solution.
    Solve {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, value_enum, default_value = "two_approx")]
        mode: ModeArg,
        #[arg(long, default_value = "1/7", value_parser = rational)]
        eps: Q,
        #[arg(long = "in")]
        input: PathBuf,
        /// Where to write the solution document.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
        /// Seed echoed in the report.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a solution document against an instance.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value = "1", value_parser = rational)]
        alpha: Q,
        #[arg(long, default_value = "1", value_parser = rational)]
        beta: Q,
        /// Use per-level budgets instead of prefix budgets.
        #[arg(long)]
        classic: bool,
    },
    /// Compress an instance and print the result.
    Compress {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "1/2", value_parser = rational)]
        eps: Q,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive optimum of a small instance.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimum-dependent analysis sets of a small instance.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "1/2", value_parser = rational)]
        eps: Q,
    },
    /// Sweep seeded random instances and print a table.
    Bench {
        #[arg(long, value_enum, default_value = "tree")]
        family: FamilyArg,
        #[arg(long, value_enum, default_value = "srmfc")]
        problem: ProblemArg,
        #[arg(long, value_enum, default_value = "two_approx")]
        mode: ModeArg,
        #[arg(long, default_value = "1/2", value_parser = rational)]
        eps: Q,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Tree height.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        branching: usize,
        /// Metric levels.
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Print a seeded random instance.
    Generate {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Tree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        branching: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Metric {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "plane")]
        kind: KindArg,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone, Copy)]
struct LimitArgs {
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    max_partitions: Option<usize>,
    #[arg(long)]
    max_support: Option<usize>,
    #[arg(long)]
    max_solutions: Option<usize>,
}

impl From<LimitArgs> for SearchLimits {
    fn from(a: LimitArgs) -> Self {
        SearchLimits {
            max_nodes: a.max_nodes,
            max_partitions: a.max_partitions,
            max_support: a.max_support,
            max_solutions: a.max_solutions,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum ProblemArg {
    Rmfc,
    Srmfc,
    Nukc,
    Snukc,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Rmfc => Problem::Rmfc,
            ProblemArg::Srmfc => Problem::Srmfc,
            ProblemArg::Nukc => Problem::Nukc,
            ProblemArg::Snukc => Problem::Snukc,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    #[value(name = "two_approx")]
    TwoApprox,
    #[value(name = "three_approx")]
    ThreeApprox,
    #[value(name = "budget_4eps")]
    Budget4Eps,
}

impl From<ModeArg> for RmfcMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::TwoApprox => RmfcMode::TwoApprox,
            ModeArg::ThreeApprox => RmfcMode::ThreeApprox,
            ModeArg::Budget4Eps => RmfcMode::Budget4Eps,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum FamilyArg {
    Tree,
    Line,
    Plane,
    Closure,
}

#[derive(ValueEnum, Clone, Copy)]
enum KindArg {
    Line,
    Plane,
    Closure,
}

impl From<KindArg> for MetricKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Line => MetricKind::Line,
            KindArg::Plane => MetricKind::Plane,
            KindArg::Closure => MetricKind::Closure,
        }
    }
}

fn rational(s: &str) -> Result<Q, String> {
    parse_q(s).map_err(|e| e.to_string())
}

/// Failure with its exit status.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(exit_code(&e), e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn write(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn execute(cli: Cli) -> Result<i32, Failure> {
    let (cmd, input, out, seed) = match cli.cmd {
        Cmd::Solve { problem, mode, eps, input, out, limits, seed } => {
            (Command::Solve { problem: problem.into(), mode: mode.into(), eps, limits: limits.into() }, input, out, seed)
        }
        Cmd::Check { input, solution, alpha, beta, classic } => {
            let sol = parse_solution(&read(&solution)?)?;
            (Command::Check { solution: sol, alpha, beta, classic }, input, None, None)
        }
        Cmd::Compress { input, eps, out } => (Command::Compress { eps }, input, out, None),
        Cmd::Oracle { input, out } => (Command::Oracle, input, out, None),
        Cmd::Analyze { input, eps } => (Command::Analyze { eps }, input, None, None),
        Cmd::Bench { family, problem, mode, eps, count, n, depth, branching, levels, seed, threads, limits } => {
            let family = match family {
                FamilyArg::Tree => Family::Tree { n, depth, branching },
                FamilyArg::Line => Family::Metric { n, kind: MetricKind::Line, levels },
                FamilyArg::Plane => Family::Metric { n, kind: MetricKind::Plane, levels },
                FamilyArg::Closure => Family::Metric { n, kind: MetricKind::Closure, levels },
            };
            let p = BenchParams { family, problem: problem.into(), mode: mode.into(), eps, count, seed, threads, limits: limits.into() };
            let rep = bench(&echo(), &p)?;
            print!("{}", rep.render());
            return Ok(rep.exit_code());
        }
        Cmd::Generate { kind } => {
            let text = match kind {
                GenKind::Tree { n, depth, branching, seed } => serialize_tree(&TreeFile::from_srmfc(&generate_tree(n, depth, branching, seed)?)),
                GenKind::Metric { n, kind, levels, seed } => serialize_metric(&generate_metric(n, kind.into(), levels, seed)?),
            };
            print!("{text}");
            return Ok(0);
        }
    };
    let text = read(&input)?;
    let inst = parse_instance(&text)?;
    let rep = run(&echo(), &cmd, &inst, &text, seed)?;
    if let Some(path) = out {
        // Compress writes the instance; other commands write the solution.
        let doc = match (&rep.output, &rep.solution) {
            (Some(o), _) => o.clone(),
            (None, Some(s)) => serialize_solution(s),
            (None, None) => return Err(Failure(1, "nothing to write".into())),
        };
        write(&path, &doc)?;
    }
    print!("{}", rep.render());
    Ok(rep.exit_code())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
