//! The `deladas` command line: `check`, `solve`, `verify`, `run` and `diff`.
//!
//! Exit codes: 0 success, 1 UNSAT or violated, 2 usage or input error,
//! 3 internal error or exhausted search budget.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::adme::{self, Phase};
use crate::ddd::{self, emit_ddd, parse_ddd};
use crate::diagnostic::{has_errors, Diagnostic};
use crate::fabric::parse_scenario;
use crate::model::{validate_goal, Goal};
use crate::parser::parse_goal;
use crate::solver::{check_configuration, solve, SolveOptions, SolveStatus, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "deladas", version, about = "Constraint-based deployment and autonomic management")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a goal, printing the inferred component ports.
    Check { goal: PathBuf },
    /// Search for configurations satisfying a goal.
    Solve {
        goal: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_solutions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Directory for `solution-<k>.ddd.json`; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a deployment description against a goal.
    Verify { goal: PathBuf, ddd: PathBuf },
    /// Deploy a goal on a simulated fabric and manage it through a scenario.
    Run {
        goal: PathBuf,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        ticks: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run log destination; stdout if omitted.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Final deployment description.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Final engine status as JSON.
        #[arg(long)]
        status: Option<PathBuf>,
    },
    /// Print the reconfiguration plan between two deployment descriptions.
    Diff {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a command: an exit code, having already written its output.
type Outcome = Result<i32, Failure>;

/// An error that ends the command with a message on stderr.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn internal(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: message.into(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Check { goal } => check(&goal, out, err),
        Command::Solve {
            goal,
            max_solutions,
            seed,
            budget,
            out: dir,
        } => {
            let opts = SolveOptions {
                max_solutions: max_solutions.max(1),
                seed,
                node_budget: budget,
                ..SolveOptions::default()
            };
            solve_cmd(&goal, &opts, dir.as_deref(), out)
        }
        Command::Verify { goal, ddd } => verify(&goal, &ddd, out),
        Command::Run {
            goal,
            scenario,
            ticks,
            seed,
            log,
            out: ddd_out,
            status,
        } => run_cmd(&goal, scenario.as_deref(), ticks, seed, log.as_deref(), ddd_out.as_deref(), status.as_deref(), out),
        Command::Diff { from, to, out: plan_out } => diff_cmd(&from, &to, plan_out.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "deladas: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| internal(format!("{}: {e}", path.display())))
}

fn report(path: &Path, diags: &[Diagnostic], err: &mut dyn Write) {
    for d in diags {
        let _ = writeln!(err, "{}:{d}", path.display());
    }
}

/// Reads, parses and validates a goal file.
fn load_goal(path: &Path, err: &mut dyn Write) -> Result<Goal, Failure> {
    let text = read(path)?;
    let goal = parse_goal(&text).map_err(|diags| {
        report(path, &diags, err);
        usage(format!("{}: goal does not parse", path.display()))
    })?;
    let diags = validate_goal(&goal);
    report(path, &diags, err);
    if has_errors(&diags) {
        return Err(usage(format!("{}: goal is invalid", path.display())));
    }
    Ok(goal)
}

fn check(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let goal = load_goal(path, err)?;
    let _ = writeln!(
        out,
        "goal {}: {} clauses, {} hosts",
        goal.name(),
        goal.constraints.clauses.len(),
        goal.hosts.len()
    );
    for t in &goal.component_types {
        let _ = writeln!(out, "{t}");
    }
    Ok(EXIT_OK)
}

fn solve_cmd(path: &Path, opts: &SolveOptions, dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let goal = load_goal(path, &mut std::io::sink())?;
    let result = solve(&goal, opts);
    match result.status {
        SolveStatus::Unsat => {
            let _ = writeln!(out, "UNSAT nodes={}", result.nodes_explored);
            return Ok(EXIT_UNSAT);
        }
        SolveStatus::BudgetExhausted if result.solutions.is_empty() => {
            let _ = writeln!(out, "BUDGET_EXHAUSTED nodes={}", result.nodes_explored);
            return Ok(EXIT_INTERNAL);
        }
        _ => {}
    }
    let _ = writeln!(
        out,
        "SAT solutions={} nodes={}",
        result.solutions.len(),
        result.nodes_explored
    );
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| internal(format!("{}: {e}", dir.display())))?;
    }
    for (k, config) in result.solutions.iter().enumerate() {
        let text = emit_ddd(config, &goal).to_json();
        match dir {
            Some(dir) => {
                let file = dir.join(format!("solution-{}.ddd.json", k + 1));
                write_file(&file, &text)?;
                let _ = writeln!(out, "wrote {}", file.display());
            }
            None => {
                let _ = write!(out, "{text}");
            }
        }
    }
    Ok(EXIT_OK)
}

fn verify(goal_path: &Path, ddd_path: &Path, out: &mut dyn Write) -> Outcome {
    let goal = load_goal(goal_path, &mut std::io::sink())?;
    let config = parse_ddd(&read(ddd_path)?).map_err(|e| usage(format!("{}: {e}", ddd_path.display())))?;
    let problems = config.check_against(&goal);
    if let Some(first) = problems.first() {
        return Err(usage(format!("{}: {first}", ddd_path.display())));
    }
    match check_configuration(&config, &goal) {
        Verdict::Valid => {
            let _ = writeln!(out, "VALID");
            Ok(EXIT_OK)
        }
        Verdict::Violated(violations) => {
            let _ = writeln!(out, "VIOLATED");
            for v in violations {
                let _ = writeln!(out, "clause {} (at {}) does not hold", v.index, v.span);
            }
            Ok(EXIT_UNSAT)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_cmd(
    goal_path: &Path,
    scenario: Option<&Path>,
    ticks: u64,
    seed: u64,
    log: Option<&Path>,
    ddd_out: Option<&Path>,
    status: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let goal = load_goal(goal_path, &mut std::io::sink())?;
    let events = match scenario {
        Some(p) => parse_scenario(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => Vec::new(),
    };
    let opts = SolveOptions {
        seed,
        ..SolveOptions::default()
    };
    let engine = adme::run(goal, &events, ticks, opts);
    let text = engine.log_text();
    match log {
        Some(p) => write_file(p, &text)?,
        None => {
            let _ = write!(out, "{text}");
        }
    }
    if let Some(p) = ddd_out {
        write_file(p, &emit_ddd(&engine.fabric().observe(), engine.goal()).to_json())?;
    }
    if let Some(p) = status {
        write_file(p, &engine.status().to_json())?;
    }
    let _ = writeln!(
        out,
        "final phase={} recoveries={} solver_calls={}",
        engine.phase(),
        engine.status().recoveries,
        engine.status().solver_calls
    );
    Ok(match engine.phase() {
        Phase::Steady => EXIT_OK,
        Phase::StalledUnsat => EXIT_UNSAT,
        _ => EXIT_INTERNAL,
    })
}

fn diff_cmd(from: &Path, to: &Path, plan_out: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let load = |p: &Path| parse_ddd(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())));
    let plan = ddd::diff(&load(from)?, &load(to)?);
    let json = plan.to_json();
    match plan_out {
        Some(p) => write_file(p, &json)?,
        None => {
            let _ = write!(out, "{json}");
        }
    }
    Ok(EXIT_OK)
}
