//! Command-line definitions and the three subcommands.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elcone::reproduce::{builtin_table, Row};
use elcone::sampling::DEFAULT_SEED;
use elcone::solver::in_gamma;
use elcone::verify::{self, CheckLine, SuiteReport};
use elcone::{leq, solve, Problem, Termination, Tolerance};
use serde::Serialize;

use crate::exit::{CliError, ExitCode};
use crate::output::{self, SolveReportJson};
use crate::problem_file::{parse_problem, start_point, ProblemFile};

#[derive(Debug, Parser)]
#[command(name = "elcone", version, about = "Picard iteration for mixed complementarity problems over extended Lorentz cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the Picard iteration on a problem file or a built-in problem.
    Solve(SolveArgs),
    /// Run property checks on a problem, on points of a problem, or a named suite.
    Verify(VerifyArgs),
    /// Recompute every reference value of the built-in problem.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct Source {
    /// Problem file (JSON).
    #[arg(conflicts_with = "builtin")]
    pub path: Option<PathBuf>,
    /// Built-in problem id.
    #[arg(long)]
    pub builtin: Option<String>,
}

impl Source {
    fn load(&self) -> Result<Option<(ProblemFile, Problem)>, CliError> {
        match (&self.path, &self.builtin) {
            (Some(path), None) => parse_problem(path).map(Some),
            (None, Some(id)) => {
                let file = ProblemFile::builtin(id)?;
                let problem = file.build()?;
                Ok(Some((file, problem)))
            }
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: Source,
    /// Start point as comma-separated values `x_1,..,x_p,u_1,..,u_q`; default 0.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub start: Option<Coords>,
    /// Write every iterate to this file (`.csv` for CSV, JSON otherwise).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol_step: Option<f64>,
    #[arg(long)]
    pub tol_residual: Option<f64>,
    /// Skip the order check between consecutive iterates.
    #[arg(long)]
    pub no_monotone_check: bool,
    /// Write the machine-readable report (JSON) to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Duality,
    Hyperplane,
    Projection,
    Isotone,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,
    /// Check membership of this point in Omega and Gamma; repeatable.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub point: Vec<Coords>,
    /// Start point for the start condition of a problem check.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub start: Option<Coords>,
    /// Run a named property suite instead of checking a problem.
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Sampled points or ordered pairs; per normal for the hyperplane suite.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Sampled members of L for the duality suite.
    #[arg(long, default_value_t = 1000)]
    pub members: usize,
    /// Random normals for the hyperplane suite.
    #[arg(long, default_value_t = 1000)]
    pub normals: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the machine-readable report (JSON) to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Write the table as JSON to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// A comma-separated list of finite numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

fn parse_list(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
                .and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("`{t}` is not finite")) })
        })
        .collect::<Result<Vec<f64>, String>>()
        .map(Coords)
}

/// Runs a parsed command line, writing the human-readable report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Reproduce(args) => cmd_reproduce(&args, out),
    }
}

fn io_out(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    let (file, problem) = args
        .source
        .load()?
        .ok_or_else(|| CliError::Usage("solve needs a problem file or --builtin <id>".into()))?;
    let mut opts = file.solve_options()?;
    if let Some(v) = args.max_iter {
        opts.max_iter = v;
    }
    if let Some(v) = args.tol_step {
        opts.tol_step = v;
    }
    if let Some(v) = args.tol_residual {
        opts.tol_residual = v;
    }
    if args.no_monotone_check {
        opts.monotone_check = false;
    }
    opts.trace = args.trace.is_some();
    opts.validate().map_err(|e| CliError::invalid("options", e))?;

    let start = args.start.clone().map(|c| c.0).or_else(|| file.start.clone());
    let z0 = match start {
        Some(data) => start_point(&problem, data)?,
        None => problem.zero_point(),
    };
    let rep = solve(&problem, &z0, &opts)?;
    let below_start = if in_gamma(&problem, &z0, opts.tol)? {
        Some(leq(&rep.solution, &z0, opts.tol)?)
    } else {
        None
    };

    if let Some(path) = &args.trace {
        output::write_trace(path, problem.name(), problem.p(), problem.q(), &rep.trace)?;
    }
    let json = SolveReportJson::new(problem.name(), z0.as_slice(), &opts, &rep, below_start);
    if let Some(path) = &args.report {
        output::write_file(path, &output::to_json(&json))?;
    }

    let w = &mut *out;
    (|| -> std::io::Result<()> {
        writeln!(w, "problem      {} (p = {}, q = {})", problem.name(), problem.p(), problem.q())?;
        writeln!(w, "start        {}", fmt_vec(z0.as_slice()))?;
        writeln!(w, "termination  {} after {} iterations", rep.termination, rep.iterations)?;
        writeln!(w, "residual     {:e}", rep.residual)?;
        writeln!(w, "x            {}", fmt_vec(rep.solution.x()))?;
        writeln!(w, "u            {}", fmt_vec(rep.solution.u()))?;
        let cert = match (opts.monotone_check, rep.monotone_certificate, rep.direction) {
            (false, _, _) => "not checked".to_string(),
            (true, true, Some(d)) => format!("yes, {}", d.as_str()),
            (true, true, None) => "yes".to_string(),
            (true, false, _) => match &rep.order_break {
                Some(b) => format!("no, step {} has L-slack {:e}", b.n, b.slack),
                None => "no".to_string(),
            },
        };
        writeln!(w, "monotone     {cert}")?;
        writeln!(w, "in Gamma     {}", yes_no(rep.gamma_member))?;
        if let Some(b) = below_start {
            writeln!(w, "below start  {}", yes_no(b))?;
        }
        if let Some(path) = &args.trace {
            writeln!(w, "trace        {} ({} rows)", path.display(), rep.trace.len())?;
        }
        Ok(())
    })()
    .map_err(io_out)?;

    Ok(match rep.termination {
        Termination::ResidualTol => ExitCode::Ok,
        Termination::MonotonicityViolation => ExitCode::Monotonicity,
        Termination::StepTol | Termination::MaxIter => ExitCode::NotConverged,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Debug, Serialize)]
struct VerifyJson {
    seed: u64,
    passed: bool,
    suites: Vec<SuiteReport>,
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    let tol = Tolerance::DEFAULT;
    let loaded = args.source.load()?;
    let mut suites = Vec::new();
    match (&loaded, args.suite) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--suite runs on its own; drop the problem source".into()));
        }
        (None, None) => {
            return Err(CliError::Usage(
                "verify needs a problem file, --builtin <id> or --suite <name>".into(),
            ));
        }
        (Some((file, problem)), None) => {
            if args.point.is_empty() {
                let start = args.start.clone().map(|c| c.0).or_else(|| file.start.clone());
                let z0 = match start {
                    Some(d) => start_point(problem, d)?,
                    None => problem.zero_point(),
                };
                let samples = args.samples.unwrap_or(10_000);
                suites.push(SuiteReport {
                    suite: format!("problem {}", problem.name()),
                    seed: args.seed,
                    checks: verify::problem_checks(problem, &z0, samples, args.seed, tol)?,
                });
            }
            for pt in &args.point {
                let z = start_point(problem, pt.0.clone())?;
                suites.push(SuiteReport {
                    suite: format!("point {}", fmt_vec(z.as_slice())),
                    seed: args.seed,
                    checks: verify::point_checks(problem, &z, tol)?,
                });
            }
        }
        (None, Some(suite)) => {
            let (p, q, seed) = (args.p, args.q, args.seed);
            let report = match suite {
                Suite::Duality => verify::duality_suite(p, q, args.samples.unwrap_or(10_000), args.members, seed, tol),
                Suite::Projection => verify::projection_suite(p, q, args.samples.unwrap_or(10_000), seed, tol),
                Suite::Isotone => verify::isotone_suite(p, q, args.samples.unwrap_or(10_000), seed, tol),
                Suite::Hyperplane => {
                    verify::hyperplane_suite(p, q, args.normals, args.samples.unwrap_or(200), seed, tol)
                }
            }
            .map_err(|e| CliError::invalid("suite", e))?;
            suites.push(report);
        }
    }

    let passed = suites.iter().all(SuiteReport::passed);
    if let Some(path) = &args.report {
        let json = VerifyJson {
            seed: args.seed,
            passed,
            suites: suites.clone(),
        };
        output::write_file(path, &output::to_json(&json))?;
    }
    (|| -> std::io::Result<()> {
        writeln!(out, "seed {}", args.seed)?;
        for s in &suites {
            writeln!(out, "{}", s.suite)?;
            for c in &s.checks {
                write_check(out, c)?;
            }
        }
        writeln!(out, "{}", if passed { "all checks passed" } else { "some checks FAILED" })
    })()
    .map_err(io_out)?;
    Ok(if passed { ExitCode::Ok } else { ExitCode::VerifyFailed })
}

fn write_check(out: &mut dyn Write, c: &CheckLine) -> std::io::Result<()> {
    let verdict = if c.passed { "PASS" } else { "FAIL" };
    writeln!(out, "  {}: {verdict}", c.name)?;
    if !c.detail.is_empty() {
        writeln!(out, "    {}", c.detail)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ReproduceJson<'a> {
    passed: bool,
    rows: &'a [Row],
}

pub fn cmd_reproduce(args: &ReproduceArgs, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    let rows = builtin_table()?;
    let passed = rows.iter().all(|r| r.passed);
    if let Some(path) = &args.report {
        output::write_file(path, &output::to_json(&ReproduceJson { passed, rows: &rows }))?;
    }
    write_table(out, &rows).map_err(io_out)?;
    Ok(if passed {
        ExitCode::Ok
    } else {
        ExitCode::ReproduceMismatch
    })
}

fn write_table(out: &mut dyn Write, rows: &[Row]) -> std::io::Result<()> {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
    writeln!(
        out,
        "{:<width$}  {:>24}  {:>24}  {:>9}  result",
        "quantity", "measured", "expected", "tolerance"
    )?;
    for r in rows {
        let (expected, tolerance) = if r.relation == "<=" {
            (format!("<= {:.1e}", r.tolerance), String::new())
        } else {
            (format!("{:.16e}", r.expected), format!("{:.1e}", r.tolerance))
        };
        writeln!(
            out,
            "{:<width$}  {:>24}  {:>24}  {:>9}  {}",
            r.label,
            format!("{:.16e}", r.measured),
            expected,
            tolerance,
            if r.passed { "ok" } else { "MISMATCH" }
        )?;
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} rows, {failed} mismatches", rows.len())
}

/// Runs the command line and maps errors to exit codes, printing errors to
/// `err`.
pub fn main_with(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode {
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

