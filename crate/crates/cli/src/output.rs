//! Trace files and machine-readable reports.
//!
//! Traces are CSV when the path ends in `.csv` and JSON otherwise. CSV
//! columns are `n, x_1..x_p, u_1..u_q, residual, step_norm` with every real
//! printed to 17 significant digits. JSON numbers use the shortest
//! representation that reads back to the same double.

use std::fmt::Write as _;
use std::path::Path;

use elcone::solver::TraceRow;
use elcone::{SolveOptions, SolveReport};
use serde::Serialize;

use crate::exit::CliError;

pub fn trace_csv(p: usize, q: usize, rows: &[TraceRow]) -> String {
    let mut out = String::from("n");
    for i in 1..=p {
        let _ = write!(out, ",x_{i}");
    }
    for i in 1..=q {
        let _ = write!(out, ",u_{i}");
    }
    out.push_str(",residual,step_norm\n");
    for r in rows {
        let _ = write!(out, "{}", r.n);
        for v in r.z.as_slice().iter().chain([&r.residual, &r.step_norm]) {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct JsonTraceRow<'a> {
    n: usize,
    x: &'a [f64],
    u: &'a [f64],
    residual: f64,
    step_norm: f64,
}

#[derive(Debug, Serialize)]
struct JsonTrace<'a> {
    problem: &'a str,
    p: usize,
    q: usize,
    rows: Vec<JsonTraceRow<'a>>,
}

pub fn trace_json(problem: &str, p: usize, q: usize, rows: &[TraceRow]) -> String {
    let trace = JsonTrace {
        problem,
        p,
        q,
        rows: rows
            .iter()
            .map(|r| JsonTraceRow {
                n: r.n,
                x: r.z.x(),
                u: r.z.u(),
                residual: r.residual,
                step_norm: r.step_norm,
            })
            .collect(),
    };
    to_json(&trace)
}

pub fn write_trace(path: &Path, problem: &str, p: usize, q: usize, rows: &[TraceRow]) -> Result<(), CliError> {
    let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if csv {
        trace_csv(p, q, rows)
    } else {
        trace_json(problem, p, q, rows)
    };
    write_file(path, &text)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct SolveOptionsJson {
    pub max_iter: usize,
    pub tol_step: f64,
    pub tol_residual: f64,
    pub monotone_check: bool,
    pub eps: f64,
}

impl From<&SolveOptions> for SolveOptionsJson {
    fn from(o: &SolveOptions) -> Self {
        SolveOptionsJson {
            max_iter: o.max_iter,
            tol_step: o.tol_step,
            tol_residual: o.tol_residual,
            monotone_check: o.monotone_check,
            eps: o.tol.eps(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OrderBreakJson {
    pub n: usize,
    pub slack: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveReportJson {
    pub problem: String,
    pub p: usize,
    pub q: usize,
    pub start: Vec<f64>,
    pub options: SolveOptionsJson,
    pub termination: &'static str,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub monotone_certificate: bool,
    pub direction: Option<&'static str>,
    pub order_break: Option<OrderBreakJson>,
    pub gamma_member: bool,
    /// `solution <=_L start`, reported when the start lies in `Gamma`.
    pub below_start: Option<bool>,
}

impl SolveReportJson {
    pub fn new(
        problem: &str,
        start: &[f64],
        opts: &SolveOptions,
        rep: &SolveReport,
        below_start: Option<bool>,
    ) -> Self {
        SolveReportJson {
            problem: problem.to_string(),
            p: rep.solution.p(),
            q: rep.solution.q(),
            start: start.to_vec(),
            options: opts.into(),
            termination: rep.termination.as_str(),
            converged: rep.converged(),
            iterations: rep.iterations,
            residual: rep.residual,
            x: rep.solution.x().to_vec(),
            u: rep.solution.u().to_vec(),
            monotone_certificate: rep.monotone_certificate,
            direction: rep.direction.map(|d| d.as_str()),
            order_break: rep.order_break.as_ref().map(|b| OrderBreakJson { n: b.n, slack: b.slack }),
            gamma_member: rep.gamma_member,
            below_start,
        }
    }
}
