//! Reproduction table for the built-in problem: every row compares a
//! measured quantity with its expected value at a stated tolerance.

use num_traits::Signed;
use serde::Serialize;

use crate::cone::{contains_l, leq, Tolerance};
use crate::error::Result;
use crate::example::{self, CONTRACTION, OMEGA_POINT, SOLUTION};
use crate::exact::{rat, to_f64, Rational};
use crate::linalg::{dist, dot, norm, norm_inf};
use crate::solver::{in_gamma, in_omega, micp_certificate, picard_step, solve, SolveOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub label: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// `"="`: `|measured - expected| <= tolerance`; `"<="`: `measured <= tolerance`.
    pub relation: &'static str,
    pub passed: bool,
}

impl Row {
    /// `|measured - expected| <= tolerance`.
    pub fn close(label: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Row {
            label: label.into(),
            measured,
            expected,
            tolerance,
            relation: "=",
            passed: (measured - expected).abs() <= tolerance,
        }
    }

    /// `measured <= bound`.
    pub fn at_most(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Row {
            label: label.into(),
            measured,
            expected: 0.0,
            tolerance: bound,
            relation: "<=",
            passed: measured <= bound,
        }
    }

    /// A yes/no outcome; `measured` and `expected` are 1 for yes, 0 for no.
    pub fn flag(label: impl Into<String>, measured: bool, expected: bool) -> Self {
        Row::close(label, f64::from(u8::from(measured)), f64::from(u8::from(expected)), 0.0)
    }
}

/// The error ratio `|e^{n+1}| / |e^n|` farthest from `5/24` over `n` in
/// `[from, to]`, for the exact iterates; `e^n` is the error of coordinate
/// `index` against `target`.
pub fn exact_contraction_worst(index: usize, target: &Rational, from: usize, to: usize) -> Result<f64> {
    let iterates = example::exact_problem().iterate(vec![rat(0, 1); 4], to + 1)?;
    let expected = rat(5, 24);
    let mut worst = expected.clone();
    for n in from..=to {
        let e0 = (&iterates[n][index] - target).abs();
        let e1 = (&iterates[n + 1][index] - target).abs();
        let ratio = e1 / e0;
        if (&ratio - &expected).abs() > (&worst - &expected).abs() {
            worst = ratio;
        }
    }
    Ok(to_f64(&worst))
}

/// The same in double precision, over the `n` with `|e^{n+1}| > min_error`;
/// also returns the last such `n`.
pub fn f64_contraction_worst(
    iterates: &[Vec<f64>],
    index: usize,
    target: f64,
    from: usize,
    to: usize,
    min_error: f64,
) -> (f64, usize) {
    let mut worst = CONTRACTION;
    let mut last = from;
    for n in from..=to.min(iterates.len().saturating_sub(2)) {
        let e0 = (iterates[n][index] - target).abs();
        let e1 = (iterates[n + 1][index] - target).abs();
        if e1 <= min_error {
            break;
        }
        let ratio = e1 / e0;
        if (ratio - CONTRACTION).abs() > (worst - CONTRACTION).abs() {
            worst = ratio;
        }
        last = n;
    }
    (worst, last)
}

/// The full table; every row should pass.
pub fn builtin_table() -> Result<Vec<Row>> {
    let tol = Tolerance::DEFAULT;
    let problem = example::problem();
    let mut rows = Vec::new();

    let opts = SolveOptions {
        trace: true,
        ..SolveOptions::default()
    };
    let report = solve(&problem, &problem.zero_point(), &opts)?;
    let iterates: Vec<Vec<f64>> = report.trace.iter().map(|r| r.z.as_slice().to_vec()).collect();
    rows.push(Row::flag("converges from the origin", report.converged(), true));
    rows.push(Row::at_most("iterations to residual 1e-10", report.iterations as f64, 60.0));
    rows.push(Row::at_most("natural-map residual at the limit", report.residual, 1e-10));
    rows.push(Row::at_most(
        "distance of the limit to (8/15, 8/15, 0, 4/15)",
        norm_inf(&crate::linalg::sub(report.solution.as_slice(), &SOLUTION)),
        1e-10,
    ));
    rows.push(Row::flag(
        "every step is L-increasing",
        report.monotone_certificate && report.direction == Some(crate::solver::Direction::Increasing),
        true,
    ));

    let (worst, last) = f64_contraction_worst(&iterates, 0, SOLUTION[0], 2, 30, 1e-6);
    rows.push(Row::close(format!("x_1 error ratio, double, n = 2..{last}"), worst, CONTRACTION, 1e-9));
    let (worst, last) = f64_contraction_worst(&iterates, 3, SOLUTION[3], 2, 30, 1e-6);
    rows.push(Row::close(format!("u_2 error ratio, double, n = 2..{last}"), worst, CONTRACTION, 1e-9));
    rows.push(Row::close(
        "x_1 error ratio, exact, n = 2..30",
        exact_contraction_worst(0, &rat(8, 15), 2, 30)?,
        CONTRACTION,
        1e-9,
    ));
    rows.push(Row::close(
        "u_2 error ratio, exact, n = 2..30",
        exact_contraction_worst(3, &rat(4, 15), 2, 30)?,
        CONTRACTION,
        1e-9,
    ));

    let z1 = &iterates[1];
    rows.push(Row::at_most(
        "first iterate ((0.4, 0.4), (0, 7/30))",
        norm_inf(&crate::linalg::sub(z1, &[0.4, 0.4, 0.0, 7.0 / 30.0])),
        1e-15,
    ));
    let (_, h0) = problem.blocks(&problem.zero_point())?;
    rows.push(Row::close("||H(0)||", norm(&h0), 2f64.sqrt() / 6.0, 1e-15));

    let mut s_breaks = 0usize;
    let mut recurrence = 0.0f64;
    let mut min_slack = f64::INFINITY;
    for n in 1..iterates.len() {
        let z = &iterates[n];
        let in_s = z[0] == z[1]
            && (0.0..SOLUTION[0]).contains(&z[0])
            && z[2] == 0.0
            && (0.0..SOLUTION[3]).contains(&z[3]);
        s_breaks += usize::from(!in_s);
        recurrence = recurrence.max((z[0] - (4.0 * z[3] - 8.0 / 15.0)).abs());
        let a = problem.point(iterates[n - 1].clone())?;
        let b = problem.point(z.clone())?;
        min_slack = min_slack.min(crate::cone::l_slack(&crate::cone::difference(&b, &a)?));
    }
    rows.push(Row::at_most("iterates n >= 1 outside S", s_breaks as f64, 0.0));
    rows.push(Row::at_most("|x_1 - (4 u_2 - 8/15)| over n >= 1", recurrence, 1e-12));
    rows.push(Row::at_most("order violation max(0, -L-slack(z^{n+1} - z^n))", (-min_slack).max(0.0), 1e-12));

    let w = problem.point(OMEGA_POINT.to_vec())?;
    let (g, h) = problem.blocks(&w)?;
    rows.push(Row::flag("(31, 31, 3, 4) in Omega", in_omega(&problem, &w, tol)?, true));
    rows.push(Row::at_most("G(31, 31, 3, 4) vs (24.6, 24.6)", dist(&g, &[24.6, 24.6]), 1e-12));
    rows.push(Row::at_most(
        "H(31, 31, 3, 4) vs (23/15, 34/15)",
        dist(&h, &[23.0 / 15.0, 34.0 / 15.0]),
        1e-12,
    ));
    rows.push(Row::flag("(31, 31, 3, 4) in Gamma", in_gamma(&problem, &w, tol)?, true));
    rows.push(Row::flag(
        "limit <=_L (31, 31, 3, 4)",
        leq(&report.solution, &w, tol)?,
        true,
    ));

    let c1 = problem.point(example::ray_candidate().to_vec())?;
    let (g1, h1) = problem.blocks(&c1)?;
    rows.push(Row::at_most("ray candidate ||G||_inf", norm_inf(&g1), 1e-12));
    rows.push(Row::at_most("ray candidate |<u, H>|", dot(c1.u(), &h1).abs(), 1e-12));
    rows.push(Row::flag(
        "ray candidate H in C* (derived: no)",
        problem.cone().contains_dual(&h1, tol)?,
        false,
    ));
    let next = picard_step(&problem, &c1)?;
    rows.push(Row::flag(
        "ray candidate is a fixed point (derived: no)",
        dist(next.as_slice(), c1.as_slice()) <= 1e-10,
        false,
    ));

    let cert = micp_certificate(&problem, &report.solution, tol)?;
    rows.push(Row::at_most("limit ||G||_inf", cert.g_inf, 1e-10));
    rows.push(Row::flag("limit u in C", cert.u_in_c, true));
    rows.push(Row::flag(
        "limit H in C* by dual generators (1, 0), (-1, 1)",
        in_dual_by_generators(&cert.h, tol),
        true,
    ));
    rows.push(Row::at_most("limit |<u, H>|", cert.complementarity.abs(), 1e-10));
    rows.push(Row::flag("limit in L", contains_l(&report.solution, tol), true));
    Ok(rows)
}

/// `H` in `C* = cone{(1, 0), (-1, 1)}`: with `H = a (1, 0) + b (-1, 1)`,
/// `b = H_2` and `a = H_1 + H_2`.
pub fn in_dual_by_generators(h: &[f64], tol: Tolerance) -> bool {
    let (a, b) = (h[0] + h[1], h[1]);
    a >= -tol.eps() && b >= -tol.eps()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_passes() {
        let rows = builtin_table().unwrap();
        for r in &rows {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn dual_generators() {
        let t = Tolerance::DEFAULT;
        assert!(in_dual_by_generators(&[0.0, 0.0], t));
        assert!(in_dual_by_generators(&[-1.0, 1.0], t));
        assert!(!in_dual_by_generators(&[2.0 / 15.0, -2.0 / 15.0], t));
    }
}
