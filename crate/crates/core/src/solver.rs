//! Picard iteration for `NCP(F, K)` with `K = R^p x C`, equivalently the
//! mixed problem `G(x, u) = 0, C ∋ u ⊥ H(x, u) ∈ C*` with `F = (G, H)`.

use std::fmt;
use std::sync::Arc;

use crate::cone::{contains_l, l_slack, leq, ConeSpec, Point, Tolerance};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf, sub};
use crate::map::Mapping;
use crate::projection::{project, project_product};

#[derive(Clone)]
pub struct Problem {
    name: String,
    p: usize,
    q: usize,
    cone: ConeSpec,
    product: ConeSpec,
    map: Arc<dyn Mapping>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("p", &self.p)
            .field("q", &self.q)
            .field("cone", &self.cone)
            .field("map", &self.map)
            .finish()
    }
}

impl Problem {
    /// `cone` is `C` (dimension `q`); `map` is `F = (G, H)` on `R^{p+q}`.
    pub fn new(
        name: impl Into<String>,
        p: usize,
        q: usize,
        cone: ConeSpec,
        map: Arc<dyn Mapping>,
    ) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidSplit { p, q });
        }
        if cone.dim() != q {
            return Err(Error::dim("cone dimension (q)", q, cone.dim()));
        }
        cone.validate(Tolerance::DEFAULT)?;
        if map.dim() != p + q {
            return Err(Error::dim("mapping dimension (p + q)", p + q, map.dim()));
        }
        Ok(Problem {
            name: name.into(),
            p,
            q,
            product: ConeSpec::product(p, cone.clone()),
            cone,
            map,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `C`.
    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    /// `K = R^p x C`.
    pub fn product_cone(&self) -> &ConeSpec {
        &self.product
    }

    pub fn map(&self) -> &Arc<dyn Mapping> {
        &self.map
    }

    /// Same cone and split, different mapping.
    pub fn with_map(&self, map: Arc<dyn Mapping>) -> Result<Self> {
        Problem::new(self.name.clone(), self.p, self.q, self.cone.clone(), map)
    }

    pub fn zero_point(&self) -> Point {
        Point::zeros(self.p, self.q).expect("validated split")
    }

    pub fn point(&self, data: Vec<f64>) -> Result<Point> {
        Point::from_flat(self.p, self.q, data)
    }

    fn check(&self, z: &Point) -> Result<()> {
        if z.p() != self.p {
            return Err(Error::dim("x block", self.p, z.p()));
        }
        if z.q() != self.q {
            return Err(Error::dim("u block", self.q, z.q()));
        }
        Ok(())
    }

    /// `F(z)`.
    pub fn eval(&self, z: &Point) -> Result<Point> {
        self.check(z)?;
        z.with_data(self.map.eval(z.as_slice())?)
    }

    /// `(G(z), H(z))`.
    pub fn blocks(&self, z: &Point) -> Result<(Vec<f64>, Vec<f64>)> {
        let f = self.eval(z)?;
        Ok((f.x().to_vec(), f.u().to_vec()))
    }

    /// `z` in `K`, i.e. `u` in `C`.
    pub fn in_k(&self, z: &Point, tol: Tolerance) -> Result<bool> {
        self.check(z)?;
        self.cone.contains(z.u(), tol)
    }
}

/// `z' = P_K(z - F(z))`.
pub fn picard_step(problem: &Problem, z: &Point) -> Result<Point> {
    let f = problem.eval(z)?;
    let v = sub(z.as_slice(), f.as_slice());
    let r = project(problem.product_cone(), &v, Tolerance::DEFAULT)?;
    z.with_data(r.point)
}

/// `x' = x - G(x, u)`, `u' = P_C(u - H(x, u))`.
pub fn mixed_picard_step(problem: &Problem, x: &[f64], u: &[f64]) -> Result<Point> {
    let mut data = x.to_vec();
    data.extend_from_slice(u);
    let z = problem.point(data)?;
    let (g, h) = problem.blocks(&z)?;
    let x_next = sub(x, &g);
    let u_shift = sub(u, &h);
    project_product(&x_next, &u_shift, problem.cone(), Tolerance::DEFAULT)
}

/// Natural-map residual `||z - P_K(z - F(z))||_inf`.
pub fn residual(problem: &Problem, z: &Point) -> Result<f64> {
    let next = picard_step(problem, z)?;
    Ok(norm_inf(&sub(z.as_slice(), next.as_slice())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Stop when `||z^{n+1} - z^n||_inf <= tol_step`.
    pub tol_step: f64,
    /// Stop when the natural-map residual is at most this.
    pub tol_residual: f64,
    pub monotone_check: bool,
    pub trace: bool,
    /// Slack for the order and membership checks.
    pub tol: Tolerance,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 10_000,
            tol_step: 1e-12,
            tol_residual: 1e-10,
            monotone_check: true,
            trace: false,
            tol: Tolerance::DEFAULT,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::InvalidMap("max_iter must be at least 1".into()));
        }
        for (name, v) in [("tol_step", self.tol_step), ("tol_residual", self.tol_residual)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidMap(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    StepTol,
    ResidualTol,
    MaxIter,
    MonotonicityViolation,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::StepTol => "step-tol",
            Termination::ResidualTol => "residual-tol",
            Termination::MaxIter => "max-iter",
            Termination::MonotonicityViolation => "monotonicity-violation",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One iterate: `z^n`, its residual and `||z^n - z^{n-1}||_inf` (zero for `n = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub z: Point,
    pub residual: f64,
    pub step_norm: f64,
}

/// Direction of the order along the iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `z^n <=_L z^{n+1}`, as from a start below the solution set.
    Increasing,
    /// `z^{n+1} <=_L z^n`, as from a start in `Gamma`.
    Decreasing,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        }
    }
}

/// The first step that broke the order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderBreak {
    pub n: usize,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// `z^0, ..., z^N` when tracing was requested.
    pub trace: Vec<TraceRow>,
    pub solution: Point,
    pub residual: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Every checked step was ordered in `direction`.
    pub monotone_certificate: bool,
    /// Set by the first ordered step.
    pub direction: Option<Direction>,
    pub gamma_member: bool,
    pub order_break: Option<OrderBreak>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::ResidualTol
    }
}

/// Runs the Picard iteration from `z0`.
///
/// The order check covers every step. The first ordered step fixes the
/// direction: increasing from starts like the origin of the built-in
/// problem, decreasing from starts in `Gamma`. Every later step must keep
/// it. A broken step from `z^0` only stops the run when `z^0` lies in `K`;
/// outside `K` the first step is a plain projection and need not be ordered.
pub fn solve(problem: &Problem, z0: &Point, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    problem.check(z0)?;
    if !z0.is_finite() {
        return Err(Error::NonFinite {
            index: z0.as_slice().iter().position(|v| !v.is_finite()).unwrap_or(0),
        });
    }
    let tol = opts.tol;
    let start_in_k = problem.in_k(z0, tol)?;

    let mut z = z0.clone();
    let mut next = picard_step(problem, &z)?;
    let mut res = norm_inf(&sub(z.as_slice(), next.as_slice()));
    let mut trace = Vec::new();
    if opts.trace {
        trace.push(TraceRow {
            n: 0,
            z: z.clone(),
            residual: res,
            step_norm: 0.0,
        });
    }
    let mut certificate = true;
    let mut order_break = None;
    let mut direction = None;
    let mut iterations = 0;
    let termination = loop {
        if res <= opts.tol_residual {
            break Termination::ResidualTol;
        }
        if iterations >= opts.max_iter {
            break Termination::MaxIter;
        }
        if opts.monotone_check && !ordered_step(&z, &next, &mut direction, tol)? {
            certificate = false;
            let slack = match direction {
                Some(Direction::Decreasing) => l_slack(&crate::cone::difference(&z, &next)?),
                _ => l_slack(&crate::cone::difference(&next, &z)?),
            };
            order_break.get_or_insert(OrderBreak { n: iterations, slack });
            if iterations > 0 || start_in_k {
                break Termination::MonotonicityViolation;
            }
        }
        let step = res;
        z = next;
        iterations += 1;
        next = picard_step(problem, &z)?;
        res = norm_inf(&sub(z.as_slice(), next.as_slice()));
        if opts.trace {
            trace.push(TraceRow {
                n: iterations,
                z: z.clone(),
                residual: res,
                step_norm: step,
            });
        }
        if res > opts.tol_residual && step <= opts.tol_step {
            break Termination::StepTol;
        }
    };
    let gamma_member = in_gamma(problem, &z, tol)?;
    Ok(SolveReport {
        trace,
        solution: z,
        residual: res,
        iterations,
        termination,
        monotone_certificate: certificate && opts.monotone_check,
        direction,
        gamma_member,
        order_break,
    })
}

fn ordered_step(z: &Point, next: &Point, direction: &mut Option<Direction>, tol: Tolerance) -> Result<bool> {
    Ok(match direction {
        Some(Direction::Increasing) => leq(z, next, tol)?,
        Some(Direction::Decreasing) => leq(next, z, tol)?,
        None => {
            if leq(z, next, tol)? {
                *direction = Some(Direction::Increasing);
            } else if leq(next, z, tol)? {
                *direction = Some(Direction::Decreasing);
            }
            direction.is_some()
        }
    })
}

/// `z` in `K ∩ L` with `F(z)` in `L`, i.e. `u ∈ C`, `x >= ||u|| e` and
/// `G(z) >= ||H(z)|| e`.
pub fn in_omega(problem: &Problem, z: &Point, tol: Tolerance) -> Result<bool> {
    Ok(problem.in_k(z, tol)? && contains_l(z, tol) && contains_l(&problem.eval(z)?, tol))
}

/// `z` in `K ∩ L` with `P_K(z - F(z)) <=_L z`.
pub fn in_gamma(problem: &Problem, z: &Point, tol: Tolerance) -> Result<bool> {
    if !(problem.in_k(z, tol)? && contains_l(z, tol)) {
        return Ok(false);
    }
    leq(&picard_step(problem, z)?, z, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartCheck {
    /// `z0 <=_L P_K(z0 - F(z0))`.
    pub ordered: bool,
    pub in_k: bool,
    /// `-F(z0)` in `L`; together with `in_k` this guarantees `ordered`.
    pub minus_f_in_l: bool,
    pub first_iterate: Point,
    /// `l_slack(z1 - z0)`.
    pub slack: f64,
}

impl StartCheck {
    pub fn sufficient(&self) -> bool {
        self.in_k && self.minus_f_in_l
    }
}

pub fn check_start(problem: &Problem, z0: &Point, tol: Tolerance) -> Result<StartCheck> {
    let first = picard_step(problem, z0)?;
    let slack = l_slack(&crate::cone::difference(&first, z0)?);
    let f = problem.eval(z0)?;
    let minus_f = f.with_data(f.as_slice().iter().map(|v| -v).collect())?;
    Ok(StartCheck {
        ordered: slack >= -tol.eps(),
        in_k: problem.in_k(z0, tol)?,
        minus_f_in_l: contains_l(&minus_f, tol),
        first_iterate: first,
        slack,
    })
}

/// `zstar <=_L w` for every sample `w`; each sample must be in `Omega`.
pub fn verify_lower_bound(
    problem: &Problem,
    zstar: &Point,
    omega_samples: &[Point],
    tol: Tolerance,
) -> Result<bool> {
    for (index, w) in omega_samples.iter().enumerate() {
        if !in_omega(problem, w, tol)? {
            return Err(Error::NotInOmega { index });
        }
    }
    for w in omega_samples {
        if !leq(zstar, w, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The mixed complementarity conditions evaluated at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MicpCertificate {
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub g_inf: f64,
    pub u_in_c: bool,
    pub h_in_dual: bool,
    /// `<u, H(x, u)>`.
    pub complementarity: f64,
}

impl MicpCertificate {
    pub fn holds(&self, tol: f64) -> bool {
        self.g_inf <= tol && self.u_in_c && self.h_in_dual && self.complementarity.abs() <= tol
    }
}

pub fn micp_certificate(problem: &Problem, z: &Point, tol: Tolerance) -> Result<MicpCertificate> {
    let (g, h) = problem.blocks(z)?;
    Ok(MicpCertificate {
        g_inf: norm_inf(&g),
        u_in_c: problem.cone().contains(z.u(), tol)?,
        h_in_dual: problem.cone().contains_dual(&h, tol)?,
        complementarity: dot(z.u(), &h),
        g,
        h,
    })
}
