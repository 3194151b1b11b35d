//! Metric projections onto every [`ConeSpec`] variant.
//!
//! Polyhedral cones are handled by exhaustive active-set enumeration: every
//! linearly independent subset of constraints (or generators) is tried in
//! lexicographic order and the first candidate satisfying the KKT conditions
//! is returned. The projection point is unique; only the reported active set
//! depends on the enumeration order.

use nalgebra::{DMatrix, DVector};

use crate::cone::{ConeSpec, Point, Tolerance, MAX_CONDITION};
use crate::error::{Error, Result};
use crate::linalg::{add, dist, dot, norm, sub};

/// Largest number of halfspaces or generators accepted by the enumeration.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub point: Vec<f64>,
    /// Constraints (or generators) carrying the KKT multipliers; empty for
    /// the non-polyhedral variants.
    pub active_set: Vec<usize>,
    pub distance: f64,
}

impl ProjectionResult {
    fn new(input: &[f64], point: Vec<f64>, active_set: Vec<usize>) -> Self {
        let distance = dist(input, &point);
        ProjectionResult {
            point,
            active_set,
            distance,
        }
    }
}

pub fn project(spec: &ConeSpec, v: &[f64], tol: Tolerance) -> Result<ProjectionResult> {
    if v.len() != spec.dim() {
        return Err(Error::dim("projection input", spec.dim(), v.len()));
    }
    match spec {
        ConeSpec::Orthant { .. } => {
            let active = (0..v.len()).filter(|&i| v[i] < 0.0).collect();
            Ok(ProjectionResult::new(
                v,
                v.iter().map(|t| t.max(0.0)).collect(),
                active,
            ))
        }
        ConeSpec::SecondOrder { .. } => Ok(ProjectionResult::new(v, project_second_order(v), vec![])),
        ConeSpec::Halfspaces { normals } => project_polyhedral(normals, v, tol),
        ConeSpec::Generated { generators } => project_generated(generators, v, tol),
        ConeSpec::Hyperplane { normal } => {
            let t = dot(normal, v);
            let point = v.iter().zip(normal).map(|(vi, ai)| vi - t * ai).collect();
            Ok(ProjectionResult::new(v, point, vec![]))
        }
        ConeSpec::Product { p, inner } => {
            let inner_res = project(inner, &v[*p..], tol)?;
            let mut point = v[..*p].to_vec();
            point.extend_from_slice(&inner_res.point);
            let active = inner_res.active_set.iter().map(|j| j + p).collect();
            Ok(ProjectionResult::new(v, point, active))
        }
    }
}

/// Projection onto `R^p x C`: the `x` block passes through untouched.
pub fn project_product(x: &[f64], u: &[f64], inner: &ConeSpec, tol: Tolerance) -> Result<Point> {
    let pu = project(inner, u, tol)?;
    Point::new(x.to_vec(), pu.point)
}

/// `P_{y + C} x = y + P_C(x - y)`.
pub fn translate_project(y: &[f64], spec: &ConeSpec, x: &[f64], tol: Tolerance) -> Result<Vec<f64>> {
    if y.len() != x.len() {
        return Err(Error::dim("translation vector", x.len(), y.len()));
    }
    let inner = project(spec, &sub(x, y), tol)?;
    Ok(add(y, &inner.point))
}

/// Closed-form projection onto `{(w, t) : ||w|| <= t}` with `t` stored last.
pub fn project_second_order(v: &[f64]) -> Vec<f64> {
    let (w, t) = v.split_at(v.len() - 1);
    let t = t[0];
    let nw = norm(w);
    if nw <= t {
        return v.to_vec();
    }
    if nw <= -t || nw < 1e-300 {
        return vec![0.0; v.len()];
    }
    let alpha = 0.5 * (t + nw);
    let mut out: Vec<f64> = w.iter().map(|wi| alpha * wi / nw).collect();
    out.push(alpha);
    out
}

fn unit_rows(rows: &[Vec<f64>], what: &str) -> Result<Vec<Vec<f64>>> {
    if rows.is_empty() {
        return Err(Error::Degenerate(format!("{what} list is empty")));
    }
    if rows.len() > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            count: rows.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let m = rows[0].len();
    rows.iter()
        .enumerate()
        .map(|(j, r)| {
            if r.len() != m {
                return Err(Error::dim(format!("{what} {j}"), m, r.len()));
            }
            let n = norm(r);
            if n == 0.0 || !n.is_finite() {
                return Err(Error::Degenerate(format!("{what} {j} has zero length")));
            }
            Ok(r.iter().map(|x| x / n).collect())
        })
        .collect()
}

/// Solves the Gram system of the selected rows against `v`. `None` when the
/// rows are linearly dependent.
fn gram_solve(rows: &[Vec<f64>], subset: &[usize], v: &[f64]) -> Option<Vec<f64>> {
    let k = subset.len();
    if k == 0 {
        return Some(vec![]);
    }
    let gram = DMatrix::from_fn(k, k, |i, j| dot(&rows[subset[i]], &rows[subset[j]]));
    let rhs = DVector::from_fn(k, |i, _| dot(&rows[subset[i]], v));
    let sv = gram.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin <= 0.0 || smax / smin > MAX_CONDITION {
        return None;
    }
    let chol = gram.cholesky()?;
    Some(chol.solve(&rhs).iter().cloned().collect())
}

/// Visits subsets of `0..n` with at most `max_len` elements in lexicographic
/// order until `visit` returns `true`.
pub(crate) fn for_each_subset(n: usize, max_len: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        start: usize,
        n: usize,
        max_len: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if visit(cur) {
            return true;
        }
        if cur.len() == max_len {
            return false;
        }
        for i in start..n {
            cur.push(i);
            if rec(i + 1, n, max_len, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, max_len, &mut Vec::new(), visit)
}

/// Acceptance slack for KKT candidates: roundoff level, or `eps` if smaller.
/// A user tolerance here would accept slightly infeasible points.
fn kkt_slack(v: &[f64], tol: Tolerance) -> f64 {
    let scale = norm(v).max(1.0);
    (64.0 * f64::EPSILON).min(tol.eps()) * scale
}

struct Best {
    violation: f64,
    point: Vec<f64>,
    active: Vec<usize>,
}

/// Exact projection onto `{v : <n^j, v> <= 0 for all j}`.
///
/// For each independent subset `A` the candidate is the projection of `v`
/// onto `{<n^j, .> = 0, j in A}`; it is accepted when it is feasible and
/// `v - point = sum_{j in A} mu_j n^j` with `mu >= 0`.
pub fn project_polyhedral(normals: &[Vec<f64>], v: &[f64], tol: Tolerance) -> Result<ProjectionResult> {
    let rows = unit_rows(normals, "halfspace normal")?;
    let m = rows[0].len();
    if v.len() != m {
        return Err(Error::dim("projection input", m, v.len()));
    }
    let slack = kkt_slack(v, tol);
    let mut best: Option<Best> = None;
    let found = for_each_subset(rows.len(), m, &mut |subset| {
        let Some(mu) = gram_solve(&rows, subset, v) else {
            return false;
        };
        let mut point = v.to_vec();
        for (&j, &mj) in subset.iter().zip(&mu) {
            for (pi, nj) in point.iter_mut().zip(&rows[j]) {
                *pi -= mj * nj;
            }
        }
        let dual_violation = mu.iter().fold(0.0f64, |acc, &t| acc.max(-t));
        let primal_violation = rows.iter().fold(0.0f64, |acc, n| acc.max(dot(n, &point)));
        let violation = dual_violation.max(primal_violation);
        let accept = violation <= slack;
        if best.as_ref().is_none_or(|b| violation < b.violation) || accept {
            best = Some(Best {
                violation,
                point,
                active: subset.to_vec(),
            });
        }
        accept
    });
    let best = best.ok_or_else(|| Error::Degenerate("no independent constraint subset".into()))?;
    debug_assert!(found || best.violation.is_finite());
    Ok(ProjectionResult::new(v, best.point, best.active))
}

/// Exact projection onto `cone{g^1, ..., g^k}` (nonnegative least squares by
/// enumeration of independent generator subsets).
pub fn project_generated(generators: &[Vec<f64>], v: &[f64], tol: Tolerance) -> Result<ProjectionResult> {
    let rows = unit_rows(generators, "generator")?;
    let m = rows[0].len();
    if v.len() != m {
        return Err(Error::dim("projection input", m, v.len()));
    }
    let slack = kkt_slack(v, tol);
    let mut best: Option<Best> = None;
    for_each_subset(rows.len(), m, &mut |subset| {
        let Some(lambda) = gram_solve(&rows, subset, v) else {
            return false;
        };
        let mut point = vec![0.0; m];
        for (&j, &lj) in subset.iter().zip(&lambda) {
            for (pi, gj) in point.iter_mut().zip(&rows[j]) {
                *pi += lj * gj;
            }
        }
        let residual = sub(v, &point);
        let coef_violation = lambda.iter().fold(0.0f64, |acc, &t| acc.max(-t));
        let kkt_violation = rows.iter().fold(0.0f64, |acc, g| acc.max(dot(g, &residual)));
        let violation = coef_violation.max(kkt_violation);
        let accept = violation <= slack;
        if best.as_ref().is_none_or(|b| violation < b.violation) || accept {
            best = Some(Best {
                violation,
                point,
                active: subset.to_vec(),
            });
        }
        accept
    });
    let best = best.ok_or_else(|| Error::Degenerate("no independent generator subset".into()))?;
    Ok(ProjectionResult::new(v, best.point, best.active))
}
