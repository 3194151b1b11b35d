//! Points of `R^p x R^q`, cone descriptions, and the extended Lorentz cone
//! `L = {(x, u) : x >= ||u|| e}` together with its dual
//! `M = {(x, u) : <x, e> >= ||u||, x >= 0}`.
//!
//! Membership tests take an absolute [`Tolerance`] that is applied to each
//! defining inequality separately.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::projection;

/// Condition estimate above which a generator matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Absolute slack applied to every defining inequality of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_nan() || eps < 0.0 {
            return Err(Error::InvalidCone(format!(
                "tolerance must be nonnegative, got {eps}"
            )));
        }
        Ok(Tolerance(eps))
    }

    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}

/// A vector of `R^p x R^q` with an explicit split into the `x` block
/// (length `p`) and the `u` block (length `q`).
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    p: usize,
    data: Vec<f64>,
}

impl Point {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if x.is_empty() || u.is_empty() {
            return Err(Error::InvalidSplit {
                p: x.len(),
                q: u.len(),
            });
        }
        let p = x.len();
        let mut data = x;
        data.extend(u);
        Ok(Point { p, data })
    }

    /// Builds a point from a flat vector, checking it against the declared split.
    pub fn from_flat(p: usize, q: usize, data: Vec<f64>) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidSplit { p, q });
        }
        if data.len() != p + q {
            return Err(Error::dim("point (p + q)", p + q, data.len()));
        }
        Ok(Point { p, data })
    }

    pub fn zeros(p: usize, q: usize) -> Result<Self> {
        Point::from_flat(p, q, vec![0.0; p + q])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.data.len() - self.p
    }

    pub fn x(&self) -> &[f64] {
        &self.data[..self.p]
    }

    pub fn u(&self) -> &[f64] {
        &self.data[self.p..]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Rebuilds a point with the same split from a flat vector.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Point::from_flat(self.p, self.q(), data)
    }

    pub fn same_split(&self, other: &Point) -> Result<()> {
        if self.p != other.p {
            return Err(Error::dim("x block", self.p, other.p));
        }
        if self.q() != other.q() {
            return Err(Error::dim("u block", self.q(), other.q()));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// `min_i x_i - ||u||`; nonnegative exactly on `L`.
pub fn l_slack(z: &Point) -> f64 {
    let nu = norm(z.u());
    z.x().iter().fold(f64::INFINITY, |m, &xi| m.min(xi)) - nu
}

pub fn contains_l(z: &Point, tol: Tolerance) -> bool {
    l_slack(z) >= -tol.eps()
}

pub fn contains_m(z: &Point, tol: Tolerance) -> bool {
    let eps = tol.eps();
    z.x().iter().all(|&xi| xi >= -eps) && z.x().iter().sum::<f64>() >= norm(z.u()) - eps
}

/// `z1 <=_L z2`, i.e. `z2 - z1` lies in `L`.
pub fn leq(z1: &Point, z2: &Point, tol: Tolerance) -> Result<bool> {
    Ok(contains_l(&difference(z2, z1)?, tol))
}

/// `a - b` keeping the split.
pub fn difference(a: &Point, b: &Point) -> Result<Point> {
    a.same_split(b)?;
    a.with_data(crate::linalg::sub(a.as_slice(), b.as_slice()))
}

/// Generator lists of `L` and `L*` for `q = 1`, where both are polyhedral.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeGenerators {
    pub cone: Vec<Point>,
    pub dual: Vec<Point>,
}

/// Minimal generator sets of `L` and `L* = M` for `q = 1`.
///
/// For `p = 1` the cone is the planar cone spanned by `(1, 1)` and `(1, -1)`;
/// for `p > 1` it is spanned by `(e, 1)`, `(e, -1)` and the `(e^i, 0)`.
/// The dual is always spanned by the `2p` vectors `(e^i, 1)`, `(e^i, -1)`.
pub fn generators_q1(p: usize) -> Result<ConeGenerators> {
    if p < 1 {
        return Err(Error::InvalidSplit { p, q: 1 });
    }
    let ones = vec![1.0; p];
    let unit = |i: usize| {
        let mut v = vec![0.0; p];
        v[i] = 1.0;
        v
    };
    let mut cone = vec![
        Point::new(ones.clone(), vec![1.0])?,
        Point::new(ones, vec![-1.0])?,
    ];
    if p > 1 {
        for i in 0..p {
            cone.push(Point::new(unit(i), vec![0.0])?);
        }
    }
    let mut dual = Vec::with_capacity(2 * p);
    for i in 0..p {
        dual.push(Point::new(unit(i), vec![1.0])?);
        dual.push(Point::new(unit(i), vec![-1.0])?);
    }
    Ok(ConeGenerators { cone, dual })
}

/// Ratio of extreme singular values; infinite for singular matrices.
pub fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Dual generators of the simplicial cone spanned by the columns of `u`:
/// the columns of `(U^T)^{-1}`, so that `<u^i, v^j> = delta_ij`.
pub fn dual_simplicial(u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if u.nrows() != u.ncols() {
        return Err(Error::dim("generator matrix columns", u.nrows(), u.ncols()));
    }
    let condition = condition_estimate(u);
    if condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    u.transpose()
        .try_inverse()
        .ok_or(Error::Singular { condition })
}

/// A closed convex cone.
///
/// Second-order cones store the scalar component *after* the vector block:
/// `(w_1, ..., w_{m-1}, t)` with `||w|| <= t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeSpec {
    /// Nonnegative orthant of `R^dim`.
    Orthant { dim: usize },
    /// `{(w, t) : ||w|| <= t}` in `R^dim`.
    SecondOrder { dim: usize },
    /// Polyhedral cone `{v : <n^j, v> <= 0 for all j}`.
    Halfspaces { normals: Vec<Vec<f64>> },
    /// Polyhedral cone spanned by the given generators.
    Generated { generators: Vec<Vec<f64>> },
    /// Linear hyperplane `{v : <a, v> = 0}` with unit normal `a`.
    Hyperplane { normal: Vec<f64> },
    /// `R^p x inner`.
    Product { p: usize, inner: Box<ConeSpec> },
}

impl ConeSpec {
    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Orthant { dim } | ConeSpec::SecondOrder { dim } => *dim,
            ConeSpec::Halfspaces { normals } => normals.first().map_or(0, Vec::len),
            ConeSpec::Generated { generators } => generators.first().map_or(0, Vec::len),
            ConeSpec::Hyperplane { normal } => normal.len(),
            ConeSpec::Product { p, inner } => p + inner.dim(),
        }
    }

    pub fn product(p: usize, inner: ConeSpec) -> ConeSpec {
        ConeSpec::Product {
            p,
            inner: Box::new(inner),
        }
    }

    /// Checks the structural invariants of the description.
    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        match self {
            ConeSpec::Orthant { dim } | ConeSpec::SecondOrder { dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidCone("dimension must be positive".into()));
                }
            }
            ConeSpec::Halfspaces { normals } => {
                check_rows("halfspace normal", normals)?;
                for (j, n) in normals.iter().enumerate() {
                    if norm(n) == 0.0 {
                        return Err(Error::InvalidCone(format!("halfspace normal {j} is zero")));
                    }
                }
            }
            ConeSpec::Generated { generators } => {
                check_rows("generator", generators)?;
            }
            ConeSpec::Hyperplane { normal } => {
                if normal.is_empty() {
                    return Err(Error::InvalidCone("hyperplane normal is empty".into()));
                }
                let nn = norm(normal);
                if (nn - 1.0).abs() > tol.eps().max(1e-12) {
                    return Err(Error::NonUnitNormal { norm: nn });
                }
            }
            ConeSpec::Product { p, inner } => {
                if *p == 0 {
                    return Err(Error::InvalidSplit { p: 0, q: inner.dim() });
                }
                inner.validate(tol)?;
            }
        }
        Ok(())
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::dim("cone vector", self.dim(), v.len()));
        }
        Ok(())
    }

    /// Membership of `v` in the cone.
    pub fn contains(&self, v: &[f64], tol: Tolerance) -> Result<bool> {
        self.check_len(v)?;
        let eps = tol.eps();
        Ok(match self {
            ConeSpec::Orthant { .. } => v.iter().all(|&t| t >= -eps),
            ConeSpec::SecondOrder { .. } => {
                let (w, t) = v.split_at(v.len() - 1);
                norm(w) <= t[0] + eps
            }
            ConeSpec::Halfspaces { normals } => normals.iter().all(|n| dot(n, v) <= eps),
            ConeSpec::Generated { generators } => {
                projection::project_generated(generators, v, tol)?.distance <= eps
            }
            ConeSpec::Hyperplane { normal } => dot(normal, v).abs() <= eps,
            ConeSpec::Product { p, inner } => inner.contains(&v[*p..], tol)?,
        })
    }

    /// Membership of `y` in the dual cone.
    ///
    /// Exact for the polyhedral variants (through their dual generators or
    /// defining generators); the orthant and second-order cones are self-dual.
    pub fn contains_dual(&self, y: &[f64], tol: Tolerance) -> Result<bool> {
        self.check_len(y)?;
        let eps = tol.eps();
        Ok(match self {
            ConeSpec::Orthant { .. } | ConeSpec::SecondOrder { .. } => self.contains(y, tol)?,
            ConeSpec::Halfspaces { .. } => {
                let gens = self.dual_generators().expect("halfspace cone has dual generators");
                projection::project_generated(&gens, y, tol)?.distance <= eps
            }
            ConeSpec::Generated { generators } => generators.iter().all(|g| dot(g, y) >= -eps),
            ConeSpec::Hyperplane { normal } => {
                let t = dot(normal, y);
                y.iter().zip(normal).all(|(yi, ai)| (yi - t * ai).abs() <= eps)
            }
            ConeSpec::Product { p, inner } => {
                y[..*p].iter().all(|t| t.abs() <= eps) && inner.contains_dual(&y[*p..], tol)?
            }
        })
    }

    /// Generators of the dual cone when it is finitely generated and they are
    /// available in closed form.
    pub fn dual_generators(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            ConeSpec::Orthant { dim } => Some(
                (0..*dim)
                    .map(|i| {
                        let mut e = vec![0.0; *dim];
                        e[i] = 1.0;
                        e
                    })
                    .collect(),
            ),
            ConeSpec::Halfspaces { normals } => Some(
                normals
                    .iter()
                    .map(|n| n.iter().map(|v| -v).collect())
                    .collect(),
            ),
            _ => None,
        }
    }
}

fn check_rows(what: &str, rows: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Err(Error::InvalidCone(format!("{what} list is empty")));
    };
    let m = first.len();
    if m == 0 {
        return Err(Error::InvalidCone(format!("{what} 0 is empty")));
    }
    for (j, r) in rows.iter().enumerate() {
        if r.len() != m {
            return Err(Error::dim(format!("{what} {j}"), m, r.len()));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCone(format!("{what} {j} is not finite")));
        }
    }
    Ok(m)
}
