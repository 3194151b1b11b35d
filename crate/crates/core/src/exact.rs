//! The mixed Picard iteration in exact rational arithmetic.
//!
//! Supports isotone combinations of Lorentz-affine scalar functions over a
//! halfspace cone `C`. Norms are taken exactly; a norm that is not rational
//! is an error. Double precision cannot resolve the error ratio of a
//! geometrically convergent sequence once the error drops below machine
//! epsilon; this module can.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::projection::for_each_subset;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Square root of a nonnegative rational whose numerator and denominator are
/// perfect squares.
pub fn sqrt_exact(r: &Rational) -> Result<Rational> {
    if r.is_negative() {
        return Err(Error::Exact(format!("square root of negative value {r}")));
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    if &(&sn * &sn) != n || &(&sd * &sd) != d {
        return Err(Error::Exact(format!("norm sqrt({r}) is irrational")));
    }
    Ok(BigRational::new(sn, sd))
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Gaussian elimination; `None` for singular systems.
fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (target, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *target -= &factor * p;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Exact projection onto `{v : <n^j, v> <= 0}`; returns the point and the
/// lexicographically first KKT active set.
pub fn project_halfspaces(normals: &[Vec<Rational>], v: &[Rational]) -> Result<(Vec<Rational>, Vec<usize>)> {
    let m = v.len();
    if normals.is_empty() || normals.iter().any(|n| n.len() != m) {
        return Err(Error::Exact("halfspace normals must be nonempty and match the input".into()));
    }
    let mut found = None;
    for_each_subset(normals.len(), m, &mut |subset| {
        let gram = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| dot(&normals[i], &normals[j])).collect())
            .collect();
        let rhs = subset.iter().map(|&i| dot(&normals[i], v)).collect();
        let Some(mu) = solve_linear(gram, rhs) else {
            return false;
        };
        if mu.iter().any(|t| t.is_negative()) {
            return false;
        }
        let mut point = v.to_vec();
        for (&j, mj) in subset.iter().zip(&mu) {
            for (pi, nj) in point.iter_mut().zip(&normals[j]) {
                *pi -= mj * nj;
            }
        }
        if normals.iter().any(|n| dot(n, &point).is_positive()) {
            return false;
        }
        found = Some((point, subset.to_vec()));
        true
    });
    found.ok_or_else(|| Error::Exact("no KKT point found".into()))
}

/// `f(z) w` with `f(z) = <d, x> + beta ||u|| + gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTerm {
    pub d: Vec<Rational>,
    pub beta: Rational,
    pub gamma: Rational,
    pub weight: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactProblem {
    p: usize,
    q: usize,
    terms: Vec<ExactTerm>,
    normals: Vec<Vec<Rational>>,
}

impl ExactProblem {
    /// `F = I - sum_i f_i w^i` over `K = R^p x {<n^j, u> <= 0}`.
    pub fn new(p: usize, q: usize, terms: Vec<ExactTerm>, normals: Vec<Vec<Rational>>) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidSplit { p, q });
        }
        for (index, t) in terms.iter().enumerate() {
            if t.d.len() != p {
                return Err(Error::dim("exact term d", p, t.d.len()));
            }
            if t.weight.len() != p + q {
                return Err(Error::dim("exact term weight", p + q, t.weight.len()));
            }
            let sum_d = t.d.iter().fold(Rational::zero(), |a, b| a + b);
            if t.d.iter().any(|v| v.is_negative()) || t.beta.abs() > sum_d {
                return Err(Error::InvalidMap(format!("exact term {index} is not L-monotone")));
            }
            // x_i >= ||w_u|| iff x_i >= 0 and x_i^2 >= ||w_u||^2
            let (wx, wu) = t.weight.split_at(p);
            let nu2 = dot(wu, wu);
            if wx.iter().any(|xi| xi.is_negative() || xi * xi < nu2) {
                return Err(Error::WeightNotInCone {
                    index,
                    detail: "x >= ||u|| e fails".into(),
                });
            }
        }
        if normals.is_empty() || normals.iter().any(|n| n.len() != q) {
            return Err(Error::Exact("cone normals must be nonempty with length q".into()));
        }
        Ok(ExactProblem { p, q, terms, normals })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `T(z) = z - F(z)`.
    pub fn isotone_part(&self, z: &[Rational]) -> Result<Vec<Rational>> {
        if z.len() != self.p + self.q {
            return Err(Error::dim("exact point", self.p + self.q, z.len()));
        }
        let (x, u) = z.split_at(self.p);
        let nu = sqrt_exact(&dot(u, u))?;
        let mut out = vec![Rational::zero(); z.len()];
        for t in &self.terms {
            let c = dot(&t.d, x) + &t.beta * &nu + &t.gamma;
            for (o, w) in out.iter_mut().zip(&t.weight) {
                *o += &c * w;
            }
        }
        Ok(out)
    }

    /// One mixed Picard step.
    pub fn step(&self, z: &[Rational]) -> Result<Vec<Rational>> {
        let mut v = self.isotone_part(z)?;
        let (pu, _) = project_halfspaces(&self.normals, &v[self.p..])?;
        v.truncate(self.p);
        v.extend(pu);
        Ok(v)
    }

    /// `z^0, ..., z^steps`.
    pub fn iterate(&self, z0: Vec<Rational>, steps: usize) -> Result<Vec<Vec<Rational>>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(z0);
        for _ in 0..steps {
            let next = self.step(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sqrt() {
        assert_eq!(sqrt_exact(&rat(9, 49)).unwrap(), rat(3, 7));
        assert_eq!(sqrt_exact(&rat(0, 1)).unwrap(), rat(0, 1));
        assert!(sqrt_exact(&rat(2, 1)).is_err());
        assert!(sqrt_exact(&rat(-1, 4)).is_err());
    }

    #[test]
    fn exact_projection() {
        let normals = vec![vec![rat(1, 1), rat(-1, 1)], vec![rat(-1, 1), rat(0, 1)]];
        let (p, a) = project_halfspaces(&normals, &[rat(3, 1), rat(1, 1)]).unwrap();
        assert_eq!(p, vec![rat(2, 1), rat(2, 1)]);
        assert_eq!(a, vec![0]);
        let (p, a) = project_halfspaces(&normals, &[rat(-1, 1), rat(-2, 1)]).unwrap();
        assert_eq!(p, vec![rat(0, 1), rat(0, 1)]);
        assert_eq!(a, vec![0, 1]);
        let (p, _) = project_halfspaces(&normals, &[rat(-1, 30), rat(7, 30)]).unwrap();
        assert_eq!(p, vec![rat(0, 1), rat(7, 30)]);
    }

    #[test]
    fn linear_solve() {
        let a = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(3, 1)]];
        let x = solve_linear(a, vec![rat(3, 1), rat(5, 1)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        let singular = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert!(solve_linear(singular, vec![rat(1, 1), rat(1, 1)]).is_none());
    }
}
