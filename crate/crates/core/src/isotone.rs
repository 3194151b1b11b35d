//! Constructors and checks for `L`-isotone mappings.
//!
//! The constructive side builds `T(z) = f_1(z) w^1 + ... + f_l(z) w^l` from
//! `L`-monotone scalar functions `f_i` and weights `w^i` in `L`. Scalar
//! functions come from a closed grammar whose members are monotone by
//! construction once their parameters validate; nothing outside the grammar
//! is accepted as monotone without sampling.
//!
//! The checking side classifies hyperplanes whose projection preserves the
//! order, either by the normal-vector pattern (`p, q > 1`) or by the
//! generator-pair inequality `<x, y> >= <a, x><a, y>` for polyhedral cones,
//! and refutes isotonicity of arbitrary maps by sampling ordered pairs.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use serde::{Deserialize, Serialize};

use crate::cone::{contains_l, contains_m, dual_simplicial, l_slack, Point, Tolerance};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::map::Mapping;
use crate::sampling;

/// Nondecreasing functions `R -> R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Monotone1d {
    Affine { slope: f64, intercept: f64 },
    Exp,
    Arctan,
    /// Linear interpolation through `(x, y)` knots with strictly increasing
    /// `x` and nondecreasing `y`, extended linearly past both ends.
    PiecewiseLinear { knots: Vec<[f64; 2]> },
    /// `outer(inner(t))`.
    Compose {
        outer: Box<Monotone1d>,
        inner: Box<Monotone1d>,
    },
}

impl Monotone1d {
    pub fn validate(&self) -> Result<()> {
        match self {
            Monotone1d::Affine { slope, intercept } => {
                if !(slope.is_finite() && intercept.is_finite()) || *slope < 0.0 {
                    return Err(Error::InvalidMap(format!(
                        "affine slope must be finite and nonnegative, got {slope}"
                    )));
                }
            }
            Monotone1d::Exp | Monotone1d::Arctan => {}
            Monotone1d::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidMap("piecewise-linear needs at least two knots".into()));
                }
                for (k, w) in knots.windows(2).enumerate() {
                    if w[0][0].partial_cmp(&w[1][0]) != Some(Ordering::Less) {
                        return Err(Error::InvalidMap(format!(
                            "piecewise-linear knot abscissae must increase at knot {}",
                            k + 1
                        )));
                    }
                    if !matches!(w[0][1].partial_cmp(&w[1][1]), Some(Ordering::Less | Ordering::Equal)) {
                        return Err(Error::InvalidMap(format!(
                            "piecewise-linear values decrease at knot {}",
                            k + 1
                        )));
                    }
                }
                if knots.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidMap("piecewise-linear knots must be finite".into()));
                }
            }
            Monotone1d::Compose { outer, inner } => {
                outer.validate()?;
                inner.validate()?;
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Monotone1d::Affine { slope, intercept } => slope * t + intercept,
            Monotone1d::Exp => t.exp(),
            Monotone1d::Arctan => t.atan(),
            Monotone1d::PiecewiseLinear { knots } => {
                let n = knots.len();
                let seg = if t <= knots[0][0] {
                    0
                } else if t >= knots[n - 1][0] {
                    n - 2
                } else {
                    knots.partition_point(|k| k[0] <= t) - 1
                };
                let [x0, y0] = knots[seg];
                let [x1, y1] = knots[seg + 1];
                y0 + (y1 - y0) * (t - x0) / (x1 - x0)
            }
            Monotone1d::Compose { outer, inner } => outer.eval(inner.eval(t)),
        }
    }
}

/// `L`-monotone scalar functions on `R^p x R^q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MonotoneScalarFn {
    /// `<d, x> + beta ||u|| + gamma`, valid when `d >= 0` and
    /// `|beta| <= <d, e>`.
    LorentzAffine { d: Vec<f64>, beta: f64, gamma: f64 },
    /// `g_1(l_1) + ... + g_m(l_m)` where `z = U l` and the columns of `U`
    /// (listed in `generators`) span a simplicial cone containing `L`.
    SeparableSimplicial {
        generators: Vec<Vec<f64>>,
        g: Vec<Monotone1d>,
    },
    /// `psi(inner(z))`.
    Composed {
        inner: Box<MonotoneScalarFn>,
        psi: Monotone1d,
    },
}

/// `d >= 0` and `|beta| <= <d, e>`: then `y - x >= ||v - u|| e` gives
/// `<d, y - x> >= | ||v|| - ||u|| | <d, e>`, so the function is `L`-monotone.
pub fn validate_lorentz_affine(d: &[f64], beta: f64) -> bool {
    d.iter().all(|&di| di >= 0.0) && beta.abs() <= d.iter().sum::<f64>()
}

impl MonotoneScalarFn {
    pub fn validate(&self, p: usize, q: usize) -> Result<()> {
        match self {
            MonotoneScalarFn::LorentzAffine { d, beta, gamma } => {
                if d.len() != p {
                    return Err(Error::dim("lorentz_affine d", p, d.len()));
                }
                if !(d.iter().all(|v| v.is_finite()) && beta.is_finite() && gamma.is_finite()) {
                    return Err(Error::InvalidMap("lorentz_affine parameters must be finite".into()));
                }
                if !validate_lorentz_affine(d, *beta) {
                    return Err(Error::InvalidMap(format!(
                        "lorentz_affine needs d >= 0 and |beta| <= sum(d); got d = {d:?}, beta = {beta}"
                    )));
                }
            }
            MonotoneScalarFn::SeparableSimplicial { generators, g } => {
                let m = p + q;
                if generators.len() != m {
                    return Err(Error::dim("separable_simplicial generators", m, generators.len()));
                }
                if g.len() != m {
                    return Err(Error::dim("separable_simplicial g", m, g.len()));
                }
                for gi in g {
                    gi.validate()?;
                }
                let u = generator_matrix(generators, m)?;
                let v = dual_simplicial(&u)?;
                // L inside cone(U) iff cone(U)* = cone(V) inside L* = M.
                for (j, col) in v.column_iter().enumerate() {
                    let z = Point::from_flat(p, q, col.iter().cloned().collect())?;
                    if !contains_m(&z, Tolerance::DEFAULT) {
                        return Err(Error::InvalidMap(format!(
                            "simplicial cone does not contain L: dual generator {j} is outside L*"
                        )));
                    }
                }
            }
            MonotoneScalarFn::Composed { inner, psi } => {
                inner.validate(p, q)?;
                psi.validate()?;
            }
        }
        Ok(())
    }

    fn compile(&self, p: usize, q: usize) -> Result<CompiledScalar> {
        self.validate(p, q)?;
        Ok(match self {
            MonotoneScalarFn::LorentzAffine { d, beta, gamma } => CompiledScalar::LorentzAffine {
                d: d.clone(),
                beta: *beta,
                gamma: *gamma,
            },
            MonotoneScalarFn::SeparableSimplicial { generators, g } => {
                let u = generator_matrix(generators, p + q)?;
                let condition = crate::cone::condition_estimate(&u);
                let inverse = u.try_inverse().ok_or(Error::Singular { condition })?;
                CompiledScalar::Separable {
                    inverse,
                    g: g.clone(),
                }
            }
            MonotoneScalarFn::Composed { inner, psi } => CompiledScalar::Composed {
                inner: Box::new(inner.compile(p, q)?),
                psi: psi.clone(),
            },
        })
    }
}

fn generator_matrix(generators: &[Vec<f64>], m: usize) -> Result<DMatrix<f64>> {
    for (j, g) in generators.iter().enumerate() {
        if g.len() != m {
            return Err(Error::dim(format!("generator {j}"), m, g.len()));
        }
    }
    Ok(DMatrix::from_fn(m, m, |i, j| generators[j][i]))
}

#[derive(Debug, Clone)]
enum CompiledScalar {
    LorentzAffine { d: Vec<f64>, beta: f64, gamma: f64 },
    Separable { inverse: DMatrix<f64>, g: Vec<Monotone1d> },
    Composed { inner: Box<CompiledScalar>, psi: Monotone1d },
}

impl CompiledScalar {
    fn eval(&self, z: &[f64], p: usize) -> f64 {
        match self {
            CompiledScalar::LorentzAffine { d, beta, gamma } => {
                dot(d, &z[..p]) + beta * norm(&z[p..]) + gamma
            }
            CompiledScalar::Separable { inverse, g } => {
                let coords = inverse * DVector::from_column_slice(z);
                coords.iter().zip(g).map(|(c, gi)| gi.eval(*c)).sum()
            }
            CompiledScalar::Composed { inner, psi } => psi.eval(inner.eval(z, p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationTerm {
    pub f: MonotoneScalarFn,
    pub weight: Vec<f64>,
}

/// `T(z) = sum_i f_i(z) w^i` with every `w^i` in `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotoneCombination {
    pub p: usize,
    pub q: usize,
    pub terms: Vec<CombinationTerm>,
}

impl IsotoneCombination {
    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::InvalidSplit { p: self.p, q: self.q });
        }
        if self.terms.is_empty() {
            return Err(Error::InvalidMap("combination has no terms".into()));
        }
        for (index, term) in self.terms.iter().enumerate() {
            let w = Point::from_flat(self.p, self.q, term.weight.clone())?;
            if !contains_l(&w, tol) {
                let (i, xi) = w
                    .x()
                    .iter()
                    .cloned()
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
                return Err(Error::WeightNotInCone {
                    index,
                    detail: format!(
                        "x_{} >= ||u|| fails: x_{} = {xi} < ||u|| = {}",
                        i + 1,
                        i + 1,
                        norm(w.u())
                    ),
                });
            }
            term.f.validate(self.p, self.q)?;
        }
        Ok(())
    }
}

/// The evaluable form of an [`IsotoneCombination`].
#[derive(Debug, Clone)]
pub struct CombinationMap {
    p: usize,
    terms: Vec<(CompiledScalar, Vec<f64>)>,
}

impl CombinationMap {
    /// Values `f_i(z)` of the scalar functions.
    pub fn coefficients(&self, z: &[f64]) -> Vec<f64> {
        self.terms.iter().map(|(f, _)| f.eval(z, self.p)).collect()
    }
}

impl Mapping for CombinationMap {
    fn dim(&self) -> usize {
        self.terms[0].1.len()
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (f, w) in &self.terms {
            let c = f.eval(z, self.p);
            for (o, wi) in out.iter_mut().zip(w) {
                *o += c * wi;
            }
        }
        out
    }
}

pub fn build_combination(comb: &IsotoneCombination, tol: Tolerance) -> Result<CombinationMap> {
    comb.validate(tol)?;
    let terms = comb
        .terms
        .iter()
        .map(|t| Ok((t.f.compile(comb.p, comb.q)?, t.weight.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(CombinationMap { p: comb.p, terms })
}

/// Whether projection onto the hyperplane with unit normal `(a, u)` is
/// `L`-isotone, for `p, q > 1`: either `a = 0`, or `u = 0` and `a` has one
/// entry `sqrt(2)/2`, one entry `-sqrt(2)/2` and zeros elsewhere.
pub fn classify_hyperplane(a: &[f64], u: &[f64], tol: Tolerance) -> Result<bool> {
    let (p, q) = (a.len(), u.len());
    if p <= 1 || q <= 1 {
        return Err(Error::ClassificationNotApplicable { p, q });
    }
    hyperplane_pattern(a, u, tol)
}

/// The normal pattern `a = 0`, or `u = 0` with `a` equal to
/// `(e^i - e^j) / sqrt 2`. No restriction on `p` and `q`; for `q = 1` it
/// agrees with [`hyperplane_generator_condition`].
pub fn hyperplane_pattern(a: &[f64], u: &[f64], tol: Tolerance) -> Result<bool> {
    let p = a.len();
    let nn = (dot(a, a) + dot(u, u)).sqrt();
    if (nn - 1.0).abs() > tol.eps().max(1e-12) {
        return Err(Error::NonUnitNormal { norm: nn });
    }
    let eps = tol.eps();
    let zero = |v: &[f64]| v.iter().all(|t| t.abs() <= eps);
    if zero(a) {
        return Ok(true);
    }
    if !zero(u) {
        return Ok(false);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = a.iter().filter(|&&t| (t - h).abs() <= eps).count();
    let minus = a.iter().filter(|&&t| (t + h).abs() <= eps).count();
    let zeros = a.iter().filter(|&&t| t.abs() <= eps).count();
    Ok(plus == 1 && minus == 1 && zeros == p - 2)
}

/// `<x, y> >= <a, x><a, y>` for every generator `x` of `K` and `y` of `K*`.
/// Both sides are bilinear, so for polyhedral cones the generator pairs
/// decide the condition exactly.
pub fn hyperplane_generator_condition(
    a: &[f64],
    cone_gens: &[Vec<f64>],
    dual_gens: &[Vec<f64>],
    tol: Tolerance,
) -> Result<bool> {
    if cone_gens.is_empty() || dual_gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let na = norm(a);
    if (na - 1.0).abs() > tol.eps().max(1e-12) {
        return Err(Error::NonUnitNormal { norm: na });
    }
    for g in cone_gens.iter().chain(dual_gens) {
        if g.len() != a.len() {
            return Err(Error::dim("generator", a.len(), g.len()));
        }
    }
    Ok(cone_gens.iter().all(|x| {
        let ax = dot(a, x);
        dual_gens
            .iter()
            .all(|y| dot(x, y) >= ax * dot(a, y) - tol.eps())
    }))
}

/// An ordered pair whose images are not ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub z1: Point,
    pub z2: Point,
    /// `l_slack(F(z2) - F(z1))`, below `-eps`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsotonicityReport {
    pub samples: usize,
    pub seed: u64,
    pub violations: Vec<Violation>,
}

impl IsotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn ordered_pairs(p: usize, q: usize, samples: usize, seed: u64) -> Vec<(Point, Point)> {
    let mut rng = sampling::rng(seed);
    (0..samples)
        .map(|_| sampling::ordered_pair(&mut rng, p, q))
        .collect()
}

/// Checks `F(z1) <=_L F(z2)` on the given ordered pairs.
pub fn violations_on_pairs(
    map: &dyn Mapping,
    pairs: &[(Point, Point)],
    tol: Tolerance,
) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for (z1, z2) in pairs {
        let f1 = map.eval(z1.as_slice())?;
        let f2 = map.eval(z2.as_slice())?;
        let diff = z1.with_data(crate::linalg::sub(&f2, &f1))?;
        let slack = l_slack(&diff);
        if slack < -tol.eps() {
            out.push(Violation {
                z1: z1.clone(),
                z2: z2.clone(),
                slack,
            });
        }
    }
    Ok(out)
}

/// Sampling refutation of `L`-isotonicity: draws `samples` pairs
/// `z1 <=_L z2` and records every pair whose images are not ordered.
pub fn test_isotonicity(
    map: &dyn Mapping,
    p: usize,
    q: usize,
    samples: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<IsotonicityReport> {
    if map.dim() != p + q {
        return Err(Error::dim("mapping dimension", p + q, map.dim()));
    }
    let pairs = ordered_pairs(p, q, samples, seed);
    Ok(IsotonicityReport {
        samples,
        seed,
        violations: violations_on_pairs(map, &pairs, tol)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{AffineMap, FnMap, Negated};

    const TOL: Tolerance = Tolerance::DEFAULT;
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn monotone_grammar() {
        let pl = Monotone1d::PiecewiseLinear {
            knots: vec![[0.0, 0.0], [1.0, 2.0], [3.0, 2.0]],
        };
        pl.validate().unwrap();
        assert_eq!(pl.eval(-1.0), -2.0);
        assert_eq!(pl.eval(0.5), 1.0);
        assert_eq!(pl.eval(2.0), 2.0);
        assert_eq!(pl.eval(5.0), 2.0);
        let bad = Monotone1d::PiecewiseLinear {
            knots: vec![[0.0, 1.0], [1.0, 0.0]],
        };
        assert!(bad.validate().is_err());
        assert!(Monotone1d::Affine {
            slope: -1.0,
            intercept: 0.0
        }
        .validate()
        .is_err());
        let c = Monotone1d::Compose {
            outer: Box::new(Monotone1d::Arctan),
            inner: Box::new(Monotone1d::Exp),
        };
        assert_eq!(c.eval(0.0), 1f64.atan());
    }

    #[test]
    fn lorentz_affine_validation() {
        assert!(validate_lorentz_affine(&[1.0 / 12.0, 0.0], 1.0 / 12.0));
        assert!(validate_lorentz_affine(&[0.0, 1.0 / 12.0], 1.0 / 12.0));
        assert!(!validate_lorentz_affine(&[0.0, 0.0], 0.1));
        assert!(!validate_lorentz_affine(&[-0.1, 1.0], 0.0));
    }

    #[test]
    fn constant_combination() {
        let comb = IsotoneCombination {
            p: 2,
            q: 2,
            terms: vec![CombinationTerm {
                f: MonotoneScalarFn::LorentzAffine {
                    d: vec![0.0, 0.0],
                    beta: 0.0,
                    gamma: 1.0,
                },
                weight: vec![1.0, 1.0, 0.0, 0.0],
            }],
        };
        let f = build_combination(&comb, TOL).unwrap();
        assert_eq!(f.apply(&[3.0, -1.0, 2.0, 5.0]), vec![1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn weight_outside_l_is_rejected() {
        let comb = IsotoneCombination {
            p: 2,
            q: 1,
            terms: vec![CombinationTerm {
                f: MonotoneScalarFn::LorentzAffine {
                    d: vec![1.0, 0.0],
                    beta: 0.0,
                    gamma: 0.0,
                },
                weight: vec![1.0, 0.1, 0.5],
            }],
        };
        match build_combination(&comb, TOL) {
            Err(Error::WeightNotInCone { index, detail }) => {
                assert_eq!(index, 0);
                assert!(detail.contains("x_2"), "{detail}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn separable_simplicial_requires_enclosing_cone() {
        // Orthant of R^2 does not contain L for p = q = 1.
        let f = MonotoneScalarFn::SeparableSimplicial {
            generators: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            g: vec![Monotone1d::Exp, Monotone1d::Exp],
        };
        assert!(f.validate(1, 1).is_err());
        // cone{(1, 1), (1, -1)} is L itself for p = q = 1.
        let f = MonotoneScalarFn::SeparableSimplicial {
            generators: vec![vec![1.0, 1.0], vec![1.0, -1.0]],
            g: vec![Monotone1d::Exp, Monotone1d::Arctan],
        };
        f.validate(1, 1).unwrap();
        let c = f.compile(1, 1).unwrap();
        // (3, 1) = 2 (1, 1) + 1 (1, -1)
        assert!((c.eval(&[3.0, 1.0], 1) - (2f64.exp() + 1f64.atan())).abs() < 1e-12);
    }

    #[test]
    fn hyperplane_classification() {
        assert!(classify_hyperplane(&[0.0, 0.0], &[0.6, 0.8], TOL).unwrap());
        assert!(classify_hyperplane(&[H, -H], &[0.0, 0.0], TOL).unwrap());
        assert!(classify_hyperplane(&[-H, 0.0, H], &[0.0, 0.0], TOL).unwrap());
        assert!(!classify_hyperplane(&[1.0, 0.0], &[0.0, 0.0], TOL).unwrap());
        assert!(!classify_hyperplane(&[0.5, -0.5], &[0.5, 0.5], TOL).unwrap());
        assert!(!classify_hyperplane(&[H, H], &[0.0, 0.0], TOL).unwrap());
        assert!(matches!(
            classify_hyperplane(&[1.0], &[0.0, 0.0], TOL),
            Err(Error::ClassificationNotApplicable { .. })
        ));
        assert!(matches!(
            classify_hyperplane(&[1.0, 1.0], &[0.0, 0.0], TOL),
            Err(Error::NonUnitNormal { .. })
        ));
    }

    #[test]
    fn generator_condition_on_orthant() {
        let e = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(hyperplane_generator_condition(&[H, -H], &e, &e, TOL).unwrap());
        assert!(hyperplane_generator_condition(&[1.0, 0.0], &e, &e, TOL).unwrap());
        assert!(!hyperplane_generator_condition(&[H, H], &e, &e, TOL).unwrap());
        assert!(matches!(
            hyperplane_generator_condition(&[1.0, 0.0], &[], &e, TOL),
            Err(Error::EmptyGenerators)
        ));
    }

    #[test]
    fn generator_condition_matches_pattern_for_q1() {
        let gens = crate::cone::generators_q1(2).unwrap();
        let k: Vec<Vec<f64>> = gens.cone.iter().map(|g| g.as_slice().to_vec()).collect();
        let ks: Vec<Vec<f64>> = gens.dual.iter().map(|g| g.as_slice().to_vec()).collect();
        assert!(hyperplane_generator_condition(&[H, -H, 0.0], &k, &ks, TOL).unwrap());
        assert!(hyperplane_generator_condition(&[0.0, 0.0, 1.0], &k, &ks, TOL).unwrap());
        assert!(!hyperplane_generator_condition(&[1.0, 0.0, 0.0], &k, &ks, TOL).unwrap());
    }

    #[test]
    fn isotonicity_sampling() {
        let id = AffineMap::identity(4);
        assert!(test_isotonicity(&id, 2, 2, 2000, 1, TOL).unwrap().passed());

        let neg = Negated(AffineMap::identity(2));
        let r = test_isotonicity(&neg, 1, 1, 1000, 1, TOL).unwrap();
        assert!(r.violations.len() > 950, "{}", r.violations.len());

        let wrong_dim = FnMap::new(3, |z: &[f64]| z.to_vec());
        assert!(test_isotonicity(&wrong_dim, 2, 2, 10, 1, TOL).is_err());
    }
}
