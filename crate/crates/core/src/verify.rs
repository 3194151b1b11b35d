//! Seeded property suites: duality of `L`, isotonicity of projections,
//! hyperplane classification and isotone combinations.
//!
//! Every suite returns a [`SuiteReport`] of named checks together with the
//! seed it ran under.

use serde::Serialize;

use crate::cone::{contains_l, contains_m, generators_q1, l_slack, ConeSpec, Point, Tolerance};
use crate::error::{Error, Result};
use crate::isotone::{
    build_combination, classify_hyperplane, hyperplane_generator_condition, hyperplane_pattern, ordered_pairs,
    test_isotonicity, violations_on_pairs, CombinationTerm, IsotoneCombination, Monotone1d, MonotoneScalarFn,
};
use crate::linalg::{dist, dot, norm, sub};
use crate::map::{FnMap, Mapping, Negated};
use crate::projection::{project, project_product};
use crate::sampling;
use crate::solver::{check_start, in_gamma, in_omega, micp_certificate, picard_step, residual, Problem};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckLine {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// An extreme ray of `L`. The first `p` draws are the rays `(e^i, 0)`; the
/// rest are `(e, w)` with `w` uniform on the unit sphere.
fn extreme_rays(p: usize, q: usize, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|k| {
            let data = if k < p {
                let mut d = vec![0.0; p + q];
                d[k] = 1.0;
                d
            } else {
                let mut d = vec![1.0; p];
                d.extend(sampling::unit_vector(&mut rng, q));
                d
            };
            Point::from_flat(p, q, data).expect("p, q >= 1")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityOutcome {
    pub points: usize,
    pub members: usize,
    pub in_m: usize,
    pub disagreements: usize,
    /// Up to five disagreeing points with `<x, e> - ||u||` at each.
    pub witnesses: Vec<(Vec<f64>, f64)>,
}

/// Compares [`contains_m`] with `<z, w> >= -eps` over `members` sampled
/// `L`-members, on `points` standard normal test points. For `q = 1` the
/// members are the exact generators of `L`.
pub fn duality_agreement(
    p: usize,
    q: usize,
    points: usize,
    members: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<DualityOutcome> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidSplit { p, q });
    }
    let rays = if q == 1 {
        generators_q1(p)?.cone
    } else {
        extreme_rays(p, q, members, sampling::shard_seed(seed, 1))
    };
    let mut rng = sampling::rng(sampling::shard_seed(seed, 0));
    let mut out = DualityOutcome {
        points,
        members: rays.len(),
        in_m: 0,
        disagreements: 0,
        witnesses: Vec::new(),
    };
    for _ in 0..points {
        let z = sampling::normal_point(&mut rng, p, q);
        let oracle = contains_m(&z, tol);
        let sampled = rays.iter().all(|w| dot(z.as_slice(), w.as_slice()) >= -tol.eps());
        out.in_m += usize::from(oracle);
        if oracle != sampled {
            out.disagreements += 1;
            if out.witnesses.len() < 5 {
                let gap = z.x().iter().sum::<f64>() - norm(z.u());
                out.witnesses.push((z.as_slice().to_vec(), gap));
            }
        }
    }
    Ok(out)
}

pub fn duality_suite(p: usize, q: usize, points: usize, members: usize, seed: u64, tol: Tolerance) -> Result<SuiteReport> {
    let agreement = duality_agreement(p, q, points, members, seed, tol)?;
    let mut checks = vec![CheckLine::new(
        "contains_m agrees with sampled dual",
        agreement.disagreements == 0,
        format!(
            "{} points, {} members, {} in M, {} disagreements",
            agreement.points, agreement.members, agreement.in_m, agreement.disagreements
        ),
    )];

    let mut rng = sampling::rng(sampling::shard_seed(seed, 2));
    let sample: Vec<Point> = (0..points).map(|_| sampling::l_member(&mut rng, p, q)).collect();
    let outside = sample.iter().filter(|z| !contains_m(z, tol)).count();
    checks.push(CheckLine::new(
        "L is contained in M",
        outside == 0,
        format!("{outside} of {points} L-members outside M"),
    ));

    if p == 1 {
        let mut rng = sampling::rng(sampling::shard_seed(seed, 3));
        let differ = (0..points)
            .filter(|_| {
                let z = sampling::normal_point(&mut rng, p, q);
                contains_l(&z, tol) != contains_m(&z, tol)
            })
            .count();
        checks.push(CheckLine::new(
            "L equals M for p = 1",
            differ == 0,
            format!("{differ} of {points} points classified differently"),
        ));
    } else {
        // (e^1, unit) lies in M but x_2 = 0 < 1 = ||u||
        let mut data = vec![0.0; p + q];
        data[0] = 1.0;
        data[p] = 1.0;
        let w = Point::from_flat(p, q, data)?;
        let strict = contains_m(&w, tol) && !contains_l(&w, tol);
        checks.push(CheckLine::new(
            "L is a proper subset of M for p > 1",
            strict,
            format!("witness {:?}", w.as_slice()),
        ));
    }
    Ok(SuiteReport {
        suite: format!("duality p={p} q={q}"),
        seed,
        checks,
    })
}

/// `{0 <= u_1 <= ... <= u_q}`; for `q = 2` the cone of the built-in problem.
pub fn chain_cone(q: usize) -> ConeSpec {
    let mut normals = Vec::with_capacity(q);
    for i in 0..q.saturating_sub(1) {
        let mut n = vec![0.0; q];
        n[i] = 1.0;
        n[i + 1] = -1.0;
        normals.push(n);
    }
    let mut n = vec![0.0; q];
    n[0] = -1.0;
    normals.push(n);
    ConeSpec::Halfspaces { normals }
}

fn product_map(p: usize, inner: ConeSpec, tol: Tolerance) -> impl Mapping {
    let q = inner.dim();
    FnMap::new(p + q, move |z: &[f64]| {
        project_product(&z[..p], &z[p..], &inner, tol)
            .map(Point::into_vec)
            .unwrap_or_else(|_| vec![f64::NAN; z.len()])
    })
}

/// Number of sampled pairs `z1 <=_L z2` whose projections onto
/// `R^p x inner` are not ordered.
pub fn projection_isotonicity(p: usize, inner: &ConeSpec, samples: usize, seed: u64, tol: Tolerance) -> Result<usize> {
    inner.validate(tol)?;
    let q = inner.dim();
    let pairs = ordered_pairs(p, q, samples, seed);
    Ok(violations_on_pairs(&product_map(p, inner.clone(), tol), &pairs, tol)?.len())
}

/// Idempotence, nonexpansiveness and the obtuse-angle property of `P_C` on
/// `samples` seeded points, plus isotonicity of the product projection.
pub fn projection_checks(p: usize, inner: &ConeSpec, samples: usize, seed: u64, tol: Tolerance) -> Result<Vec<CheckLine>> {
    let q = inner.dim();
    let label = cone_label(inner);
    let mut rng = sampling::rng(sampling::shard_seed(seed, 10));
    let (mut idem, mut expand, mut obtuse) = (0usize, 0usize, 0usize);
    let mut worst_obtuse = f64::NEG_INFINITY;
    for _ in 0..samples {
        let v = sampling::normal_vec(&mut rng, q);
        let w = sampling::normal_vec(&mut rng, q);
        let c = project(inner, &sampling::normal_vec(&mut rng, q), tol)?.point;
        let pv = project(inner, &v, tol)?.point;
        let pw = project(inner, &w, tol)?.point;
        let scale = 1.0 + norm(&v);
        if dist(&project(inner, &pv, tol)?.point, &pv) > tol.eps() * scale {
            idem += 1;
        }
        if dist(&pv, &pw) > dist(&v, &w) + tol.eps() * scale {
            expand += 1;
        }
        let angle = dot(&sub(&v, &pv), &sub(&c, &pv));
        worst_obtuse = worst_obtuse.max(angle);
        if angle > tol.eps() * scale * (1.0 + norm(&c)) {
            obtuse += 1;
        }
    }
    let iso = projection_isotonicity(p, inner, samples, sampling::shard_seed(seed, 11), tol)?;
    Ok(vec![
        CheckLine::new(format!("{label}: idempotence"), idem == 0, format!("{idem} of {samples} violations")),
        CheckLine::new(
            format!("{label}: nonexpansive"),
            expand == 0,
            format!("{expand} of {samples} violations"),
        ),
        CheckLine::new(
            format!("{label}: obtuse angle"),
            obtuse == 0,
            format!("{obtuse} of {samples} violations, max <v - Pv, c - Pv> = {worst_obtuse:.3e}"),
        ),
        CheckLine::new(
            format!("{label}: product projection is L-isotone (p = {p})"),
            iso == 0,
            format!("{iso} of {samples} ordered pairs broken"),
        ),
    ])
}

fn cone_label(c: &ConeSpec) -> String {
    match c {
        ConeSpec::Orthant { dim } => format!("orthant R^{dim}_+"),
        ConeSpec::SecondOrder { dim } => format!("second-order cone in R^{dim}"),
        ConeSpec::Halfspaces { normals } => format!("{} halfspaces in R^{}", normals.len(), c.dim()),
        ConeSpec::Generated { generators } => format!("cone of {} generators in R^{}", generators.len(), c.dim()),
        ConeSpec::Hyperplane { normal } => format!("hyperplane in R^{}", normal.len()),
        ConeSpec::Product { p, inner } => format!("R^{p} x ({})", cone_label(inner)),
    }
}

/// The suite runs on `C` = orthant, second-order cone and the chain cone
/// `{0 <= u_1 <= ... <= u_q}`. The second-order cone needs `q >= 2`.
pub fn projection_suite(p: usize, q: usize, samples: usize, seed: u64, tol: Tolerance) -> Result<SuiteReport> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidSplit { p, q });
    }
    let mut cones = vec![ConeSpec::Orthant { dim: q }];
    if q >= 2 {
        cones.push(ConeSpec::SecondOrder { dim: q });
    }
    cones.push(chain_cone(q));
    let mut checks = Vec::new();
    for (i, c) in cones.iter().enumerate() {
        checks.extend(projection_checks(p, c, samples, sampling::shard_seed(seed, 20 + i as u64), tol)?);
    }
    Ok(SuiteReport {
        suite: format!("projection p={p} q={q}"),
        seed,
        checks,
    })
}

/// Projection onto the hyperplane through the origin with unit normal `g`.
pub fn hyperplane_map(g: Vec<f64>) -> impl Mapping {
    FnMap::new(g.len(), move |z: &[f64]| {
        let t = dot(&g, z);
        z.iter().zip(&g).map(|(zi, gi)| zi - t * gi).collect()
    })
}

/// Normals of the isotone hyperplanes: `(0, u)` for a few unit `u` and every
/// `(e^i - e^j) / sqrt 2` with `u = 0`.
pub fn patterned_normals(p: usize, q: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::new();
    for k in 0..q {
        let mut g = vec![0.0; p + q];
        g[p + k] = 1.0;
        out.push(g);
    }
    for _ in 0..3 {
        let mut g = vec![0.0; p];
        g.extend(sampling::unit_vector(&mut rng, q));
        out.push(g);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..p {
        for j in 0..p {
            if i != j {
                let mut g = vec![0.0; p + q];
                g[i] = h;
                g[j] = -h;
                out.push(g);
            }
        }
    }
    out
}

/// For `p, q >= 2`: patterned normals must pass the sampled isotonicity test
/// and random unit normals must fail it, with the classification agreeing
/// throughout. For `q = 1`: the generator-pair condition must agree with the
/// normal pattern on patterned and random normals.
pub fn hyperplane_suite(
    p: usize,
    q: usize,
    normals: usize,
    samples: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<SuiteReport> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidSplit { p, q });
    }
    let patterned = patterned_normals(p, q, sampling::shard_seed(seed, 30));
    let mut rng = sampling::rng(sampling::shard_seed(seed, 31));
    let random: Vec<Vec<f64>> = (0..normals).map(|_| sampling::unit_vector(&mut rng, p + q)).collect();
    let mut checks = Vec::new();
    if q == 1 {
        let gens = generators_q1(p)?;
        let cone: Vec<Vec<f64>> = gens.cone.iter().map(|g| g.as_slice().to_vec()).collect();
        let dual: Vec<Vec<f64>> = gens.dual.iter().map(|g| g.as_slice().to_vec()).collect();
        let mut disagree = 0;
        let mut accepted = 0;
        for g in patterned.iter().chain(&random) {
            let by_gens = hyperplane_generator_condition(g, &cone, &dual, tol)?;
            let by_pattern = hyperplane_pattern(&g[..p], &g[p..], tol)?;
            accepted += usize::from(by_gens);
            disagree += usize::from(by_gens != by_pattern);
        }
        let total = patterned.len() + random.len();
        checks.push(CheckLine::new(
            "generator condition agrees with the normal pattern",
            disagree == 0,
            format!("{total} normals, {accepted} isotone, {disagree} disagreements"),
        ));
    } else {
        let mut failed_patterned = 0;
        let mut misclassified = 0;
        for (k, g) in patterned.iter().enumerate() {
            let rep = test_isotonicity(
                &hyperplane_map(g.clone()),
                p,
                q,
                samples,
                sampling::shard_seed(seed, 100 + k as u64),
                tol,
            )?;
            failed_patterned += usize::from(!rep.passed());
            misclassified += usize::from(!classify_for(p, g, tol)?.unwrap_or(true));
        }
        checks.push(CheckLine::new(
            "patterned normals pass",
            failed_patterned == 0,
            format!("{failed_patterned} of {} patterned normals refuted", patterned.len()),
        ));
        let mut survived = 0;
        for (k, g) in random.iter().enumerate() {
            let rep = test_isotonicity(
                &hyperplane_map(g.clone()),
                p,
                q,
                samples,
                sampling::shard_seed(seed, 10_000 + k as u64),
                tol,
            )?;
            survived += usize::from(rep.passed());
            misclassified += usize::from(classify_for(p, g, tol)?.unwrap_or(false));
        }
        checks.push(CheckLine::new(
            "random normals fail",
            survived == 0,
            format!("{survived} of {} random normals not refuted", random.len()),
        ));
        checks.push(CheckLine::new(
            "classification agrees with sampling",
            misclassified == 0,
            format!("{misclassified} misclassified"),
        ));
    }
    Ok(SuiteReport {
        suite: format!("hyperplane p={p} q={q}"),
        seed,
        checks,
    })
}

fn classify_for(p: usize, g: &[f64], tol: Tolerance) -> Result<Option<bool>> {
    match classify_hyperplane(&g[..p], &g[p..], tol) {
        Ok(b) => Ok(Some(b)),
        Err(Error::ClassificationNotApplicable { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A random isotone combination: Lorentz-affine terms, one of them composed
/// with `arctan`, with random weights in `L`.
pub fn random_combination(p: usize, q: usize, terms: usize, seed: u64) -> IsotoneCombination {
    let mut rng = sampling::rng(seed);
    let terms = (0..terms)
        .map(|k| {
            let d: Vec<f64> = sampling::normal_vec(&mut rng, p).iter().map(|t| t.abs()).collect();
            let sum: f64 = d.iter().sum();
            let beta = sum * (2.0 * rand::Rng::random::<f64>(&mut rng) - 1.0);
            let gamma = sampling::normal_vec(&mut rng, 1)[0];
            let base = MonotoneScalarFn::LorentzAffine { d, beta, gamma };
            let f = if k % 2 == 1 {
                MonotoneScalarFn::Composed {
                    inner: Box::new(base),
                    psi: Monotone1d::Arctan,
                }
            } else {
                base
            };
            CombinationTerm {
                f,
                weight: sampling::l_member(&mut rng, p, q).into_vec(),
            }
        })
        .collect();
    IsotoneCombination { p, q, terms }
}

pub fn isotone_suite(p: usize, q: usize, samples: usize, seed: u64, tol: Tolerance) -> Result<SuiteReport> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidSplit { p, q });
    }
    let comb = random_combination(p, q, 3, sampling::shard_seed(seed, 40));
    let map = build_combination(&comb, tol)?;
    let rep = test_isotonicity(&map, p, q, samples, sampling::shard_seed(seed, 41), tol)?;
    let mut checks = vec![CheckLine::new(
        "random isotone combination is L-isotone",
        rep.passed(),
        format!("{} of {samples} ordered pairs broken", rep.violations.len()),
    )];
    let neg = test_isotonicity(&Negated(map), p, q, samples, sampling::shard_seed(seed, 42), tol)?;
    checks.push(CheckLine::new(
        "its negation is refuted",
        !neg.passed(),
        format!("{} of {samples} ordered pairs broken", neg.violations.len()),
    ));
    Ok(SuiteReport {
        suite: format!("isotone p={p} q={q}"),
        seed,
        checks,
    })
}

/// Membership of `z` in `Omega` and in `Gamma`, with `G`, `H`, the Picard
/// image and the complementarity conditions in the details.
pub fn point_checks(problem: &Problem, z: &Point, tol: Tolerance) -> Result<Vec<CheckLine>> {
    let (g, h) = problem.blocks(z)?;
    let f = problem.eval(z)?;
    let image = picard_step(problem, z)?;
    let cert = micp_certificate(problem, z, tol)?;
    Ok(vec![
        CheckLine::new(
            "in Omega",
            in_omega(problem, z, tol)?,
            format!(
                "in K {}, in L {}, G = {g:?}, H = {h:?}, L-slack of F {:.6e}",
                problem.in_k(z, tol)?,
                contains_l(z, tol),
                l_slack(&f)
            ),
        ),
        CheckLine::new(
            "in Gamma",
            in_gamma(problem, z, tol)?,
            format!(
                "Picard image {:?}, residual {:.3e}, |G|_inf {:.3e}, <u, H> {:.3e}",
                image.as_slice(),
                residual(problem, z)?,
                cert.g_inf,
                cert.complementarity
            ),
        ),
    ])
}

/// Sampled `L`-isotonicity of `T = I - F`, the start condition and the
/// isotonicity of the projection onto `K`.
pub fn problem_checks(problem: &Problem, z0: &Point, samples: usize, seed: u64, tol: Tolerance) -> Result<Vec<CheckLine>> {
    let (p, q) = (problem.p(), problem.q());
    let f = problem.map().clone();
    let t = FnMap::new(p + q, move |z: &[f64]| {
        let fz = f.apply(z);
        z.iter().zip(&fz).map(|(a, b)| a - b).collect()
    });
    let iso = test_isotonicity(&t, p, q, samples, sampling::shard_seed(seed, 50), tol)?;
    let worst = iso.violations.iter().map(|v| v.slack).fold(0.0, f64::min);
    let start = check_start(problem, z0, tol)?;
    let proj = projection_isotonicity(p, problem.cone(), samples, sampling::shard_seed(seed, 51), tol)?;
    Ok(vec![
        CheckLine::new(
            "I - F is L-isotone (sampled)",
            iso.passed(),
            if iso.passed() {
                format!("0 of {samples} ordered pairs broken")
            } else {
                let v = &iso.violations[0];
                format!(
                    "{} of {samples} ordered pairs broken, worst slack {worst:.3e}; witness z1 = {:?}, z2 = {:?}",
                    iso.violations.len(),
                    v.z1.as_slice(),
                    v.z2.as_slice()
                )
            },
        ),
        CheckLine::new(
            "start satisfies z0 <=_L P_K(z0 - F(z0))",
            start.ordered,
            format!(
                "z0 = {:?}, z1 = {:?}, slack {:.3e}, z0 in K {}, -F(z0) in L {}",
                z0.as_slice(),
                start.first_iterate.as_slice(),
                start.slack,
                start.in_k,
                start.minus_f_in_l
            ),
        ),
        CheckLine::new(
            "projection onto K is L-isotone (sampled)",
            proj == 0,
            format!("{proj} of {samples} ordered pairs broken"),
        ),
    ])
}
