//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn combine(gens: &[Vec<f64>], lambda: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m];
    for (g, l) in gens.iter().zip(lambda) {
        for (ci, gi) in c.iter_mut().zip(g) {
            *ci += l * gi;
        }
    }
    c
}

fn grid_points(center: &[f64], radius: f64, step: f64, upper: f64) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = center
        .iter()
        .map(|&c| {
            let lo = (c - radius).max(0.0);
            let hi = (c + radius).min(upper);
            let n = ((hi - lo) / step).round() as usize;
            (0..=n).map(|i| lo + i as f64 * step).collect()
        })
        .collect();
    let mut out = vec![vec![]];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&t| {
                    let mut p = prefix.clone();
                    p.push(t);
                    p
                })
            })
            .collect();
    }
    out
}

/// Brute-force projection onto `cone{g^1, ..., g^k}` for linearly independent
/// unit generators: grid search over coefficients `lambda >= 0` with step 0.1,
/// then repeated local refinement down to a step below `1e-4`. Every grid
/// point is feasible and each face `lambda_k = 0` is on the grid.
pub fn grid_projection(gens: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let m = v.len();
    let k = gens.len();
    let g = DMatrix::from_fn(m, k, |i, j| gens[j][i]);
    let pinv = g.clone().pseudo_inverse(1e-12).expect("generator matrix");
    let upper = pinv.norm() * norm(v) + 0.2;
    let objective = |l: &[f64]| dist(&combine(gens, l, m), v);

    let mut step = 0.1;
    let mut best: Vec<f64> = grid_points(&vec![upper / 2.0; k], upper / 2.0 + step, step, upper)
        .into_iter()
        .min_by(|a, b| objective(a).total_cmp(&objective(b)))
        .expect("nonempty grid");
    while step > 1e-4 {
        loop {
            let cand = grid_points(&best, 2.0 * step, step, f64::INFINITY)
                .into_iter()
                .min_by(|a, b| objective(a).total_cmp(&objective(b)))
                .expect("nonempty grid");
            if objective(&cand) < objective(&best) {
                best = cand;
            } else {
                break;
            }
        }
        step /= 4.0;
    }
    combine(gens, &best, m)
}

/// Unit generators of `{u : <n^j, u> <= 0}` for `m` independent normals in
/// `R^m`: the columns of `-N^{-1}`.
pub fn simplicial_generators(normals: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = normals.len();
    let n = DMatrix::from_fn(m, m, |i, j| normals[i][j]);
    let inv = n.try_inverse().expect("independent normals");
    (0..m)
        .map(|j| {
            let col: Vec<f64> = (0..m).map(|i| -inv[(i, j)]).collect();
            let l = norm(&col);
            col.into_iter().map(|t| t / l).collect()
        })
        .collect()
}

/// `c` members sampled on the arc between two unit generators of a cone in
/// `R^2`, used as a brute-force dual test: `y` is in `C*` iff `<y, c> >= 0`
/// for all of them.
pub fn arc_samples(a: &[f64], b: &[f64], count: usize) -> Vec<Vec<f64>> {
    (0..=count)
        .map(|i| {
            let t = i as f64 / count as f64;
            vec![(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]]
        })
        .collect()
}

/// Hand-written `G` and `H` of the built-in problem.
pub fn builtin_blocks(z: &[f64]) -> ([f64; 2], [f64; 2]) {
    let nu = (z[2] * z[2] + z[3] * z[3]).sqrt();
    let f1 = (z[0] + nu + 12.0) / 12.0;
    let f2 = (z[1] + nu - 7.2) / 12.0;
    let g = [z[0] - f1 - f2, z[1] - f1 - f2];
    let h = [z[2] - f1 / 6.0 - f2 / 3.0, z[3] - f1 / 3.0 - f2 / 6.0];
    (g, h)
}
