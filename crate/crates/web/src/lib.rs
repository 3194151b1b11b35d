//! Browser bindings for the `elcone` demo page.
//!
//! Every export returns a JSON string; errors become `{"error": "..."}`.
//! The plain functions are usable (and tested) outside the browser.

use elcone::solver::{in_gamma, in_omega};
use elcone::{contains_l, contains_m, example, leq, project, ConeSpec, Point, SolveOptions, Tolerance};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const TOL: Tolerance = Tolerance::DEFAULT;

/// Picard trace of the built-in problem from `start = (x_1, x_2, u_1, u_2)`.
pub fn picard_trace(start: &[f64], max_iter: usize) -> Result<Value, String> {
    let problem = example::problem();
    let z0 = problem.point(start.to_vec()).map_err(|e| e.to_string())?;
    let opts = SolveOptions {
        max_iter,
        trace: true,
        ..SolveOptions::default()
    };
    let report = elcone::solve(&problem, &z0, &opts).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = report
        .trace
        .iter()
        .map(|r| json!({ "n": r.n, "z": r.z.as_slice(), "residual": r.residual }))
        .collect();
    Ok(json!({
        "start_in_omega": in_omega(&problem, &z0, TOL).map_err(|e| e.to_string())?,
        "start_in_gamma": in_gamma(&problem, &z0, TOL).map_err(|e| e.to_string())?,
        "termination": report.termination.as_str(),
        "iterations": report.iterations,
        "residual": report.residual,
        "direction": report.direction.map(|d| d.as_str()),
        "monotone": report.monotone_certificate,
        "below_start": leq(&report.solution, &z0, TOL).map_err(|e| e.to_string())?,
        "solution": report.solution.as_slice(),
        "rows": rows,
    }))
}

fn plane_cone(name: &str) -> Result<ConeSpec, String> {
    match name {
        "orthant" => Ok(ConeSpec::Orthant { dim: 2 }),
        "second_order" => Ok(ConeSpec::SecondOrder { dim: 2 }),
        "builtin" => Ok(example::cone()),
        other => Err(format!("unknown cone `{other}`")),
    }
}

/// Boundary rays of the plane cones, for drawing.
fn plane_rays(name: &str) -> [[f64; 2]; 2] {
    match name {
        "orthant" => [[1.0, 0.0], [0.0, 1.0]],
        "second_order" => [[-1.0, 1.0], [1.0, 1.0]],
        _ => [[0.0, 1.0], [1.0, 1.0]],
    }
}

/// Projection of `(v_1, v_2)` onto a cone in the plane.
pub fn plane_projection(cone: &str, v1: f64, v2: f64) -> Result<Value, String> {
    let spec = plane_cone(cone)?;
    let res = project(&spec, &[v1, v2], TOL).map_err(|e| e.to_string())?;
    Ok(json!({
        "point": res.point,
        "distance": res.distance,
        "active_set": res.active_set,
        "rays": plane_rays(cone),
    }))
}

/// Membership of `(x_1, x_2, u)` with `|u| = u_norm` on an `n x n` grid over
/// `[-half_width, half_width]^2` in the `x` plane: 2 in `L`, 1 in `M` only,
/// 0 in neither. Rows run from the top (`x_2` largest) down.
pub fn membership_slice(u_norm: f64, half_width: f64, n: usize) -> Result<Value, String> {
    if !(u_norm.is_finite() && half_width.is_finite() && half_width > 0.0) || !(2..=400).contains(&n) {
        return Err("need finite u_norm, half_width > 0 and 2 <= n <= 400".into());
    }
    let step = 2.0 * half_width / (n - 1) as f64;
    let mut cells = Vec::with_capacity(n * n);
    let (mut in_l, mut in_m) = (0usize, 0usize);
    for row in 0..n {
        let x2 = half_width - row as f64 * step;
        for col in 0..n {
            let x1 = -half_width + col as f64 * step;
            let z = Point::new(vec![x1, x2], vec![u_norm]).map_err(|e| e.to_string())?;
            let code = if contains_l(&z, TOL) {
                2u8
            } else {
                u8::from(contains_m(&z, TOL))
            };
            in_l += usize::from(code == 2);
            in_m += usize::from(code >= 1);
            cells.push(code);
        }
    }
    Ok(json!({ "n": n, "half_width": half_width, "cells": cells, "in_l": in_l, "in_m": in_m }))
}

fn to_json(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn trace(start: &[f64], max_iter: u32) -> String {
    to_json(picard_trace(start, max_iter as usize))
}

#[wasm_bindgen]
pub fn projection(cone: &str, v1: f64, v2: f64) -> String {
    to_json(plane_projection(cone, v1, v2))
}

#[wasm_bindgen]
pub fn membership(u_norm: f64, half_width: f64, n: u32) -> String {
    to_json(membership_slice(u_norm, half_width, n as usize))
}
